import cmath
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from kirillov_lab.scalars import Scalar

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

# acceptance criterion -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


def to_complex(x: Scalar) -> complex:
    """Complex image under zeta_m -> exp(2 pi i / m); an oracle independent of the exact arithmetic."""
    z = cmath.exp(2j * cmath.pi / x.m)
    return sum(complex(Fraction(int(c.numerator), int(c.denominator))) * z ** i
               for i, c in enumerate(x.c))


def vp_int(x: int, p: int) -> int:
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


@pytest.fixture
def rng():
    import random

    return random.Random(12345)
