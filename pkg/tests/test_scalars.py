import cmath
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from kirillov_lab.scalars import (AmbiguousValuation, CharacterSpec, EmbeddingOracle, FieldParams,
                                  Inconsistent, Scalar, TrivialCharacter, default_oracle,
                                  gauss_sum, solve_linear, tame_characters, valuation, vp)

from conftest import to_complex, vp_int

CONDUCTORS = [1, 3, 4, 5, 8, 12, 15, 20, 25]


def scalars(m_choices=CONDUCTORS, nonzero=False):
    @st.composite
    def build(draw):
        m = draw(st.sampled_from(m_choices))
        e = draw(st.dictionaries(st.integers(0, m - 1),
                                 st.fractions(min_value=-20, max_value=20, max_denominator=30),
                                 min_size=1, max_size=4))
        x = Scalar.from_exponents(m, e)
        if nonzero and not x:
            x = Scalar.rational(1)
        return x
    return build()


# -- valuations -------------------------------------------------------------

def test_rational_valuations():
    o = default_oracle(5)
    assert valuation(Scalar.rational(50), o) == 2
    assert valuation(Scalar.rational(Fraction(3, 5)), o) == -1
    assert valuation(Scalar.rational(0), o) == float("inf")
    assert vp(Fraction(7, 125), 5) == -3


def test_zeta4_minus_2_at_5():
    # Teichmuller lift of 2 mod 25 is 2^5 = 32 = 7, and v(7 - 2) = 1
    assert pow(2, 5, 25) == 7
    x = Scalar.zeta(4) - Scalar.rational(2)
    assert valuation(x, default_oracle(5)) == 1
    assert default_oracle(5).root(4, 2) == 7


def _teichmuller(a: int, p: int, k: int) -> int:
    mod = p ** k
    t = a % mod
    for _ in range(k + 1):
        t = pow(t, p, mod)
    return t


@pytest.mark.parametrize("p,d", [(7, 3), (7, 6), (13, 4), (13, 12), (11, 5)])
def test_valuation_matches_independent_teichmuller(p, d):
    """Elements of Q(zeta_d), d | p-1, valued by direct substitution of an independently lifted root."""
    g = sympy.primitive_root(p)
    K = 30
    root = pow(_teichmuller(g, p, K), (p - 1) // d, p ** K)
    rng = random.Random(p * 100 + d)
    o = default_oracle(p)
    for _ in range(30):
        coeffs = {e: rng.randint(-30, 30) for e in range(rng.randint(1, d))}
        # force a high valuation sometimes by subtracting the integer image
        x = Scalar.from_exponents(d, coeffs)
        if not x:
            continue
        img = sum(c * pow(root, e, p ** K) for e, c in coeffs.items()) % p ** K
        if rng.random() < 0.4:
            shift = img % p ** rng.randint(1, 6)
            x = x - Scalar.rational(shift)
            img = (img - shift) % p ** K
        if img == 0:
            continue
        assert valuation(x, o) == vp_int(img, p)


@pytest.mark.parametrize("p,a", [(3, 1), (3, 2), (5, 1), (5, 2), (2, 3)])
def test_valuation_matches_norm_in_totally_ramified_field(p, a):
    """Q(zeta_(p^a)) has one prime over p, so v(x) = v_p(N(x)) / phi(p^a)."""
    m = p ** a
    z = sympy.Symbol("z")
    phi = sympy.cyclotomic_poly(m, z)
    deg = sympy.totient(m)
    rng = random.Random(m)
    o = default_oracle(p)
    for _ in range(25):
        coeffs = {e: rng.randint(-9, 9) for e in range(rng.randint(1, deg))}
        x = Scalar.from_exponents(m, coeffs)
        if not x:
            continue
        poly = sum(c * z ** e for e, c in coeffs.items())
        norm = sympy.Integer(sympy.resultant(phi, poly, z))
        expected = Fraction(vp_int(abs(int(norm)), p), int(deg))
        assert valuation(x, o) == expected


def test_precision_escalation_never_changes_a_valuation():
    rng = random.Random(7)
    low, high = EmbeddingOracle(13, precision=4), EmbeddingOracle(13, precision=8)
    for _ in range(60):
        m = rng.choice([3, 4, 12, 13, 39])
        x = Scalar.from_exponents(m, {rng.randrange(m): rng.randint(-20, 20) for _ in range(3)})
        if x:
            assert valuation(x, low) == valuation(x, high)


def test_ambiguous_valuation_past_the_cap():
    full = EmbeddingOracle(7)
    R = full.root(3, 40)
    r = R % 7 ** 20
    x = Scalar.zeta(3) - Scalar.rational(r)
    with pytest.raises(AmbiguousValuation):
        valuation(x, EmbeddingOracle(7, precision=2, cap=8))
    assert valuation(x, full) == vp_int(R - r, 7) >= 20


# -- arithmetic ---------------------------------------------------------------

@given(scalars(), scalars(), scalars())
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert x - x == Scalar.rational(0)


@given(scalars(nonzero=True))
def test_inverse(x):
    assert x * x.inverse() == Scalar.rational(1)


@given(scalars(), scalars())
def test_complex_embedding_is_a_ring_map(x, y):
    assert abs(to_complex(x * y) - to_complex(x) * to_complex(y)) < 1e-6
    assert abs(to_complex(x + y) - to_complex(x) - to_complex(y)) < 1e-6


def test_zeta_conventions():
    assert Scalar.zeta(6) == -Scalar.zeta(3, 2)
    assert Scalar.zeta(4) ** 2 == Scalar.rational(-1)
    assert Scalar.zeta(10, 5) == Scalar.rational(-1)
    assert abs(to_complex(Scalar.zeta(20, 3)) - cmath.exp(2j * cmath.pi * 3 / 20)) < 1e-9


def test_ultrametric_on_1000_pairs():
    rng = random.Random(99)
    o = default_oracle(5)
    for _ in range(1000):
        m = rng.choice([1, 4, 5, 20, 25])
        mk = lambda: Scalar.from_exponents(m, {rng.randrange(m): Fraction(rng.randint(-50, 50), rng.choice([1, 5, 25, 3]))
                                                for _ in range(rng.randint(1, 3))})
        x, y = mk(), mk()
        if not x or not y or not x + y:
            continue
        vx, vy, vs = valuation(x, o), valuation(y, o), valuation(x + y, o)
        assert vs >= min(vx, vy)
        if vx != vy:
            assert vs == min(vx, vy)


def test_unhashable_cyclotomic_but_hashable_rational():
    assert hash(Scalar.rational(3)) == hash(Scalar.rational(Fraction(6, 2)))
    with pytest.raises(TypeError):
        hash(Scalar.zeta(5))


# -- field parameters and characters -----------------------------------------

def test_field_params():
    assert FieldParams(5).q == 5
    with pytest.raises(ValueError, match="p must be prime"):
        FieldParams(4)
    with pytest.raises(ValueError):
        FieldParams(5, q=25)


@pytest.mark.parametrize("p,nu", [(3, 1), (5, 1), (5, 2), (2, 3), (3, 2)])
def test_characters_are_homomorphisms(p, nu):
    mod = p ** nu
    gens_count = 1 if p > 2 or nu <= 2 else 2
    for ks in ([1] * gens_count, [2] + [1] * (gens_count - 1)):
        try:
            eps = CharacterSpec.from_logs(p, nu, ks)
        except ValueError:
            continue
        units = [u for u in range(mod) if u % p]
        for a in units[:12]:
            for b in units[:12]:
                assert eps.value(a * b % mod) == eps.value(a) * eps.value(b)
        assert eps.conductor() == nu


def test_gauss_sum_needs_ramification():
    with pytest.raises(TrivialCharacter):
        gauss_sum(CharacterSpec.unramified(5))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_gauss_identity_and_complex_oracle(p):
    for eps in tame_characters(p):
        g, gi = gauss_sum(eps), gauss_sum(eps.inverse())
        assert g * gi == eps.value(p - 1) * p
        # independent complex evaluation of sum_u exp(2 pi i u / p) eps(u)
        direct = sum(cmath.exp(2j * cmath.pi * u / p) * to_complex(eps.value(u)) for u in range(1, p))
        assert abs(direct - to_complex(g)) < 1e-9
        assert abs(abs(direct) ** 2 - p) < 1e-9


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_gauss_valuations_follow_stickelberger(p):
    # v(sum psi(u/p) omega^k(u)) = (p-1-k)/(p-1) for the Teichmuller character omega
    o = default_oracle(p)
    for k in range(1, p - 1):
        eps = CharacterSpec.from_logs(p, 1, [k])
        assert valuation(gauss_sum(eps), o) + valuation(gauss_sum(eps.inverse()), o) == 1
    vals = sorted(valuation(gauss_sum(CharacterSpec.from_logs(p, 1, [k])), o) for k in range(1, p - 1))
    assert vals == sorted(Fraction(p - 1 - k, p - 1) for k in range(1, p - 1))


def test_quadratic_gauss_sums():
    q5 = CharacterSpec.from_logs(5, 1, [2])
    assert gauss_sum(q5) ** 2 == Scalar.rational(5)
    assert valuation(gauss_sum(q5), default_oracle(5)) == Fraction(1, 2)
    q3 = CharacterSpec.from_logs(3, 1, [1])
    assert gauss_sum(q3) ** 2 == Scalar.rational(-3)


# -- linear algebra -------------------------------------------------------------

def test_solve_linear_examples():
    one, zero = Scalar.rational(1), Scalar.rational(0)
    b = [Scalar.rational(3), Scalar.zeta(5)]
    x, ker = solve_linear([[one, zero], [zero, one]], b)
    assert x == b and ker == []
    x, ker = solve_linear([[zero]], [zero])
    assert len(ker) == 1 and ker[0][0]
    with pytest.raises(Inconsistent):
        solve_linear([[zero]], [one])


@pytest.mark.parametrize("seed", range(5))
def test_solve_linear_residual(seed):
    rng = random.Random(seed)
    A = [[Scalar.rational(rng.randint(-5, 5)) for _ in range(6)] for _ in range(4)]
    b = [Scalar.rational(rng.randint(-5, 5)) for _ in range(4)]
    x, ker = solve_linear(A, b)
    for row, bi in zip(A, b):
        assert sum((a * xi for a, xi in zip(row, x)), Scalar.rational(0)) == bi
    for k in ker:
        for row in A:
            assert not sum((a * xi for a, xi in zip(row, k)), Scalar.rational(0))
    assert len(ker) == 6 - sympy.Matrix([[int(a.to_fraction()) for a in r] for r in A]).rank()


def test_solve_linear_cyclotomic_residual():
    rng = random.Random(3)
    A = [[Scalar.from_exponents(20, {rng.randrange(20): rng.randint(-3, 3)}) for _ in range(4)] for _ in range(3)]
    b = [Scalar.zeta(4, rng.randrange(4)) for _ in range(3)]
    x, ker = solve_linear(A, b)
    for row, bi in zip(A, b):
        assert sum((a * xi for a, xi in zip(row, x)), Scalar.rational(0)) == bi
