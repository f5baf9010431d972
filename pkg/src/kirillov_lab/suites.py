"""Self-checking suites for the identities the verifier relies on.

Each suite returns a :class:`SuiteResult`; the CLI runs them by name.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .kirillov import expand, expand_closed_form, random_coeffs, verify_two_step
from .scalars import Scalar, default_oracle, gauss_sum, tame_characters, valuation
from .symlat import (Disk, PolyVec, WeightParams, _formal_disk_coordinates, contains,
                     intersect_over_fiber, lattice_N, lattice_le, supnorm_on_disk)
from .wspace import (WElem, WFunction, convolve, in_C0, in_C1, pi_pullback, project_C0,
                     project_C1, psi, random_welem, suspend)

__all__ = ["SUITES", "SuiteResult", "fourier_sum", "random_wfunction", "run_suite"]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    failures: list[str] = field(default_factory=list)

    def line(self) -> str:
        return f"{self.name:<22} {'PASS' if self.passed else 'FAIL'}  ({self.cases} cases)"


def _result(name: str, cases: int, failures: list[str]) -> SuiteResult:
    return SuiteResult(name, not failures, cases, failures[:20])


def random_wfunction(p: int, rng: random.Random, *, size: int = 4, depth: int = 2) -> WFunction:
    """Random rational-valued function; biased towards C_1 and C_0 so both predicates get exercised."""
    f = WFunction(p, {random_welem(p, depth, rng): Scalar.rational(rng.randint(-3, 3))
                      for _ in range(size)})
    shape = rng.randrange(3)
    if shape == 0:
        return project_C1(f)
    if shape == 1:
        return project_C0(f)
    return f


def fourier_sum(f: WFunction, x: int) -> Scalar:
    """``sum_beta f(beta) psi(beta x)`` at an integer point ``x``."""
    acc = Scalar.rational(0)
    for beta, v in f.items():
        acc = acc + v * psi(WElem.of(beta.as_fraction() * x, f.p))
    return acc


def fourier_criteria(p: int = 5, trials: int = 200, seed: int = 0, **_) -> SuiteResult:
    """Membership in C_1 (resp. C_0) against vanishing of the Fourier sum on units (resp. on pi O)."""
    rng = random.Random(seed)
    fails = []
    for t in range(trials):
        f = random_wfunction(p, rng)
        K = max(f.max_depth(), 1)
        pts = range(p ** K)
        on_units = all(not fourier_sum(f, x) for x in pts if x % p)
        on_pi_O = all(not fourier_sum(f, x) for x in pts if x % p == 0)
        if in_C1(f) != on_units:
            fails.append(f"trial {t}: C_1 predicate {in_C1(f)} but unit vanishing {on_units}")
        if in_C0(f) != on_pi_O:
            fails.append(f"trial {t}: C_0 predicate {in_C0(f)} but pi O vanishing {on_pi_O}")
    return _result("fourier-criteria", trials, fails)


def lattice_identities(p: int = 5, n_values=(0, 1, 2, 3), l_range=(-3, 3), depth: int = 2,
                       **_) -> SuiteResult:
    """Fiber intersection, nesting along pi, and the n >= q sharpness witness."""
    fails = []
    cases = 0
    betas = sorted({WElem._reduce(a, depth, p) for a in range(p ** depth)}, key=lambda b: (b.k, b.a))
    for n in n_values:
        w = WeightParams(0, n)
        if n >= p:
            continue
        for l in range(l_range[0], l_range[1] + 1):
            for b in betas:
                cases += 1
                try:
                    intersect_over_fiber(l, b, w, verify=True)
                except AssertionError as exc:
                    fails.append(str(exc))
                if not lattice_le(lattice_N(l, b, w), lattice_N(l + 1, b.times_pi(), w)):
                    fails.append(f"N_{l}({b}) not inside N_{l + 1}({b.times_pi()}) for n={n}")
    for q in (2, 3, 5):
        cases += 1
        ok, detail = sharpness_witness(q)
        if not ok:
            fails.append(detail)
    return _result("lattice-identities", cases, fails)


def sharpness_witness(p: int) -> tuple[bool, str]:
    """``(u^p - u)/p`` is bounded by 1 on ``D_0(0)`` but has a non-integral basis coordinate."""
    n = p
    coeffs = [Scalar.rational(0)] * (n + 1)
    coeffs[1] = Scalar.rational(Fraction(-1, p))
    coeffs[p] = Scalar.rational(Fraction(1, p))
    P = PolyVec(coeffs)
    disk = Disk(0, WElem.zero(p))
    sup = supnorm_on_disk(P, disk)
    in_N = contains(lattice_N(0, WElem.zero(p), WeightParams(0, n), allow_large=True), P)
    coords = _formal_disk_coordinates(0, WElem.zero(p), P)
    low = min(valuation(c, default_oracle(p)) for c in coords if c)
    ok = sup >= 0 and in_N and low < 0
    return ok, f"p={p}: sup valuation {sup}, in N_0(0) {in_N}, min coordinate valuation {low}"


def _grid(p: int, n: int, m: int, regime: str):
    from .bsverify import bs_patterns, pattern_params

    out = []
    if regime == "degenerate":
        return [pattern_params(p, n, m, "degenerate")]
    for vlt in bs_patterns(n, "all"):
        try:
            out.append(pattern_params(p, n, m, regime, vlt))
        except ValueError:
            continue
    return out


def two_step_recursion(p: int = 5, n: int = 1, m: int = 0, trials: int = 100, seed: int = 0,
                       regime: str = "unramified", **_) -> SuiteResult:
    """Two-generation recursion and closed sums against the one-step recursion."""
    rng = random.Random(seed)
    fails = []
    grid = _grid(p, n, m, regime)
    cases = 0
    for t in range(trials):
        params = grid[t % len(grid)]
        c = random_coeffs(params, rng)
        table = expand(c, params, l_max=3)
        res = verify_two_step(table, params)
        cases += 1
        if not res:
            fails.append(f"trial {t}: two-step identity fails at l={res.level}, gamma={res.gamma}")
        closed = expand_closed_form(c, params, l_max=3)
        if any(table.C[l] != closed.C[l] for l in table.levels()):
            fails.append(f"trial {t}: closed form disagrees with recursion")
        if regime == "degenerate" and table.C2[table.k0]:
            fails.append(f"trial {t}: first double-primed row is nonzero")
    return _result("two-step-recursion" if regime != "degenerate" else "degenerate-recursion",
                   cases, fails)


def degenerate_recursion(**kw) -> SuiteResult:
    kw["regime"] = "degenerate"
    return two_step_recursion(**kw)


def tame_rewrite(p: int = 5, m: int = 0, trials: int = 100, seed: int = 0, **_) -> SuiteResult:
    """Rewritten one-step recursions through the twisted amplitudes."""
    from .bsverify import pattern_params

    rng = random.Random(seed)
    chars = tame_characters(p)
    fails = []
    for t in range(trials):
        eps = chars[t % len(chars)]
        params = pattern_params(p, 0, m, "tame", -(t % 2), eps=eps)
        c = random_coeffs(params, rng)
        table = expand(c, params, l_max=2)
        res = verify_two_step(table, params)
        if not res:
            fails.append(f"trial {t}: rewrite fails at l={res.level}, gamma={res.gamma}")
        closed = expand_closed_form(c, params, l_max=2)
        if any(table.C[l] != closed.C[l] or table.Ct[l] != closed.Ct[l] for l in table.levels()):
            fails.append(f"trial {t}: closed form disagrees with recursion")
    return _result("tame-rewrite", trials, fails)


def tame_projections(p: int = 5, trials: int = 100, seed: int = 0, **_) -> SuiteResult:
    """Complementary idempotents P_1, P_0 and the identities S E = 0, E E^-1 E = E."""
    rng = random.Random(seed)
    fails = []
    cases = 0
    for xi in tame_characters(p):
        inv = xi.inverse()
        for t in range(trials):
            f = random_wfunction(p, rng, size=5)
            cases += 1
            P1 = project_C1(f)
            P0 = convolve(xi, convolve(inv, f))
            checks = {
                "P1 idempotent": project_C1(P1) == P1,
                "P0 idempotent": convolve(xi, convolve(inv, P0)) == P0,
                "P0 + P1 = 1": P0 + P1 == f,
                "P0 symmetric": convolve(inv, convolve(xi, f)) == P0,
                "P1 P0 = 0": not project_C1(P0),
                "S E = 0": not suspend(convolve(xi, f)),
                "E E^-1 E = E": convolve(xi, convolve(inv, convolve(xi, f))) == convolve(xi, f),
                "P1 = Pi S / q": P1 == pi_pullback(suspend(f)).scale(Scalar.rational(Fraction(1, p))),
            }
            for name, ok in checks.items():
                if not ok:
                    fails.append(f"xi exponents {xi.exps[:2]}..., trial {t}: {name}")
    return _result("tame-projections", cases, fails)


def gauss_sums(primes=(3, 5, 7), **_) -> SuiteResult:
    """``g(eps) g(eps^-1) = eps(-1) q`` and complementary valuations summing to 1."""
    fails = []
    cases = 0
    for p in primes:
        oracle = default_oracle(p)
        for eps in tame_characters(p):
            cases += 1
            g, gi = gauss_sum(eps), gauss_sum(eps.inverse())
            if g * gi != eps.value(p - 1) * p:
                fails.append(f"p={p}: product identity fails for {eps.exps[:2]}...")
            if valuation(g, oracle) + valuation(gi, oracle) != 1:
                fails.append(f"p={p}: valuations do not sum to 1")
    return _result("gauss-sums", cases, fails)


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "fourier-criteria": fourier_criteria,
    "lattice-identities": lattice_identities,
    "two-step-recursion": two_step_recursion,
    "tame-projections": tame_projections,
    "tame-rewrite": tame_rewrite,
    "degenerate-recursion": degenerate_recursion,
    "gauss-sums": gauss_sums,
}


def run_suite(name: str, **kw) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](**kw)
