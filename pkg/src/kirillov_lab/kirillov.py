"""Kirillov-model functions given by generator coefficients, and their annulus expansions.

A function in the lattice ``Lambda`` is written as

    phi = sum_{k, beta} c'_k(beta) psi_beta(-pi^-k x) F'_k(x) + c''_k(beta) psi_beta(-pi^-k x) F''_k(x)

with ``c'_k(beta), c''_k(beta)`` in ``pi^(-k m) N_k(beta)``.  Expanding annulus by
annulus gives amplitudes ``C_l(beta)`` with

    phi = sum_l sum_beta C_l(beta) psi_beta(-pi^-l x) 1_{pi^l U}(x).

Three regimes are supported: ``unramified`` (``lambda != mu``),
``degenerate`` (``lambda == mu``, where ``F''`` picks up the factor ``k - l``),
and ``tame`` / ``wild`` (``chi_1`` ramified on units with conductor 1 / >= 2,
weight ``n = 0``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .scalars import (ONE, ZERO, CharacterSpec, EmbeddingOracle, FieldParams, Scalar,
                      default_oracle, gauss_sum, solve_linear, valuation, vp)
from .symlat import (PolyVec, WeightParams, act_tau, coordinate_margin, lattice_N, norm_margin,
                     _formal_disk_coordinates, _disk_basis)
from .wspace import WElem, WFunction, convolve, in_C1, psi, suspend

__all__ = [
    "AmplitudeTable",
    "GeneratorCoeffs",
    "HorizonExceeded",
    "InvalidCoeffs",
    "NonUnit",
    "RegimeMismatch",
    "RepParams",
    "TwoStepResult",
    "evaluate",
    "evaluate_generators",
    "expand",
    "expand_closed_form",
    "mirabolic_act",
    "random_coeffs",
    "solve_vanishing",
    "vanishes_outside_integers",
    "verify_tame_rewrite",
    "verify_two_step",
]

REGIMES = ("unramified", "tame", "wild", "degenerate")


class InvalidCoeffs(ValueError):
    def __init__(self, k: int, beta: WElem, part: str, margin):
        self.k, self.beta, self.part, self.margin = k, beta, part, margin
        super().__init__(
            f"c{part}_{k}({beta.as_fraction()}) is not in pi^(-k m) N_k(beta): "
            f"valuation short by {-margin}")


class RegimeMismatch(ValueError):
    pass


class NonUnit(ValueError):
    """``a`` does not split as ``pi^j`` times a unit of ``Z_(p)``."""


class HorizonExceeded(ValueError):
    pass


@dataclass(frozen=True)
class RepParams:
    """Principal series data: ``lam = chi_1(pi)``, ``mu = omega chi_2(pi)``, ``eps = chi_1|U``."""

    field: FieldParams
    weight: WeightParams
    regime: str
    lam: Scalar
    mu: Scalar
    eps: CharacterSpec | None = None
    check_irreducible: bool = True

    def __post_init__(self):
        lam, mu = self.lam, self.mu
        if not isinstance(lam, Scalar):
            object.__setattr__(self, "lam", lam := Scalar.rational(lam))
        if not isinstance(mu, Scalar):
            object.__setattr__(self, "mu", mu := Scalar.rational(mu))
        if self.regime not in REGIMES:
            raise RegimeMismatch(f"unknown regime {self.regime!r}")
        if not lam or not mu:
            raise RegimeMismatch("lambda and mu must be nonzero")
        q = Scalar.rational(self.field.q)
        ramified = self.eps is not None and self.eps.nu > 0
        if self.eps is not None and self.eps.p != self.field.p:
            raise RegimeMismatch("character and field disagree on p")
        if self.regime == "unramified":
            if ramified:
                raise RegimeMismatch("unramified regime takes no ramified character")
            if lam == mu:
                raise RegimeMismatch("lambda == mu is the degenerate regime")
        elif self.regime == "degenerate":
            if ramified:
                raise RegimeMismatch("degenerate regime is unramified")
            if lam != mu:
                raise RegimeMismatch("degenerate regime needs lambda == mu")
        else:
            if not ramified:
                raise RegimeMismatch(f"{self.regime} regime needs a ramified character")
            want = 1 if self.regime == "tame" else None
            if want is not None and self.eps.nu != want:
                raise RegimeMismatch("tame regime needs conductor 1")
            if self.regime == "wild" and self.eps.nu < 2:
                raise RegimeMismatch("wild regime needs conductor >= 2")
            if self.weight.n != 0:
                raise RegimeMismatch("ramified regimes need n = 0")
        if self.check_irreducible and self.regime != "degenerate" and not ramified:
            if lam == q * mu or mu == q * lam:
                raise RegimeMismatch("reducible: chi_1 / omega chi_2 = omega^(+-1)")

    @classmethod
    def make(cls, p: int, n: int, m: int, regime: str, lam, mu, eps: CharacterSpec | None = None,
             **kw) -> RepParams:
        return cls(FieldParams(p), WeightParams(m, n), regime, lam, mu, eps, **kw)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def n(self) -> int:
        return self.weight.n

    @property
    def m(self) -> int:
        return self.weight.m

    @property
    def ramified(self) -> bool:
        return self.regime in ("tame", "wild")

    @property
    def chi1(self) -> CharacterSpec:
        if self.eps is not None and self.eps.nu:
            return CharacterSpec(self.eps.p, self.eps.nu, self.eps.N, self.eps.exps, self.lam)
        return CharacterSpec(self.p, 0, 1, ((0, 0),), self.lam)

    @property
    def chi2(self) -> CharacterSpec:
        return CharacterSpec(self.p, 0, 1, ((0, 0),), self.mu * self.field.q)

    def oracle(self) -> EmbeddingOracle:
        return default_oracle(self.p)


# ---------------------------------------------------------------------------
# generator coefficients


Site = tuple[int, WElem]


@dataclass(frozen=True)
class GeneratorCoeffs:
    """``{(k, beta): (c', c'')}``; missing sites are zero."""

    n: int
    entries: Mapping[Site, tuple[PolyVec, PolyVec]]

    def __post_init__(self):
        clean = {}
        for (k, b), (c1, c2) in self.entries.items():
            if c1.n != self.n or c2.n != self.n:
                raise ValueError("coefficient degree does not match n")
            if c1 or c2:
                clean[(k, b)] = (c1, c2)
        object.__setattr__(self, "entries", dict(sorted(clean.items(), key=_site_key)))

    @property
    def k0(self) -> int | None:
        return min((k for k, _ in self.entries), default=None)

    @property
    def k_max(self) -> int | None:
        return max((k for k, _ in self.entries), default=None)

    def level(self, k: int, part: int) -> WFunction:
        p = self._p()
        return WFunction(p, {b: c[part] for (kk, b), c in self.entries.items() if kk == k})

    def _p(self) -> int:
        for _, b in self.entries:
            return b.p
        return 2

    def __add__(self, other: GeneratorCoeffs) -> GeneratorCoeffs:
        d = dict(self.entries)
        for s, (a, b) in other.entries.items():
            if s in d:
                d[s] = (d[s][0] + a, d[s][1] + b)
            else:
                d[s] = (a, b)
        return GeneratorCoeffs(self.n, d)

    def scale(self, s) -> GeneratorCoeffs:
        return GeneratorCoeffs(self.n, {k: (a * s, b * s) for k, (a, b) in self.entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneratorCoeffs):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def margins(self, params: RepParams) -> dict[tuple[int, WElem, str], Fraction]:
        out = {}
        for (k, b), pair in self.entries.items():
            for part, c in zip(("'", "''"), pair):
                if c:
                    out[(k, b, part)] = validity_margin(c, k, b, params)
        return out

    def validate(self, params: RepParams) -> None:
        for (k, b, part), mg in self.margins(params).items():
            if mg < 0:
                raise InvalidCoeffs(k, b, part, mg)


def _site_key(item):
    (k, b), _ = item
    return (k, b.k, b.a)


def validity_margin(c: PolyVec, k: int, beta: WElem, params: RepParams):
    """How far ``c`` sits inside ``pi^(-k m) N_k(beta)`` (negative: outside)."""
    L = lattice_N(k, beta, params.weight, allow_large=True).rescaled(-k * params.m)
    if L.basis is not None:
        return coordinate_margin(L, c, params.oracle())
    return norm_margin(L, c, params.oracle())


# ---------------------------------------------------------------------------
# expansion


@dataclass
class AmplitudeTable:
    """Rows ``k0 <= l <= l_max`` of the annulus expansion.

    ``C1`` and ``C2`` hold the primed and double-primed parts; ``C`` the
    combined amplitudes; ``Ct`` the twisted amplitudes of ``eps^-1 phi``
    (ramified regimes only).
    """

    regime: str
    k0: int
    l_max: int
    C1: dict[int, WFunction]
    C2: dict[int, WFunction]
    C: dict[int, WFunction]
    Ct: dict[int, WFunction] = field(default_factory=dict)
    coeffs: GeneratorCoeffs | None = None

    def levels(self) -> range:
        return range(self.k0, self.l_max + 1)


def _empty(p: int) -> WFunction:
    return WFunction(p)


def expand(coeffs: GeneratorCoeffs, params: RepParams, l_max: int = 3, *,
           validate: bool = True) -> AmplitudeTable:
    """Amplitudes by the single-step recursions ``C'_l = lam S C'_(l-1) + c'_l`` etc."""
    p = params.p
    if validate:
        coeffs.validate(params)
    k0 = coeffs.k0
    if k0 is None:
        k0 = min(0, l_max)
    lam, mu = params.lam, params.mu
    C1, C2, C, Ct = {}, {}, {}, {}
    prev1, prev2, aux = _empty(p), _empty(p), _empty(p)
    for l in range(k0, l_max + 1):
        c1, c2 = coeffs.level(l, 0), coeffs.level(l, 1)
        cur1 = suspend(prev1).scale(lam) + c1
        if params.regime == "degenerate":
            # F''_k = sum (k - l) lam^(l-k) phi_l: carry the plain geometric sum alongside
            cur2 = suspend(prev2 - aux).scale(lam) if l > k0 else _empty(p)
            aux = suspend(aux).scale(lam) + c2
        else:
            cur2 = suspend(prev2).scale(mu) + c2
        C1[l], C2[l] = cur1, cur2
        if params.ramified:
            C[l] = convolve(params.eps, cur1) + cur2
            Ct[l] = convolve(params.eps.inverse(), cur2) + cur1
        else:
            C[l] = cur1 + cur2
        prev1, prev2 = cur1, cur2
    return AmplitudeTable(params.regime, k0, l_max, C1, C2, C, Ct, coeffs)


def expand_closed_form(coeffs: GeneratorCoeffs, params: RepParams, l_max: int = 3) -> AmplitudeTable:
    """Amplitudes from the closed sums over generators (no recursion)."""
    p = params.p
    k0 = coeffs.k0 if coeffs.k0 is not None else min(0, l_max)
    lam, mu = params.lam, params.mu
    acc1 = {l: {} for l in range(k0, l_max + 1)}
    acc2 = {l: {} for l in range(k0, l_max + 1)}
    for (k, alpha), (c1, c2) in coeffs.entries.items():
        target = alpha
        for l in range(k, l_max + 1):
            if l > k:
                target = target.times_pi()
            t1 = c1 * lam ** (l - k)
            if params.regime == "degenerate":
                t2 = c2 * (lam ** (l - k) * (k - l))
            else:
                t2 = c2 * mu ** (l - k)
            for acc, t in ((acc1, t1), (acc2, t2)):
                d = acc[l]
                d[target] = d[target] + t if target in d else t
    C1 = {l: WFunction(p, d) for l, d in acc1.items()}
    C2 = {l: WFunction(p, d) for l, d in acc2.items()}
    C, Ct = {}, {}
    for l in C1:
        if params.ramified:
            C[l] = _fourier_twist(params.eps, C1[l]) + C2[l]
            Ct[l] = _fourier_twist(params.eps.inverse(), C2[l]) + C1[l]
        else:
            C[l] = C1[l] + C2[l]
    return AmplitudeTable(params.regime, k0, l_max, C1, C2, C, Ct, coeffs)


def _fourier_twist(eps: CharacterSpec, f: WFunction) -> WFunction:
    """Amplitudes of ``eps(x) * sum f(beta) psi_beta(-pi^-l x)`` on one annulus."""
    p, nu = eps.p, eps.nu
    tau = gauss_sum(eps)
    factor = tau / p ** nu
    inv = eps.inverse()
    out: dict = {}
    for beta, v in f.items():
        for u, _ in eps.exps:
            gamma = beta + WElem.of(Fraction(u, p ** nu), p)
            term = v * (factor * inv.value(u))
            out[gamma] = out[gamma] + term if gamma in out else term
    return WFunction(p, out)


# ---------------------------------------------------------------------------
# identities


@dataclass(frozen=True)
class TwoStepResult:
    ok: bool
    level: int | None = None
    gamma: WElem | None = None

    def __bool__(self) -> bool:
        return self.ok


def _first_difference(a: WFunction, b: WFunction) -> WElem | None:
    diff = a - b
    sup = diff.support()
    return sup[0] if sup else None


def _S2(f: WFunction) -> WFunction:
    return suspend(suspend(f))


def verify_two_step(table: AmplitudeTable, params: RepParams) -> TwoStepResult:
    """Check the two-generation recursion for ``C_(l+1)`` at every level.

    Unramified: ``C_(l+1) = (lam+mu) S C_l - lam mu S^2 C_(l-1) - S(lam c''_l + mu c'_l) + c_(l+1)``.
    Degenerate: ``C_(l+1) = 2 lam S C_l - lam^2 S^2 C_(l-1) - lam S(c''_l + c'_l) + c'_(l+1)``,
    together with the companion recursion for ``C''`` alone.
    Ramified regimes: the rewritten one-step recursions through ``Ct``.
    """
    if params.ramified:
        return verify_tame_rewrite(table, params)
    coeffs = table.coeffs
    p = params.p
    lam, mu = params.lam, params.mu
    k0 = table.k0
    for l in range(k0, table.l_max):
        Cl = table.C[l]
        Cprev = table.C.get(l - 1, _empty(p))
        c1, c2 = coeffs.level(l, 0), coeffs.level(l, 1)
        c1n, c2n = coeffs.level(l + 1, 0), coeffs.level(l + 1, 1)
        if params.regime == "degenerate":
            rhs = (suspend(Cl).scale(lam * 2) - _S2(Cprev).scale(lam * lam)
                   - suspend(c2 + c1).scale(lam) + c1n)
        else:
            rhs = (suspend(Cl).scale(lam + mu) - _S2(Cprev).scale(lam * mu)
                   - suspend(c2.scale(lam) + c1.scale(mu)) + c1n + c2n)
        bad = _first_difference(table.C[l + 1], rhs)
        if bad is not None:
            return TwoStepResult(False, l + 1, bad)
        if params.regime == "degenerate":
            res = _verify_degenerate_c2(table, params, l)
            if not res:
                return res
    return TwoStepResult(True)


def _verify_degenerate_c2(table: AmplitudeTable, params: RepParams, l: int) -> TwoStepResult:
    coeffs, lam, p = table.coeffs, params.lam, params.p
    k0 = table.k0
    C2 = table.C2
    if l == k0:
        if C2[k0]:
            return TwoStepResult(False, k0, C2[k0].support()[0])
        rhs = suspend(coeffs.level(k0, 1)).scale(-lam)
    else:
        rhs = (suspend(C2[l]).scale(lam * 2) - _S2(C2[l - 1]).scale(lam * lam)
               - suspend(coeffs.level(l, 1)).scale(lam))
    bad = _first_difference(C2[l + 1], rhs)
    if bad is not None:
        return TwoStepResult(False, l + 1, bad)
    return TwoStepResult(True)


def verify_tame_rewrite(table: AmplitudeTable, params: RepParams) -> TwoStepResult:
    """``C'_l = lam S Ct_(l-1) + c'_l`` and ``C''_l = mu S C_(l-1) + c''_l``."""
    coeffs, p = table.coeffs, params.p
    for l in range(table.k0, table.l_max + 1):
        prev_t = table.Ct.get(l - 1, _empty(p))
        prev = table.C.get(l - 1, _empty(p))
        r1 = suspend(prev_t).scale(params.lam) + coeffs.level(l, 0)
        r2 = suspend(prev).scale(params.mu) + coeffs.level(l, 1)
        for lhs, rhs in ((table.C1[l], r1), (table.C2[l], r2)):
            bad = _first_difference(lhs, rhs)
            if bad is not None:
                return TwoStepResult(False, l, bad)
    return TwoStepResult(True)


def vanishes_outside_integers(table: AmplitudeTable) -> bool:
    """``phi`` vanishes off ``O_F`` iff every negative row lies in ``C_1``."""
    return all(in_C1(table.C[l]) for l in range(table.k0, min(0, table.l_max + 1)))


# ---------------------------------------------------------------------------
# pointwise evaluation


def _phase_sum(f: WFunction, w, n: int) -> PolyVec:
    """``sum_beta f(beta) psi(-beta w)``."""
    acc = None
    for beta, v in f.items():
        phase = psi(WElem.of(-beta.as_fraction() * Fraction(w), beta.p))
        term = v * phase
        acc = term if acc is None else acc + term
    return acc if acc is not None else PolyVec.zero(n)


def _check_unit(w, p: int) -> Fraction:
    w = Fraction(w)
    if w.numerator % p == 0 or w.denominator % p == 0:
        raise ValueError("evaluation point must be a unit")
    return w


def evaluate(table: AmplitudeTable, l: int, w, n: int | None = None) -> PolyVec:
    """``phi(pi^l w)`` for a p-adic unit ``w`` (an integer or p-integral rational)."""
    n = n if n is not None else (table.coeffs.n if table.coeffs else 0)
    if l > table.l_max:
        raise HorizonExceeded(f"level {l} is beyond the computed horizon {table.l_max}")
    if l < table.k0:
        return PolyVec.zero(n)
    p = table.coeffs._p() if table.coeffs else 2
    w = _check_unit(w, p)
    return _phase_sum(table.C[l], w, n)


def evaluate_generators(coeffs: GeneratorCoeffs, params: RepParams, l: int, w) -> PolyVec:
    """``phi(pi^l w)`` straight from the generator sum (no expansion)."""
    p, n = params.p, params.n
    w = _check_unit(w, p)
    lam, mu = params.lam, params.mu
    eps_w = ONE
    if params.ramified:
        eps_w = params.eps.value(int(w.numerator * pow(w.denominator, -1, p ** params.eps.nu)))
    total = PolyVec.zero(n)
    for (k, beta), (c1, c2) in coeffs.entries.items():
        if l < k:
            continue
        x = beta.as_fraction() * p ** (l - k) * w
        phase = psi(WElem.of(-x, p))
        f1 = lam ** (l - k) * eps_w
        if params.regime == "degenerate":
            f2 = lam ** (l - k) * (k - l)
        else:
            f2 = mu ** (l - k)
        total = total + c1 * (f1 * phase) + c2 * (f2 * phase)
    return total


# ---------------------------------------------------------------------------
# the mirabolic action


def mirabolic_act(a, b, coeffs: GeneratorCoeffs, params: RepParams, *,
                  validate: bool = True) -> GeneratorCoeffs:
    """Coefficients of ``x -> tau(g) (psi(b x) phi(a x))`` for ``g = (a b; 0 1)``."""
    p = params.p
    if isinstance(a, Scalar):
        if a.m != 1:
            raise NonUnit("a must lie in F = Q_p")
        a = a.to_fraction()
    if isinstance(b, Scalar):
        if b.m != 1:
            raise NonUnit("b must lie in F = Q_p")
        b = b.to_fraction()
    a, b = Fraction(a), Fraction(b)
    if a == 0:
        raise NonUnit("a must be nonzero")
    j = vp(a, p)
    eta = a / Fraction(p) ** j
    g = ((Scalar.rational(a), Scalar.rational(b)), (ZERO, ONE))
    unit_factor = ONE
    if params.ramified:
        mod = p ** params.eps.nu
        unit_factor = params.eps.value(eta.numerator * pow(eta.denominator, -1, mod) % mod)
    out: dict = {}
    for (k, beta), (c1, c2) in coeffs.entries.items():
        k2 = k - j
        beta2 = beta.scale(eta) - WElem.of(b * Fraction(p) ** k2, p)
        n1 = act_tau(g, c1, params.weight) * unit_factor
        n2 = act_tau(g, c2, params.weight)
        key = (k2, beta2)
        if key in out:
            o1, o2 = out[key]
            out[key] = (o1 + n1, o2 + n2)
        else:
            out[key] = (n1, n2)
    result = GeneratorCoeffs(coeffs.n, out)
    if validate:
        result.validate(params)
    return result


# ---------------------------------------------------------------------------
# the vanishing solver


def support_template(k0: int, depth: int, p: int, top: int = 0) -> list[Site]:
    """All sites ``(k, beta)`` with ``k0 <= k <= top`` and ``depth(beta) <= depth``."""
    betas = [WElem._reduce(a, depth, p) for a in range(p ** depth)]
    betas.sort(key=lambda b: (b.k, b.a))
    return [(k, b) for k in range(k0, top + 1) for b in betas]


def _unknowns(support: Iterable[Site], params: RepParams):
    p, n, m = params.p, params.n, params.m
    out = []
    for k, beta in sorted(set(support), key=lambda s: (s[0], s[1].k, s[1].a)):
        basis = _disk_basis(k, beta, n)
        factor = Scalar.rational(Fraction(p) ** (-k * m))
        for part in (0, 1):
            for i in range(n + 1):
                out.append((k, beta, part, basis[i] * factor))
    return out


def _single(k, beta, part, vec, n) -> GeneratorCoeffs:
    z = PolyVec.zero(n)
    return GeneratorCoeffs(n, {(k, beta): (vec, z) if part == 0 else (z, vec)})


def solve_vanishing(support: Iterable[Site], params: RepParams) -> list[GeneratorCoeffs]:
    """Basis of the generator data on ``support`` whose function vanishes off ``O_F``.

    Each basis vector is rescaled by the smallest power of ``p`` that puts it in
    the integrality region ``c in pi^(-k m) N_k(beta)``.
    """
    support = list(support)
    if not support:
        return []
    n = params.n
    unknowns = _unknowns(support, params)
    k0 = min(k for k, _ in support)
    columns = []
    keys: dict = {}
    for k, beta, part, vec in unknowns:
        col = {}
        if k < 0:
            table = expand(_single(k, beta, part, vec, n), params, l_max=-1, validate=False)
            for l in range(k, 0):
                row = table.C[l]
                for gamma in {b.times_pi() for b, _ in row.items()}:
                    coset = gamma.fiber()
                    base = row.get(coset[0])
                    for alpha in coset[1:]:
                        val = row.get(alpha)
                        for i in range(n + 1):
                            x = (val.coeffs[i] if val else ZERO) - (base.coeffs[i] if base else ZERO)
                            if x:
                                key = (l, alpha, i)
                                keys.setdefault(key, len(keys))
                                col[keys[key]] = x
        columns.append(col)
    nrows = len(keys)
    A = [[ZERO] * len(columns) for _ in range(nrows)]
    for j, col in enumerate(columns):
        for r, x in col.items():
            A[r][j] = x
    _, kernel = solve_linear(A, None, ncols=len(columns))
    out = []
    for vec in kernel:
        entries: dict = {}
        for x, (k, beta, part, basis_vec) in zip(vec, unknowns):
            if not x:
                continue
            cur = entries.get((k, beta), (PolyVec.zero(n), PolyVec.zero(n)))
            add = basis_vec * x
            cur = (cur[0] + add, cur[1]) if part == 0 else (cur[0], cur[1] + add)
            entries[(k, beta)] = cur
        gc = GeneratorCoeffs(n, entries)
        out.append(rescale_into_region(gc, params))
    return out


def rescale_into_region(coeffs: GeneratorCoeffs, params: RepParams) -> GeneratorCoeffs:
    """Multiply by the power of ``p`` that brings ``coeffs`` onto the integrality boundary."""
    margins = coeffs.margins(params).values()
    if not margins:
        return coeffs
    low = min(margins)
    shift = -int(Fraction(low).__floor__())
    if shift == 0:
        return coeffs
    return coeffs.scale(Scalar.rational(Fraction(params.p) ** shift))


def random_coeffs(params: RepParams, rng, *, sites: int = 4, levels=(-2, 1),
                  depth: int = 2, spread: int = 3) -> GeneratorCoeffs:
    """Random valid generator data: integer combinations of the formal disk basis."""
    p, n, m = params.p, params.n, params.m
    entries: dict = {}
    for _ in range(sites):
        k = rng.randint(*levels)
        d = rng.randint(0, depth)
        beta = WElem._reduce(rng.randrange(p ** d), d, p)
        basis = _disk_basis(k, beta, n)
        factor = Scalar.rational(Fraction(p) ** (-k * m))
        pair = []
        for _ in (0, 1):
            v = PolyVec.zero(n)
            for b in basis:
                v = v + b * (factor * rng.randint(-spread, spread))
            pair.append(v)
        entries[(k, beta)] = tuple(pair)
    if not any(a or b for a, b in entries.values()):
        k, beta = next(iter(entries))
        entries[(k, beta)] = (_disk_basis(k, beta, n)[0] * Scalar.rational(Fraction(p) ** (-k * m)),
                              entries[(k, beta)][1])
    return GeneratorCoeffs(n, entries)
