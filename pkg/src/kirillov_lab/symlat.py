"""Polynomial coefficient space ``E[u]^{<=n}`` and the disk lattices inside it.

``V = det^m (x) Sym^n`` is identified with polynomials of degree at most ``n``
in ``u``.  The lattices ``N_l(beta)`` are the polynomials bounded by
``|pi|^(-n l)`` on the disk ``D_l(beta) = {u : |u - pi^-l beta| <= |pi^-l|}``;
``M_l(beta) = q^-1 pi^(-n - l m) N_l(beta)``.

A :class:`Lattice` is stored as an O_E-basis together with a valuation offset
``scale``: the lattice is ``p**scale * span(basis)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, inf
from typing import Sequence

import gmpy2

from .scalars import (ONE, ZERO, EmbeddingOracle, Scalar, default_oracle, padic_coordinates,
                      solve_linear, valuation, vp, _lcm)
from .wspace import WElem

__all__ = [
    "Disk",
    "Lattice",
    "PolyVec",
    "SingularMatrix",
    "WeightParams",
    "WeightTooLarge",
    "act_tau",
    "basis_coordinates",
    "contains",
    "intersect",
    "intersect_over_fiber",
    "lattice_M",
    "lattice_N",
    "lattice_sum",
    "lattices_equal",
    "refine_under_C1",
    "supnorm_on_disk",
]


class WeightTooLarge(ValueError):
    """The closed-form basis of ``N_l(beta)`` needs ``n < q``."""


class SingularMatrix(ValueError):
    pass


@dataclass(frozen=True)
class WeightParams:
    m: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")

    def low_weight(self, q: int) -> bool:
        return self.n < q


class PolyVec:
    """``sum(coeffs[i] * u**i)``, always of length ``n + 1``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        object.__setattr__(self, "coeffs", tuple(
            c if isinstance(c, Scalar) else Scalar.rational(c) for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("PolyVec is immutable")

    def __reduce__(self):
        return (PolyVec._of, (self.coeffs,))

    @classmethod
    def zero(cls, n: int) -> PolyVec:
        return cls([ZERO] * (n + 1))

    @classmethod
    def monomial(cls, n: int, i: int, c=1) -> PolyVec:
        v = [ZERO] * (n + 1)
        v[i] = Scalar.rational(c)
        return cls(v)

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __add__(self, other: PolyVec) -> PolyVec:
        return PolyVec._of(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> PolyVec:
        return PolyVec._of(tuple(-a for a in self.coeffs))

    def __sub__(self, other: PolyVec) -> PolyVec:
        return PolyVec._of(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, s) -> PolyVec:
        if isinstance(s, PolyVec):
            return NotImplemented
        if not isinstance(s, Scalar):
            s = Scalar.rational(s)
        return PolyVec._of(tuple(a * s for a in self.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVec):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    @classmethod
    def _of(cls, coeffs: tuple) -> PolyVec:
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeffs", coeffs)
        return obj

    def __call__(self, u) -> Scalar:
        u = u if isinstance(u, Scalar) else Scalar.rational(u)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def taylor(self, center: Scalar) -> list[Scalar]:
        """Coefficients ``d_i`` with ``P(u) = sum d_i (u - center)^i``."""
        n = self.n
        out = []
        for i in range(n + 1):
            acc = ZERO
            for j in range(n, i - 1, -1):
                c = self.coeffs[j]
                if c:
                    acc = acc + c * comb(j, i) * (center ** (j - i))
            out.append(acc)
        return out

    def __repr__(self) -> str:
        terms = [f"({c})u^{i}" for i, c in enumerate(self.coeffs) if c]
        return "PolyVec(" + (" + ".join(terms) or "0") + ")"


# ---------------------------------------------------------------------------
# the action of GL_2


def _poly_mul(a: list[Scalar], b: list[Scalar]) -> list[Scalar]:
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return out


def _poly_pow(a: list[Scalar], k: int) -> list[Scalar]:
    out = [ONE]
    for _ in range(k):
        out = _poly_mul(out, a)
    return out


def act_tau(g, P: PolyVec, w: WeightParams) -> PolyVec:
    """``u^i -> (ad - bc)^m (a + c u)^(n - i) (b + d u)^i``."""
    (a, b), (c, d) = [[x if isinstance(x, Scalar) else Scalar.rational(x) for x in row] for row in g]
    det = a * d - b * c
    if not det:
        raise SingularMatrix("g is not invertible")
    n = w.n
    if P.n != n:
        raise ValueError("PolyVec degree does not match the weight")
    out = [ZERO] * (n + 1)
    lin1, lin2 = [a, c], [b, d]
    for i, coeff in enumerate(P.coeffs):
        if not coeff:
            continue
        term = _poly_mul(_poly_pow(lin1, n - i), _poly_pow(lin2, i))
        for j, t in enumerate(term):
            if t:
                out[j] = out[j] + coeff * t
    factor = det ** w.m
    return PolyVec([x * factor for x in out])


# ---------------------------------------------------------------------------
# disks and sup norms


@dataclass(frozen=True)
class Disk:
    """``D_l(beta)``; depends on ``beta`` only through its class in ``W``."""

    l: int
    beta: WElem

    @property
    def center(self) -> Scalar:
        p = self.beta.p
        return Scalar.rational(Fraction(p) ** (-self.l) * self.beta.as_fraction())


def _min_val_on_Zp(c: list[int], p: int, prec: int | None):
    """``min over t in Z_p of v(sum c_i t^i)``; ``None`` if it is at least ``prec``."""
    if prec is not None:
        mod = p ** prec
        c = [x % mod for x in c]
    nz = [x for x in c if x]
    if not nz:
        return None if prec is not None else inf
    g = min(int(gmpy2.remove(gmpy2.mpz(x), p)[1]) for x in nz)
    if prec is not None and g >= prec:
        return None
    pg = p ** g
    red = [(x // pg) % p for x in c]
    deg = max(i for i, r in enumerate(red) if r)
    if deg < p or any(_eval_mod(red, r, p) for r in range(p)):
        return g
    best = None
    for r in range(p):
        sub = []
        for i in range(len(c)):
            acc = sum(c[j] * comb(j, i) * r ** (j - i) for j in range(i, len(c)) if c[j])
            sub.append(acc * p ** i)
        v = _min_val_on_Zp(sub, p, prec)
        if v is not None and (best is None or v < best):
            best = v
    return best


def _eval_mod(c: list[int], t: int, p: int) -> int:
    acc = 0
    for x in reversed(c):
        acc = (acc * t + x) % p
    return acc


def _recentred(P: PolyVec, disk: Disk) -> list[Scalar]:
    """Coefficients of ``t -> P(pi^-l (beta + t))``."""
    p = disk.beta.p
    d = P.taylor(disk.center)
    s = Scalar.rational(Fraction(p) ** (-disk.l))
    out, pw = [], ONE
    for di in d:
        out.append(di * pw)
        pw = pw * s
    return out


def supnorm_on_disk(P: PolyVec, disk: Disk, oracle: EmbeddingOracle | None = None):
    """Exact ``min over u in D_l(beta) of v(P(u))`` by descent on residue disks."""
    p = disk.beta.p
    oracle = oracle or default_oracle(p)
    coeffs = _recentred(P, disk)
    if not any(coeffs):
        return inf
    if all(c.m == 1 for c in coeffs):
        den = 1
        for c in coeffs:
            den = _lcm(den, int(c.c[0].denominator))
        ints = [int(c.c[0] * den) for c in coeffs]
        return Fraction(_min_val_on_Zp(ints, p, None) - vp(den, p))
    if sum(1 for c in coeffs[1:] if c) == 0:
        return valuation(coeffs[0], oracle)
    big = 1
    for c in coeffs:
        big = _lcm(big, c.m)
    digits = oracle.precision
    while True:
        found = _supnorm_cyclotomic(coeffs, big, oracle, digits)
        if found is not None:
            return found
        if digits >= oracle.cap:
            from .scalars import AmbiguousValuation
            raise AmbiguousValuation("sup norm exceeds the escalation cap")
        digits = min(2 * digits, oracle.cap)


def _supnorm_cyclotomic(coeffs: list[Scalar], big: int, oracle: EmbeddingOracle, digits: int):
    # v(sum_k varpi^k A_k(t)) = min_k (v(A_k(t)) + k/e): the terms have distinct valuations
    p = oracle.p
    data = [padic_coordinates(c, big, oracle, digits) for c in coeffs]
    e = data[0][1]
    shift = max(s for _, _, s in data)
    best = None
    for k in range(e):
        poly = [coords[k] * p ** (shift - s) for coords, _, s in data]
        v = _min_val_on_Zp(poly, p, digits)
        if v is not None:
            cand = Fraction(v) + Fraction(k, e)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    return best - shift


# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class Lattice:
    """``p**scale * span_{O_E}(basis)`` inside ``E[u]^{<=n}``.

    ``l`` and ``beta`` are set for lattices attached to a disk; then the norm
    route of :func:`contains` is available.  ``basis`` is ``None`` when no
    closed-form basis exists (``n >= q``).  ``disk_basis`` marks the standard
    triangular basis ``(pi^-l)^(n-i) (u - pi^-l beta)^i``.
    """

    n: int
    basis: tuple[PolyVec, ...] | None
    scale: int | Fraction = 0
    l: int | None = None
    beta: WElem | None = None
    disk_basis: bool = False

    @property
    def disk(self) -> Disk | None:
        return None if self.l is None else Disk(self.l, self.beta)

    def rescaled(self, offset) -> Lattice:
        return Lattice(self.n, self.basis, self.scale + offset, self.l, self.beta, self.disk_basis)


def _disk_basis(l: int, beta: WElem, n: int) -> tuple[PolyVec, ...]:
    p = beta.p
    s = Scalar.rational(Fraction(p) ** (-l))
    c = Disk(l, beta).center
    lin = [-c, ONE]
    out = []
    for i in range(n + 1):
        poly = _poly_pow(lin, i)
        factor = s ** (n - i)
        vec = [x * factor for x in poly] + [ZERO] * (n - i)
        out.append(PolyVec(vec))
    return tuple(out)


def lattice_N(l: int, beta: WElem, w: WeightParams, *, allow_large: bool = False) -> Lattice:
    """``N_l(beta)``.  For ``n >= q`` either raise or return a basis-free lattice."""
    if w.n >= beta.p:
        if not allow_large:
            raise WeightTooLarge(f"no closed-form basis for n = {w.n} >= q = {beta.p}")
        return Lattice(w.n, None, 0, l, beta)
    return Lattice(w.n, _disk_basis(l, beta, w.n), 0, l, beta, True)


def lattice_M(l: int, beta: WElem, w: WeightParams) -> Lattice:
    """``M_l(beta) = q^-1 pi^(-n - l m) N_l(beta)``; basis-free when ``n >= q``."""
    return lattice_N(l, beta, w, allow_large=True).rescaled(-1 - w.n - l * w.m)


def basis_coordinates(L: Lattice, P: PolyVec) -> list[Scalar]:
    """Coordinates of ``P`` on ``L.basis`` (not including the scale)."""
    if L.basis is None:
        raise WeightTooLarge("lattice has no basis; use the norm route")
    if L.disk_basis:
        p = L.beta.p
        d = P.taylor(Disk(L.l, L.beta).center)
        n = L.n
        return [d[i] * Scalar.rational(Fraction(p) ** (L.l * (n - i))) for i in range(n + 1)]
    n = L.n
    A = [[L.basis[j].coeffs[i] for j in range(n + 1)] for i in range(n + 1)]
    x, kernel = solve_linear(A, list(P.coeffs))
    if kernel:
        raise SingularMatrix("lattice basis is degenerate")
    return x


def _formal_disk_coordinates(l: int, beta: WElem, P: PolyVec) -> list[Scalar]:
    L = Lattice(P.n, (), 0, l, beta, True)
    return basis_coordinates(L, P)


def coordinate_margin(L: Lattice, P: PolyVec, oracle: EmbeddingOracle | None = None):
    """``min v(coordinate) - scale``; nonnegative iff ``P`` lies in ``L`` (basis route)."""
    p = L.beta.p if L.beta is not None else None
    coords = basis_coordinates(L, P)
    if oracle is None:
        oracle = default_oracle(p if p else _guess_prime(L))
    return min(valuation(x, oracle) for x in coords) - L.scale


def norm_margin(L: Lattice, P: PolyVec, oracle: EmbeddingOracle | None = None):
    """``supnorm - bound``; nonnegative iff ``P`` lies in ``L`` (norm route)."""
    if L.l is None:
        raise ValueError("norm route needs a disk lattice")
    v = supnorm_on_disk(P, L.disk, oracle)
    return v - (L.scale - L.n * L.l)


def _guess_prime(L: Lattice) -> int:
    raise ValueError("pass an oracle for lattices without a disk")


def contains(L: Lattice, P: PolyVec, route: str = "auto",
             oracle: EmbeddingOracle | None = None) -> bool:
    """Exact membership.  ``route`` is ``basis``, ``norm`` or ``auto``."""
    if not P:
        return True
    if route == "auto":
        route = "basis" if L.basis is not None else "norm"
    if route == "norm":
        return norm_margin(L, P, oracle) >= 0
    return coordinate_margin(L, P, oracle) >= 0


def _p_of(lattices: Sequence[Lattice], oracle) -> int:
    for L in lattices:
        if L.beta is not None:
            return L.beta.p
    if oracle is not None:
        return oracle.p
    raise ValueError("cannot infer p")


def _generators(L: Lattice, p: int) -> list[list[Scalar]]:
    if L.basis is None:
        raise WeightTooLarge("lattice has no basis")
    if Fraction(L.scale).denominator != 1:
        raise ValueError("only integral scales can be realised by rational generators")
    f = Scalar.rational(Fraction(p) ** int(L.scale))
    return [[c * f for c in b.coeffs] for b in L.basis]


def _echelon(gens: list[list[Scalar]], dim: int, oracle: EmbeddingOracle) -> list[list[Scalar]]:
    gens = [g for g in gens if any(g)]
    basis = []
    for r in range(dim - 1, -1, -1):
        live = [g for g in gens if g[r]]
        if not live:
            continue
        piv = min(live, key=lambda g: valuation(g[r], oracle))
        inv = piv[r].inverse()
        rest = []
        for g in gens:
            if g is piv:
                continue
            if g[r]:
                f = g[r] * inv
                g = [a - f * b for a, b in zip(g, piv)]
            if any(g):
                rest.append(g)
        basis.append(piv)
        gens = rest
    return basis


def lattice_sum(lattices: Sequence[Lattice], oracle: EmbeddingOracle | None = None) -> Lattice:
    """O_E-span of the union of the lattices, as a triangular basis."""
    p = _p_of(lattices, oracle)
    oracle = oracle or default_oracle(p)
    n = lattices[0].n
    gens = [g for L in lattices for g in _generators(L, p)]
    basis = _echelon(gens, n + 1, oracle)
    return Lattice(n, tuple(PolyVec(b) for b in basis), 0)


def _dual(L: Lattice, p: int) -> Lattice:
    n = L.n
    gens = _generators(L, p)
    # columns of B are the generators; dual basis = rows of B^-1
    B = [[gens[j][i] for j in range(n + 1)] for i in range(n + 1)]
    inv_rows = []
    cols = []
    for k in range(n + 1):
        e = [ONE if i == k else ZERO for i in range(n + 1)]
        x, _ = solve_linear(B, e)
        cols.append(x)
    # B^-1 has columns cols; its rows are the dual basis
    for j in range(n + 1):
        inv_rows.append(PolyVec([cols[k][j] for k in range(n + 1)]))
    return Lattice(n, tuple(inv_rows), 0)


def intersect(lattices: Sequence[Lattice], oracle: EmbeddingOracle | None = None) -> Lattice:
    """Literal intersection of full-rank lattices via ``(sum of duals)^dual``."""
    p = _p_of(lattices, oracle)
    oracle = oracle or default_oracle(p)
    duals = [_dual(L, p) for L in lattices]
    return _dual(lattice_sum(duals, oracle), p)


def lattice_le(A: Lattice, B: Lattice, oracle: EmbeddingOracle | None = None) -> bool:
    """``A`` contained in ``B``."""
    p = _p_of([A, B], oracle)
    oracle = oracle or default_oracle(p)
    return all(contains(B, PolyVec(g), oracle=oracle) for g in _generators(A, p))


def lattices_equal(A: Lattice, B: Lattice, oracle: EmbeddingOracle | None = None) -> bool:
    return lattice_le(A, B, oracle) and lattice_le(B, A, oracle)


def intersect_over_fiber(l: int, gamma: WElem, w: WeightParams, *,
                         verify: bool = False) -> Lattice:
    """``pi^n N_(l+1)(gamma)``, the intersection of ``N_l(beta)`` over ``pi beta = gamma``.

    With ``verify=True`` the literal intersection is computed as well and an
    ``AssertionError`` is raised if the two differ.
    """
    result = lattice_N(l + 1, gamma, w).rescaled(w.n)
    if verify:
        literal = intersect([lattice_N(l, b, w) for b in gamma.fiber()])
        if not lattices_equal(result, literal):
            raise AssertionError(f"fiber intersection mismatch at l={l}, gamma={gamma}")
    return result


def refine_under_C1(l: int, beta: WElem, w: WeightParams) -> Lattice:
    """Intersection of ``M_l(beta')`` over the coset ``beta + W_1``.

    A family of ``M_l``-members that is constant on the coset lies here.  For
    ``n = 1`` this is ``M``-scaled ``span{pi^-l, pi (u - pi^-l beta)}``.
    """
    coset = beta.times_pi().fiber()
    if w.n == 0:
        return lattice_M(l, beta, w)
    return intersect([lattice_M(l, b, w) for b in coset])
