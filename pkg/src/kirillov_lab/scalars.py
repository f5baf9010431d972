"""Exact arithmetic in cyclotomic fields with a p-adic valuation oracle.

A :class:`Scalar` is an element of ``Q(zeta_m)`` stored as a dense vector of
rational coefficients on the power basis ``1, zeta_m, ..., zeta_m^(phi(m)-1)``.
Rationals are the special case ``m = 1``.  Scalars of different conductors are
combined by lifting both into ``Q(zeta_lcm)``.

Valuations are normalised so that ``v(p) = 1``.  For cyclotomic elements a
single embedding ``Q(zeta_m) -> Qbar_p`` is fixed once and for all (see
:class:`EmbeddingOracle`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, inf
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz
from sympy import Poly, cyclotomic_poly, isprime, symbols, totient
from sympy.ntheory import primitive_root

__all__ = [
    "AmbiguousValuation",
    "CharacterSpec",
    "EmbeddingOracle",
    "FieldParams",
    "Inconsistent",
    "Scalar",
    "TrivialCharacter",
    "UnsupportedEmbedding",
    "default_oracle",
    "gauss_sum",
    "solve_linear",
    "tame_characters",
    "valuation",
    "vp",
]


class AmbiguousValuation(ArithmeticError):
    """The valuation exceeds the escalation cap and could not be pinned down."""


class UnsupportedEmbedding(ValueError):
    """The element needs roots of unity that do not live in a ramified extension of Q_p."""


class TrivialCharacter(ValueError):
    pass


class Inconsistent(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# cyclotomic tables

_X = symbols("x")


@lru_cache(maxsize=None)
def _phi(m: int) -> int:
    return int(totient(m))


@lru_cache(maxsize=None)
def _cyclo(m: int) -> tuple[int, ...]:
    """Coefficients of the m-th cyclotomic polynomial, lowest degree first."""
    return tuple(int(c) for c in reversed(Poly(cyclotomic_poly(m, _X), _X).all_coeffs()))


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Row j holds the reduction of x^j modulo Phi_m, for 0 <= j < m."""
    d = _phi(m)
    poly = _cyclo(m)
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(d):
                cur[i] -= top * poly[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _lift_rows(m: int, big: int) -> tuple[tuple[int, ...], ...]:
    step = big // m
    table = _power_table(big)
    return tuple(table[(i * step) % big] for i in range(_phi(m)))


def _canonical_conductor(m: int) -> int:
    return m // 2 if m % 4 == 2 else m


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _reduce_exponents(big: int, acc: dict[int, mpq]) -> list[mpq]:
    """Sum coeff * zeta_big^e over the dict, reduced to the power basis."""
    d = _phi(big)
    table = _power_table(big)
    out = [mpq(0)] * d
    for e, c in acc.items():
        if not c:
            continue
        row = table[e % big]
        for i, r in enumerate(row):
            if r:
                out[i] += c * r
    return out


# ---------------------------------------------------------------------------
# Scalar


class Scalar:
    """Element of ``Q(zeta_m)``; immutable."""

    __slots__ = ("m", "c")

    def __init__(self, coeffs: Sequence, m: int = 1):
        coeffs = [mpq(x) for x in coeffs]
        if m % 4 == 2:
            # Q(zeta_2k) = Q(zeta_k) for odd k; re-express over the smaller conductor
            k = m // 2
            acc: dict[int, mpq] = {}
            for i, c in enumerate(coeffs):
                if c:
                    # zeta_2k^i = (-1)^i zeta_k^(i (k+1)/2)
                    e = (i * (k + 1) // 2) % k
                    acc[e] = acc.get(e, mpq(0)) + (c if i % 2 == 0 else -c)
            coeffs = _reduce_exponents(k, acc) if k > 1 else [sum(acc.values(), mpq(0))]
            m = k
        if m > 1:
            if len(coeffs) != _phi(m):
                raise ValueError(f"expected {_phi(m)} coefficients for conductor {m}")
            if not any(coeffs[1:]):
                coeffs, m = coeffs[:1], 1
        elif len(coeffs) != 1:
            raise ValueError("rational scalar takes exactly one coefficient")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "c", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __reduce__(self):
        return (Scalar._raw, (self.c, self.m))

    # -- constructors -------------------------------------------------------

    @classmethod
    def _raw(cls, c: tuple, m: int) -> Scalar:
        obj = object.__new__(cls)
        object.__setattr__(obj, "m", m)
        object.__setattr__(obj, "c", c)
        return obj

    @classmethod
    def _make(cls, coeffs: list, m: int) -> Scalar:
        if m > 1 and not any(coeffs[1:]):
            return cls._raw((coeffs[0],), 1)
        return cls._raw(tuple(coeffs), m)

    @classmethod
    def rational(cls, x, den=1) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            x = mpq(x.numerator, x.denominator)
        return cls._raw((mpq(x) / den if den != 1 else mpq(x),), 1)

    @classmethod
    def zeta(cls, m: int, e: int = 1) -> Scalar:
        """The root of unity ``zeta_m ** e`` with ``zeta_m = exp(2 pi i / m)``."""
        e %= m
        g = gcd(e, m)
        m, e = m // g, e // g
        if m == 1:
            return ONE
        if m == 2:
            return -ONE
        if m % 4 == 2:
            k = m // 2
            return -cls.zeta(k, (e * (k + 1) // 2) % k) if e % 2 else cls.zeta(k, (e * (k + 1) // 2) % k)
        return cls._make(list(_reduce_exponents(m, {e: mpq(1)})), m)

    @classmethod
    def from_exponents(cls, m: int, terms: dict[int, object]) -> Scalar:
        """``sum(c * zeta_m ** e for e, c in terms.items())`` with rational c."""
        acc = {e % m: mpq(c) for e, c in terms.items()}
        if m % 4 == 2:
            k = m // 2
            acc2: dict[int, mpq] = {}
            for e, c in acc.items():
                e2 = (e * (k + 1) // 2) % k
                acc2[e2] = acc2.get(e2, mpq(0)) + (-c if e % 2 else c)
            m, acc = k, acc2
        if m == 1:
            return cls._raw((sum(acc.values(), mpq(0)),), 1)
        return cls._make(_reduce_exponents(m, acc), m)

    # -- predicates ---------------------------------------------------------

    def is_rational(self) -> bool:
        return self.m == 1

    def __bool__(self) -> bool:
        return any(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def to_fraction(self) -> Fraction:
        if self.m != 1:
            raise ValueError("not a rational scalar")
        x = self.c[0]
        return Fraction(int(x.numerator), int(x.denominator))

    # -- lifting ------------------------------------------------------------

    def lift(self, big: int) -> tuple:
        """Coefficient vector of self inside Q(zeta_big); ``self.m`` must divide ``big``."""
        if big == self.m:
            return self.c
        if big % self.m:
            raise ValueError(f"conductor {self.m} does not divide {big}")
        d = _phi(big)
        if self.m == 1:
            out = [mpq(0)] * d
            out[0] = self.c[0]
            return tuple(out)
        out = [mpq(0)] * d
        for c, row in zip(self.c, _lift_rows(self.m, big)):
            if c:
                for i, r in enumerate(row):
                    if r:
                        out[i] += c * r
        return tuple(out)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> Scalar:
        if not isinstance(other, Scalar):
            other = Scalar.rational(other)
        if self.m == other.m:
            if self.m == 1:
                return Scalar._raw((self.c[0] + other.c[0],), 1)
            return Scalar._make([a + b for a, b in zip(self.c, other.c)], self.m)
        big = _lcm(self.m, other.m)
        return Scalar._make([a + b for a, b in zip(self.lift(big), other.lift(big))], big)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar._raw(tuple(-a for a in self.c), self.m)

    def __sub__(self, other) -> Scalar:
        if not isinstance(other, Scalar):
            other = Scalar.rational(other)
        return self + (-other)

    def __rsub__(self, other) -> Scalar:
        return Scalar.rational(other) - self

    def __mul__(self, other) -> Scalar:
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction, type(mpq(0)), type(mpz(0)))):
                other = Scalar.rational(other)
            else:
                return NotImplemented
        if self.m == 1:
            a = self.c[0]
            if other.m == 1:
                return Scalar._raw((a * other.c[0],), 1)
            return Scalar._make([a * x for x in other.c], other.m) if a else ZERO
        if other.m == 1:
            a = other.c[0]
            return Scalar._make([a * x for x in self.c], self.m) if a else ZERO
        big = _lcm(self.m, other.m)
        x, y = self.lift(big), other.lift(big)
        acc: dict[int, mpq] = {}
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        acc[i + j] = acc.get(i + j, mpq(0)) + a * b
        return Scalar._make(_reduce_exponents(big, acc), big)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if not self:
            raise ZeroDivisionError("inverse of zero scalar")
        if self.m == 1:
            return Scalar._raw((1 / self.c[0],), 1)
        return Scalar._make(_poly_inverse(list(self.c), _cyclo(self.m)), self.m)

    def __truediv__(self, other) -> Scalar:
        if not isinstance(other, Scalar):
            other = Scalar.rational(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> Scalar:
        return Scalar.rational(other) * self.inverse()

    def __pow__(self, k: int) -> Scalar:
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            try:
                other = Scalar.rational(other)
            except (TypeError, ValueError):
                return NotImplemented
        if self.m == other.m:
            return self.c == other.c
        if self.m == 1 or other.m == 1:
            # a non-rational element in canonical form never equals a rational
            return False
        big = _lcm(self.m, other.m)
        return self.lift(big) == other.lift(big)

    def __hash__(self):
        if self.m == 1:
            return hash(self.c[0])
        # the same field element may carry several conductors; only rationals hash
        raise TypeError("non-rational Scalar is unhashable")

    def __repr__(self) -> str:
        if self.m == 1:
            return f"Scalar({self.c[0]})"
        return f"Scalar(m={self.m}, {[str(x) for x in self.c]})"

    __str__ = __repr__

    def valuation(self, p: int) -> Fraction | float:
        return valuation(self, default_oracle(p))


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [mpq(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and any(a):
        if not a[-1]:
            a.pop()
            continue
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
    while a and not a[-1]:
        a.pop()
    return q, a


def _poly_inverse(x: list, modulus: Sequence[int]) -> list:
    """Inverse of x in Q[t]/(modulus) by the extended Euclidean algorithm."""
    d = len(modulus) - 1
    r0, r1 = [mpq(c) for c in modulus], [mpq(c) for c in x]
    while r1 and not r1[-1]:
        r1.pop()
    s0, s1 = [mpq(0)], [mpq(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        qs = _poly_mul(q, s1)
        s2 = [a - b for a, b in _zip_pad(s0, qs)]
        r0, r1, s0, s1 = r1, r, s1, s2
        if not r1:
            raise ZeroDivisionError("element is not invertible")
    c = r1[0]
    out = [a / c for a in s1]
    _, out = _poly_divmod(out, [mpq(c) for c in modulus])
    return out + [mpq(0)] * (d - len(out))


def _poly_mul(a: list, b: list) -> list:
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _zip_pad(a: list, b: list):
    n = max(len(a), len(b))
    return zip(a + [mpq(0)] * (n - len(a)), b + [mpq(0)] * (n - len(b)))


ZERO = Scalar._raw((mpq(0),), 1)
ONE = Scalar._raw((mpq(1),), 1)


# ---------------------------------------------------------------------------
# valuations


def vp(x, p: int) -> int | float:
    """p-adic valuation of a nonzero integer or rational; ``inf`` for zero."""
    x = mpq(x)
    if not x:
        return inf
    num, den = x.numerator, x.denominator
    return int(gmpy2.remove(num, p)[1]) - int(gmpy2.remove(den, p)[1])


@dataclass(frozen=True)
class FieldParams:
    """Base field ``F = Q_p`` with uniformiser ``p``; ``q`` is the residue cardinality."""

    p: int
    q: int | None = None
    pi_val: int = 1

    def __post_init__(self):
        if self.p < 2 or not isprime(self.p):
            raise ValueError("p must be prime")
        if self.q is None:
            object.__setattr__(self, "q", self.p)
        if self.q != self.p:
            raise ValueError(f"only F = Q_p is supported (q = p = {self.p}), got q = {self.q}")


@dataclass(frozen=True)
class EmbeddingOracle:
    """A fixed embedding of the cyclotomic fields into ``Qbar_p``.

    ``zeta_(p-1)`` is sent to the Teichmuller lift of the smallest primitive
    root mod p (the smallest Hensel seed); ``zeta_d`` for ``d | p-1`` is the
    matching power, so the choice is compatible across conductors.  The
    p-power part of the conductor generates a totally ramified extension in
    which the valuation does not depend on the choice.
    """

    p: int
    precision: int = 64
    cap: int = 1024
    m: int | None = None
    seed: int = field(init=False)

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError("p must be prime")
        object.__setattr__(self, "seed", int(primitive_root(self.p)) if self.p > 2 else 1)

    def root(self, d: int, digits: int) -> int:
        """Image of ``zeta_d`` (``d | p-1``) modulo ``p**digits``."""
        if (self.p - 1) % d:
            raise UnsupportedEmbedding(
                f"zeta_{d} is not in Q_{self.p}; unramified extensions are not supported")
        mod = self.p ** digits
        teich = pow(self.seed, self.p ** (digits - 1), mod)
        return pow(teich, (self.p - 1) // d, mod)

    def describe(self) -> dict:
        return {"p": self.p, "zeta_p_minus_1_seed": self.seed, "precision": self.precision,
                "cap": self.cap}


@lru_cache(maxsize=None)
def default_oracle(p: int) -> EmbeddingOracle:
    return EmbeddingOracle(p)


def valuation(x: Scalar, oracle: EmbeddingOracle) -> Fraction | float:
    """Exact valuation of ``x`` under the oracle's embedding, ``v(p) = 1``."""
    p = oracle.p
    if not isinstance(x, Scalar):
        x = Scalar.rational(x)
    if x.is_zero():
        return inf
    if x.m == 1:
        return Fraction(vp(x.c[0], p))
    if oracle.m is not None and oracle.m % x.m:
        raise ValueError(f"conductor {x.m} does not divide the oracle conductor {oracle.m}")
    digits = oracle.precision
    while True:
        v = _cyclotomic_valuation(x, oracle, digits)
        if v is not None:
            return v
        if digits >= oracle.cap:
            raise AmbiguousValuation(
                f"valuation exceeds {oracle.cap} digits; test for exact zero first")
        digits = min(2 * digits, oracle.cap)


def _cyclotomic_valuation(x: Scalar, oracle: EmbeddingOracle, digits: int):
    p, m = oracle.p, x.m
    a = 0
    mm = m
    while mm % p == 0:
        mm //= p
        a += 1
    ppow = p ** a
    den = 1
    for c in x.c:
        den = _lcm(den, int(c.denominator))
    nums = [int(c * den) for c in x.c]
    exact = mm == 1
    mod = None if exact else p ** digits
    r = 1 if exact else oracle.root(mm, digits)
    if a and mm > 1:
        u = pow(mm, -1, ppow)  # u*mm + w*ppow = 1
        w = (1 - u * mm) // ppow
    else:
        u, w = 1, 1
    b = [0] * max(ppow, 1)
    rpow = [1] * mm
    for i in range(1, mm):
        rpow[i] = rpow[i - 1] * r if exact else rpow[i - 1] * r % mod
    for i, n in enumerate(nums):
        if n:
            e1 = (i * u) % ppow if a else 0
            e2 = (i * w) % mm if mm > 1 else 0
            b[e1] += n * rpow[e2]
    if a:
        e = _phi(ppow)
        table = _power_table(ppow)
        red = [0] * e
        for j, bj in enumerate(b):
            if bj:
                for i, t in enumerate(table[j]):
                    if t:
                        red[i] += bj * t
        # substitute zeta = 1 - varpi, varpi a uniformiser of valuation 1/e
        coords = []
        for k in range(e):
            s = sum(red[j] * comb(j, k) for j in range(k, e) if red[j])
            coords.append(-s if k % 2 else s)
    else:
        e = 1
        coords = [b[0]]
    best = None
    for k, ak in enumerate(coords):
        if mod is not None:
            ak %= mod
        if ak:
            val = Fraction(int(gmpy2.remove(mpz(ak), p)[1])) + Fraction(k, e)
            if best is None or val < best:
                best = val
    if best is None:
        return None
    return best - vp(den, p)


def padic_coordinates(x: Scalar, big: int, oracle: EmbeddingOracle,
                      digits: int) -> tuple[list[int], int, int]:
    """Coordinates of ``x`` (lifted to ``Q(zeta_big)``) on the basis ``varpi**k``.

    Returns ``(coords, e, s)`` with ``x = p**(-s) * sum(coords[k] * varpi**k)``,
    each coordinate a p-adic integer known modulo ``p**digits``; ``varpi`` is a
    uniformiser of valuation ``1/e``.
    """
    p = oracle.p
    vec = x.lift(big)
    a, mm = 0, big
    while mm % p == 0:
        mm //= p
        a += 1
    ppow = p ** a
    mod = p ** digits
    den = 1
    for c in vec:
        den = _lcm(den, int(c.denominator))
    s = vp(den, p) if den > 1 else 0
    unit_den = den // p ** s
    inv = pow(unit_den, -1, mod)
    nums = [int(c * den) * inv % mod for c in vec]
    r = oracle.root(mm, digits) if mm > 1 else 1
    if a and mm > 1:
        u = pow(mm, -1, ppow)
        w = (1 - u * mm) // ppow
    else:
        u, w = 1, 1
    b = [0] * ppow
    for i, n in enumerate(nums):
        if n:
            e1 = (i * u) % ppow if a else 0
            e2 = (i * w) % mm if mm > 1 else 0
            b[e1] = (b[e1] + n * pow(r, e2, mod)) % mod
    if not a:
        return [b[0]], 1, s
    e = _phi(ppow)
    table = _power_table(ppow)
    red = [0] * e
    for j, bj in enumerate(b):
        if bj:
            for i, t in enumerate(table[j]):
                if t:
                    red[i] += bj * t
    coords = []
    for k in range(e):
        acc = sum(red[j] * comb(j, k) for j in range(k, e) if red[j])
        coords.append((-acc if k % 2 else acc) % mod)
    return coords, e, s


# ---------------------------------------------------------------------------
# characters and Gauss sums


@lru_cache(maxsize=None)
def _unit_group(p: int, nu: int) -> tuple[tuple[tuple[int, int], ...], dict[int, tuple[int, ...]]]:
    """Generators ``(g, order)`` of ``(Z/p^nu)^x`` and discrete logs of every unit."""
    mod = p ** nu
    if nu == 0:
        return (), {0: ()}
    if p == 2:
        if nu == 1:
            gens = ()
        elif nu == 2:
            gens = ((mod - 1, 2),)
        else:
            gens = ((mod - 1, 2), (5, 2 ** (nu - 2)))
    else:
        gens = ((int(primitive_root(mod)), (p - 1) * p ** (nu - 1)),)
    logs: dict[int, tuple[int, ...]] = {1 % mod: tuple(0 for _ in gens)}
    frontier = [1 % mod]
    while frontier:
        nxt = []
        for u in frontier:
            for idx, (g, order) in enumerate(gens):
                v = u * g % mod
                if v not in logs:
                    lg = list(logs[u])
                    lg[idx] = (lg[idx] + 1) % order
                    logs[v] = tuple(lg)
                    nxt.append(v)
        frontier = nxt
    return gens, logs


@dataclass(frozen=True)
class CharacterSpec:
    """A character of ``F^x``: finite-order values on units, ``lam`` at ``pi``.

    ``exps`` maps each unit ``u mod p^nu`` to ``e`` with value ``zeta_N ** e``.
    """

    p: int
    nu: int
    N: int
    exps: tuple[tuple[int, int], ...]
    lam: Scalar = ONE

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("conductor must be nonnegative")
        if self.conductor() != self.nu:
            raise ValueError(f"character has conductor {self.conductor()}, not {self.nu}")

    @classmethod
    def unramified(cls, p: int, lam=1) -> CharacterSpec:
        return cls(p, 0, 1, ((0, 0),), Scalar.rational(lam))

    @classmethod
    def from_logs(cls, p: int, nu: int, ks: Sequence[int], lam=1) -> CharacterSpec:
        """Character sending the i-th generator of ``(Z/p^nu)^x`` to ``zeta_(order_i) ** ks[i]``."""
        gens, logs = _unit_group(p, nu)
        if len(ks) != len(gens):
            raise ValueError(f"need {len(gens)} exponents for (Z/{p}^{nu})^x")
        N = 1
        for _, order in gens:
            N = _lcm(N, order)
        exps = []
        for u, lg in sorted(logs.items()):
            e = sum(k * j * (N // order) for k, j, (_, order) in zip(ks, lg, gens)) % N
            exps.append((u, e))
        return cls(p, nu, N, tuple(exps), Scalar.rational(lam))

    @property
    def kind(self) -> str:
        return "unramified" if self.nu == 0 else "tame" if self.nu == 1 else "wild"

    @property
    def table(self) -> dict[int, int]:
        return dict(self.exps)

    def conductor(self) -> int:
        table = dict(self.exps)
        mod = self.p ** self.nu
        for c in range(0, self.nu + 1):
            step = self.p ** c
            if all(table[u] == 0 for u in table if (u - 1) % step == 0):
                return c
        return self.nu

    def exponent(self, u: int) -> int:
        mod = self.p ** self.nu
        return dict(self.exps)[u % mod] if self.nu else 0

    def value(self, u: int) -> Scalar:
        if u % self.p == 0:
            raise ValueError("characters are evaluated on units only")
        return Scalar.zeta(self.N, self.exponent(u)) if self.nu else ONE

    def inverse(self) -> CharacterSpec:
        return CharacterSpec(self.p, self.nu, self.N,
                             tuple((u, (-e) % self.N) for u, e in self.exps),
                             self.lam.inverse() if self.lam else self.lam)

    def order(self) -> int:
        o = 1
        for _, e in self.exps:
            o = _lcm(o, self.N // gcd(e, self.N))
        return o


def tame_characters(p: int) -> list[CharacterSpec]:
    """All nontrivial characters of ``U_F / U_F^1``."""
    return [CharacterSpec.from_logs(p, 1, [k]) for k in range(1, p - 1)]


def gauss_sum(eps: CharacterSpec, params: FieldParams | None = None) -> Scalar:
    """``sum over u mod p^nu of psi(u / p^nu) eps(u)`` with ``psi(a/p^k) = zeta_(p^k)^a``.

    This is the scalar written ``tau(eps^-1)`` in the convolution operator
    ``E_eps``; it satisfies ``gauss_sum(eps) * gauss_sum(eps.inverse()) ==
    eps(-1) * q**nu``.
    """
    if eps.nu == 0:
        raise TrivialCharacter("Gauss sums need a ramified character (conductor >= 1)")
    if params is not None and params.p != eps.p:
        raise ValueError("character and field disagree on p")
    mod = eps.p ** eps.nu
    big = _lcm(mod, eps.N)
    terms: dict[int, int] = {}
    for u, e in eps.exps:
        ex = (u * (big // mod) + e * (big // eps.N)) % big
        terms[ex] = terms.get(ex, 0) + 1
    return Scalar.from_exponents(big, terms)


# ---------------------------------------------------------------------------
# linear algebra


def solve_linear(A: Sequence[Sequence[Scalar]], b: Sequence[Scalar] | None = None,
                 ncols: int | None = None) -> tuple[list[Scalar], list[list[Scalar]]]:
    """Exact Gaussian elimination.

    Returns ``(x, kernel)`` where ``x`` is one solution of ``A x = b`` (free
    variables set to zero) and ``kernel`` is a basis of ``{y : A y = 0}``, each
    vector having a 1 in its free column.  Raises :class:`Inconsistent`.
    """
    rows = [list(r) for r in A]
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    rhs = list(b) if b is not None else [ZERO] * len(rows)
    if len(rhs) != len(rows):
        raise ValueError("right-hand side has the wrong length")
    rational = all(isinstance(x, Scalar) and x.m == 1 for r in rows for x in r) and \
        all(x.m == 1 for x in rhs)
    if rational:
        mat = [[x.c[0] for x in r] + [y.c[0]] for r, y in zip(rows, rhs)]
        zero, one = mpq(0), mpq(1)
        wrap = lambda x: Scalar._raw((x,), 1)  # noqa: E731
    else:
        mat = [list(r) + [y] for r, y in zip(rows, rhs)]
        zero, one = ZERO, ONE
        wrap = lambda x: x  # noqa: E731
    pivots = _rref(mat, n, zero)
    for r in mat[len(pivots):]:
        if r[n]:
            raise Inconsistent("linear system has no solution")
    x = [zero] * n
    for i, c in enumerate(pivots):
        x[c] = mat[i][n]
    pivset = set(pivots)
    kernel = []
    for f in range(n):
        if f in pivset:
            continue
        vec = [zero] * n
        vec[f] = one
        for i, c in enumerate(pivots):
            if mat[i][f]:
                vec[c] = -mat[i][f]
        kernel.append([wrap(v) for v in vec])
    return [wrap(v) for v in x], kernel


def _rref(mat: list[list], n: int, zero) -> list[int]:
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c] if not isinstance(mat[r][c], Scalar) else mat[r][c].inverse()
        row = [x * inv if x else zero for x in mat[r]]
        mat[r] = row
        nz = [j for j in range(c, n + 1) if row[j]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                tgt = mat[i]
                for j in nz:
                    tgt[j] = tgt[j] - f * row[j]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return pivots
