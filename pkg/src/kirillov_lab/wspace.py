"""The frequency group ``W = F/O_F`` and finitely supported functions on it.

Frequencies are rationals ``a / p^k`` reduced into ``[0, 1)``.  Functions on
``W`` take values in any additive group whose elements support ``+``, ``-``,
multiplication by a :class:`~kirillov_lab.scalars.Scalar` and truth testing
(nonzero); in practice :class:`Scalar` or
:class:`~kirillov_lab.symlat.PolyVec`.

The additive character is fixed globally as ``psi(a/p^k) = zeta_(p^k)^a``,
whose kernel is exactly ``O_F``.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple

from .scalars import CharacterSpec, Scalar, TrivialCharacter, gauss_sum

__all__ = [
    "WElem",
    "WFunction",
    "convolve",
    "fiber",
    "in_C0",
    "in_C1",
    "mul_by_pi",
    "pi_pullback",
    "project_C0",
    "project_C1",
    "psi",
    "random_welem",
    "suspend",
]


class WElem(NamedTuple):
    """``a / p^k mod 1`` in canonical form: ``0 <= a < p^k`` and ``p`` does not divide ``a`` unless ``a = k = 0``."""

    a: int
    k: int
    p: int

    @classmethod
    def of(cls, x, p: int) -> WElem:
        x = Fraction(x)
        den = x.denominator
        k = 0
        while den % p == 0:
            den //= p
            k += 1
        if den != 1:
            # the prime-to-p denominator is a unit: fold it into the numerator
            mod = p ** k
            num = x.numerator * pow(den, -1, mod) if k else 0
        else:
            num = x.numerator
        return cls._reduce(num, k, p)

    @classmethod
    def zero(cls, p: int) -> WElem:
        return cls(0, 0, p)

    @classmethod
    def _reduce(cls, a: int, k: int, p: int) -> WElem:
        a %= p ** k
        if a == 0:
            return cls(0, 0, p)
        while a % p == 0:
            a //= p
            k -= 1
        return cls(a, k, p)

    @property
    def depth(self) -> int:
        return self.k

    def as_fraction(self) -> Fraction:
        return Fraction(self.a, self.p ** self.k)

    def __add__(self, other: WElem) -> WElem:
        if other.p != self.p:
            raise ValueError("frequencies over different primes")
        k = max(self.k, other.k)
        a = self.a * self.p ** (k - self.k) + other.a * self.p ** (k - other.k)
        return WElem._reduce(a, k, self.p)

    def __neg__(self) -> WElem:
        return WElem._reduce(-self.a, self.k, self.p)

    def __sub__(self, other: WElem) -> WElem:
        return self + (-other)

    def scale(self, x) -> WElem:
        """Multiply by a p-integral rational (e.g. a unit or a power of p)."""
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ValueError("multiplier must be p-integral")
        return WElem.of(self.as_fraction() * x, self.p)

    def times_pi(self) -> WElem:
        if self.k == 0:
            return self
        return WElem._reduce(self.a, self.k - 1, self.p)

    def fiber(self) -> list[WElem]:
        """The ``p`` frequencies ``alpha`` with ``pi * alpha == self``."""
        p, k = self.p, self.k
        return [WElem._reduce(self.a + t * p ** k, k + 1, p) for t in range(p)]

    def __str__(self) -> str:
        return "0" if self.a == 0 else f"{self.a}/{self.p}^{self.k}"


def mul_by_pi(beta: WElem) -> WElem:
    return beta.times_pi()


def fiber(beta: WElem, q: int | None = None) -> list[WElem]:
    if q is not None and q != beta.p:
        raise ValueError("only q = p is supported")
    return beta.fiber()


def psi(beta: WElem) -> Scalar:
    """The fixed additive character evaluated at ``beta``."""
    if beta.a == 0:
        return Scalar.rational(1)
    return Scalar.zeta(beta.p ** beta.k, beta.a)


def random_welem(p: int, max_depth: int, rng: random.Random) -> WElem:
    k = rng.randint(0, max_depth)
    return WElem._reduce(rng.randrange(p ** k), k, p)


class WFunction:
    """Finitely supported function on ``W``; zero values are never stored."""

    __slots__ = ("p", "_d")

    def __init__(self, p: int, values: Mapping[WElem, object] | Iterable = ()):
        items = values.items() if isinstance(values, Mapping) else values
        d = {}
        for b, v in items:
            if v:
                d[b] = v
        self.p = p
        self._d = d

    @classmethod
    def delta(cls, beta: WElem, value) -> WFunction:
        return cls(beta.p, {beta: value})

    @classmethod
    def _wrap(cls, p: int, d: dict) -> WFunction:
        obj = object.__new__(cls)
        obj.p = p
        obj._d = {b: v for b, v in d.items() if v}
        return obj

    def __getitem__(self, beta: WElem):
        return self._d.get(beta)

    def get(self, beta: WElem, default=None):
        return self._d.get(beta, default)

    def items(self):
        return self._d.items()

    def support(self) -> list[WElem]:
        return sorted(self._d, key=lambda b: (b.k, b.a))

    def __iter__(self) -> Iterator[WElem]:
        return iter(self.support())

    def __len__(self) -> int:
        return len(self._d)

    def __bool__(self) -> bool:
        return bool(self._d)

    def __add__(self, other: WFunction) -> WFunction:
        d = dict(self._d)
        for b, v in other._d.items():
            d[b] = d[b] + v if b in d else v
        return WFunction._wrap(self.p, d)

    def __neg__(self) -> WFunction:
        return WFunction._wrap(self.p, {b: -v for b, v in self._d.items()})

    def __sub__(self, other: WFunction) -> WFunction:
        return self + (-other)

    def scale(self, s) -> WFunction:
        if not s:
            return WFunction(self.p)
        return WFunction._wrap(self.p, {b: v * s for b, v in self._d.items()})

    def map(self, f: Callable) -> WFunction:
        return WFunction._wrap(self.p, {b: f(v) for b, v in self._d.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, WFunction):
            return NotImplemented
        if self._d.keys() != other._d.keys():
            return False
        return all(self._d[b] == other._d[b] for b in self._d)

    def max_depth(self) -> int:
        return max((b.k for b in self._d), default=0)

    def __repr__(self) -> str:
        inner = ", ".join(f"{b}: {self._d[b]}" for b in self.support())
        return f"WFunction({{{inner}}})"


def suspend(f: WFunction) -> WFunction:
    """``(S f)(beta) = sum of f(alpha) over pi * alpha = beta``."""
    d: dict = {}
    for a, v in f.items():
        b = a.times_pi()
        d[b] = d[b] + v if b in d else v
    return WFunction._wrap(f.p, d)


def pi_pullback(f: WFunction) -> WFunction:
    """``(Pi f)(beta) = f(pi * beta)``."""
    d = {}
    for b, v in f.items():
        for a in b.fiber():
            d[a] = v
    return WFunction._wrap(f.p, d)


def _convolution_weights(xi: CharacterSpec) -> list[tuple[WElem, Scalar]]:
    if xi.nu == 0:
        raise TrivialCharacter("convolution needs a ramified character")
    p, nu = xi.p, xi.nu
    q_nu = Scalar.rational(p ** nu)
    factor = gauss_sum(xi) / q_nu
    inv = xi.inverse()
    out = []
    for u, _ in xi.exps:
        shift = WElem._reduce(u, nu, p)
        out.append((shift, factor * inv.value(u)))
    return out


def convolve(xi: CharacterSpec, f: WFunction) -> WFunction:
    """``(E_xi f)(beta) = tau / q^nu * sum_u xi^-1(u) f(beta - u / p^nu)``.

    ``tau`` is :func:`~kirillov_lab.scalars.gauss_sum` of ``xi``.
    """
    weights = _convolution_weights(xi)
    d: dict = {}
    for a, v in f.items():
        for shift, w in weights:
            b = a + shift
            term = v * w
            d[b] = d[b] + term if b in d else term
    return WFunction._wrap(f.p, d)


def project_C1(f: WFunction) -> WFunction:
    """``P_1 = (1/q) Pi S``: average over each coset of ``W_1``."""
    return pi_pullback(suspend(f)).scale(Scalar.rational(1, f.p))


def project_C0(f: WFunction, xi: CharacterSpec | None = None) -> WFunction:
    """``P_0 = E_xi E_xi^-1`` for a nontrivial tame ``xi``; without ``xi``, ``1 - P_1``."""
    if xi is None:
        return f - project_C1(f)
    if xi.nu == 0:
        raise TrivialCharacter("P_0 needs a nontrivial character")
    return convolve(xi, convolve(xi.inverse(), f))


def _coset_closure(f: WFunction) -> dict[WElem, list[WElem]]:
    return {b.times_pi(): b.times_pi().fiber() for b, _ in f.items()}


def in_C1(f: WFunction) -> bool:
    """True when ``f(beta)`` depends only on ``pi * beta``."""
    for gamma, coset in _coset_closure(f).items():
        vals = [f.get(a) for a in coset]
        first = vals[0]
        for v in vals[1:]:
            if (first is None) != (v is None):
                return False
            if first is not None and v != first:
                return False
    return True


def in_C0(f: WFunction) -> bool:
    """True when every ``W_1``-coset sum of ``f`` vanishes."""
    return not suspend(f)
