"""Canonical JSON forms for scalars, coefficient data, amplitude tables and parameters.

Rationals are written ``"num/den"`` (``"3"`` for integers).  Cyclotomic
scalars are ``{"m": conductor, "coeffs": [...]}`` with rational strings over
the power basis modulo the cyclotomic polynomial.  Nothing is ever written as
a decimal.
"""

from __future__ import annotations

import json
from fractions import Fraction

from gmpy2 import mpq

from .scalars import CharacterSpec, Scalar
from .symlat import PolyVec
from .wspace import WElem, WFunction

COEFFS_SCHEMA = "kirillov-lab/coeffs-v1"
TABLE_SCHEMA = "kirillov-lab/table-v1"


class FormatError(ValueError):
    pass


def _q(x) -> str:
    return str(Fraction(int(x.numerator), int(x.denominator)))


def scalar_to_json(x: Scalar):
    if x.m == 1:
        return _q(x.c[0])
    return {"m": x.m, "coeffs": [_q(c) for c in x.c]}


def scalar_from_json(obj) -> Scalar:
    try:
        if isinstance(obj, (str, int)):
            return Scalar.rational(Fraction(obj))
        return Scalar([mpq(str(Fraction(c))) for c in obj["coeffs"]], int(obj["m"]))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad scalar {obj!r}: {exc}") from None


def welem_to_json(b: WElem) -> str:
    return str(b.as_fraction())


def welem_from_json(s, p: int) -> WElem:
    try:
        return WElem.of(Fraction(s), p)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad frequency {s!r}: {exc}") from None


def polyvec_to_json(v: PolyVec) -> list:
    return [scalar_to_json(c) for c in v.coeffs]


def polyvec_from_json(obj, n: int) -> PolyVec:
    if not isinstance(obj, list) or len(obj) != n + 1:
        raise FormatError(f"expected {n + 1} coefficients, got {obj!r}")
    return PolyVec([scalar_from_json(c) for c in obj])


def wfunction_to_json(f: WFunction) -> list:
    return [[welem_to_json(b), polyvec_to_json(f[b])] for b in f.support()]


def character_to_json(eps: CharacterSpec | None):
    if eps is None or eps.nu == 0:
        return None
    return {"p": eps.p, "nu": eps.nu, "N": eps.N, "values": [[u, e] for u, e in eps.exps]}


def character_from_json(obj) -> CharacterSpec | None:
    if obj is None:
        return None
    try:
        return CharacterSpec(int(obj["p"]), int(obj["nu"]), int(obj["N"]),
                             tuple((int(u), int(e)) for u, e in obj["values"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad character: {exc}") from None


def coeffs_to_json(coeffs, p: int) -> dict:
    return {
        "schema": COEFFS_SCHEMA,
        "p": p,
        "n": coeffs.n,
        "entries": [
            {"k": k, "beta": welem_to_json(b), "c1": polyvec_to_json(c1), "c2": polyvec_to_json(c2)}
            for (k, b), (c1, c2) in coeffs.entries.items()
        ],
    }


def coeffs_from_json(obj: dict):
    from .kirillov import GeneratorCoeffs

    if not isinstance(obj, dict) or obj.get("schema") != COEFFS_SCHEMA:
        raise FormatError(f"expected schema {COEFFS_SCHEMA!r}")
    try:
        p, n = int(obj["p"]), int(obj["n"])
        entries = {}
        for e in obj["entries"]:
            key = (int(e["k"]), welem_from_json(e["beta"], p))
            if key in entries:
                raise FormatError(f"duplicate site {e['k']}, {e['beta']}")
            entries[key] = (polyvec_from_json(e["c1"], n), polyvec_from_json(e["c2"], n))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed coefficient file: {exc}") from None
    return GeneratorCoeffs(n, entries)


def table_to_json(table) -> dict:
    rows = []
    for l in table.levels():
        row = {"l": l, "C": wfunction_to_json(table.C[l]),
               "C1": wfunction_to_json(table.C1[l]), "C2": wfunction_to_json(table.C2[l])}
        if table.Ct:
            row["Ct"] = wfunction_to_json(table.Ct[l])
        rows.append(row)
    return {"schema": TABLE_SCHEMA, "regime": table.regime, "k0": table.k0,
            "l_max": table.l_max, "rows": rows}


def params_to_json(params) -> dict:
    return {
        "p": params.p,
        "n": params.n,
        "m": params.m,
        "regime": params.regime,
        "lambda": scalar_to_json(params.lam),
        "mu": scalar_to_json(params.mu),
        "eps": character_to_json(params.eps),
    }


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed separators, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
