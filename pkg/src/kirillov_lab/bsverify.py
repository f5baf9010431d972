"""Breuil-Schneider checks, amplitude-bound verification and the counterexample search.

The verifier takes ``phi`` in ``Lambda`` that vanishes off ``O_F`` and checks,
for every level ``k0 <= l <= 0``:

* unramified / degenerate: ``C_l(beta) in M_l(beta)``;
* tame / wild (``n = 0``): ``v(C'_l(beta)), v(C''_l(beta)) >= -1 - m l``.

:func:`search` sweeps a grid of parameters, builds vanishing functions with
:func:`~kirillov_lab.kirillov.solve_vanishing` and records every failure with
its exact valuation.  Regimes with ``n < q`` and conductor at most 1 are
asserted; ``n >= q`` and wild characters are exploratory.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from .kirillov import (GeneratorCoeffs, RepParams, expand, solve_vanishing, support_template,
                       vanishes_outside_integers)
from .scalars import CharacterSpec, Scalar, default_oracle, gauss_sum, tame_characters, valuation
from .serialize import dumps, params_to_json, polyvec_to_json, welem_to_json
from .symlat import (Lattice, PolyVec, WeightTooLarge, contains, coordinate_margin, lattice_M,
                     lattice_sum, norm_margin, supnorm_on_disk)
from .wspace import WElem, WFunction, project_C1

__all__ = [
    "BSReport",
    "Certificate",
    "GridSpec",
    "NotVanishing",
    "TrialCheck",
    "Violation",
    "bs_patterns",
    "certificate_prop13",
    "check_bs_conditions",
    "check_table",
    "check_theorem12",
    "inject_fault",
    "pattern_params",
    "replay_trial",
    "search",
]

SCHEMA = "kirillov-lab/report-v1"
LATTICE_CONVENTION = "M_l(beta) = q^-1 pi^(-n - l m) N_l(beta)"


class NotVanishing(ValueError):
    pass


def _v(x: Scalar, p: int):
    return valuation(x, default_oracle(p))


def check_bs_conditions(params: RepParams) -> bool:
    """Unitary central character and boundedness, as exact valuation tests."""
    p, n, m = params.p, params.n, params.m
    vl, vm = _v(params.lam, p), _v(params.mu, p)
    return vl + vm + 2 * m + 1 + n == 0 and vl + m >= -1 - n and vm + m >= -1 - n


def bs_patterns(n: int, kind: str = "boundary") -> list[Fraction]:
    """Values of ``v(lam~) = v(lam) + m`` on the BS segment ``[-1-n, 0]``.

    ``boundary`` gives the two end points, ``interior`` the integer points
    strictly inside, ``all`` both.
    """
    ends = [Fraction(0), Fraction(-1 - n)]
    inner = [Fraction(-j) for j in range(1, n + 1)]
    if kind == "boundary":
        return ends
    if kind == "interior":
        return inner
    if kind == "all":
        return ends + inner
    raise ValueError(f"unknown pattern kind {kind!r}")


def _half_unit(p: int) -> Scalar:
    """An element of valuation 1/2: a quadratic Gauss sum (or sqrt 2 when p = 2)."""
    if p == 2:
        return Scalar.zeta(8, 1) + Scalar.zeta(8, 7)
    quad = CharacterSpec.from_logs(p, 1, [(p - 1) // 2])
    return gauss_sum(quad)


def _power(p: int, v: Fraction) -> Scalar:
    if v.denominator == 1:
        return Scalar.rational(Fraction(p) ** int(v))
    if v.denominator == 2:
        return Scalar.rational(Fraction(p) ** int(v - Fraction(1, 2))) * _half_unit(p)
    raise ValueError("only integral and half-integral valuations are supported")


def pattern_params(p: int, n: int, m: int, regime: str, vlt=Fraction(0), *,
                   eps: CharacterSpec | None = None, unit_lam=1, unit_mu=None) -> RepParams:
    """Parameters on the BS segment with ``v(lam) + m = vlt``.

    In the degenerate regime ``vlt`` is forced to ``-(1+n)/2``.  The default
    unit part of ``mu`` avoids the reducible points ``lam = q mu`` when
    ``n = 0`` in the unramified regime.
    """
    vlt = Fraction(vlt)
    if regime == "degenerate":
        vlt = Fraction(-1 - n, 2)
        lam = _power(p, vlt - m) * unit_lam
        return RepParams.make(p, n, m, regime, lam, lam)
    vmt = -1 - n - vlt
    if unit_mu is None:
        unit_mu = 1 if regime in ("tame", "wild") else (3 if p == 2 else 2)
    lam = _power(p, vlt - m) * unit_lam
    mu = _power(p, vmt - m) * unit_mu
    return RepParams.make(p, n, m, regime, lam, mu, eps)


# ---------------------------------------------------------------------------
# the amplitude-bound verifier


@dataclass(frozen=True)
class Violation:
    l: int
    beta: WElem
    part: str
    valuation: Fraction
    bound: Fraction
    route: str

    def to_json(self) -> dict:
        return {"l": self.l, "beta": welem_to_json(self.beta), "part": self.part,
                "valuation": str(self.valuation), "bound": str(self.bound), "route": self.route}


@dataclass
class TrialCheck:
    violations: list[Violation]
    checked: int
    min_margin: Fraction | None
    projection_noop: bool = True

    @property
    def passed(self) -> bool:
        return not self.violations


def _membership(l: int, beta: WElem, P: PolyVec, params: RepParams):
    L = lattice_M(l, beta, params.weight)
    oracle = default_oracle(params.p)
    if L.basis is not None:
        margin = coordinate_margin(L, P, oracle)
        return margin, Fraction(L.scale), "basis"
    margin = norm_margin(L, P, oracle)
    return margin, Fraction(L.scale - L.n * L.l), "norm"


def check_table(table, params: RepParams, top: int = 0) -> TrialCheck:
    """Bound-check the rows ``k0 <= l <= top`` of an amplitude table."""
    p, m = params.p, params.m
    oracle = default_oracle(p)
    out: list[Violation] = []
    checked = 0
    low = None
    noop = True
    for l in range(table.k0, min(top, table.l_max) + 1):
        if params.ramified:
            bound = Fraction(-1 - m * l)
            for part, rows in (("C'", table.C1), ("C''", table.C2)):
                for beta, P in rows[l].items():
                    v = min(valuation(c, oracle) for c in P.coeffs if c)
                    checked += 1
                    low = v - bound if low is None else min(low, v - bound)
                    if v < bound:
                        out.append(Violation(l, beta, part, Fraction(v), bound, "valuation"))
            continue
        row = table.C[l]
        if l < 0:
            canon = project_C1(row)
            if canon != row:
                noop = False
            row = canon
        for beta, P in row.items():
            margin, bound, route = _membership(l, beta, P, params)
            checked += 1
            low = margin if low is None else min(low, margin)
            if margin < 0:
                out.append(Violation(l, beta, "C", Fraction(bound + margin), bound, route))
    return TrialCheck(out, checked, None if low is None else Fraction(low), noop)


def check_theorem12(coeffs: GeneratorCoeffs, params: RepParams, *, table=None,
                    fault: int = 0) -> TrialCheck:
    """Verify the amplitude bounds for a ``phi`` that vanishes off ``O_F``.

    ``fault > 0`` scales one level-0 amplitude by ``p^-fault`` after the
    vanishing test, to exercise the failure path.
    """
    if table is None:
        table = expand(coeffs, params, l_max=0, validate=False)
    if not vanishes_outside_integers(table):
        raise NotVanishing("phi does not vanish off O_F")
    if fault:
        table = inject_fault(table, params, fault)
    return check_table(table, params)


def inject_fault(table, params: RepParams, exponent: int):
    """Copy of ``table`` with the tightest level-0 amplitude scaled by ``p^-exponent``."""
    if table.k0 > 0 or 0 not in table.C or not table.C[0]:
        return table
    row = table.C[0] if not params.ramified else table.C1[0]
    if params.ramified:
        oracle = default_oracle(params.p)
        tight = min(row.support(), key=lambda b: min(valuation(c, oracle) for c in row[b].coeffs if c))
    else:
        tight = min(row.support(), key=lambda b: _membership(0, b, row[b], params)[0])
    factor = Scalar.rational(Fraction(1, params.p ** exponent))
    out = copy.copy(table)
    for name in ("C", "C1", "C2", "Ct"):
        rows = dict(getattr(table, name))
        if 0 in rows and rows[0].get(tight) is not None:
            r = dict(rows[0].items())
            r[tight] = r[tight] * factor
            rows[0] = WFunction(params.p, r)
        setattr(out, name, rows)
    return out


# ---------------------------------------------------------------------------
# the integral-structure certificate


@dataclass
class Certificate:
    witness: PolyVec
    lattice: Lattice
    outside: bool
    pairwise_outside: bool

    def to_json(self) -> dict:
        return {"witness": polyvec_to_json(self.witness), "outside": self.outside,
                "pairwise_outside": self.pairwise_outside}


def certificate_prop13(params: RepParams) -> Certificate:
    """A vector ``C`` outside ``sum over W_1 of M_0(beta)``.

    ``pairwise_outside`` confirms that ``C`` is also outside every
    ``M_0(0) + M_0(beta)``, so ``C_0(0) - C = C_0(beta)`` cannot hold for an
    expansion obeying the bounds.
    """
    p, w = params.p, params.weight
    W1 = [WElem._reduce(a, 1, p) for a in range(p)]
    lats = [lattice_M(0, b, w) for b in W1]
    if any(L.basis is None for L in lats):
        raise WeightTooLarge("certificate needs n < q")
    oracle = default_oracle(p)
    total = lattice_sum(lats, oracle)
    witness = total.basis[0] * Scalar.rational(Fraction(1, p))
    outside = not contains(total, witness, oracle=oracle)
    pairwise = all(not contains(lattice_sum([lats[0], L], oracle), witness, oracle=oracle)
                   for L in lats[1:])
    return Certificate(witness, total, outside, pairwise)


# ---------------------------------------------------------------------------
# the search harness


@dataclass(frozen=True)
class GridSpec:
    p: tuple[int, ...] = (5,)
    n: tuple[int, ...] = (0, 1)
    m: tuple[int, ...] = (0,)
    regimes: tuple[str, ...] = ("unramified",)
    patterns: str = "boundary"
    k0: tuple[int, ...] = (-2,)
    depth: int = 1
    trials: int = 50
    seed: int = 0
    wild: bool = False
    characters: str = "first"

    def to_json(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


@dataclass(frozen=True)
class RunSpec:
    p: int
    n: int
    m: int
    regime: str
    vlt: Fraction
    k0: int
    char: int | None = None
    explicit: RepParams | None = None

    @property
    def key(self) -> str:
        if self.explicit is not None:
            pj = params_to_json(self.explicit)
            return (f"p={self.p}|n={self.n}|m={self.m}|{self.regime}|lam={json.dumps(pj['lambda'])}"
                    f"|mu={json.dumps(pj['mu'])}|k0={self.k0}|eps={json.dumps(pj['eps'])}")
        return f"p={self.p}|n={self.n}|m={self.m}|{self.regime}|vlt={self.vlt}|k0={self.k0}|chi={self.char}"


def _characters(p: int, regime: str, which: str) -> list[tuple[int, CharacterSpec]]:
    if regime == "tame":
        chars = tame_characters(p)
    else:
        gens_count = 1 if p > 2 else 2
        ks = [1] + [0] * (gens_count - 1)
        if p == 2:
            # conductor 3, trivial on -1: exercises the second generator (5) of (Z/8)^x
            chars = [CharacterSpec.from_logs(2, 3, [0, 1])]
        else:
            chars = [CharacterSpec.from_logs(p, 2, ks)]
    if which == "first":
        chars = chars[:1]
    return list(enumerate(chars))


def enumerate_runs(grid: GridSpec) -> tuple[list[RunSpec], list[str]]:
    runs, skipped = [], []
    for p in grid.p:
        for regime in grid.regimes:
            for n in grid.n:
                if regime in ("tame", "wild") and n != 0:
                    skipped.append(f"p={p} n={n} {regime}: ramified regimes need n = 0")
                    continue
                if regime == "wild" and not grid.wild:
                    skipped.append(f"p={p} n={n} wild: enable the wild flag")
                    continue
                if regime == "tame" and p == 2:
                    skipped.append("p=2 has no nontrivial tame character")
                    continue
                for m in grid.m:
                    pats = ([Fraction(-1 - n, 2)] if regime == "degenerate"
                            else bs_patterns(n, grid.patterns))
                    chars = (_characters(p, regime, grid.characters)
                             if regime in ("tame", "wild") else [(None, None)])
                    for vlt in pats:
                        for ci, _ in chars:
                            for k0 in grid.k0:
                                runs.append(RunSpec(p, n, m, regime, vlt, k0, ci))
    return runs, skipped


def _params_for(spec: RunSpec, grid_chars: str) -> RepParams:
    if spec.explicit is not None:
        return spec.explicit
    eps = None
    if spec.regime in ("tame", "wild"):
        eps = dict(_characters(spec.p, spec.regime, "all"))[spec.char]
    return pattern_params(spec.p, spec.n, spec.m, spec.regime, spec.vlt, eps=eps)


def trial_seed(master: int, key: str, t: int) -> int:
    h = hashlib.sha256(f"{master}|{key}|{t}".encode()).hexdigest()
    return int(h[:16], 16)


def _combine(basis: list[GeneratorCoeffs], lead: int, weights: list[int], p: int) -> GeneratorCoeffs:
    acc = basis[lead]
    pp = Scalar.rational(p)
    for b, c in zip(basis, weights):
        if c:
            acc = acc + b.scale(pp * c)
    return acc


def run_trial(params: RepParams, basis: list[GeneratorCoeffs], t: int, seed: int,
              fault: int = 0) -> dict:
    """One sampled ``phi``: a basis vector (on the integrality boundary) plus ``p`` times a random combination."""
    rng = random.Random(seed)
    lead = t % len(basis)
    weights = [rng.randint(-2, 2) for _ in basis]
    rec = {"trial": t, "seed": seed, "basis_index": lead}
    try:
        phi = _combine(basis, lead, weights, params.p)
        res = check_theorem12(phi, params, fault=fault)
        rec.update({
            "violations": [v.to_json() for v in res.violations],
            "checked": res.checked,
            "min_margin": None if res.min_margin is None else str(res.min_margin),
            "projection_noop": res.projection_noop,
        })
    except Exception as exc:  # recorded, never raised
        rec.update({"violations": [], "error": f"{type(exc).__name__}: {exc}"})
    return rec


def _asserted(params: RepParams) -> bool:
    return params.n < params.field.q and params.regime != "wild"


def _cache_path(cache: str | None, params_json: dict, template: dict, seed: int) -> Path | None:
    if not cache:
        return None
    key = hashlib.sha256(dumps({"params": params_json, "template": template, "seed": seed}).encode())
    return Path(cache) / f"{key.hexdigest()}.json"


def _run_config(spec: RunSpec, grid: GridSpec, cache: str | None,
                fault: int = 0) -> tuple[dict, list[int], dict]:
    """Returns the run record, the indices of cached trials, and new cache entries to write."""
    params = _params_for(spec, grid.characters)
    pj = params_to_json(params)
    template = {"k0": spec.k0, "top": 0, "depth": grid.depth}
    if fault:
        template["fault"] = fault
    seeds = [trial_seed(grid.seed, spec.key, t) for t in range(grid.trials)]
    trials: list[dict | None] = [None] * grid.trials
    cached = []
    for t, s in enumerate(seeds):
        path = _cache_path(cache, pj, template, s)
        if path is not None and path.exists():
            trials[t] = json.loads(path.read_text())
            cached.append(t)
    basis_size = None
    fresh: dict = {}
    if any(tr is None for tr in trials):
        sites = support_template(spec.k0, grid.depth, spec.p)
        basis = solve_vanishing(sites, params)
        basis_size = len(basis)
        for t, s in enumerate(seeds):
            if trials[t] is not None:
                continue
            if not basis:
                rec = {"trial": t, "seed": s, "basis_index": None, "violations": [],
                       "error": "EmptySolution: only phi = 0 vanishes on this template"}
            else:
                rec = run_trial(params, basis, t, s, fault)
            rec["basis_size"] = basis_size
            trials[t] = rec
            path = _cache_path(cache, pj, template, s)
            if path is not None:
                fresh[str(path)] = rec
    else:
        basis_size = trials[0].get("basis_size") if trials else None
    record = {
        "key": spec.key,
        "params": pj,
        "template": template,
        "bs_conditions": check_bs_conditions(params),
        "asserted": _asserted(params),
        "basis_size": basis_size,
        "trials": trials,
    }
    nviol = sum(len(tr["violations"]) for tr in trials)
    errors = sum(1 for tr in trials if tr.get("error"))
    if nviol:
        verdict = "violation"
    elif errors or not trials:
        verdict = "inconclusive"
    else:
        verdict = "all-pass"
    record["verdict"] = verdict
    record["violations"] = nviol
    if verdict == "all-pass" and record["asserted"]:
        record["certificate"] = certificate_prop13(params).to_json()
    return record, cached, fresh


def _run_config_star(args):
    return _run_config(*args)


@dataclass
class BSReport:
    """A search report: a JSON-ready body plus a volatile run section."""

    body: dict
    run: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return self.body["verdict"]

    @property
    def asserted_violation(self) -> bool:
        return self.body["summary"]["asserted_violations"] > 0

    def to_json(self) -> dict:
        return {**self.body, "run": self.run}

    def text(self) -> str:
        return dumps(self.to_json())

    def stable_text(self) -> str:
        """The report without its volatile run section (timestamp, cache hits, worker count)."""
        return dumps(self.body)


def search(grid: GridSpec, *, workers: int = 1, cache: str | None = None,
           command: str = "search", config: dict | None = None,
           params: RepParams | None = None, fault: int = 0) -> BSReport:
    """Run the verifier over ``grid`` (or over ``params`` alone, for each ``k0`` of the grid)."""
    if params is not None:
        runs = [RunSpec(params.p, params.n, params.m, params.regime, Fraction(0), k0, None, params)
                for k0 in grid.k0]
        skipped = []
    else:
        runs, skipped = enumerate_runs(grid)
    jobs = [(spec, grid, cache, fault) for spec in runs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_config_star, jobs))
    else:
        results = [_run_config(*j) for j in jobs]
    records, cached_marks = [], []
    for i, (rec, cached, fresh) in enumerate(results):
        records.append(rec)
        cached_marks.extend([i, t] for t in cached)
        for path, entry in fresh.items():
            # single writer: only the parent process touches the cache directory
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            Path(path).write_text(dumps(entry))
    asserted_viol = sum(r["violations"] for r in records if r["asserted"])
    total_viol = sum(r["violations"] for r in records)
    if not records:
        verdict = "inconclusive"
    elif asserted_viol:
        verdict = "violation"
    elif any(r["verdict"] == "inconclusive" for r in records):
        verdict = "inconclusive"
    elif total_viol:
        verdict = "violation"
    else:
        verdict = "all-pass"
    body = {
        "schema": SCHEMA,
        "command": command,
        "config": config if config is not None else grid.to_json(),
        "embedding": {str(p): default_oracle(p).describe()
                      for p in sorted({r.p for r in runs} | set(grid.p))},
        "lattice_convention": LATTICE_CONVENTION,
        "skipped": skipped,
        "runs": records,
        "summary": {
            "runs": len(records),
            "trials": sum(len(r["trials"]) for r in records),
            "violations": total_viol,
            "asserted_violations": asserted_viol,
            "exploratory_findings": total_viol - asserted_viol,
        },
        "verdict": verdict,
    }
    run = {
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "workers": workers,
        "cached": cached_marks,
    }
    return BSReport(body, run)


def replay_trial(record: dict, trial: dict, grid: GridSpec | None = None) -> dict:
    """Recompute one trial of a report run from its recorded parameters, template and seed."""
    from .serialize import character_from_json, scalar_from_json

    pj = record["params"]
    params = RepParams.make(pj["p"], pj["n"], pj["m"], pj["regime"],
                            scalar_from_json(pj["lambda"]), scalar_from_json(pj["mu"]),
                            character_from_json(pj["eps"]))
    tpl = record["template"]
    basis = solve_vanishing(support_template(tpl["k0"], tpl["depth"], pj["p"], tpl["top"]), params)
    rec = run_trial(params, basis, trial["trial"], trial["seed"], tpl.get("fault", 0))
    rec["basis_size"] = len(basis)
    return rec
