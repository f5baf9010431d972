"""Command-line front end: ``kirillov-lab {verify-lemmas,expand,check,search,gauss}``.

Settings come from an INI file (``--config``) with a ``[common]`` section and
one section per command; flags override file values.  Unknown keys are
errors.  Exit codes: 0 success (or exploratory finding), 1 violation in an
asserted regime, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from sympy import isprime

from . import bsverify
from .bsverify import GridSpec, check_table, inject_fault, pattern_params, search
from .kirillov import (InvalidCoeffs, RegimeMismatch, RepParams, expand, vanishes_outside_integers,
                       verify_two_step)
from .scalars import CharacterSpec, Scalar, default_oracle, gauss_sum, valuation
from .serialize import (FormatError, coeffs_from_json, dumps, params_to_json, scalar_to_json,
                        table_to_json, welem_to_json)
from .suites import SUITES, run_suite

SCHEMA = bsverify.SCHEMA

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2

# key -> parser; every accepted key is listed here
_INT = int
_BOOL = lambda s: str(s).strip().lower() in ("1", "true", "yes", "on")  # noqa: E731


def _ints(s) -> tuple[int, ...]:
    if isinstance(s, (list, tuple)):
        return tuple(int(x) for x in s)
    return tuple(int(x) for x in str(s).replace(" ", "").split(",") if x)


def _strs(s) -> tuple[str, ...]:
    if isinstance(s, (list, tuple)):
        return tuple(s)
    return tuple(x.strip() for x in str(s).split(",") if x.strip())


COMMON_KEYS = {
    "p": _ints, "n": _ints, "m": _ints, "regime": _strs, "seed": _INT, "workers": _INT,
    "l_max": _INT, "out": str, "cache": str, "wild": _BOOL,
}
SECTION_KEYS = {
    "verify-lemmas": {"suites": _strs, "trials": _INT},
    "expand": {"coeffs": str, "lam": str, "mu": str, "vlt": str, "char": _INT, "irreducible_guard": _BOOL},
    "check": {"coeffs": str, "lam": str, "mu": str, "vlt": str, "char": _INT, "irreducible_guard": _BOOL,
              "k0": _INT, "depth": _INT, "trials": _INT, "fault": _INT},
    "search": {"k0": _ints, "depth": _INT, "trials": _INT, "patterns": str, "characters": str},
    "gauss": {"nu": _INT, "k": _ints},
}
DEFAULTS = {
    "p": (5,), "n": (0,), "m": (0,), "regime": ("unramified",), "seed": 0, "workers": 1,
    "l_max": 3, "out": None, "cache": None, "wild": False,
    "suites": tuple(SUITES), "trials": None, "coeffs": None, "lam": None, "mu": None,
    "vlt": "0", "char": 1, "irreducible_guard": True, "k0": None, "depth": 1, "fault": 0,
    "patterns": "boundary", "characters": "first", "nu": 1, "k": (1,),
}
# settings that do not affect results; they go to the volatile run section
VOLATILE = ("workers", "cache", "out")


class ConfigError(Exception):
    pass


def _load_file(path: str | None, command: str) -> dict:
    if not path:
        return {}
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for section in cp.sections():
        if section != "common" and section not in SECTION_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        allowed = COMMON_KEYS if section == "common" else {**COMMON_KEYS, **SECTION_KEYS[section]}
        for key, raw in cp.items(section):
            key_n = key.replace("-", "_")
            if key_n not in allowed:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            if section in ("common", command):
                out[key_n] = (allowed[key_n], raw)
    return out


def resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags (in that order of precedence)."""
    parsers = {**COMMON_KEYS, **SECTION_KEYS.get(command, {})}
    cfg = {k: DEFAULTS[k] for k in parsers}
    for key, (parse, raw) in _load_file(args.config, command).items():
        try:
            cfg[key] = parse(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
    for key in parsers:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            try:
                cfg[key] = parsers[key](val) if not isinstance(val, bool) else val
            except ValueError as exc:
                raise ConfigError(f"bad value for --{key}: {val!r} ({exc})") from None
    env = os.environ.get("KIRILLOV_CACHE")
    if env and "cache" in cfg:
        cfg["cache"] = env
    for p in cfg.get("p", ()):
        if p < 2 or not isprime(p):
            raise ConfigError("p must be prime")
    for r in cfg.get("regime", ()):
        if r not in ("unramified", "tame", "wild", "degenerate"):
            raise ConfigError(f"unknown regime {r!r}")
    return cfg


def _echo(cfg: dict) -> dict:
    out = {}
    for k, v in sorted(cfg.items()):
        if k in VOLATILE:
            continue
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


def _volatile(cfg: dict, **extra) -> dict:
    run = {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    run.update({k: cfg.get(k) for k in VOLATILE if k in cfg})
    run.update(extra)
    return run


def _write(cfg: dict, doc: dict) -> None:
    text = dumps(doc)
    if cfg.get("out"):
        Path(cfg["out"]).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg["out"]).write_text(text)
    else:
        sys.stdout.write(text)


def _single(cfg: dict, key: str):
    vals = cfg[key]
    if len(vals) != 1:
        raise ConfigError(f"{key} takes a single value for this command")
    return vals[0]


def _params(cfg: dict) -> RepParams:
    p, n, m = _single(cfg, "p"), _single(cfg, "n"), _single(cfg, "m")
    regime = _single(cfg, "regime")
    eps = None
    try:
        if regime in ("tame", "wild"):
            nu = 1 if regime == "tame" else 2
            gens = 1 if p > 2 else (1 if nu == 1 else 2)
            ks = [cfg["char"]] + [0] * (gens - 1)
            eps = CharacterSpec.from_logs(p, nu, ks)
        if cfg["lam"] is not None or cfg["mu"] is not None:
            if cfg["lam"] is None or cfg["mu"] is None:
                raise ConfigError("give both lam and mu, or neither")
            return RepParams.make(p, n, m, regime, Fraction(cfg["lam"]), Fraction(cfg["mu"]), eps,
                                  check_irreducible=cfg["irreducible_guard"])
        return pattern_params(p, n, m, regime, Fraction(cfg["vlt"]), eps=eps)
    except (RegimeMismatch, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _load_coeffs(path: str, params: RepParams):
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse coefficient file {path}: {exc}") from None
    try:
        coeffs = coeffs_from_json(obj)
    except FormatError as exc:
        raise ConfigError(str(exc)) from None
    if obj.get("p") != params.p or coeffs.n != params.n:
        raise ConfigError("coefficient file disagrees with p or n")
    try:
        coeffs.validate(params)
    except InvalidCoeffs as exc:
        raise ConfigError(f"invalid coefficients: {exc}") from None
    return coeffs


# ---------------------------------------------------------------------------
# commands


def cmd_verify_lemmas(cfg: dict) -> int:
    p = _single(cfg, "p")
    n_vals = cfg["n"]
    results = []
    for name in cfg["suites"]:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
        kw = {"p": p, "seed": cfg["seed"]}
        if cfg["trials"] is not None:
            kw["trials"] = cfg["trials"]
        if name == "lattice-identities":
            kw["n_values"] = n_vals
        elif name in ("two-step-recursion", "degenerate-recursion"):
            kw["n"] = n_vals[0]
            kw["m"] = cfg["m"][0]
        if name in ("tame-projections", "tame-rewrite") and p == 2:
            continue
        res = run_suite(name, **kw)
        results.append(res)
        print(res.line())
        for f in res.failures[:5]:
            print(f"    {f}")
    doc = {"schema": SCHEMA, "command": "verify-lemmas", "config": _echo(cfg),
           "suites": [{"name": r.name, "passed": r.passed, "cases": r.cases, "failures": r.failures}
                      for r in results],
           "verdict": "all-pass" if all(r.passed for r in results) else "violation",
           "run": _volatile(cfg)}
    if cfg.get("out"):
        _write(cfg, doc)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


def cmd_expand(cfg: dict) -> int:
    if not cfg["coeffs"]:
        raise ConfigError("expand needs a coefficient file (--coeffs PATH)")
    params = _params(cfg)
    coeffs = _load_coeffs(cfg["coeffs"], params)
    table = expand(coeffs, params, l_max=cfg["l_max"])
    audit = verify_two_step(table, params)
    doc = {
        "schema": SCHEMA,
        "command": "expand",
        "config": _echo(cfg),
        "params": params_to_json(params),
        "table": table_to_json(table),
        "audit": {
            "two_step": {"ok": audit.ok, "level": audit.level,
                         "gamma": None if audit.gamma is None else welem_to_json(audit.gamma)},
            "vanishes_outside_integers": vanishes_outside_integers(table),
            "first_double_primed_row_zero": not table.C2[table.k0],
        },
        "run": _volatile(cfg),
    }
    _write(cfg, doc)
    return EXIT_OK


def cmd_check(cfg: dict) -> int:
    params = _params(cfg)
    asserted = bsverify._asserted(params)
    if cfg["coeffs"]:
        coeffs = _load_coeffs(cfg["coeffs"], params)
        table = expand(coeffs, params, l_max=0)
        if not vanishes_outside_integers(table):
            raise ConfigError("the coefficient data does not vanish off O_F")
        if cfg["fault"]:
            table = inject_fault(table, params, cfg["fault"])
        res = check_table(table, params)
        violations = [v.to_json() for v in res.violations]
        doc = {"schema": SCHEMA, "command": "check", "config": _echo(cfg),
               "params": params_to_json(params), "bs_conditions": bsverify.check_bs_conditions(params),
               "asserted": asserted, "violations": violations, "checked": res.checked,
               "verdict": "violation" if violations else "all-pass", "run": _volatile(cfg)}
        _write(cfg, doc)
        return EXIT_VIOLATION if violations and asserted else EXIT_OK
    grid = _grid(cfg, k0=(cfg["k0"] if cfg["k0"] is not None else -2,))
    report = search(grid, workers=cfg["workers"], cache=cfg["cache"], command="check",
                    config=_echo(cfg), params=params, fault=cfg["fault"])
    report.run.update(_volatile(cfg))
    _write(cfg, report.to_json())
    return EXIT_VIOLATION if report.asserted_violation else EXIT_OK


def _grid(cfg: dict, k0=None) -> GridSpec:
    return GridSpec(
        p=cfg["p"], n=cfg["n"], m=cfg["m"], regimes=cfg["regime"],
        patterns=cfg.get("patterns", "boundary"), k0=k0 if k0 is not None else (cfg["k0"] or (-2,)),
        depth=cfg["depth"], trials=cfg["trials"] if cfg["trials"] is not None else 50,
        seed=cfg["seed"], wild=cfg["wild"], characters=cfg.get("characters", "first"),
    )


def cmd_search(cfg: dict) -> int:
    grid = _grid(cfg)
    report = search(grid, workers=cfg["workers"], cache=cfg["cache"], command="search",
                    config=_echo(cfg))
    report.run.update(_volatile(cfg))
    _write(cfg, report.to_json())
    s = report.body["summary"]
    print(f"verdict: {report.verdict}  runs={s['runs']} trials={s['trials']} "
          f"asserted_violations={s['asserted_violations']} "
          f"exploratory_findings={s['exploratory_findings']}", file=sys.stderr)
    return EXIT_VIOLATION if report.asserted_violation else EXIT_OK


def cmd_gauss(cfg: dict) -> int:
    p = _single(cfg, "p")
    try:
        eps = CharacterSpec.from_logs(p, cfg["nu"], list(cfg["k"]))
        g = gauss_sum(eps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    v = valuation(g, default_oracle(p))
    doc = {"schema": SCHEMA, "command": "gauss", "config": _echo(cfg),
           "character": {"nu": eps.nu, "order": eps.order()},
           "gauss_sum": scalar_to_json(g), "square": scalar_to_json(g * g),
           "valuation": str(v), "eps_minus_one": scalar_to_json(eps.value(p ** eps.nu - 1)),
           "run": _volatile(cfg)}
    if cfg.get("out"):
        _write(cfg, doc)
    print(f"tau      = {json.dumps(scalar_to_json(g))}")
    print(f"tau^2    = {json.dumps(scalar_to_json(g * g))}")
    print(f"v(tau)   = {v}")
    return EXIT_OK


COMMANDS = {
    "verify-lemmas": cmd_verify_lemmas,
    "expand": cmd_expand,
    "check": cmd_check,
    "search": cmd_search,
    "gauss": cmd_gauss,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kirillov-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="INI file with [common] and per-command sections")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--p", help="prime, or comma list for search")
        sp.add_argument("--n", help="weight n, or comma list")
        sp.add_argument("--m", help="twist m, or comma list")
        sp.add_argument("--regime", help="unramified, tame, wild or degenerate (comma list for search)")
        sp.add_argument("--l-max", dest="l_max", type=int)
        sp.add_argument("--out", help="report path (stdout when omitted)")
        sp.add_argument("--cache", help="trial cache directory (KIRILLOV_CACHE overrides)")
        sp.add_argument("--wild", action="store_true", default=None, help="enable conductor >= 2 search")
        if name == "verify-lemmas":
            sp.add_argument("--suites", help="comma list of suite names")
            sp.add_argument("--trials", type=int)
        if name in ("expand", "check"):
            sp.add_argument("--coeffs", help="coefficient file (JSON)")
            sp.add_argument("--lam")
            sp.add_argument("--mu")
            sp.add_argument("--vlt", help="v(lambda) + m on the BS segment when lam/mu are not given")
            sp.add_argument("--char", type=int, help="exponent k of the tame character omega^k")
            sp.add_argument("--no-irreducible-guard", dest="irreducible_guard", action="store_const",
                            const="0", help="allow lam = q mu (reducible) parameters")
        if name == "check":
            sp.add_argument("--k0", type=int)
            sp.add_argument("--trials", type=int)
            sp.add_argument("--fault", type=int, help="scale one level-0 amplitude by p^-FAULT")
        if name == "search":
            sp.add_argument("--k0", help="comma list of lowest levels")
            sp.add_argument("--depth", type=int)
            sp.add_argument("--trials", type=int)
            sp.add_argument("--patterns", choices=("boundary", "interior", "all"))
        if name == "gauss":
            sp.add_argument("--nu", type=int)
            sp.add_argument("--k", help="character exponents, one per generator")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = resolve(args.command, args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
