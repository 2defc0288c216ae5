"""Command-line front end.

Every run is described by one JSON document (``--config``) whose keys can
also be given as flags; flags win.  The JSON report is deterministic for a
fixed config and seed; wall-clock data goes to ``metadata.json``.

Exit status: 0 success, 1 a violation flag or failed identity, 2 invalid
configuration or failed hypothesis (nothing written), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .geometry import Annulus, Disc, DomainError, domain_from_dict
from .kernels import GramAssemblyError, JetIdeal
from .products import (IDENTITIES, SELECTORS, ProductSpaceSpec, Resolution, kernel,
                       verification_field, verification_resolution, verify_decomposition)
from .saitoh import (SWEEP_AXES, THEOREMS, HypothesisError, TheoremConfig, default_resolution,
                     equality_case_config, eval_theorem, jet_ideal_from_dict, sweep)
from .weights import CFunction, GammaWeight, WeightField

COMMANDS = ("kernel", "verify", "theorem", "sweep", "suite")
FORMATS = ("json", "csv", "svg")
CSV_COLUMNS = ("parameter", "lhs", "rhs", "ratio", "refinement_delta")
IDENTITY_COLUMNS = ("id", "selector", "max_rel_err", "tol", "passed", "infeasible")
KERNEL_COLUMNS = ("selector", "point", "value", "imag")

_NUM = {"type": "number"}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_CPLX = {"oneOf": [_NUM, _PAIR]}
_DOMAIN = {
    "type": "object", "additionalProperties": False, "required": ["kind"],
    "properties": {"kind": {"enum": ["disc", "annulus"]}, "center": _CPLX,
                   "radius": {"type": "number", "exclusiveMinimum": 0},
                   "r_inner": {"type": "number", "exclusiveMinimum": 0},
                   "r_outer": {"type": "number", "exclusiveMinimum": 0}},
}
_FIELD = {
    "type": "object", "additionalProperties": False,
    "properties": {"poly": {"type": "array", "items": _CPLX},
                   "log_coef": _NUM,
                   "green": {"type": "array", "items": {"type": "array", "minItems": 2,
                                                        "maxItems": 2}},
                   "center": _CPLX},
}
_WEIGHTS = {
    "type": "object", "additionalProperties": False, "required": ["domains", "z0", "p"],
    "properties": {
        "kind": {"enum": ["single", "product"]},
        "domains": {"type": "array", "items": _DOMAIN, "minItems": 1, "maxItems": 3},
        "z0": {"type": "array", "items": _CPLX},
        "p": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "phi": {"type": "array", "items": _FIELD},
        "c": {"type": "object", "additionalProperties": False,
              "properties": {"kind": {"enum": ["constant_one", "exp_decay", "one", "exp"]},
                             "eps": _NUM}},
        "fiber": {"type": "array", "items": _DOMAIN, "maxItems": 2},
        "u0": {"type": "array", "items": _CPLX},
        "gamma": {"type": "object", "additionalProperties": False,
                  "properties": {"fields": {"type": "array", "items": _FIELD},
                                 "scale": {"type": "number", "exclusiveMinimum": 0}}},
    },
}
_JETS = {
    "type": "object", "additionalProperties": False, "required": ["l", "beta_tilde"],
    "properties": {"l": {"type": "array", "items": {"type": "array", "items": _CPLX}},
                   "beta_tilde": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                   "b": {"type": "array", "items": {"type": "array", "minItems": 2,
                                                    "maxItems": 2}},
                   "fiber_dim": {"type": "integer", "minimum": 0, "maximum": 2},
                   "fiber_bound": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
}
SCHEMA = {
    "type": "object", "additionalProperties": False, "required": ["command"],
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "id": {"enum": list(THEOREMS)},
        "identity": {"enum": list(IDENTITIES)},
        "domain": {"enum": ["disc", "annulus"]},
        "weights": _WEIGHTS,
        "jets": _JETS,
        "n": {"type": "integer", "minimum": 1, "maximum": 3},
        "c": {"enum": ["one", "exp"]},
        "eps": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "p": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "basis": {"type": "integer", "minimum": 1, "maximum": 256},
        "fiber_basis": {"type": "integer", "minimum": 0, "maximum": 32},
        "quad": {"type": "integer", "minimum": 8, "maximum": 8192},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "equality_tol": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "samples": {"type": "integer", "minimum": 1, "maximum": 100},
        "axis": {"enum": list(SWEEP_AXES)},
        "grid": {"type": "array", "items": _NUM, "minItems": 1},
        "selector": {"enum": list(SELECTORS)},
        "point": {"type": "array", "items": _CPLX},
        "refine": {"type": "boolean"},
        "out": {"type": "string"},
        "format": {"type": "array", "items": {"enum": list(FORMATS)}},
    },
}

DEFAULT_GRIDS = {
    "r_inner": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
    "p1": [2.0, 2.5, 3.0, 4.0, 6.0],
    "harmonic_coef": [0.3, 0.4, 0.5, 0.6, 0.7],
    "p0": [1.0, 1.25, 1.5, 2.0],
    "eps": [0.0, 0.25, 0.5, 0.75],
}
DEFAULT_SWEEPS = {"r_inner": "thm1.2", "p1": "thm1.8", "harmonic_coef": "thm1.3",
                  "p0": "thm1.3", "eps": "thm1.3"}
SUITE_THEOREMS = ("thm1.2", "thm1.3", "thm1.6", "thm1.8", "thm1.9", "thm1.10", "thm1.11",
                  "thm1.13", "thm1.15", "thm1.16", "thm1.19")


class ConfigError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    def __init__(self, operation: str, exc: Exception):
        super().__init__(f"numerical failure in {operation}: {exc}")
        self.operation = operation


# ---------------------------------------------------------------------------
# config


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="seed for all sampled points")
    common.add_argument("--tol", type=float, help="violation / identity tolerance")
    common.add_argument("--basis", type=int, help="basis degree N per factor")
    common.add_argument("--quad", type=int, help="boundary quadrature nodes per curve")
    common.add_argument("--format", action="append", choices=FORMATS,
                        help="output format (repeatable; default all)")
    common.add_argument("--domain", choices=["disc", "annulus"], help="first factor domain")
    common.add_argument("--c", choices=["one", "exp"], help="c(t) = 1 or exp(-eps t)")
    common.add_argument("--eps", type=float, help="decay rate for --c exp")
    common.add_argument("--p", type=float, nargs="+", help="exponents p_j")
    common.add_argument("--n", type=int, help="number of base factors")
    common.add_argument("--refine", action=argparse.BooleanOptionalAction, default=None,
                        help="also evaluate at doubled resolution")

    parser = argparse.ArgumentParser(prog="saitohlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    k = sub.add_parser("kernel", parents=[common], help="evaluate one kernel on the diagonal")
    k.add_argument("--selector", choices=SELECTORS)
    k.add_argument("--point", type=complex, nargs="+")
    v = sub.add_parser("verify", parents=[common], help="check a decomposition identity")
    v.add_argument("--identity", choices=list(IDENTITIES))
    v.add_argument("--samples", type=int)
    t = sub.add_parser("theorem", parents=[common], help="evaluate one inequality")
    t.add_argument("--id", choices=THEOREMS)
    s = sub.add_parser("sweep", parents=[common], help="sweep one parameter")
    s.add_argument("--id", choices=THEOREMS)
    s.add_argument("--axis", choices=SWEEP_AXES)
    s.add_argument("--grid", type=float, nargs="+")
    sub.add_parser("suite", parents=[common], help="default theorems and all identities")
    return parser


def merge_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        if cfg.get("command", args.command) != args.command:
            raise ConfigError(f"config command {cfg.get('command')!r} does not match "
                              f"subcommand {args.command!r}")
    cfg["command"] = args.command
    for key in ("out", "seed", "tol", "basis", "quad", "domain", "c", "eps", "p", "n", "refine",
                "identity", "samples", "id", "axis", "grid", "selector"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "point", None):
        cfg["point"] = [[z.real, z.imag] for z in args.point]
    if args.format:
        cfg["format"] = list(dict.fromkeys(args.format))
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {path}: {exc.message}") from exc
    return cfg


def _c_function(cfg: dict) -> CFunction:
    if cfg.get("c") == "exp":
        return CFunction("exp_decay", cfg.get("eps", 0.5))
    return CFunction()


def _first_domain(cfg: dict):
    return Annulus(0j, 0.5, 1.0) if cfg.get("domain") == "annulus" else Disc()


def _default_z0(d) -> complex:
    return complex(math.sqrt(d.r_inner * d.r_outer)) if isinstance(d, Annulus) else 0j


def default_jets(theorem: str, n: int, m: int) -> JetIdeal:
    """``l_1 = w_1`` with ``beta~ = (1, 0, ...)``; on fibrations ``b_0 = u_1``."""
    l_coeffs = ((0.0, 1.0),) + ((1.0,),) * (n - 1)
    bt = (1,) + (0,) * (n - 1)
    if not m:
        return JetIdeal.total(l_coeffs, bt)
    b = {(0,) * m: 0.0, (1,) + (0,) * (m - 1): 1.0}
    return JetIdeal.total(l_coeffs, bt, b, m)


def default_field(theorem: str, cfg: dict) -> WeightField:
    """Equality-case weights of ``theorem`` on the configured domains."""
    first = _first_domain(cfg)
    c = _c_function(cfg)
    fibration = theorem in ("thm1.6", "thm1.10", "thm1.11", "thm1.15", "thm1.19")
    fiber, u0 = ((Disc(),), (0.2 + 0j,)) if fibration else ((), ())
    if theorem in ("thm1.2", "thm1.3", "thm1.6"):
        p = tuple(cfg.get("p", (1.0,)))[:1]
        ec = equality_case_config(theorem, [first], [_default_z0(first)], p, c, fiber, u0)
        return ec.field
    n = cfg.get("n", 2)
    if n < 2 and theorem not in ("thm1.9", "thm1.11"):
        raise ConfigError(f"{theorem} needs n >= 2")
    domains = [first] + [Disc() for _ in range(n - 1)]
    z0 = [_default_z0(d) for d in domains]
    jets = default_jets(theorem, n, len(fiber)) if theorem in (
        "thm1.9", "thm1.11", "thm1.16", "thm1.19") else None
    if "p" in cfg:
        p = tuple(cfg["p"])
    elif jets is not None and theorem in ("thm1.9", "thm1.11"):
        # sum (beta~_j + 1)/p_j = 1 with beta~ = (1, 0, ...)
        p = (4.0, 2.0) if n == 2 else (float(n + 1),) * n
    else:
        p = (float(n),) * n
    if len(p) != n:
        raise ConfigError(f"expected {n} exponents p_j, got {len(p)}")
    return equality_case_config(theorem, domains, z0, p, c, fiber, u0, jets=jets).field


def resolution_for(theorem: str | None, fld: WeightField, cfg: dict) -> Resolution:
    res = default_resolution(theorem, fld) if theorem else verification_resolution(fld.n)
    changes = {}
    if "basis" in cfg:
        changes.update(degree=cfg["basis"], factor_degrees=None)
    if "fiber_basis" in cfg:
        changes["fiber_degree"] = cfg["fiber_basis"]
    if "quad" in cfg:
        changes["boundary_nodes"] = cfg["quad"]
    if not changes:
        return res
    return replace(res, **changes)


def theorem_config(theorem: str, cfg: dict) -> TheoremConfig:
    try:
        fld = WeightField.from_dict(cfg["weights"]) if "weights" in cfg \
            else default_field(theorem, cfg)
        if "jets" in cfg:
            jets = jet_ideal_from_dict(cfg["jets"])
        elif theorem in ("thm1.9", "thm1.11", "thm1.16", "thm1.19"):
            jets = default_jets(theorem, fld.n, fld.m)
        else:
            jets = None
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid weights or jets: {exc}") from exc
    kw = {}
    if "tol" in cfg:
        kw["tol"] = cfg["tol"]
    if "equality_tol" in cfg:
        kw["equality_tol"] = cfg["equality_tol"]
    # without explicit sizes each (possibly swept) field gets its own defaults
    explicit = any(k in cfg for k in ("basis", "fiber_basis", "quad"))
    res = resolution_for(theorem, fld, cfg) if explicit else None
    return TheoremConfig(fld, jets, res, **kw)


# ---------------------------------------------------------------------------
# commands


def _numeric(operation: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except HypothesisError:
        raise
    except (GramAssemblyError, np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        raise NumericalFailure(operation, exc) from exc


def run_theorem(cfg: dict) -> dict:
    theorem = cfg.get("id")
    if theorem is None:
        raise ConfigError("theorem needs --id")
    tc = theorem_config(theorem, cfg)
    rep = _numeric(f"eval_theorem({theorem})", eval_theorem, theorem, tc,
                   cfg.get("refine", True))
    return {"reports": [rep.to_dict()]}


def run_sweep(cfg: dict) -> dict:
    axis = cfg.get("axis")
    if axis is None:
        raise ConfigError("sweep needs --axis")
    theorem = cfg.get("id", DEFAULT_SWEEPS[axis])
    if axis in ("r_inner", "harmonic_coef") and "weights" not in cfg:
        cfg = dict(cfg, domain="annulus")
    tc = theorem_config(theorem, cfg)
    grid = cfg.get("grid", DEFAULT_GRIDS[axis])
    res = _numeric(f"sweep({theorem}, {axis})", sweep, theorem, tc, axis, grid,
                   cfg.get("refine", False))
    out = res.to_dict()
    return {"reports": out["reports"], "sweep": {"id": theorem, "axis": axis, "grid": out["grid"],
                                                 "summary": out["summary"],
                                                 "errors": out["errors"]}}


def run_verify(cfg: dict, identity: str | None = None) -> dict:
    identity = identity or cfg.get("identity")
    if identity is None:
        raise ConfigError("verify needs --identity")
    seed = cfg.get("seed", 0)
    try:
        if "weights" in cfg:
            fld = WeightField.from_dict(cfg["weights"])
        else:
            first = _first_domain(cfg) if cfg.get("domain") == "annulus" else None
            fld = verification_field(identity, cfg.get("n", 2), seed, first)
        jets = jet_ideal_from_dict(cfg["jets"]) if "jets" in cfg else None
        spec = ProductSpaceSpec(fld, IDENTITIES[identity][0], resolution_for(None, fld, cfg))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid verification setup: {exc}") from exc
    rep = _numeric(f"verify_decomposition({identity})", verify_decomposition, identity, spec,
                   cfg.get("samples", 5), seed, cfg.get("tol", 1e-6), jets)
    return {"identities": [rep.to_dict()]}


def run_kernel(cfg: dict) -> dict:
    selector = cfg.get("selector", "dD")
    try:
        if "weights" in cfg:
            fld = WeightField.from_dict(cfg["weights"])
        else:
            theorem = {"dD": "thm1.3", "M": "thm1.3", "dD_U": "thm1.6", "M_U": "thm1.10",
                       "dM": "thm1.8", "S": "thm1.13", "dM_U": "thm1.10",
                       "S_U": "thm1.15"}[selector]
            fld = default_field(theorem, cfg)
            if selector == "M_U" and fld.kind == "product" and cfg.get("n", 2) < 2:
                raise ConfigError("M_U needs n >= 2 without explicit weights")
        spec = ProductSpaceSpec(fld, selector, resolution_for("thm1.13" if fld.kind == "product"
                                                             else "thm1.3", fld, cfg))
        point = tuple(complex(*z) if isinstance(z, list) else complex(z)
                      for z in cfg["point"]) if "point" in cfg else spec.base_point
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid kernel setup: {exc}") from exc
    val = _numeric(f"kernel({selector})", kernel, spec, point, point)
    return {"kernels": [{"selector": selector, "point": [[z.real, z.imag] for z in point],
                         "value": val.real, "imag": val.imag, "sizes": spec.sizes()}]}


def run_suite(cfg: dict) -> dict:
    reports, identities = [], []
    for theorem in SUITE_THEOREMS:
        reports += run_theorem(dict(cfg, id=theorem, refine=cfg.get("refine", False)))["reports"]
    for identity in IDENTITIES:
        identities += run_verify(cfg, identity)["identities"]
    return {"reports": reports, "identities": identities}


RUNNERS = {"theorem": run_theorem, "sweep": run_sweep, "verify": run_verify,
           "kernel": run_kernel, "suite": run_suite}


# ---------------------------------------------------------------------------
# output


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def exit_status(result: dict) -> int:
    if any(r["verdict"] == "violation-flag" for r in result.get("reports", [])):
        return 1
    if any(not r["passed"] for r in result.get("identities", [])):
        return 1
    if result.get("sweep", {}).get("errors"):
        return 3
    return 0


def write_outputs(result: dict, cfg: dict, out: Path, formats) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    report = out / "report.json"
    report.write_text(json.dumps(_clean(result), indent=2, sort_keys=True) + "\n")
    written.append(report)
    meta = {"timestamp": datetime.now(timezone.utc).isoformat(), "version": __version__,
            "argv": sys.argv[1:]}
    (out / "metadata.json").write_text(json.dumps(meta, indent=2) + "\n")
    written.append(out / "metadata.json")
    rows = result.get("reports", [])
    if "csv" in formats and rows:
        path = out / "report.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in rows:
                w.writerow(["" if r.get(c) is None else r[c] for c in CSV_COLUMNS])
        written.append(path)
    if "svg" in formats and rows:
        from .plotting import plot_ratios
        path = out / "ratio.svg"
        if "sweep" in result:
            sw = result["sweep"]
            plot_ratios([r["parameter"] for r in rows], [r["ratio"] for r in rows], path,
                        f"{sw['id']}: ratio vs {sw['axis']}", sw["axis"])
        else:
            plot_ratios([], [r["ratio"] for r in rows], path, "lhs / rhs by theorem",
                        labels=[r["id"] for r in rows])
        written.append(path)
    idents = result.get("identities", [])
    if "csv" in formats and idents:
        path = out / "identities.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(IDENTITY_COLUMNS)
            for r in idents:
                w.writerow([r[c] for c in IDENTITY_COLUMNS])
        written.append(path)
    if "svg" in formats and idents:
        from .plotting import plot_identity_errors
        path = out / "identities.svg"
        plot_identity_errors([r["id"] for r in idents], [r["max_rel_err"] for r in idents],
                             max(r["tol"] for r in idents), path)
        written.append(path)
    kernels = result.get("kernels", [])
    if "csv" in formats and kernels:
        # a single value has nothing to plot, so kernels get no SVG
        path = out / "kernels.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(KERNEL_COLUMNS)
            for r in kernels:
                point = " ".join(repr(complex(*z)) for z in r["point"])
                w.writerow([r["selector"], point, r["value"], r["imag"]])
        written.append(path)
    return written


def run(cfg: dict) -> tuple[int, dict]:
    """Execute a validated config; returns ``(exit status, result)``."""
    result = RUNNERS[cfg["command"]](cfg)
    result = {"command": cfg["command"],
              "config": {k: v for k, v in sorted(cfg.items()) if k not in ("out", "format")},
              **result}
    return exit_status(result), result


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = merge_config(args)
        status, result = run(cfg)
    except (ConfigError, HypothesisError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    out = Path(cfg.get("out", "out"))
    formats = cfg.get("format", list(FORMATS))
    for path in write_outputs(result, cfg, out, formats):
        print(path)
    for r in result.get("reports", []):
        print(f"{r['id']}: ratio={r['ratio']:.12g} verdict={r['verdict']}")
    for r in result.get("identities", []):
        print(f"{r['id']}: max_rel_err={r['max_rel_err']:.3e} "
              f"{'pass' if r['passed'] else 'FAIL'}")
    for r in result.get("kernels", []):
        print(f"{r['selector']}: K={r['value']:.12g}")
    return status


if __name__ == "__main__":
    sys.exit(main())
