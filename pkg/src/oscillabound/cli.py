"""Command-line front door: one subcommand per library capability, JSON
config in, a single deterministic JSON report on stdout, optional CSV
sidecar of transform samples.

Exit codes: 0 success, 1 validation or configuration error, 2 internal
consistency failure (the empirical minimum broke a certified floor -- the
regression alarm).  Identical config and seed produce byte-identical
reports.
"""

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from .cayleylab import (
    BoxSet,
    CliqueInstance,
    clique_search,
    coloring_threshold,
    config_search,
    curve_difference_oracle,
    multivariate_reduce,
    periodic_coloring_verify,
    upper_density_estimate,
)
from .padic import PadicWindow, certified_bound_padic, echelon_reduce, mu_hat_padic
from .polycore import check_independence, parse_curve_family, parse_rational
from .realosc import Window, certified_constant_real, mu_hat_real_with_error
from .spectral import (
    PipelineConsistencyError,
    independence_pipeline,
    minimize_mu_hat,
)

_COMMANDS = {}


def _command(name):
    def register(fn):
        _COMMANDS[name] = fn
        return fn

    return register


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return str(x)
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(x).items()}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _field_of(cfg):
    """-> ('real', None) or ('padic', p), validated."""
    field = cfg.get("field", "real")
    if field in ("real", "R"):
        return "real", None
    if isinstance(field, dict) and "padic" in field:
        p = int(field["padic"])
    elif isinstance(field, int):
        p = field
    else:
        raise ValueError(f"field must be 'real' or {{'padic': p}}; got {field!r}")
    if not _is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    return "padic", p


def _family_of(cfg):
    fam = parse_curve_family(cfg["family"])
    if not check_independence(fam):
        raise ValueError("independence violation: 1, f_1, ..., f_m are linearly dependent")
    return fam


def _real_window_of(cfg):
    a, T = cfg["window"]
    return Window(float(parse_rational(a)), float(parse_rational(T)))


def _padic_window_of(cfg, p):
    a, T = cfg["window"]
    return PadicWindow(int(a), int(T), p)


def _lambdas_of(cfg, m):
    if "lambdas" in cfg:
        rows = cfg["lambdas"]
    elif "lambda" in cfg:
        rows = [cfg["lambda"]]
    else:
        raise ValueError("config needs 'lambda' (one tuple) or 'lambdas' (a list)")
    out = []
    for row in rows:
        if len(row) != m:
            raise ValueError(f"lambda tuple length {len(row)} != family size {m}")
        out.append(tuple(parse_rational(v) for v in row))
    return out


def _write_csv(path, m, rows):
    """Schema: lambda_1..lambda_m, value, error; '.'-decimal floats."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"lambda_{i + 1}" for i in range(m)] + ["value", "error"])
        for lam, value, error in rows:
            w.writerow([repr(float(v)) for v in lam] + [repr(float(value)), repr(float(error))])


@_command("muhat")
def _cmd_muhat(cfg, flags):
    fam = _family_of(cfg)
    w = _real_window_of(cfg)
    tol = flags.tol if flags.tol is not None else float(cfg.get("tol", 1e-9))
    rows = []
    for lam in _lambdas_of(cfg, fam.m):
        value, error = mu_hat_real_with_error(fam, w, lam, tol=tol)
        rows.append((lam, value, error))
    if flags.csv:
        _write_csv(flags.csv, fam.m, rows)
    report = {
        "samples": [
            {"lambda": [str(v) for v in lam], "value": value, "error": error}
            for lam, value, error in rows
        ]
    }
    if len(rows) == 1:
        report["value"] = rows[0][1]
        report["error"] = rows[0][2]
    return report


@_command("padic-muhat")
def _cmd_padic_muhat(cfg, flags):
    kind, p = _field_of(cfg)
    if kind != "padic":
        raise ValueError("padic-muhat needs field = {'padic': p}")
    fam = _family_of(cfg)
    w = _padic_window_of(cfg, p)
    out = []
    for lam in _lambdas_of(cfg, fam.m):
        v = mu_hat_padic(fam, w, lam)
        entry = {"lambda": [str(x) for x in lam], "value_float": float(v)}
        if isinstance(v, Fraction):
            entry["value"] = str(v)
        out.append(entry)
    report = {"samples": out}
    if len(out) == 1:
        report.update(out[0])
    return report


@_command("certify")
def _cmd_certify(cfg, flags):
    fam = _family_of(cfg)
    bound = certified_constant_real(fam)
    report = {
        "C": bound.C,
        "breakdown": {k: list(v) for k, v in bound.breakdown.items()},
        "constants": _jsonable(bound.constants),
    }
    if "window" in cfg:
        w = _real_window_of(cfg)
        report["window"] = [w.a, w.T]
        report["ratio_bound"] = bound.C / w.length
        report["floor"] = -bound.C / w.length
    return report


@_command("padic-certify")
def _cmd_padic_certify(cfg, flags):
    kind, p = _field_of(cfg)
    if kind != "padic":
        raise ValueError("padic-certify needs field = {'padic': p}")
    fam = _family_of(cfg)
    w = _padic_window_of(cfg, p)
    transform, reduced = echelon_reduce(fam)
    bound_b = certified_bound_padic(reduced, w)
    floor = Fraction(-bound_b) / w.L
    return {
        "B": bound_b,
        "L": str(w.L),
        "floor": str(floor),
        "floor_float": float(floor),
        "reduced_degrees": [f.degree for f in reduced.polys],
        "row_transform": [[str(c) for c in row] for row in transform],
    }


@_command("minimize")
def _cmd_minimize(cfg, flags):
    kind, p = _field_of(cfg)
    fam = _family_of(cfg)
    seed = flags.seed if flags.seed is not None else int(cfg.get("seed", 0))
    budget = flags.budget if flags.budget is not None else cfg.get("budget")
    tol = flags.tol if flags.tol is not None else float(cfg.get("tol", 1e-6))
    if kind == "real":
        w = _real_window_of(cfg)
        rep = minimize_mu_hat(fam, w, field="real", budget=budget, seed=seed, tol=tol)
    else:
        w = _padic_window_of(cfg, p)
        rep = minimize_mu_hat(fam, w, field=("padic", p), budget=budget, seed=seed, tol=tol)
    if flags.csv:
        _write_csv(flags.csv, fam.m, [(lam, val, tol) for _, lam, val in rep.trace])
    return _jsonable(rep)


@_command("pipeline")
def _cmd_pipeline(cfg, flags):
    kind, p = _field_of(cfg)
    fam = _family_of(cfg)
    seed = flags.seed if flags.seed is not None else int(cfg.get("seed", 0))
    budget = flags.budget if flags.budget is not None else cfg.get("budget")
    tol = flags.tol if flags.tol is not None else float(cfg.get("tol", 1e-6))
    if kind == "real":
        w = _real_window_of(cfg)
        res = independence_pipeline(fam, w, field="real", budget=budget, seed=seed, tol=tol)
    else:
        w = _padic_window_of(cfg, p)
        res = independence_pipeline(fam, w, field=("padic", p), budget=budget, seed=seed, tol=tol)
    if flags.csv:
        _write_csv(flags.csv, fam.m, [(lam, val, tol) for _, lam, val in res.report.trace])
    return _jsonable(res)


@_command("config-search")
def _cmd_config_search(cfg, flags):
    fam = _family_of(cfg)
    if "boxset_path" in cfg:
        with open(cfg["boxset_path"]) as fh:
            box_cfg = json.load(fh)
    else:
        box_cfg = cfg["boxset"]
    boxes = BoxSet.from_json(box_cfg)
    res = config_search(fam, tuple(cfg["window"]), boxes, cfg["step"])
    report = {"found": res.found}
    if res.found:
        report.update(
            s=str(res.s),
            x1=[str(v) for v in res.x1],
            x2=[str(v) for v in res.x2],
            residual=res.residual,
        )
    if "density_radii" in cfg:
        report["density"] = _jsonable(
            upper_density_estimate(boxes, [float(r) for r in cfg["density_radii"]])
        )
    return report


@_command("clique")
def _cmd_clique(cfg, flags):
    fam = _family_of(cfg)
    tol = flags.tol if flags.tol is not None else float(cfg.get("tol", 1e-9))
    oracle = curve_difference_oracle(fam, tol=tol)
    inst = CliqueInstance(cfg["points"], oracle)
    found = clique_search(inst, max_size=cfg.get("max_size"))
    return {"size": len(found), "clique": [list(p) for p in found]}


def _series_function(spec):
    """f(t) = constant + sum amp*cos(2 pi k t) + sum amp*sin(2 pi k t)."""
    c0 = float(spec.get("constant", 0.0))
    cos_terms = [(int(k), float(a)) for k, a in spec.get("cos", [])]
    sin_terms = [(int(k), float(a)) for k, a in spec.get("sin", [])]

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, c0)
        for k, a in cos_terms:
            out = out + a * np.cos(2 * np.pi * k * t)
        for k, a in sin_terms:
            out = out + a * np.sin(2 * np.pi * k * t)
        return out

    return f


@_command("color-check")
def _cmd_color_check(cfg, flags):
    f = _series_function(cfg["function"])
    seed = flags.seed if flags.seed is not None else int(cfg.get("seed", 0))
    n_min, M, eps, delta = coloring_threshold(f)
    n = int(cfg.get("n", n_min))
    edges = int(cfg.get("edges", 100_000))
    violations = periodic_coloring_verify(f, n, edges, seed=seed)
    return {
        "n": n,
        "n_min": n_min,
        "M": M,
        "eps": eps,
        "delta": delta,
        "edges": edges,
        "violations": violations,
    }


@_command("reduce")
def _cmd_reduce(cfg, flags):
    fam = multivariate_reduce(cfg["components"], ell=cfg.get("ell"))
    return {
        "family": [[str(c) for c in f.coeffs] for f in fam.polys],
        "degrees": [f.degree for f in fam.polys],
        "independent": check_independence(fam),
    }


def _threads_from_env():
    raw = os.environ.get("OSCILLABOUND_THREADS")
    if raw is None:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError("OSCILLABOUND_THREADS must be >= 1")
    return n


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # bad arguments are a validation error (exit 1), not the exit-2 alarm
    def error(self, message):
        raise _UsageError(message)


def main(argv=None):
    parser = _Parser(
        prog="oscillabound",
        description="Transforms of measures on polynomial curves, certified "
        "lower bounds, and their combinatorial companions.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("config", help="path to a JSON config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--budget", type=int, default=None)
    parser.add_argument("--csv", default=None, help="CSV sidecar path for sample rows")

    try:
        flags = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stdout.write(
            json.dumps({"detail": str(exc), "error": "usage"}, sort_keys=True, separators=(",", ":"))
            + "\n"
        )
        return 1

    try:
        with open(flags.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ValueError("config must be a JSON object")
        resolved = dict(cfg)
        resolved["_resolved"] = {
            "command": flags.command,
            "seed": flags.seed,
            "tol": flags.tol,
            "budget": flags.budget,
            "csv": flags.csv,
            "threads": _threads_from_env(),
        }
        report = _COMMANDS[flags.command](cfg, flags)
        payload = {"command": flags.command, "config": resolved, "report": report}
        code = 0
    except PipelineConsistencyError as exc:
        payload = {
            "command": flags.command,
            "error": "consistency failure",
            "detail": str(exc),
            "diagnostics": _jsonable(exc.diagnostics),
        }
        code = 2
    except (OSError, KeyError, IndexError, TypeError, ValueError, ArithmeticError, json.JSONDecodeError) as exc:
        payload = {"command": flags.command, "error": exc.__class__.__name__, "detail": str(exc)}
        code = 1

    sys.stdout.write(json.dumps(_jsonable(payload), sort_keys=True, separators=(",", ":")) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
