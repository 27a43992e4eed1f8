"""Command-line front end: sweeps, figure-data reproduction, validation.

Subcommands
-----------
saddle         solve the saddle-point system at a single parameter point
sweep          warm-started continuation along a 1-d parameter grid
critical-line  analytic phase boundary pi_c over an n grid
finite         Monte Carlo equilibrium observables at finite size
lp-fraction    feasibility fraction of the homogeneous LP cone
pca-probe      elongation of the feasible polytope near the transition
validate       quick self-check suite; nonzero exit on any failure

Outputs are CSV with a '#'-prefixed metadata header (or JSON via
``--format json``).  Reruns with identical configuration and seeds are
byte-identical apart from the timestamp line.  Defaults can be loaded
from a plain ``key=value`` file via ``--config``; the worker count for
grid-parallel subcommands defaults to the RANDECON_WORKERS environment
variable.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .ensemble import EnsembleParams, intermediate_sweep_map
from .errors import RandeconError
from .critical import critical_line_sweep
from .finite import (lp_feasibility_fraction, monte_carlo_observables,
                     pca_probe)
from .observables import observable_set
from .replica import (SOLUTION_CSV_COLUMNS, solution_csv_rows, solve_saddle,
                      sweep)

_EXIT_OK, _EXIT_PARTIAL, _EXIT_CONFIG = 0, 1, 2


def _workers(args) -> int:
    if getattr(args, "workers", None):
        return args.workers
    return int(os.environ.get("RANDECON_WORKERS", "1"))


def _emit(path, header_meta, columns, rows, fmt):
    """Write rows as CSV with '#' metadata header or as a JSON document."""
    out = open(path, "w") if path else sys.stdout
    try:
        if fmt == "json":
            json.dump({"meta": header_meta,
                       "columns": list(columns),
                       "rows": [list(r) for r in rows]}, out, indent=1,
                      default=lambda v: float(v)
                      if isinstance(v, np.floating) else str(v))
            out.write("\n")
        else:
            for key, val in header_meta.items():
                out.write(f"# {key} = {val}\n")
            out.write(",".join(columns) + "\n")
            for row in rows:
                out.write(",".join(_fmt_cell(v) for v in row) + "\n")
    finally:
        if path:
            out.close()


def _fmt_cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _meta(args, command):
    items = {"command": command, "version": __version__,
             "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
    for key, val in sorted(vars(args).items()):
        if key not in ("func", "config") and val is not None:
            items[f"arg.{key}"] = val
    return items


def _params_from(args) -> EnsembleParams:
    return EnsembleParams(n=args.n, pi=args.pi, f=args.f, eps=args.eps)


# ---------------------------------------------------------------- subcommands

def _cmd_saddle(args):
    params = _params_from(args)
    sol = solve_saddle(params, tol=args.tol)
    obs = observable_set(sol)
    rows = solution_csv_rows([sol])
    cols = list(SOLUTION_CSV_COLUMNS) + ["phi", "s_mean", "x_mean", "utility"]
    rows = [list(rows[0]) + [obs.phi, obs.s_mean, obs.x_mean, obs.utility]]
    _emit(args.output, _meta(args, "saddle"), cols, rows, args.format)
    return _EXIT_OK


def _grid(args):
    if args.points < 1:
        raise RandeconError("points must be >= 1")
    if args.points == 1:
        return [args.start]
    return list(np.linspace(args.start, args.stop, args.points))


def _cmd_sweep(args):
    if args.var is None:
        raise RandeconError("sweep needs --var (flag or config key)")
    if args.var not in ("n", "pi", "f", "eps", "i"):
        raise RandeconError(f"unknown sweep variable: {args.var}")
    fixes = dict(kv.split("=", 1) for kv in (args.fix or []))
    values = _grid(args)
    grid = []
    for v in values:
        if args.var == "i":
            grid.append(intermediate_sweep_map(
                float(fixes["f-over-n"]), float(fixes["pi-over-n"]), v,
                eps=args.eps))
        else:
            grid.append(_params_from(args).with_(**{args.var: v}))
    sols = sweep(grid, tol=args.tol)
    rows = solution_csv_rows(sols)
    extra_cols = list(SOLUTION_CSV_COLUMNS) + [
        "phi", "s_mean", "x_mean", "x11", "x01", "x10", "x00",
        "consumption", "waste", "utility"]
    out_rows, failures = [], 0
    for sol, row in zip(sols, rows):
        if sol.branch == "failed":
            failures += 1
            out_rows.append(list(row) + ["nan"] * 10)
            continue
        obs = observable_set(sol)
        out_rows.append(list(row) + [obs.phi, obs.s_mean, obs.x_mean,
                                     obs.x11, obs.x01, obs.x10, obs.x00,
                                     obs.consumption, obs.waste, obs.utility])
    _emit(args.output, _meta(args, "sweep"), extra_cols, out_rows, args.format)
    return _EXIT_PARTIAL if failures else _EXIT_OK


def _cmd_critical_line(args):
    n_grid = _grid(args)
    workers = _workers(args)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(
                lambda n: critical_line_sweep([n], args.eps, args.tol)[0],
                n_grid))
    else:
        points = critical_line_sweep(n_grid, args.eps, args.tol)
    cols = ("n", "eps", "pi_c", "xi", "residual")
    rows = [(p.n, p.eps, p.pi_c, p.xi, p.residual) for p in points]
    failures = sum(1 for p in points if not np.isfinite(p.pi_c))
    _emit(args.output, _meta(args, "critical-line"), cols, rows, args.format)
    return _EXIT_PARTIAL if failures else _EXIT_OK


def _cmd_finite(args):
    params = _params_from(args)
    mc = monte_carlo_observables(params, args.C, args.instances, args.seed)
    cols = ("n", "pi", "f", "eps", "C", "instances", "failures",
            "s_mean", "s_stderr", "phi", "phi_stderr", "x_mean", "x_stderr",
            "consumption", "consumption_stderr", "waste", "waste_stderr",
            "utility", "utility_stderr")
    rows = [(params.n, params.pi, params.f, params.eps, mc.C, mc.instances,
             mc.failures, mc.s_mean, mc.s_stderr, mc.phi, mc.phi_stderr,
             mc.x_mean, mc.x_stderr, mc.consumption, mc.consumption_stderr,
             mc.waste, mc.waste_stderr, mc.utility, mc.utility_stderr)]
    _emit(args.output, _meta(args, "finite"), cols, rows, args.format)
    return _EXIT_PARTIAL if mc.failures else _EXIT_OK


def _run_pi_grid(args, one_point):
    """Shared pi-grid driver for lp-fraction and pca-probe."""
    pis = _grid(args) if args.points > 1 or args.start is not None else [args.pi]
    workers = _workers(args)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return pis, list(pool.map(one_point, pis))
    return pis, [one_point(pi) for pi in pis]


def _cmd_lp_fraction(args):
    def one(pi):
        params = _params_from(args).with_(pi=float(pi))
        return lp_feasibility_fraction(params, args.C, args.trials, args.seed)
    pis, recs = _run_pi_grid(args, one)
    cols = ("n", "pi", "eps", "N", "trials", "feasible_count", "fraction")
    rows = [(r.n, r.pi, r.eps, r.N, r.trials, r.feasible_count, r.fraction)
            for r in recs]
    failures = sum(r.failures for r in recs)
    _emit(args.output, _meta(args, "lp-fraction"), cols, rows, args.format)
    return _EXIT_PARTIAL if failures else _EXIT_OK


def _cmd_pca_probe(args):
    def one(pi):
        params = _params_from(args).with_(pi=float(pi))
        return pca_probe(params, args.C, args.tech_draws,
                         args.objective_draws, args.seed)
    pis, recs = _run_pi_grid(args, one)
    cols = ("n", "pi", "eps", "N", "C", "samples", "lambda_max",
            "lambda_max_over_N", "collapsed")
    rows = [(r.n, r.pi, r.eps, r.N, r.C, r.samples, r.lambda_max,
             r.lambda_max_over_N, r.collapsed) for r in recs]
    failures = sum(1 for r in recs if r.collapsed)
    _emit(args.output, _meta(args, "pca-probe"), cols, rows, args.format)
    return _EXIT_PARTIAL if failures else _EXIT_OK


def _cmd_validate(args):
    """Quick self-check: a handful of cheap cross-module invariants."""
    from .ensemble import sample_economy
    from .finite import certify_equilibrium, solve_equilibrium
    from .gaussian import gauss_hermite_rule, gauss_moment_I
    from scipy.stats import norm

    failures = []

    def check(name, ok):
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
        if not ok:
            failures.append(name)

    rule = gauss_hermite_rule(120)
    check("quadrature weights normalized",
          abs(rule.weights.sum() - 1.0) < 1e-12)
    x = 0.7
    check("half-Gaussian moment identity I2 - x I1 = I0",
          abs(gauss_moment_I(2, x) - x * gauss_moment_I(1, x)
              - gauss_moment_I(0, x)) < 1e-12)
    params = EnsembleParams(n=2.0, pi=0.65, f=0.5, eps=0.1)
    sol = solve_saddle(params)
    check("industrial solution at (n=2, pi=0.65)", sol.branch == "industrial")
    obs = observable_set(sol)
    check("consumption + waste = mean availability",
          abs(obs.consumption + obs.waste - obs.x_mean) < 1e-9)
    check("mean availability identity",
          abs(obs.x_mean - (params.pi - params.n * params.eps * obs.s_mean))
          < 1e-6)
    econ = sample_economy(params, 50, 4242)
    eq = solve_equilibrium(econ)
    certs = certify_equilibrium(econ, eq)
    for name, (val, ok) in certs.items():
        check(f"finite-N {name} ({val:.2e})"
              if isinstance(val, float) else f"finite-N {name} ({val})", ok)
    if failures:
        print(f"{len(failures)} check(s) failed", file=sys.stderr)
        return _EXIT_PARTIAL
    print("all checks passed")
    return _EXIT_OK


# -------------------------------------------------------------------- parsing

def _add_params(sub, pi_default=0.65):
    sub.add_argument("--n", type=float, default=2.0)
    sub.add_argument("--pi", type=float, default=pi_default)
    sub.add_argument("--f", type=float, default=0.5)
    sub.add_argument("--eps", type=float, default=0.1)


def _add_io(sub):
    sub.add_argument("--output", "-o", default=None,
                     help="output file (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--tol", type=float, default=1e-10)
    sub.add_argument("--workers", type=int, default=None)
    sub.add_argument("--config", default=None,
                     help="key=value file with flag defaults")


def _add_grid(sub):
    sub.add_argument("--from", dest="start", type=float, default=None)
    sub.add_argument("--to", dest="stop", type=float, default=None)
    sub.add_argument("--points", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randecon",
        description="numerical laboratory for large random production economies")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("saddle", help="solve one saddle point")
    _add_params(p)
    _add_io(p)
    p.set_defaults(func=_cmd_saddle)

    p = subs.add_parser("sweep", help="1-d parameter sweep with continuation")
    p.add_argument("--var", choices=("n", "pi", "f", "eps", "i"),
                   default=None)
    p.add_argument("--fix", action="append", metavar="KEY=VALUE",
                   help="fixed ratios for --var i (f-over-n, pi-over-n)")
    _add_grid(p)
    _add_params(p)
    _add_io(p)
    p.set_defaults(func=_cmd_sweep)

    p = subs.add_parser("critical-line", help="analytic phase boundary")
    p.add_argument("--eps", type=float, default=0.1)
    _add_grid(p)
    _add_io(p)
    p.set_defaults(func=_cmd_critical_line)

    p = subs.add_parser("finite", help="Monte Carlo equilibrium observables")
    _add_params(p)
    p.add_argument("--C", type=int, default=50)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    _add_io(p)
    p.set_defaults(func=_cmd_finite)

    p = subs.add_parser("lp-fraction", help="homogeneous-cone feasibility")
    _add_params(p)
    p.add_argument("--C", type=int, default=100)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    _add_grid(p)
    _add_io(p)
    p.set_defaults(func=_cmd_lp_fraction)

    p = subs.add_parser("pca-probe", help="feasible-set elongation probe")
    _add_params(p, pi_default=0.4)
    p.add_argument("--C", type=int, default=100)
    p.add_argument("--tech-draws", type=int, default=10)
    p.add_argument("--objective-draws", type=int, default=25)
    p.add_argument("--seed", type=int, default=1)
    _add_grid(p)
    _add_io(p)
    p.set_defaults(func=_cmd_pca_probe)

    p = subs.add_parser("validate", help="quick invariant self-checks")
    p.set_defaults(func=_cmd_validate)

    return parser


def _apply_config(args):
    """Apply key=value file entries on top of the parsed flags."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            key = key.strip().replace("-", "_")
            if not hasattr(args, key):
                raise RandeconError(f"unknown config key: {key}")
            cur = getattr(args, key)
            if isinstance(cur, bool):
                val = val.strip().lower() in ("1", "true", "yes")
            elif isinstance(cur, int):
                val = int(val)
            elif isinstance(cur, float):
                val = float(val)
            else:
                val = val.strip()
                if cur is None:           # e.g. start/stop/workers default
                    for cast in (int, float):
                        try:
                            val = cast(val)
                            break
                        except ValueError:
                            pass
            setattr(args, key, val)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except RandeconError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
