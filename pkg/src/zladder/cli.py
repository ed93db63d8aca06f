"""Command line entry points.

Verbs: ``run`` (one config), ``sweep`` (grid of configs), ``audit``
(evaluation and window validation suites), ``ladder`` (build or inspect a
ladder table).  Every verb exits 0 only when all of its invariant checks
pass.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, spectral, zetacore
from .cache import EvalCache
from .config import ExperimentConfig, parse_config
from .errors import ConfigError
from .ladder import LadderTable, build_ladder, expected_lag, reverse_iterates, u_of_t_theta
from .runner import emit_outputs, run_one, run_suite


def _load_config(path: str | None, tol: float | None) -> ExperimentConfig:
    if path:
        config = parse_config(Path(path).read_text(encoding="utf-8"))
    else:
        config = ExperimentConfig()
    if tol is not None:
        config = config.with_overrides(quad_tol=tol, root_tol=max(tol, 1e-9))
    return config


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(float(x)) for x in text.split(",") if x.strip()]


def _report_checks(records) -> bool:
    all_ok = True
    for rec in records:
        name = (f"T={rec.config.t_base:g} theta={rec.config.theta:g} "
                f"k={rec.config.k} sigma={rec.config.sigma:g}")
        if rec.error:
            print(f"FAIL {name}: {rec.error}")
            all_ok = False
            continue
        checks = rec.report.diagnostics.get("checks", {})
        bad = [k for k, v in checks.items() if not v]
        if bad:
            print(f"FAIL {name}: checks {bad}")
            all_ok = False
        else:
            print(f"ok   {name}: ratio={rec.report.ratio:.6g} "
                  f"lhs={rec.report.lhs:.6g} rhs={rec.report.rhs:.6g}")
    return all_ok


def cmd_run(args) -> int:
    config = _load_config(args.config, args.tol)
    if args.cache:
        config = config.with_overrides(cache_path=args.cache)
    rec = run_one(config)
    emit_outputs([rec], args.out)
    ok = _report_checks([rec])
    print(f"outputs in {args.out}")
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    base = _load_config(args.config, args.tol)
    if args.cache:
        base = base.with_overrides(cache_path=args.cache)
    t_values = _float_list(args.T) if args.T else [base.t_base]
    k_values = _int_list(args.k) if args.k else [base.k]
    sigma_values = _float_list(args.sigma) if args.sigma else [base.sigma]
    configs = [base.with_overrides(t_base=t, k=k, sigma=s)
               for t in sorted(t_values) for k in k_values for s in sigma_values]
    records = run_suite(configs, parallelism=args.parallel, out_dir=args.out)
    ok = _report_checks(records)
    print(f"{len(records)} runs; outputs in {args.out}")
    return 0 if ok else 1


def cmd_audit(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cache = EvalCache(args.cache) if args.cache else None
    ok = True

    rng = np.random.default_rng(args.seed)
    ts = np.exp(rng.uniform(math.log(1e3), math.log(args.t_max), args.count))
    rows = []
    for t in np.sort(ts):
        t = float(t)
        ref = None
        if cache is not None:
            ref = cache.zeta_get(0.5, t)
        if ref is None:
            ref = zetacore.zeta_euler_maclaurin(0.5, t).value
            if cache is not None:
                cache.zeta_put(0.5, t, ref)
        for corrected in (False, True):
            ev = zetacore.riemann_siegel_z(t, corrected=corrected)
            err = abs(abs(ev.z) - abs(ref))
            ok &= err <= ev.remainder_bound + 1e-8
            rows.append((t, corrected, err, ev.remainder_bound))
    with open(out / "audit_rs.csv", "w", encoding="utf-8") as fh:
        fh.write("t,corrected,abs_error,bound\n")
        for t, c, e, b in rows:
            fh.write(f"{t:.12g},{int(c)},{e:.12g},{b:.12g}\n")
    worst = max(r[2] / r[3] for r in rows)
    print(f"{'ok  ' if worst <= 1 else 'FAIL'} rs-vs-oracle: {len(rows)} checks, "
          f"worst error/bound = {worst:.3f}")
    if cache is not None:
        cache.flush()

    audits = [spectral.audit_window(x, x ** 0.25) for x in (1e4, 1e5, 1e6)]
    spectral.audits_to_csv(audits, out / "audit_windows.csv")
    win_ok = all(a.max_abs_error <= a.bound for a in audits)
    slope = np.polyfit(np.log([a.x_r for a in audits]),
                       np.log([max(a.max_abs_error, 1e-300) for a in audits]), 1)[0]
    win_ok &= slope <= -0.2
    ok &= win_ok
    print(f"{'ok  ' if win_ok else 'FAIL'} window-audit: "
          f"max err/bound = {max(a.max_abs_error / a.bound for a in audits):.3f}, "
          f"log-log slope = {slope:.3f}")

    theta_ok = True
    for t in (1e4, 1e6):
        tv = zetacore.theta(t)
        theta_ok &= abs(tv.second_derivative * 2 * t - 1.0) < 0.01
        theta_ok &= tv.second_derivative > 0
    ok &= theta_ok
    print(f"{'ok  ' if theta_ok else 'FAIL'} theta curvature checks")
    return 0 if ok else 1


def cmd_ladder(args) -> int:
    if args.inspect:
        table = LadderTable.load(args.inspect)
        print(f"table {args.inspect}: {len(table.t_grid)} nodes over "
              f"[{table.t_low:.6g}, {table.t_high:.6g}], tol {table.quadrature_tol:g}")
        print(f"anchor phi({table.anchor[0]:.6g}) = {table.anchor[1]:.6g}")
        return 0
    T = args.T
    u = u_of_t_theta(T, args.theta)
    t_hi = T + u + args.k * expected_lag(T) * 1.4 + 50.0
    table = build_ladder(T - 2.0, t_hi, tol=args.tol, samples_per_osc=args.spo)
    chain = reverse_iterates(table, T, u, args.k)
    print(f"ladder over [{table.t_low:.6g}, {table.t_high:.6g}]: "
          f"{len(table.t_grid)} nodes, U = {u:.6g}")
    print(f"segments: base {chain.base}")
    for r, seg in enumerate(chain.iterates, start=1):
        print(f"  iterate {r}: [{seg[0]:.6f}, {seg[1]:.6f}] "
              f"gap ratio {chain.gap_law_ratios()[r - 1]:.4f}")
    if args.out:
        table.save(args.out)
        print(f"table written to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zladder",
        description="critical-line oscillator quotients and their Mobius factorization")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--cache", help="evaluation cache directory")
    p.add_argument("--tol", type=float, help="override quadrature tolerance")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a grid of configs")
    p.add_argument("--config", help="base config file")
    p.add_argument("--T", help="comma list of base heights")
    p.add_argument("--k", help="comma list of iteration depths")
    p.add_argument("--sigma", help="comma list of sigma values")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--cache", help="evaluation cache directory")
    p.add_argument("--parallel", type=int, default=1, help="worker processes")
    p.add_argument("--tol", type=float, help="override quadrature tolerance")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("audit", help="evaluation and window validation suites")
    p.add_argument("--out", default="audit", help="output directory")
    p.add_argument("--cache", help="evaluation cache directory")
    p.add_argument("--count", type=int, default=60, help="random heights to check")
    p.add_argument("--t-max", type=float, default=1e6, dest="t_max")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("ladder", help="build or inspect a ladder table")
    p.add_argument("--T", type=float, default=1e5, help="base height")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--k", type=int, default=2, help="iterates the span must cover")
    p.add_argument("--spo", type=int, default=64, help="samples per oscillation")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", help="write the table (text format) here")
    p.add_argument("--inspect", help="print a summary of an existing table file")
    p.set_defaults(func=cmd_ladder)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
