"""Suite orchestration: run configs, persist records, emit tabular outputs.

A RunRecord couples the config with its report, per-stage wall times and
version stamps.  Failed runs keep their error text so a sweep survives
individual failures.  CSV floats are fixed at 12 significant digits so
identical runs produce byte-identical summaries.
"""

from __future__ import annotations

import dataclasses
import json
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .cache import EvalCache
from .config import ExperimentConfig, serialize_config
from .metamorphosis import (ControlSequences, MetamorphosisReport,
                            run_metamorphosis)
from .quadrature import MeanValuePoint, PointKind

FORMAT_VERSION = 1

SUMMARY_HEADER = "T,theta,k,sigma,lhs,rhs,ratio,d,e,gap_mean,gap_law_ratio"


@dataclasses.dataclass
class RunRecord:
    config: ExperimentConfig
    report: MetamorphosisReport | None
    timings: dict
    versions: dict
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.report is not None and all(
            self.report.diagnostics.get("checks", {}).values())


def _g(x: float) -> str:
    return f"{x:.12g}"


def run_one(config: ExperimentConfig, cache: EvalCache | None = None) -> RunRecord:
    """Execute one config, capturing failures instead of raising."""
    if cache is None and config.cache_path:
        cache = EvalCache(config.cache_path)
    versions = {"zladder": __version__, "format": FORMAT_VERSION}
    start = time.perf_counter()
    try:
        report = run_metamorphosis(config, cache=cache)
        timings = dict(report.diagnostics.get("stage_seconds", {}))
        timings["total"] = time.perf_counter() - start
        if cache is not None:
            cache.flush()
        return RunRecord(config, report, timings, versions)
    except Exception as exc:
        return RunRecord(config, None, {"total": time.perf_counter() - start},
                         versions, error=f"{type(exc).__name__}: {exc}")


def _worker(config_dict: dict) -> dict:
    record = run_one(ExperimentConfig(**config_dict))
    return record_to_dict(record)


def run_suite(configs, parallelism: int = 1,
              out_dir=None) -> list[RunRecord]:
    """Run configs (in parallel across processes when asked) in input order.

    Per-run failures are captured on their records and the suite
    continues.  With ``out_dir`` the records are persisted there too.
    """
    configs = list(configs)
    if parallelism <= 1 or len(configs) <= 1:
        records = [run_one(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            dicts = list(pool.map(_worker,
                                  [dataclasses.asdict(c) for c in configs]))
        records = [record_from_dict(d) for d in dicts]
    if out_dir is not None:
        emit_outputs(records, out_dir)
    return records


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def _point_to_dict(p: MeanValuePoint) -> dict:
    return {"location": p.location, "kind": p.kind.value,
            "residual": p.residual,
            "iterate_images": [float(x) for x in p.iterate_images]}


def _point_from_dict(d: dict) -> MeanValuePoint:
    return MeanValuePoint(d["location"], PointKind(d["kind"]), d["residual"],
                          np.asarray(d["iterate_images"], dtype=np.float64))


def report_to_dict(r: MetamorphosisReport) -> dict:
    s = r.sequences
    return {
        "sequences": {
            "alphas": [float(x) for x in s.alphas],
            "betas": [float(x) for x in s.betas],
            "sigma": s.sigma, "t_base": s.t_base, "theta": s.theta,
            "k": s.k, "epsilon": s.epsilon,
        },
        "lhs": r.lhs, "rhs": r.rhs, "rhs_zeta": r.rhs_zeta,
        "ratio": r.ratio, "ratio_zeta": r.ratio_zeta,
        "d_point": _point_to_dict(r.d_point),
        "e_point": _point_to_dict(r.e_point),
        "diagnostics": r.diagnostics,
    }


def report_from_dict(d: dict) -> MetamorphosisReport:
    s = d["sequences"]
    seq = ControlSequences(np.asarray(s["alphas"]), np.asarray(s["betas"]),
                           s["sigma"], s["t_base"], s["theta"], s["k"],
                           s["epsilon"])
    return MetamorphosisReport(seq, d["lhs"], d["rhs"], d["rhs_zeta"],
                               d["ratio"], d["ratio_zeta"],
                               _point_from_dict(d["d_point"]),
                               _point_from_dict(d["e_point"]),
                               d["diagnostics"])


def record_to_dict(rec: RunRecord) -> dict:
    return {
        "config": dataclasses.asdict(rec.config),
        "report": report_to_dict(rec.report) if rec.report else None,
        "timings": rec.timings,
        "versions": rec.versions,
        "error": rec.error,
    }


def record_from_dict(d: dict) -> RunRecord:
    return RunRecord(ExperimentConfig(**d["config"]),
                     report_from_dict(d["report"]) if d["report"] else None,
                     d["timings"], d["versions"], d.get("error"))


# ----------------------------------------------------------------------
# outputs
# ----------------------------------------------------------------------

def summary_row(rec: RunRecord) -> str:
    c, r = rec.config, rec.report
    gaps = np.asarray(r.diagnostics["gaps"])
    ratios = np.asarray(r.diagnostics["gap_law_ratios"])
    return ",".join([
        _g(c.t_base), _g(c.theta), str(c.k), _g(c.sigma),
        _g(r.lhs), _g(r.rhs), _g(r.ratio),
        _g(r.d_point.location), _g(r.e_point.location),
        _g(float(gaps.mean())), _g(float(ratios.mean())),
    ])


def _run_name(c: ExperimentConfig) -> str:
    return f"run_T{c.t_base:g}_theta{c.theta:g}_k{c.k}_sigma{c.sigma:g}"


def emit_outputs(records, out_dir) -> dict:
    """Write summary CSV, per-run JSON, and plot-data CSVs.

    Returns the mapping of logical name to written path.  Rows in every
    plot CSV ascend in their x column.
    """
    records = list(records)
    if not records:
        raise ValueError("emit_outputs needs at least one record")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}

    good = [r for r in records if r.report is not None]
    ordered = sorted(good, key=lambda r: (r.config.t_base, r.config.k,
                                          r.config.sigma))
    path = out / "summary.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for rec in ordered:
            fh.write(summary_row(rec) + "\n")
    written["summary"] = path

    for rec in records:
        name = _run_name(rec.config) + ".json"
        with open(out / name, "w", encoding="utf-8") as fh:
            json.dump(record_to_dict(rec), fh, indent=1, sort_keys=True)
        written[name] = out / name

    path = out / "ratio_vs_T.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("T,k,sigma,theta,ratio,ratio_zeta\n")
        for rec in ordered:
            c, r = rec.config, rec.report
            fh.write(",".join([_g(c.t_base), str(c.k), _g(c.sigma),
                               _g(c.theta), _g(r.ratio), _g(r.ratio_zeta)]) + "\n")
    written["ratio_vs_T"] = path

    path = out / "gaps_vs_T.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("T,r,gap,gap_law_ratio\n")
        for rec in ordered:
            gaps = rec.report.diagnostics["gaps"]
            ratios = rec.report.diagnostics["gap_law_ratios"]
            for r_i, (g, q) in enumerate(zip(gaps, ratios), start=1):
                fh.write(",".join([_g(rec.config.t_base), str(r_i),
                                   _g(g), _g(q)]) + "\n")
    written["gaps_vs_T"] = path

    path = out / "local_error_vs_xr.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x_r,h,max_abs_error,bound\n")
        audits = sorted((rec.report.diagnostics["lemma_audit"] for rec in good),
                        key=lambda a: a["x_r"])
        for a in audits:
            fh.write(",".join([_g(a["x_r"]), _g(a["h"]),
                               _g(a["max_abs_error"]), _g(a["bound"])]) + "\n")
    written["local_error_vs_xr"] = path

    with open(out / "configs.txt", "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(f"# {_run_name(rec.config)}"
                     + (f" FAILED: {rec.error}" if rec.error else "") + "\n")
            fh.write(serialize_config(rec.config) + "\n")
    return written
