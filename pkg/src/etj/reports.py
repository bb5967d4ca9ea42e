"""Experiment runner and report files."""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus as corpus_mod
from .approximation import (
    JacksonReport,
    _ROW_FIELDS,
    jackson_check,
    jackson_derivative_check,
    write_rows_csv,
)
from .config import ExperimentConfig
from .kernels import Kernel, _jsonable, kernel_for_order
from .spaces import LineGrid, PeriodicGrid, SmoothnessError, WindowError
from .weights import make_weight, weight_from_config

log = logging.getLogger(__name__)

OK_VERDICTS = ("PASS", "PASS-degenerate", "SKIP-domain")


def worker_count(tasks: int) -> int:
    cap = os.environ.get("ETJ_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, int(cap))
        except ValueError:
            log.warning("ignoring non-integer ETJ_THREADS=%r", cap)
    return max(1, min(n, tasks))


def make_backend(cfg: ExperimentConfig):
    if cfg.backend == "periodic":
        return PeriodicGrid(cfg.n_samples)
    mu = weight_from_config(cfg.raw, "line.weight.") if cfg.weight_items("line.weight.") else make_weight(
        "exp_power", beta_exp=0.5)
    return LineGrid(cfg.line_half_width, cfg.line_n_samples, mu)


def group_weight(cfg: ExperimentConfig, backend):
    return make_weight("constant") if cfg.backend == "periodic" else backend.mu


def kernels_for(cfg: ExperimentConfig, backend, orders) -> dict[int, Kernel]:
    M_U = group_weight(cfg, backend)
    kernels = {k: kernel_for_order(M_U, k, cfg.kernel_kind, cfg.n_prod, cfg.delta) for k in sorted(set(orders))}
    for kern in kernels.values():
        kern.c1  # certify before the kernels are shared across workers
    return kernels


@dataclass
class ExperimentResult:
    reports: list = field(default_factory=list)  # JacksonReport
    derivative_reports: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # summaries of SKIP rows
    kernels: dict = field(default_factory=dict)

    @property
    def verdicts(self) -> list:
        return [r.verdict for r in self.reports + self.derivative_reports] + [s["verdict"] for s in self.skipped]

    @property
    def passed(self) -> bool:
        return all(v in OK_VERDICTS for v in self.verdicts)

    def failures(self) -> list:
        out = []
        for rep in self.reports + self.derivative_reports:
            if rep.verdict not in OK_VERDICTS:
                out.append(f"{rep.x_name} k={rep.k}" + (f" m={rep.m}" if rep.m is not None else "")
                           + f": {rep.verdict} (sup ratio {rep.sup_ratio:.6g} vs {rep.threshold:.6g})")
        return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    backend = make_backend(cfg)
    orders = list(cfg.k_list)
    kernels = kernels_for(cfg, backend, orders)
    funcs = [corpus_mod.make(name, backend, cfg.p, seed=cfg.seed) for name in cfg.corpus]
    tasks = [(x, k) for x in funcs for k in cfg.k_list]
    method = None if cfg.backend == "periodic" else "smoothing_upper"

    def run_one(task):
        x, k = task
        return jackson_check(x, k, cfg.r_grid, kernels[k], method=method, n_tau=cfg.n_tau)

    result = ExperimentResult(kernels=kernels)
    with ThreadPoolExecutor(max_workers=worker_count(len(tasks))) as pool:
        result.reports = list(pool.map(run_one, tasks))
        if cfg.m_list:
            dtasks = [(x, m, k) for x in funcs for m in cfg.m_list for k in cfg.k_list]

            def run_deriv(task):
                x, m, k = task
                try:
                    return jackson_derivative_check(x, m, k, cfg.r_grid, kernels[k], method=method, n_tau=cfg.n_tau)
                except (SmoothnessError, WindowError) as exc:
                    return {"x": x.name, "k": k, "m": m, "verdict": "SKIP-domain", "reason": str(exc)}

            for item in pool.map(run_deriv, dtasks):
                if isinstance(item, JacksonReport):
                    result.derivative_reports.append(item)
                else:
                    result.skipped.append(item)
    return result


def _summary(cfg: ExperimentConfig, result: ExperimentResult) -> dict:
    return _jsonable({
        "config": {
            "backend": cfg.backend,
            "p": cfg.p,
            "k": cfg.k_list,
            "m": cfg.m_list,
            "r_grid": cfg.r_grid,
            "corpus": cfg.corpus,
            "seed": cfg.seed,
            "kernel_kind": cfg.kernel_kind,
            "n_samples": cfg.n_samples if cfg.backend == "periodic" else cfg.line_n_samples,
        },
        "kernels": {str(k): {"c1_hat": kern.c1, "partial_sum_a": kern.partial_sum_a,
                             "l1_norm_f": kern.l1_norm, "t_quad": kern.t_quad}
                    for k, kern in result.kernels.items()},
        "reports": [r.summary() for r in result.reports],
        "derivative_reports": [r.summary() for r in result.derivative_reports],
        "skipped": result.skipped,
        "verdict": "PASS" if result.passed else "FAIL",
    })


def emit_report(cfg: ExperimentConfig, result: ExperimentResult, out_dir=None, fmt=None) -> list[Path]:
    """Write row tables (CSV or JSON) plus ``summary.json``; returns the paths."""
    if not (result.reports or result.derivative_reports or result.skipped):
        raise ValueError("nothing to report")
    out = Path(out_dir or cfg.out)
    fmt = fmt or cfg.format
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from None
    written = []
    tables = [("jackson", result.reports)]
    if result.derivative_reports:
        tables.append(("derivative", result.derivative_reports))
    for stem, reps in tables:
        if fmt == "csv":
            path = out / f"{stem}.csv"
            write_rows_csv(path, reps)
        else:
            path = out / f"{stem}.json"
            rows = [_jsonable(row) for rep in reps for row in rep.rows]
            _dump_json(path, rows)
        written.append(path)
    path = out / "summary.json"
    _dump_json(path, _summary(cfg, result))
    written.append(path)
    return written


def _dump_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")


def merge_reports(inputs, out_dir) -> list[Path]:
    """Concatenate ``jackson.csv``/``derivative.csv`` tables and summaries
    from several output directories."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dirs = [Path(p) for p in inputs]
    written = []
    for stem in ("jackson", "derivative"):
        rows = []
        for d in dirs:
            path = d / f"{stem}.csv" if d.is_dir() else (d if d.name == f"{stem}.csv" else None)
            if path is None or not path.exists():
                continue
            with open(path, newline="") as fh:
                reader = csv.reader(fh)
                header = next(reader, None)
                if header is not None and list(header) != list(_ROW_FIELDS):
                    raise ValueError(f"{path}: unexpected header {header}")
                rows.extend(reader)
        if rows:
            target = out / f"{stem}.csv"
            with open(target, "w", newline="") as fh:
                wr = csv.writer(fh, lineterminator="\n")
                wr.writerow(_ROW_FIELDS)
                wr.writerows(rows)
            written.append(target)
    summaries = []
    for d in dirs:
        path = d / "summary.json" if d.is_dir() else None
        if path is not None and path.exists():
            summaries.append(json.loads(path.read_text()))
    if not written and not summaries:
        raise ValueError("no report files found in the inputs")
    verdict = "PASS" if all(s.get("verdict") == "PASS" for s in summaries) else "FAIL"
    target = out / "summary.json"
    _dump_json(target, {"inputs": [str(d) for d in dirs], "runs": summaries, "verdict": verdict})
    written.append(target)
    return written

