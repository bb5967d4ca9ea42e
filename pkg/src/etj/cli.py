"""Command-line interface: ``etj <group> <command> [flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import config as config_mod
from .config import ConfigError
from .kernels import KernelError, KernelSpec, build_kernel, certify_bounds, export_kernel, fejer_kernel, kernel_for_order
from .reports import emit_report, group_weight, make_backend, merge_reports, run_experiment
from .weights import WeightError, check_admissible, weight_from_config

log = logging.getLogger("etj")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--backend", choices=("periodic", "line"))
    p.add_argument("--p", dest="p", help="norm index: 1, 2 or inf")
    p.add_argument("--k", help="comma-separated smoothness orders")
    p.add_argument("--m", help="comma-separated derivative orders")
    p.add_argument("--r-grid", dest="r_grid", help="min:max:count (geometric) or a list")
    p.add_argument("--corpus", help="comma-separated corpus names")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etj", description="Exponential-type kernels and Jackson-inequality experiments")
    groups = parser.add_subparsers(dest="group", required=True)

    kernel = groups.add_parser("kernel", help="build or inspect smoothing kernels")
    kcmd = kernel.add_subparsers(dest="command", required=True)
    for name, help_ in (("build", "build a kernel and write its table and metadata"),
                        ("inspect", "print kernel metadata and certification constants")):
        sp = kcmd.add_parser(name, help=help_)
        _common(sp)

    weight = groups.add_parser("weight", help="weight utilities")
    wcmd = weight.add_subparsers(dest="command", required=True)
    _common(wcmd.add_parser("check", help="admissibility report for the configured weight"))

    jackson = groups.add_parser("jackson", help="Jackson-inequality experiments")
    jcmd = jackson.add_subparsers(dest="command", required=True)
    _common(jcmd.add_parser("run", help="run the configured experiment suite"))

    report = groups.add_parser("report", help="report files")
    rcmd = report.add_subparsers(dest="command", required=True)
    merge = rcmd.add_parser("merge", help="merge output directories")
    merge.add_argument("inputs", nargs="+")
    merge.add_argument("--out", required=True)
    merge.add_argument("-v", "--verbose", action="store_true")
    return parser


def merged_values(args) -> dict:
    values = config_mod.load(args.config) if getattr(args, "config", None) else {}
    flags = {
        "backend": args.backend, "p": args.p, "k": args.k, "m": args.m, "r_grid": args.r_grid,
        "corpus": args.corpus, "seed": args.seed, "out": args.out, "format": args.format,
    }
    for key, val in flags.items():
        if val is not None:
            values[key] = str(val)
            values.get("_lines", {}).pop(key, None)
    return values


def _kernel_from_args(values: dict, cfg):
    if any(key.startswith("weight.") for key in values):
        w = weight_from_config(values)
        if cfg.kernel_kind == "fejer":
            m = int(values.get("kernel.m", 0)) or int(math.ceil((cfg.k_list[0] + 2) / 2))
            return fejer_kernel(m, weight=w)
        return build_kernel(KernelSpec(w, n_prod=cfg.n_prod, delta=cfg.delta, quad_tol=cfg.quad_tol))
    backend = make_backend(cfg)
    return kernel_for_order(group_weight(cfg, backend), cfg.k_list[0], cfg.kernel_kind, cfg.n_prod, cfg.delta)


def cmd_kernel(args, values) -> int:
    cfg = config_mod.build(values)
    kern = _kernel_from_args(values, cfg)
    certs = [certify_bounds(kern, r, 4 if r >= 1 else 0) for r in (1.0, 2.0, 4.0)]
    if args.command == "inspect":
        meta = kern.metadata()
        meta["certification"] = [c.to_dict() for c in certs]
        from .kernels import _jsonable

        json.dump(_jsonable(meta), sys.stdout, sort_keys=True, indent=2)
        sys.stdout.write("\n")
        return 0
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    export_kernel(kern, out / "kernel.csv", out / "kernel.json", certification=certs)
    print(f"wrote {out / 'kernel.csv'} and {out / 'kernel.json'}")
    return 0


def cmd_weight(args, values) -> int:
    w = weight_from_config(values)
    report = check_admissible(w)
    sys.stdout.write(report.to_json() + "\n")
    return 0 if report.verdict == "admissible" else 1


def cmd_jackson(args, values) -> int:
    cfg = config_mod.build(values)
    result = run_experiment(cfg)
    paths = emit_report(cfg, result)
    for p in paths:
        print(f"wrote {p}")
    if result.passed:
        print(f"PASS: {len(result.verdicts)} reports")
        return 0
    print("FAIL:", file=sys.stderr)
    for line in result.failures():
        print(f"  {line}", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(over="ignore", under="ignore")
    try:
        if args.group == "report":
            for p in merge_reports(args.inputs, args.out):
                print(f"wrote {p}")
            return 0
        values = merged_values(args)
        if args.group == "kernel":
            return cmd_kernel(args, values)
        if args.group == "weight":
            return cmd_weight(args, values)
        return cmd_jackson(args, values)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (KernelError, WeightError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
