"""
Command-line entry point for the point-transformation diffusion toolkit.

Subcommands:
    simulate  - solve a run config, write snapshots, MSD series and summary
    validate  - run the property checks for a config and write a JSON report
    msd       - MSD series from an existing snapshot CSV
    fit       - power-law fit (and optional crossover) of an MSD CSV
    map-osp   - map fractal-diffusion (c, g) to a point transformation
    kernels   - dump eigen-kernel samples for plotting

Exit codes: 0 success, 1 property check failed, 2 configuration error,
3 numerical failure.
"""

import argparse
import json
import logging
import os
import sys

from core.errors import ConfigError, PtDiffError
from core.grid import build_grid
from core.point_transform import validate as validate_transform
from analysis.moments import MSD_COLUMNS, MsdSeries, msd_series_from_snapshots
from analysis.scaling import classify_regime, detect_crossover, fit_scaling
from runner.pipelines import config_from_file, run_batch, run_kernels, run_map_osp, run_simulate
from runner.validation import run_validate
from utils.file_utils import write_csv, write_json
from utils.json_utils import load_config, parse_literal, to_jsonable


def _configure_logging(verbose: bool):
    handler = logging.StreamHandler(sys.stderr)
    if verbose:
        handler.setFormatter(logging.Formatter("   %(levelname)s %(name)s: %(message)s"))
    else:
        handler.setFormatter(logging.Formatter("   %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def _banner(title: str):
    print("\n" + "=" * 60)
    print(f"📐 {title}")
    print("=" * 60)


def _stage(text: str):
    print("\n" + "-" * 40)
    print(text)


# ---------------------------
# Subcommands
# ---------------------------

def cmd_simulate(args) -> int:
    _banner("Point-Transformation Diffusion: simulate")
    if args.batch:
        print(f"\n📦 Batch of {len(args.batch)} configs")
        results = run_batch(args.batch, args.set)
        for entry in results:
            mark = "✅" if entry["status"] == 0 else "❌"
            print(f"{mark} {entry['config']}" + (f": {entry['error']}" if "error" in entry else ""))
        return max(entry["status"] for entry in results)

    config = config_from_file(args.config, args.set)
    print(f"\n🎯 Config: {config.name} ({config.op_spec.variant}, alpha = {config.op_spec.alpha:g}, {config.method})")
    _stage("📌 Solve and analyse")
    summary = run_simulate(config)
    for coord, fit in summary["fits"].items():
        print(f"   msd_{coord.lower()} ~ t^{fit['exponent']:.4f}  ({fit['regime']}, r2 = {fit['r_squared']:.6f})")
    for coord, knee in summary.get("crossover", {}).items():
        print(
            f"   crossover {coord}: early {knee['early']['exponent']:.4f}, "
            f"late {knee['late']['exponent']:.4f}, knee t = {knee['knee_time']:.4g}"
        )
    if "method_cross_check" in summary:
        print(f"   cross-check worst max-norm difference: {summary['method_cross_check']['worst']:.3e}")
    print(f"\n✅ Wrote {len(summary['files'])} files to {config.output_dir}")
    return 0


def cmd_validate(args) -> int:
    _banner("Point-Transformation Diffusion: validate")
    config = config_from_file(args.config, args.set)
    report = run_validate(config)
    for check in report["checks"]:
        if check.get("skipped"):
            print(f"⏭️  {check['name']}: skipped ({check['skipped']})")
            continue
        mark = "✅" if check["passed"] else "❌"
        value = "n/a" if check["value"] is None else f"{check['value']:.3e}"
        print(f"{mark} {check['name']}: {value} (threshold {check['threshold']:.0e})")
    print(f"\n📄 Report: {report['file']}")
    print(f"📄 Ground states: {report['ground_states_file']}")
    return 0 if report["passed"] else 1


def cmd_msd(args) -> int:
    series = msd_series_from_snapshots(args.snapshots)
    out = args.out or _sibling(args.snapshots, "_msd.csv")
    write_csv(out, MSD_COLUMNS, series.rows())
    print(f"✅ MSD series ({len(series)} snapshots) written to {out}")
    return 0


def cmd_fit(args) -> int:
    series = MsdSeries.from_csv(args.msd)
    window = tuple(args.window) if args.window else None
    excess = not args.raw
    fit = fit_scaling(series, args.coordinate, window, excess)
    report = fit.to_record(classify_regime(fit.exponent))
    if args.crossover:
        report["crossover"] = detect_crossover(series, args.coordinate, excess).to_record()
    print(json.dumps(to_jsonable(report), indent=2, sort_keys=True))
    if args.out:
        write_json(args.out, report)
    return 0


def cmd_map_osp(args) -> int:
    base = load_config(args.config) if args.config else None
    report = run_map_osp(args.c, args.g, args.D, args.simulate, base, args.set)
    print(json.dumps(to_jsonable({k: v for k, v in report.items() if k != "simulation"}), indent=2, sort_keys=True))
    if "simulation" in report:
        sim = report["simulation"]
        print(f"\n📈 fitted exponent {sim['fitted_exponent']:.4f} vs 1/beta = {sim['expected_exponent']:.4f}")
    return 0


def cmd_kernels(args) -> int:
    pt = validate_transform(parse_literal(args.transform))
    grid = build_grid(args.x_min, args.x_max, args.n)
    rows = run_kernels(pt, grid.nodes, args.k, args.kernels, args.alpha, args.variant, args.out)
    print(f"✅ {len(rows)} kernel samples written to {args.out}")
    return 0


def _sibling(path: str, suffix: str) -> str:
    stem, _ = os.path.splitext(path)
    if stem.endswith("_snapshots"):
        stem = stem[: -len("_snapshots")]
    return stem + suffix


# ---------------------------
# Parser
# ---------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Anomalous diffusion through point transformations")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", help="run config (JSON)")
        p.add_argument("--set", action="append", default=[], metavar="PATH=VALUE",
                       help="override a config field, e.g. operator.alpha=0.5")
        return p

    p = with_config(sub.add_parser("simulate", help="solve and analyse a run config"))
    p.add_argument("--batch", nargs="+", metavar="CONFIG", help="run several configs (PTDIFF_THREADS workers)")
    p.set_defaults(func=cmd_simulate)

    p = with_config(sub.add_parser("validate", help="property checks for a run config"))
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("msd", help="MSD series from a snapshot CSV")
    p.add_argument("snapshots")
    p.add_argument("--out")
    p.set_defaults(func=cmd_msd)

    p = sub.add_parser("fit", help="power-law fit of an MSD CSV")
    p.add_argument("msd")
    p.add_argument("--coordinate", choices=("X", "W"), default="X")
    p.add_argument("--window", nargs=2, type=float, metavar=("T_LO", "T_HI"))
    p.add_argument("--crossover", action="store_true")
    p.add_argument("--raw", action="store_true", help="fit msd(t) instead of msd(t) - msd(t0)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = with_config(sub.add_parser("map-osp", help="map (c, g) to a point transformation"))
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--D", type=float, default=1.0)
    p.add_argument("--simulate", action="store_true")
    p.set_defaults(func=cmd_map_osp)

    p = sub.add_parser("kernels", help="dump kernel samples")
    p.add_argument("--transform", default='{"kind": "monomial", "beta": 2.0}', help="transform record (JSON)")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--k", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    p.add_argument("--kernels", nargs="+", default=["phi", "phi_tilde", "Phi", "PhiTilde"])
    p.add_argument("--variant", choices=("derived", "printed"), default="derived")
    p.add_argument("--x-min", type=float, default=-3.0)
    p.add_argument("--x-max", type=float, default=3.0)
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--out", default="kernels.csv")
    p.set_defaults(func=cmd_kernels)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except PtDiffError as exc:
        print(f"\n❌ {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"\n❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
