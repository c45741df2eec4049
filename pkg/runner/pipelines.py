"""
Pipelines Module
Validates run configs and runs the simulate / map-osp / kernels pipelines.

Nothing is written until every computation of a run has succeeded, so a
failing config leaves the output directory untouched.
"""

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from config.settings import (
    OSP_SIMULATION_CONFIG,
    SNAPSHOT_SUBDIR,
    SOLVER_METHODS,
    THREADS,
)
from core.density import InitialCondition
from core.errors import ConfigError, PtDiffError
from core.grid import Grid1D, build_grid
from core.operator_assembly import OperatorSpec
from core.point_transform import PointTransform, validate
from analysis.moments import MSD_COLUMNS, msd_series
from analysis.osp import osp_to_pt
from analysis.scaling import classify_regime, detect_crossover, fit_normalization, fit_scaling
from solvers.diffusion_simulator import DiffusionSimulator
from solvers.request import SolveRequest, SolveResult
from spectral.kernels import KERNEL_TABLE_COLUMNS, kernel_table
from utils.file_utils import write_csv, write_json
from utils.json_utils import apply_overrides, deep_merge, load_config

logger = logging.getLogger(__name__)

SNAPSHOT_COLUMNS = ("t", "x", "W_of_x", "rho", "measure_weight")
COORDINATES = ("X", "W")


# ---------------------------
# Config parsing
# ---------------------------

def _real(value, path: str, positive: bool = False) -> float:
    if isinstance(value, bool):
        raise ConfigError("expected a real number", field_path=path)
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a real number, got {value!r}", field_path=path)
    if not math.isfinite(out):
        raise ConfigError(f"{out} is not finite", field_path=path)
    if positive and out <= 0:
        raise ConfigError(f"{out} must be positive", field_path=path)
    return out


def _flag(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"expected true or false, got {value!r}", field_path=path)
    return value


def _section(raw: dict, key: str) -> dict:
    value = raw.get(key)
    if not isinstance(value, dict):
        raise ConfigError("expected an object", field_path=key)
    return value


def parse_times(value, path: str = "times") -> Tuple[float, ...]:
    """
    Either an explicit list or {"start", "stop", "per_decade"} for
    geometrically spaced snapshots (both ends included).
    """
    if isinstance(value, dict):
        start = _real(value.get("start"), f"{path}.start", positive=True)
        stop = _real(value.get("stop"), f"{path}.stop", positive=True)
        per_decade = value.get("per_decade")
        if not isinstance(per_decade, int) or isinstance(per_decade, bool) or per_decade < 1:
            raise ConfigError("per_decade must be a positive integer", field_path=f"{path}.per_decade")
        if stop <= start:
            raise ConfigError("stop must exceed start", field_path=f"{path}.stop")
        count = int(round(math.log10(stop / start) * per_decade)) + 1
        return tuple(float(t) for t in np.geomspace(start, stop, max(count, 2)))
    if not isinstance(value, list) or not value:
        raise ConfigError("at least one snapshot time is required", field_path=path)
    return tuple(_real(t, f"{path}[{i}]") for i, t in enumerate(value))


@dataclass(frozen=True)
class RunConfig:
    name: str
    op_spec: OperatorSpec
    grid: Grid1D
    ic: InitialCondition
    times: Tuple[float, ...]
    method: str
    dt: Optional[float]
    dt_growth: Optional[float]
    accuracy_monitor: bool
    cross_check: bool
    coordinates: Tuple[str, ...]
    fit_window: Optional[Tuple[float, float]]
    crossover: bool
    subtract_initial: bool
    output_dir: str
    combined_snapshots: bool
    write_snapshots: bool
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def transform(self) -> PointTransform:
        return self.op_spec.transform

    def request(self) -> SolveRequest:
        return SolveRequest(
            op_spec=self.op_spec,
            grid=self.grid,
            ic=self.ic,
            snapshot_times=self.times,
            method=self.method,
            dt=self.dt,
            dt_growth=self.dt_growth,
            accuracy_monitor=self.accuracy_monitor,
        )


def parse_run_config(raw: dict) -> RunConfig:
    """Validate a merged config document; errors name the dotted field path."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be an object", field_path="config")

    name = raw.get("name", "run")
    if not isinstance(name, str) or not name or os.sep in name:
        raise ConfigError("name must be a plain file stem", field_path="name")

    transform = validate(_section(raw, "transform"))

    operator = _section(raw, "operator")
    op_spec = OperatorSpec(
        variant=operator.get("variant"),
        alpha=_real(operator.get("alpha", 0.0), "operator.alpha"),
        transform=transform,
        D=_real(raw.get("D", 1.0), "D"),
    )

    grid_raw = _section(raw, "grid")
    n = grid_raw.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError("n must be an integer", field_path="grid.n")
    grid = build_grid(_real(grid_raw.get("x_min"), "grid.x_min"), _real(grid_raw.get("x_max"), "grid.x_max"), n)

    ic = InitialCondition.from_record(raw.get("initial"), "initial")
    times = parse_times(raw.get("times"))

    method = _section(raw, "method").get("kind")
    if method not in SOLVER_METHODS:
        raise ConfigError(f"method must be one of {SOLVER_METHODS}", field_path="method.kind")

    solver = _section(raw, "solver")
    dt = solver.get("dt")
    dt = None if dt is None else _real(dt, "solver.dt", positive=True)
    growth = solver.get("dt_growth")
    growth = None if growth is None else _real(growth, "solver.dt_growth", positive=True)

    analysis = _section(raw, "analysis")
    coords = analysis.get("coordinates")
    if not isinstance(coords, list) or any(c not in COORDINATES for c in coords):
        raise ConfigError(f"coordinates must be a subset of {COORDINATES}", field_path="analysis.coordinates")
    window = analysis.get("fit_window")
    if window is not None:
        if not isinstance(window, list) or len(window) != 2:
            raise ConfigError("fit_window must be [t_lo, t_hi] or null", field_path="analysis.fit_window")
        window = (_real(window[0], "analysis.fit_window[0]"), _real(window[1], "analysis.fit_window[1]"))
        if not window[0] < window[1]:
            raise ConfigError("fit_window needs t_lo < t_hi", field_path="analysis.fit_window")

    outputs = _section(raw, "outputs")
    directory = outputs.get("directory")
    if not isinstance(directory, str) or not directory:
        raise ConfigError("directory must be a path", field_path="outputs.directory")

    config = RunConfig(
        name=name,
        op_spec=op_spec,
        grid=grid,
        ic=ic,
        times=times,
        method=method,
        dt=dt,
        dt_growth=growth,
        accuracy_monitor=_flag(solver.get("accuracy_monitor", False), "solver.accuracy_monitor"),
        cross_check=_flag(solver.get("cross_check", False), "solver.cross_check"),
        coordinates=tuple(coords),
        fit_window=window,
        crossover=_flag(analysis.get("crossover", False), "analysis.crossover"),
        subtract_initial=_flag(analysis.get("subtract_initial", True), "analysis.subtract_initial"),
        output_dir=directory,
        combined_snapshots=_flag(outputs.get("combined_snapshots", True), "outputs.combined_snapshots"),
        write_snapshots=_flag(outputs.get("write_snapshots", True), "outputs.write_snapshots"),
        raw=raw,
    )
    # SolveRequest carries the remaining cross-field checks (times order, dt vs gaps)
    config.request()
    return config


def config_from_file(path: Optional[str], overrides: Sequence[str] = ()) -> RunConfig:
    return parse_run_config(load_config(path, overrides))


# ---------------------------
# Simulate
# ---------------------------

def snapshot_rows(result: SolveResult) -> List[list]:
    """Long-format rows for the initial density followed by every snapshot."""
    rows = []
    for field_ in [result.initial] + list(result.snapshots):
        weights = field_.weights()
        rows.extend(
            [field_.t, x, W, rho, w] for x, W, rho, w in zip(field_.x, field_.W, field_.values, weights)
        )
    return rows


def _fit_block(config: RunConfig, series) -> dict:
    """Scaling fits per requested coordinate; an empty coordinate list skips fitting."""
    if not config.coordinates:
        return {"fits": {}}
    fits, crossovers = {}, {}
    for coord in config.coordinates:
        fit = fit_scaling(series, coord, config.fit_window, config.subtract_initial)
        fits[coord] = fit.to_record(classify_regime(fit.exponent))
        if config.crossover:
            crossovers[coord] = detect_crossover(series, coord, config.subtract_initial).to_record()
    block = {"fits": fits, "normalization": fit_normalization(series, "X", config.fit_window).to_record()}
    if crossovers:
        block["crossover"] = crossovers
    return block


def _cross_check_block(check: dict) -> dict:
    return {
        "methods": check["methods"],
        "pairwise_max_norm": check["pairwise_max_norm"],
        "worst": check["worst"],
    }


def simulate(config: RunConfig) -> Tuple[SolveResult, dict]:
    """Run the solve and the analysis without touching the filesystem."""
    sim = DiffusionSimulator(config.request())
    check = None
    if config.cross_check:
        methods = sim.applicable_methods()
        if config.method not in methods:
            methods.append(config.method)
        check = sim.cross_check(methods)
        result = check["results"][config.method]
    else:
        result = sim.solve()

    series = msd_series(result)
    summary = {
        "name": config.name,
        "method": config.method,
        "transform": config.transform.to_record(),
        "operator": {"variant": config.op_spec.variant, "alpha": config.op_spec.alpha, "D": config.op_spec.D},
        "times": list(config.times),
        "mass_drift": float(np.max(np.abs(series.norm_drift))),
        "diagnostics": result.diagnostics,
    }
    summary.update(_fit_block(config, series))
    if check is not None:
        summary["method_cross_check"] = _cross_check_block(check)
    return result, {"series": series, "summary": summary}


def output_paths(config: RunConfig) -> Dict[str, str]:
    base = os.path.join(config.output_dir, config.name)
    return {
        "snapshots": f"{base}_snapshots.csv",
        "snapshot_dir": os.path.join(config.output_dir, SNAPSHOT_SUBDIR),
        "msd": f"{base}_msd.csv",
        "summary": f"{base}_summary.json",
    }


def run_simulate(config: RunConfig) -> dict:
    """Solve, analyse and emit snapshot CSV(s), the MSD CSV and the JSON summary."""
    result, out = simulate(config)
    paths = output_paths(config)
    written = []

    if config.write_snapshots:
        if config.combined_snapshots:
            written.append(write_csv(paths["snapshots"], SNAPSHOT_COLUMNS, snapshot_rows(result)))
        else:
            fields = [result.initial] + list(result.snapshots)
            for i, snap in enumerate(fields):
                path = os.path.join(paths["snapshot_dir"], f"{config.name}_snapshot_{i:03d}.csv")
                rows = [[snap.t, x, W, rho, w] for x, W, rho, w in zip(snap.x, snap.W, snap.values, snap.weights())]
                written.append(write_csv(path, SNAPSHOT_COLUMNS, rows))
    written.append(write_csv(paths["msd"], MSD_COLUMNS, out["series"].rows()))
    written.append(write_json(paths["summary"], out["summary"]))

    logger.info("wrote %d files for '%s'", len(written), config.name)
    out["summary"]["files"] = written
    return out["summary"]


def _run_one(path: str, overrides: Sequence[str]) -> dict:
    try:
        summary = run_simulate(config_from_file(path, overrides))
        return {"config": path, "status": 0, "summary": summary}
    except PtDiffError as exc:
        return {"config": path, "status": exc.exit_code, "error": str(exc)}


def run_batch(paths: Sequence[str], overrides: Sequence[str] = (), threads: int = THREADS) -> List[dict]:
    """Independent configs in parallel; each entry reports its own exit status."""
    if threads and threads > 1 and len(paths) > 1:
        logger.info("batch: %d configs on %d workers", len(paths), threads)
        return Parallel(n_jobs=threads)(delayed(_run_one)(p, overrides) for p in paths)
    logger.info("batch: %d configs, serial", len(paths))
    return [_run_one(p, overrides) for p in paths]


# ---------------------------
# map-osp
# ---------------------------

def run_map_osp(
    c: float,
    g: float,
    D: float = 1.0,
    simulate_flag: bool = False,
    base: Optional[dict] = None,
    overrides: Sequence[str] = (),
) -> dict:
    """
    Map (c, g) to the point-transformation form; optionally simulate the
    mapped equation (Delta1, alpha = 0, monomial beta in y, diffusion scale
    c^2 beta^2 D) and compare the fitted y-exponent with 1/beta.
    """
    params = osp_to_pt(c, g, D)
    report = params.to_record()
    if not simulate_flag:
        return report

    raw = deep_merge(load_config(None), OSP_SIMULATION_CONFIG)
    if base:
        raw = deep_merge(raw, base)
    raw = deep_merge(raw, {
        "transform": params.transform.to_record(),
        "operator": {"variant": "Delta1", "alpha": 0.0},
        "D": params.scale,
    })
    summary = run_simulate(parse_run_config(apply_overrides(raw, overrides)))
    fitted = summary["fits"].get("X", {}).get("exponent")
    report["simulation"] = {
        "fitted_exponent": fitted,
        "expected_exponent": 1.0 / params.beta,
        "summary": summary,
    }
    return report


# ---------------------------
# kernels
# ---------------------------

def run_kernels(
    pt: PointTransform,
    x: Sequence[float],
    k_values: Sequence[float],
    kernels: Sequence[str],
    alpha: float = 0.0,
    exponent_variant: str = "derived",
    out_path: Optional[str] = None,
) -> List[dict]:
    rows = kernel_table(pt, np.asarray(x, dtype=float), k_values, kernels, alpha, exponent_variant)
    if out_path:
        write_csv(out_path, KERNEL_TABLE_COLUMNS, [[r[c] for c in KERNEL_TABLE_COLUMNS] for r in rows])
    return rows
