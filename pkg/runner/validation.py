"""
Validation Module
Bundles the property checks for one run config into a JSON report:
operator symmetry and sign, eigenrelations, transform fixed points,
biorthogonality, ground-state annihilation and a monitored solve.
Every check records its measured value, threshold and pass flag. The
ground states behind the annihilation check are written to a CSV next
to the report.
"""

import logging
import math
import os
from dataclasses import replace
from typing import Callable, Dict, List

import numpy as np

from config.settings import (
    VALIDATION_CHECK_GRID,
    VALIDATION_GROUND_STATE_N,
    VALIDATION_K,
    VALIDATION_SMALL_N,
    VALIDATION_THRESHOLDS,
)
from core.density import DensityField
from core.errors import NoKernelAvailable, StepTooLarge
from core.grid import build_grid
from core.operator_assembly import OperatorSpec, adjoint_residual, assemble, spectrum_check
from core.point_transform import PointTransform
from analysis.ground_states import (
    FAMILIES,
    GROUND_STATE_COLUMNS,
    GroundState,
    annihilation_residual,
    build_ground_state,
)
from runner.pipelines import RunConfig
from solvers.diffusion_simulator import DiffusionSimulator
from spectral.kernels import (
    BESSEL_BRANCHES,
    BesselKernelSpec,
    bessel_kernel,
    collapse_error,
    eigenrelation_residual,
    kernel_for_operator,
    phi_kernel,
    phi_tilde_kernel,
    plane_wave,
)
from spectral.transforms import KGrid, biorthogonality_ratio, wft_forward
from utils.file_utils import write_csv, write_json

logger = logging.getLogger(__name__)


def _check(name: str, value: float, threshold: float = None, **extra) -> dict:
    threshold = VALIDATION_THRESHOLDS[name] if threshold is None else threshold
    value = float(value)
    entry = {"name": name, "value": value, "threshold": threshold, "passed": bool(value <= threshold)}
    entry.update(extra)
    return entry


def _skipped(name: str, reason: str) -> dict:
    return {"name": name, "value": None, "threshold": VALIDATION_THRESHOLDS.get(name), "passed": True, "skipped": reason}


def _degenerate_origin(pt: PointTransform) -> bool:
    """dW/dx vanishes or diverges at x = 0."""
    if pt.is_monomial:
        return pt.beta != 1.0
    return pt.coeffs[0] == 0.0


def _symmetric_extent(pt: PointTransform, w: float) -> float:
    return float(math.ceil(pt.invert(w) * 100.0) / 100.0)


# ---------------------------
# Individual checks
# ---------------------------

def check_operator(config: RunConfig) -> List[dict]:
    spec = config.op_spec
    grid = build_grid(config.grid.x_min, config.grid.x_max, VALIDATION_SMALL_N)
    op = assemble(spec, grid)
    three = assemble(replace(spec, variant="Delta3"), grid)
    four = assemble(replace(spec, variant="Delta4"), grid)
    top = spectrum_check(op)
    return [
        _check("operator_self_adjoint", adjoint_residual(op), variant=spec.variant),
        _check("delta3_delta4_pairing", adjoint_residual(three, four)),
        _check("negative_semidefinite", top / op.band_max, max_eigenvalue=top),
    ]


def _kernel_samples(spec: OperatorSpec, kernel: str, x: np.ndarray, K: float) -> np.ndarray:
    pt = spec.transform
    if kernel == "plane":
        return plane_wave([K], pt.evaluate(x))[0]
    if kernel == "phi":
        return phi_kernel([K], x, pt, spec.alpha)[0]
    if kernel == "phi_tilde":
        return phi_tilde_kernel([K], x, pt, spec.alpha)[0]
    bessel = BesselKernelSpec.for_transform(pt, kernel)
    k = pt.invert(K)
    return bessel_kernel(bessel, [k], x)[0]


def check_eigenrelation(config: RunConfig) -> dict:
    spec = config.op_spec
    kernel = kernel_for_operator(spec)
    if kernel is None:
        return _skipped("eigenrelation", f"no eigen-kernel family for {spec.variant} with this transform")
    x_min, x_max, n = VALIDATION_CHECK_GRID
    grid = build_grid(x_min, x_max, n)
    op = assemble(spec, grid)
    samples = _kernel_samples(spec, kernel, grid.nodes, VALIDATION_K)
    radius = 0.05 * x_max if (kernel in BESSEL_BRANCHES and _degenerate_origin(spec.transform)) else 0.0
    value = eigenrelation_residual(op, samples, VALIDATION_K, exclude_radius=radius)
    return _check("eigenrelation", value, kernel=kernel, K=VALIDATION_K)


def check_gaussian_fixed_point(pt: PointTransform) -> dict:
    extent = _symmetric_extent(pt, 9.0)
    grid = build_grid(-extent, extent, 4000)
    W = np.asarray(pt.evaluate(grid.nodes), dtype=float)
    density = DensityField(grid=grid, transform=pt, values=np.exp(-0.5 * W * W))
    kgrid = KGrid.from_values(np.linspace(-6.0, 6.0, 121))
    hat = wft_forward(density, kgrid)
    value = float(np.max(np.abs(hat.values - np.exp(-0.5 * kgrid.K_nodes ** 2))))
    return _check("gaussian_fixed_point", value)


def check_biorthogonality(pt: PointTransform, alpha: float) -> dict:
    grid = build_grid(-4.0, 4.0, 4000)
    span = float(pt.evaluate(grid.x_max) - pt.evaluate(grid.x_min))
    # K spacing a whole number of periods over the W range
    m = max(1, int(round(3.0 * span / (2.0 * math.pi))))
    K = np.array([-m, 0, m]) * 2.0 * math.pi / span
    return _check("biorthogonality", biorthogonality_ratio(pt, alpha, grid, K), K=K.tolist())


def check_bessel_collapse() -> dict:
    value = max(collapse_error(branch, "derived") for branch in BESSEL_BRANCHES)
    return _check("bessel_collapse", value)


def ground_states(pt: PointTransform, alpha: float) -> List[GroundState]:
    """Both families on a grid reaching W = +-8.5."""
    extent = _symmetric_extent(pt, 8.5)
    grid = build_grid(-extent, extent, VALIDATION_GROUND_STATE_N)
    return [build_ground_state(family, alpha, pt, grid) for family in FAMILIES]


def check_ground_states(states: List[GroundState]) -> List[dict]:
    out = []
    for gs in states:
        radius = 0.05 * gs.grid.x_max if _degenerate_origin(gs.transform) else 0.0
        out.append(_check("annihilation", annihilation_residual(gs, radius), family=gs.family))
    return out


def check_solve(config: RunConfig) -> List[dict]:
    """Solve the config with the accuracy monitor on and check mass and sign."""
    request = replace(config.request(), accuracy_monitor=config.method == "FiniteDifference")
    try:
        result = DiffusionSimulator(request).solve()
    except StepTooLarge as exc:
        logger.warning("accuracy monitor tripped: %s", exc.message)
        return [{"name": "accuracy_monitor", "value": None, "threshold": VALIDATION_THRESHOLDS["accuracy_monitor"],
                 "passed": False, "error": exc.message}]
    diag = result.diagnostics
    drift = np.asarray(diag["mass_drift"], dtype=float)
    leak = np.asarray(diag.get("leakage", np.zeros_like(drift)), dtype=float)
    minimum = min(float(np.min(s.values)) for s in result)
    checks = [
        _check("mass_conservation", float(np.max(np.abs(drift + leak))), leakage=float(leak[-1])),
        _check("positivity", -minimum, min_value=minimum),
    ]
    if "accuracy_change" in diag:
        checks.append(_check("accuracy_monitor", diag["accuracy_change"]))
    return checks


# ---------------------------
# Report
# ---------------------------

def _guarded(name: str, fn: Callable[[], object]) -> List[dict]:
    try:
        out = fn()
    except NoKernelAvailable as exc:
        return [_skipped(name, exc.message)]
    return out if isinstance(out, list) else [out]


def run_validate(config: RunConfig, write: bool = True) -> Dict[str, object]:
    pt = config.transform
    alpha = config.op_spec.alpha
    states = ground_states(pt, alpha)
    checks: List[dict] = []
    for name, fn in (
        ("operator", lambda: check_operator(config)),
        ("eigenrelation", lambda: check_eigenrelation(config)),
        ("gaussian_fixed_point", lambda: check_gaussian_fixed_point(pt)),
        ("biorthogonality", lambda: check_biorthogonality(pt, alpha)),
        ("bessel_collapse", check_bessel_collapse),
        ("annihilation", lambda: check_ground_states(states)),
        ("solve", lambda: check_solve(config)),
    ):
        logger.debug("validate: %s", name)
        checks.extend(_guarded(name, fn))

    report = {
        "name": config.name,
        "transform": pt.to_record(),
        "operator": {"variant": config.op_spec.variant, "alpha": alpha},
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    if write:
        rows = [row for gs in states for row in gs.rows()]
        csv_path = os.path.join(config.output_dir, f"{config.name}_ground_states.csv")
        report["ground_states_file"] = write_csv(csv_path, GROUND_STATE_COLUMNS, rows)
        path = os.path.join(config.output_dir, f"{config.name}_validate.json")
        report["file"] = write_json(path, report)
    return report
