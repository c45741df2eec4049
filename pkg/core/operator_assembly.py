"""
Operator Assembly Module
Builds the four generalized Laplacians as tridiagonal operators on a
cell-centered grid with homogeneous Dirichlet truncation.

Every variant has the factored form

    D * f^{-p_out} d/dx f^{-m} d/dx f^{-p_in},      f = dW/dx

    Delta1: (p_in, m, p_out) = (alpha, 2 - 2 alpha, alpha)
    Delta2: (1 - alpha, 2 alpha, 1 - alpha)
    Delta3: (alpha, 1, 1 - alpha)
    Delta4: (1 - alpha, 1, alpha)

The middle factor f^{-m} is realized on each cell face as h divided by the
integral of f^m across the face cell (harmonic averaging). For m = 1 that
integral is W_{i+1} - W_i, so a 1/f factor becomes a division by the local
W-spacing, and the flux stays finite where f vanishes or blows up at x = 0.
The resulting matrix is self-adjoint under the node weights
mu_i = h f_i^{p_out - p_in}.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from config.settings import OPERATOR_VARIANTS
from core.errors import ConfigError, EigensolveFailure, SingularWeight
from core.grid import Grid1D
from core.point_transform import PointTransform, validate
from utils.file_utils import write_csv

logger = logging.getLogger(__name__)

OPERATOR_COLUMNS = ("index", "x", "f", "sub", "diag", "super", "measure_weight")


@dataclass(frozen=True)
class OperatorSpec:
    variant: str
    alpha: float
    transform: PointTransform
    D: float = 1.0

    def __post_init__(self):
        if self.variant not in OPERATOR_VARIANTS:
            raise ConfigError(
                f"variant must be one of {OPERATOR_VARIANTS}, got '{self.variant}'",
                field_path="operator.variant",
            )
        alpha = float(self.alpha)
        if not (0.0 <= alpha <= 1.0):
            raise ConfigError(f"alpha = {alpha} outside [0, 1]", field_path="operator.alpha")
        if not (float(self.D) > 0.0 and np.isfinite(self.D)):
            raise ConfigError(f"D = {self.D} must be positive", field_path="D")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "D", float(self.D))
        object.__setattr__(self, "transform", validate(self.transform))

    @property
    def exponents(self) -> Tuple[float, float, float]:
        """(p_in, m, p_out) of the factored form."""
        a = self.alpha
        return {
            "Delta1": (a, 2.0 - 2.0 * a, a),
            "Delta2": (1.0 - a, 2.0 * a, 1.0 - a),
            "Delta3": (a, 1.0, 1.0 - a),
            "Delta4": (1.0 - a, 1.0, a),
        }[self.variant]

    def partner(self) -> "OperatorSpec":
        """The dx-adjoint ordering (Delta3 <-> Delta4; Delta1/Delta2 are their own)."""
        swap = {"Delta3": "Delta4", "Delta4": "Delta3"}
        return OperatorSpec(swap.get(self.variant, self.variant), self.alpha, self.transform, self.D)


@dataclass(frozen=True)
class AssembledOperator:
    spec: OperatorSpec
    grid: Grid1D
    sub: np.ndarray = field(repr=False)
    diag: np.ndarray = field(repr=False)
    sup: np.ndarray = field(repr=False)
    measure_weights: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    face_metric: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def band_max(self) -> float:
        return float(max(np.max(np.abs(self.sub)), np.max(np.abs(self.diag)), np.max(np.abs(self.sup))))

    @property
    def banded(self) -> np.ndarray:
        """(3, n) layout accepted by scipy.linalg.solve_banded with (l, u) = (1, 1)."""
        ab = np.zeros((3, self.n))
        ab[0, 1:] = self.sup[:-1]
        ab[1] = self.diag
        ab[2, :-1] = self.sub[1:]
        return ab

    def apply(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        out = self.diag * u
        out[1:] += self.sub[1:] * u[:-1]
        out[:-1] += self.sup[:-1] * u[1:]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub[1:], -1) + np.diag(self.sup[:-1], 1)

    def rows(self):
        return [
            [i, self.grid.nodes[i], self.f[i], self.sub[i], self.diag[i], self.sup[i], self.measure_weights[i]]
            for i in range(self.n)
        ]

    def dump_csv(self, path: str) -> str:
        return write_csv(path, OPERATOR_COLUMNS, self.rows())


def _checked(values: np.ndarray, what: str) -> np.ndarray:
    bad = ~np.isfinite(values) | (values <= 0.0)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise SingularWeight(f"{what} is zero or non-finite at index {idx} (value {values[idx]!r})")
    return values


def assemble(spec: OperatorSpec, grid: Grid1D) -> AssembledOperator:
    """Assemble D * Delta_variant on the grid as a tridiagonal band."""
    pt = spec.transform
    h = grid.h
    p_in, m, p_out = spec.exponents

    x = grid.nodes
    f = _checked(np.asarray(pt.derivative(x), dtype=float), "dW/dx at nodes")
    x_ext = np.concatenate([[grid.ghost_nodes[0]], x, [grid.ghost_nodes[1]]])
    W_ext = np.asarray(pt.evaluate(x_ext), dtype=float)
    _checked(np.diff(W_ext), "W-spacing between nodes")

    # face j sits between nodes j-1 and j; its conductance is h over the cell
    # integral of f^m (for m = 1 that integral is the W-spacing)
    face_integral = np.asarray(pt.integrate_derivative_power(x_ext[:-1], x_ext[1:], m), dtype=float)
    if np.any(np.isnan(face_integral)) or np.any(face_integral <= 0.0):
        raise SingularWeight(f"cell integral of f^{m:g} is not positive on some face")
    coef = spec.D / (h * face_integral)
    metric = face_integral / h
    a_in = f ** (-p_in)
    a_out = f ** (-p_out)

    n = grid.n
    sub = np.zeros(n)
    sup = np.zeros(n)
    sup[:-1] = coef[1:-1] * (a_out[:-1] * a_in[1:])
    sub[1:] = coef[1:-1] * (a_out[1:] * a_in[:-1])
    diag = -(coef[:-1] + coef[1:]) * (a_out * a_in)

    mu = h * f ** (p_out - p_in)

    logger.debug(
        "assembled %s alpha=%.3g on n=%d, band max %.3e", spec.variant, spec.alpha, n, np.max(np.abs(diag))
    )
    return AssembledOperator(
        spec=spec, grid=grid, sub=sub, diag=diag, sup=sup,
        measure_weights=mu, f=f, W=W_ext[1:-1], face_metric=metric,
    )


def adjoint_residual(op: AssembledOperator, partner: Optional[AssembledOperator] = None) -> float:
    """
    Without a partner: max |M A - A^T M| / max |M A| with M = diag(mu), the
    self-adjointness defect under the operator's own measure.
    With a partner: max |A^T - B| / max |B|, the defect of B being the
    dx-adjoint of A (Delta3 against Delta4).
    """
    if partner is None:
        mu = op.measure_weights
        upper = mu[:-1] * op.sup[:-1]
        lower = mu[1:] * op.sub[1:]
        scale = max(np.max(np.abs(mu * op.diag)), np.max(np.abs(upper)), np.max(np.abs(lower)))
        return float(np.max(np.abs(upper - lower)) / scale) if scale > 0 else 0.0

    if partner.n != op.n:
        raise ValueError("partner operator lives on a different grid")
    d_upper = np.abs(op.sub[1:] - partner.sup[:-1])
    d_lower = np.abs(op.sup[:-1] - partner.sub[1:])
    d_diag = np.abs(op.diag - partner.diag)
    scale = partner.band_max
    worst = max(np.max(d_upper), np.max(d_lower), np.max(d_diag))
    return float(worst / scale) if scale > 0 else 0.0


def symmetrized_band(op: AssembledOperator) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of M^{1/2} A M^{-1/2}."""
    off = np.sqrt(op.sup[:-1] * op.sub[1:])
    return op.diag.copy(), off


def spectrum_check(op: AssembledOperator) -> float:
    """Largest eigenvalue of the mu-symmetrized operator (contract: <= 1e-10 * band max)."""
    d, e = symmetrized_band(op)
    try:
        top = eigh_tridiagonal(
            d, e, eigvals_only=True, select="i", select_range=(op.n - 1, op.n - 1)
        )
    except (LinAlgError, ValueError) as exc:
        raise EigensolveFailure(f"tridiagonal eigensolve failed: {exc}")
    if top.size == 0 or not np.isfinite(top[0]):
        raise EigensolveFailure("eigensolve returned no finite eigenvalue")
    return float(top[0])
