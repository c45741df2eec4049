"""
Ground States Module
Ground states of the generalized oscillator Hamiltonians built from a point
transformation, and the checks run on them.

    H1H3: psi = f^alpha     exp(-W^2 / 2)
    H2H4: psi = f^(1-alpha) exp(-W^2 / 2),      f = dW/dx

Each is annihilated by its lowering factor f^{-(1-p)} d/dx f^{-p} + W with
p = alpha (H1H3) or 1 - alpha (H2H4). States are normalized under the
measure f^{1-2p} dx in which the family's weighted Hamiltonian is
self-adjoint (dx at alpha = 1/2).
"""

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import List

import numpy as np

from core.density import DensityField, check_truncation
from core.errors import ConfigError, SingularWeight
from core.grid import Grid1D
from core.point_transform import PointTransform

logger = logging.getLogger(__name__)

FAMILIES = ("H1H3", "H2H4")
GROUND_STATE_COLUMNS = ("x", "W_of_x", "f", "psi", "family", "alpha")


def _power(family: str, alpha: float) -> float:
    return alpha if family == "H1H3" else 1.0 - alpha


@dataclass(frozen=True, eq=False)
class GroundState:
    family: str
    alpha: float
    transform: PointTransform
    grid: Grid1D
    samples: np.ndarray = field(repr=False)

    @property
    def power(self) -> float:
        """Power p of f carried by the state."""
        return _power(self.family, self.alpha)

    @property
    def measure_exponent(self) -> float:
        return 1.0 - 2.0 * self.power

    @cached_property
    def f(self) -> np.ndarray:
        return np.asarray(self.transform.derivative(self.grid.nodes), dtype=float)

    @cached_property
    def W(self) -> np.ndarray:
        return np.asarray(self.transform.evaluate(self.grid.nodes), dtype=float)

    def as_density(self) -> DensityField:
        """The state as a density in x under its normalization measure f^{1-2p} dx."""
        return DensityField(
            grid=self.grid,
            transform=self.transform,
            values=self.samples,
            coordinate="X",
            measure="weighted",
            exponent=self.measure_exponent,
        )

    def rows(self) -> List[list]:
        return [
            [self.grid.nodes[i], self.W[i], self.f[i], self.samples[i], self.family, self.alpha]
            for i in range(self.grid.n)
        ]


def build_ground_state(
    family: str,
    alpha: float,
    pt: PointTransform,
    grid: Grid1D,
    normalize: bool = True,
) -> GroundState:
    """Sample the family's closed form on the grid, normalized under f^{1-2p} dx unless normalize is False."""
    if family not in FAMILIES:
        raise ConfigError(f"family must be one of {FAMILIES}", field_path="family")
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha = {alpha} outside [0, 1]", field_path="alpha")

    p = _power(family, alpha)
    f = np.asarray(pt.derivative(grid.nodes), dtype=float)
    W = np.asarray(pt.evaluate(grid.nodes), dtype=float)
    if p > 0 and (np.any(~np.isfinite(f)) or np.any(f <= 0.0)):
        raise SingularWeight(f"dW/dx vanishes or diverges on the grid; f^{p:g} is singular")

    samples = f ** p * np.exp(-0.5 * W * W)
    check_truncation(samples, "ground state")
    gs = GroundState(family=family, alpha=alpha, transform=pt, grid=grid, samples=samples)
    if not normalize:
        return gs
    mass = gs.as_density().mass()
    if not (mass > 0.0 and np.isfinite(mass)):
        raise SingularWeight(f"ground state has mass {mass!r} under f^{gs.measure_exponent:g} dx")
    return replace(gs, samples=samples / mass)


def annihilation_residual(gs: GroundState, exclude_radius: float = 0.0) -> float:
    """
    max interior |(f^{-(1-p)} d/dx f^{-p} + W) psi| / max |psi|, evaluated on
    cell faces as

        f_face^p (v_{i+1} - v_i) / (W_{i+1} - W_i) + W_face (psi_i + psi_{i+1}) / 2,   v = f^{-p} psi

    with f_face = (W_{i+1} - W_i) / h. Faces within exclude_radius of x = 0 are skipped.
    """
    p = gs.power
    psi = gs.samples
    v = psi * gs.f ** (-p) if p else psi
    dW = np.diff(gs.W)
    faces = gs.grid.half_nodes[1:-1]
    f_face = dW / gs.grid.h
    W_face = np.asarray(gs.transform.evaluate(faces), dtype=float)

    residual = f_face ** p * np.diff(v) / dW + W_face * 0.5 * (psi[1:] + psi[:-1])
    keep = np.abs(faces) >= exclude_radius
    if not np.any(keep):
        raise ConfigError("exclude_radius removes every face", field_path="exclude_radius")
    value = float(np.max(np.abs(residual[keep])) / np.max(np.abs(psi)))
    logger.debug("annihilation residual %s alpha=%g n=%d: %.3e", gs.family, gs.alpha, gs.grid.n, value)
    return value


def count_modes(gs: GroundState) -> int:
    """Local maxima of the samples, edges included; a flat run counts once."""
    s = np.asarray(gs.samples, dtype=float)
    # collapse runs of equal values
    s = s[np.concatenate([[True], np.diff(s) != 0.0])]
    padded = np.concatenate([[-np.inf], s, [-np.inf]])
    peaks = (padded[1:-1] > padded[:-2]) & (padded[1:-1] > padded[2:])
    return int(np.count_nonzero(peaks))


def partner(gs: GroundState) -> GroundState:
    """The state of the other family at the same alpha, normalized the same way."""
    other = "H2H4" if gs.family == "H1H3" else "H1H3"
    return build_ground_state(other, gs.alpha, gs.transform, gs.grid)


def unnormalized(gs: GroundState) -> GroundState:
    """The closed form without the normalization."""
    return replace(gs, samples=gs.f ** gs.power * np.exp(-0.5 * gs.W * gs.W))
