"""
Density Field Module
Probability densities sampled on a Grid1D, their quadrature weights, and
the initial conditions solvers start from.

A density lives in one coordinate (X or W) and is normalized under one
measure: dx (weight h), dW (weight h f_i) or a weighted dx (h f_i^p).
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from config.settings import DELTA_WIDTH_COEFF, TRUNCATION_THRESHOLD
from core.errors import ConfigError, TruncationUnsafe
from core.grid import Grid1D
from core.point_transform import PointTransform

COORDINATES = ("X", "W")
MEASURES = ("dx", "dW", "weighted")


def check_truncation(values: np.ndarray, what: str = "density", threshold: float = TRUNCATION_THRESHOLD) -> float:
    """Return the edge/peak ratio, raising TruncationUnsafe above threshold."""
    values = np.abs(np.asarray(values))
    peak = float(np.max(values)) if values.size else 0.0
    if peak == 0.0:
        raise TruncationUnsafe(f"{what} vanishes on the whole grid")
    edge = max(float(values[0]), float(values[-1])) / peak
    if edge > threshold:
        raise TruncationUnsafe(
            f"{what} at the domain edge is {edge:.3e} of its peak (limit {threshold:.0e}); widen the grid"
        )
    return edge


@dataclass(frozen=True, eq=False)
class DensityField:
    grid: Grid1D
    transform: PointTransform
    values: np.ndarray = field(repr=False)
    coordinate: str = "W"
    measure: str = "dW"
    exponent: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        if self.coordinate not in COORDINATES:
            raise ValueError(f"coordinate must be one of {COORDINATES}")
        if self.measure not in MEASURES:
            raise ValueError(f"measure must be one of {MEASURES}")
        if np.shape(self.values) != (self.grid.n,):
            raise ValueError("values must have one sample per grid node")

    @cached_property
    def f(self) -> np.ndarray:
        return np.asarray(self.transform.derivative(self.grid.nodes), dtype=float)

    @cached_property
    def W(self) -> np.ndarray:
        return np.asarray(self.transform.evaluate(self.grid.nodes), dtype=float)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def abscissa(self) -> np.ndarray:
        """Node positions in the density's own coordinate."""
        return self.W if self.coordinate == "W" else self.grid.nodes

    def weights(self) -> np.ndarray:
        h = self.grid.h
        if self.measure == "dx":
            return np.full(self.grid.n, h)
        if self.measure == "dW":
            return h * self.f
        return h * self.f ** self.exponent

    def mass(self) -> float:
        return float(np.sum(self.weights() * self.values))

    def normalized(self) -> "DensityField":
        m = self.mass()
        if not (m > 0.0 and np.isfinite(m)):
            raise TruncationUnsafe(f"cannot normalize a density of mass {m!r}")
        return replace(self, values=self.values / m)

    def at_time(self, t: float, values: np.ndarray) -> "DensityField":
        return replace(self, values=np.asarray(values, dtype=float), t=float(t))

    def as_x_density(self) -> "DensityField":
        """The same profile read as a density in x, renormalized under dx."""
        return replace(self, coordinate="X", measure="dx", exponent=0.0).normalized()

    def as_w_density(self) -> "DensityField":
        return replace(self, coordinate="W", measure="dW", exponent=0.0).normalized()


@dataclass(frozen=True)
class InitialCondition:
    """
    kind:
        gaussian_w -> exp(-(W - center)^2 / (2 width^2))
        delta      -> exp(-1000 (W - center)^2)
        custom     -> values from `sampler(x, W)`, an explicit sample list, or a
                      mixture of (weight, center, width) Gaussians in W
    """

    kind: str
    width: float = 1.0
    center: float = 0.0
    sampler: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = field(default=None, compare=False)
    samples: Tuple[float, ...] = ()
    mixture: Tuple[Tuple[float, float, float], ...] = ()

    @classmethod
    def gaussian_in_w(cls, width: float, center: float = 0.0) -> "InitialCondition":
        return cls.from_record({"kind": "gaussian_w", "width": width, "center": center})

    @classmethod
    def delta_at(cls, center: float = 0.0) -> "InitialCondition":
        return cls(kind="delta", center=float(center))

    @classmethod
    def custom(cls, sampler: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "InitialCondition":
        return cls(kind="custom", sampler=sampler)

    @classmethod
    def from_record(cls, record: dict, path: str = "initial") -> "InitialCondition":
        if not isinstance(record, dict):
            raise ConfigError("initial condition must be an object", field_path=path)
        kind = str(record.get("kind", "")).lower()
        try:
            center = float(record.get("center", 0.0))
        except (TypeError, ValueError):
            raise ConfigError("center must be a real", field_path=f"{path}.center")

        if kind == "delta":
            return cls(kind="delta", center=center)
        if kind == "gaussian_w":
            try:
                width = float(record.get("width"))
            except (TypeError, ValueError):
                raise ConfigError("width must be a positive real", field_path=f"{path}.width")
            if not (width > 0.0 and np.isfinite(width)):
                raise ConfigError(f"width = {width} must be positive", field_path=f"{path}.width")
            return cls(kind="gaussian_w", width=width, center=center)
        if kind == "custom":
            if "values" in record:
                vals = record["values"]
                if not isinstance(vals, list) or not vals:
                    raise ConfigError("values must be a non-empty list", field_path=f"{path}.values")
                try:
                    samples = tuple(float(v) for v in vals)
                except (TypeError, ValueError):
                    raise ConfigError("values must be reals", field_path=f"{path}.values")
                if any(v < 0 for v in samples):
                    raise ConfigError("values must be non-negative", field_path=f"{path}.values")
                return cls(kind="custom", samples=samples)
            if "mixture" in record:
                return cls(kind="custom", mixture=_parse_mixture(record["mixture"], f"{path}.mixture"))
            raise ConfigError("custom initial condition needs 'values' or 'mixture'", field_path=path)
        raise ConfigError(f"unknown initial condition kind '{kind}'", field_path=f"{path}.kind")

    def to_record(self) -> dict:
        if self.kind == "delta":
            return {"kind": "delta", "center": self.center}
        if self.kind == "gaussian_w":
            return {"kind": "gaussian_w", "width": self.width, "center": self.center}
        if self.samples:
            return {"kind": "custom", "values": list(self.samples)}
        if self.mixture:
            return {"kind": "custom", "mixture": [list(m) for m in self.mixture]}
        return {"kind": "custom", "sampler": getattr(self.sampler, "__name__", "callable")}

    @property
    def w_variance(self) -> Optional[float]:
        """Variance in W of the realized profile when it is a single Gaussian."""
        if self.kind == "delta":
            return 1.0 / (2.0 * DELTA_WIDTH_COEFF)
        if self.kind == "gaussian_w":
            return self.width ** 2
        return None

    def profile(self, x: np.ndarray, W: np.ndarray) -> np.ndarray:
        if self.kind == "delta":
            return np.exp(-DELTA_WIDTH_COEFF * (W - self.center) ** 2)
        if self.kind == "gaussian_w":
            return np.exp(-((W - self.center) ** 2) / (2.0 * self.width ** 2))
        if self.samples:
            if len(self.samples) != np.size(x):
                raise ConfigError(
                    f"custom values have {len(self.samples)} entries for {np.size(x)} nodes",
                    field_path="initial.values",
                )
            return np.asarray(self.samples, dtype=float)
        if self.mixture:
            out = np.zeros_like(W)
            for weight, center, width in self.mixture:
                out += weight * np.exp(-((W - center) ** 2) / (2.0 * width ** 2))
            return out
        if self.sampler is None:
            raise ConfigError("custom initial condition has no sampler", field_path="initial")
        return np.asarray(self.sampler(x, W), dtype=float)

    def realize(self, grid: Grid1D, transform: PointTransform) -> DensityField:
        """Sample on the grid as a W-density normalized under dW."""
        W = np.asarray(transform.evaluate(grid.nodes), dtype=float)
        values = self.profile(grid.nodes, W)
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ConfigError("initial density must be finite and non-negative", field_path="initial")
        check_truncation(values, "initial density")
        return DensityField(grid=grid, transform=transform, values=values).normalized()


def _parse_mixture(raw: Sequence, path: str) -> Tuple[Tuple[float, float, float], ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("mixture must be a non-empty list of [weight, center, width]", field_path=path)
    parts = []
    for i, item in enumerate(raw):
        try:
            weight, center, width = (float(v) for v in item)
        except (TypeError, ValueError):
            raise ConfigError("each mixture entry is [weight, center, width]", field_path=f"{path}[{i}]")
        if weight <= 0 or width <= 0:
            raise ConfigError("mixture weights and widths must be positive", field_path=f"{path}[{i}]")
        parts.append((weight, center, width))
    return tuple(parts)
