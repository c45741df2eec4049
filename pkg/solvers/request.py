"""
Solve requests and results shared by the three solver components.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.settings import DEFAULT_DT, DT_SNAPSHOT_FRACTION, SOLVER_METHODS
from core.density import DensityField, InitialCondition
from core.errors import ConfigError
from core.grid import Grid1D
from core.operator_assembly import OperatorSpec


def conserved_measure(spec: OperatorSpec) -> Tuple[str, float]:
    """
    Measure whose total mass the operator conserves: dx f^{p_out}.
    Delta3 at alpha = 0 gives dW; Delta1 at alpha = 0 gives dx.
    """
    p_out = spec.exponents[2]
    if p_out == 0.0:
        return "dx", 0.0
    if p_out == 1.0:
        return "dW", 0.0
    return "weighted", p_out


@dataclass(frozen=True)
class SolveRequest:
    op_spec: OperatorSpec
    grid: Grid1D
    ic: InitialCondition
    snapshot_times: Tuple[float, ...]
    method: str = "FiniteDifference"
    dt: Optional[float] = None
    dt_growth: Optional[float] = None
    accuracy_monitor: bool = False
    initial: Optional[DensityField] = field(default=None, compare=False)
    t0: float = 0.0

    def __post_init__(self):
        times = tuple(float(t) for t in self.snapshot_times)
        if not times:
            raise ConfigError("at least one snapshot time is required", field_path="times")
        if any(not np.isfinite(t) for t in times) or times[0] <= self.t0:
            raise ConfigError(f"snapshot times must be finite and > {self.t0}", field_path="times")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("snapshot times must be strictly increasing", field_path="times")
        if self.method not in SOLVER_METHODS:
            raise ConfigError(f"method must be one of {SOLVER_METHODS}", field_path="method.kind")
        if self.dt is not None:
            if not (self.dt > 0):
                raise ConfigError(f"dt = {self.dt} must be positive", field_path="solver.dt")
            if self.dt > self.min_gap:
                raise ConfigError(
                    f"dt = {self.dt} exceeds the smallest snapshot gap {self.min_gap:.3g}", field_path="solver.dt"
                )
        if self.dt_growth is not None and not (0.0 < self.dt_growth <= 1.0):
            raise ConfigError("dt_growth must lie in (0, 1]", field_path="solver.dt_growth")
        object.__setattr__(self, "snapshot_times", times)

    @property
    def min_gap(self) -> float:
        edges = (self.t0,) + self.snapshot_times
        return float(min(b - a for a, b in zip(edges, edges[1:])))

    @property
    def effective_dt(self) -> float:
        if self.dt is not None:
            return float(self.dt)
        first = self.snapshot_times[0] - self.t0
        return float(min(DEFAULT_DT, DT_SNAPSHOT_FRACTION * first, self.min_gap))


@dataclass
class SolveResult:
    method: str
    snapshots: List[DensityField]
    initial: DensityField
    diagnostics: Dict[str, object] = field(default_factory=dict)

    @property
    def times(self) -> List[float]:
        return [s.t for s in self.snapshots]

    def __iter__(self):
        return iter(self.snapshots)

    def __len__(self) -> int:
        return len(self.snapshots)

    def __getitem__(self, i) -> DensityField:
        return self.snapshots[i]
