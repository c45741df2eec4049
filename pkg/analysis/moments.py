"""
Moments Module
Second moments of evolving densities in the x and W coordinates, and the
MSD time series the scaling fits run on.

The solver output is one profile per snapshot. It is read two ways:
    X: the profile as a density in x, renormalized under dx
    W: the profile as a density in W, renormalized under dW
"""

import csv
import logging
from collections import OrderedDict
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from config.settings import RENORMALIZE_DRIFT_LIMIT
from core.density import DensityField
from core.errors import ConfigError, NormalizationDrift
from solvers.request import SolveResult

logger = logging.getLogger(__name__)

MSD_COLUMNS = ("t", "msd_x", "msd_w", "norm_x", "norm_w")


def central_moment(abscissa: np.ndarray, values: np.ndarray, weights: np.ndarray) -> float:
    """<xi^2> - <xi>^2 of a sampled density under quadrature weights."""
    mass_density = weights * values
    mass = float(np.sum(mass_density))
    if not (mass > 0.0 and np.isfinite(mass)):
        raise NormalizationDrift(f"density has mass {mass!r}; cannot take moments")
    mean = float(np.sum(mass_density * abscissa)) / mass
    return float(np.sum(mass_density * (abscissa - mean) ** 2)) / mass


def _coordinate_view(density: DensityField, coordinate: str):
    if coordinate == "X":
        return density.x, np.full(density.grid.n, density.grid.h)
    if coordinate == "W":
        return density.W, density.grid.h * density.f
    raise ConfigError(f"coordinate must be X or W, got '{coordinate}'", field_path="analysis.coordinates")


def msd(density: DensityField, coordinate: str = "X") -> float:
    """
    Central second moment in x (measure dx) or W (measure dW).

    The density must already be normalized under the coordinate's measure;
    a drift up to RENORMALIZE_DRIFT_LIMIT is renormalized away, anything
    larger raises NormalizationDrift.
    """
    abscissa, weights = _coordinate_view(density, coordinate)
    mass = float(np.sum(weights * density.values))
    drift = abs(mass - 1.0)
    if drift > RENORMALIZE_DRIFT_LIMIT:
        raise NormalizationDrift(
            f"density has mass {mass:.10g} under d{coordinate.lower()} (drift {drift:.3e} > {RENORMALIZE_DRIFT_LIMIT:g})"
        )
    return central_moment(abscissa, density.values, weights)


@dataclass
class MsdSeries:
    """Snapshot times with the MSD and peak value of the density in both coordinates."""

    times: np.ndarray
    msd_x: np.ndarray
    msd_w: np.ndarray
    norm_x: np.ndarray
    norm_w: np.ndarray
    norm_drift: Optional[np.ndarray] = None
    msd_x0: float = 0.0
    msd_w0: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        for name in ("msd_x", "msd_w", "norm_x", "norm_w"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.times.shape:
                raise ValueError(f"{name} must have one entry per time")
            setattr(self, name, arr)
        if self.norm_drift is None:
            self.norm_drift = np.zeros_like(self.times)
        self.norm_drift = np.asarray(self.norm_drift, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(self.msd_x < 0) or np.any(self.msd_w < 0):
            raise ValueError("msd values must be non-negative")

    def __len__(self) -> int:
        return self.times.size

    def msd(self, coordinate: str) -> np.ndarray:
        if coordinate == "X":
            return self.msd_x
        if coordinate == "W":
            return self.msd_w
        raise ConfigError(f"coordinate must be X or W, got '{coordinate}'", field_path="analysis.coordinates")

    def excess(self, coordinate: str) -> np.ndarray:
        """msd(t) - msd(t0): the spread gained since the start."""
        base = self.msd_x0 if coordinate == "X" else self.msd_w0
        return self.msd(coordinate) - base

    def norm(self, coordinate: str) -> np.ndarray:
        return self.norm_x if coordinate == "X" else self.norm_w

    # ---------------------------
    # CSV
    # ---------------------------

    def rows(self) -> List[list]:
        """MSD CSV rows; the first row holds the initial moments at t0."""
        out = [[self.t0, self.msd_x0, self.msd_w0, float("nan"), float("nan")]]
        for i in range(len(self)):
            out.append([self.times[i], self.msd_x[i], self.msd_w[i], self.norm_x[i], self.norm_w[i]])
        return out

    @classmethod
    def from_csv(cls, path: str) -> "MsdSeries":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = [c for c in MSD_COLUMNS if c not in (reader.fieldnames or [])]
            if missing:
                raise ConfigError(f"MSD CSV is missing columns {missing}", field_path=path)
            rows = [{k: float(r[k]) for k in MSD_COLUMNS} for r in reader]
        if len(rows) < 2:
            raise ConfigError("MSD CSV needs the initial row and at least one snapshot", field_path=path)
        first, rest = rows[0], rows[1:]
        return cls(
            times=[r["t"] for r in rest],
            msd_x=[r["msd_x"] for r in rest],
            msd_w=[r["msd_w"] for r in rest],
            norm_x=[r["norm_x"] for r in rest],
            norm_w=[r["norm_w"] for r in rest],
            msd_x0=first["msd_x"],
            msd_w0=first["msd_w"],
            t0=first["t"],
        )


def msd_series(result: SolveResult) -> MsdSeries:
    """MSD series of a solve in both coordinates."""
    initial_x = result.initial.as_x_density()
    initial_w = result.initial.as_w_density()
    mass0 = result.initial.mass()

    msd_x, msd_w, norm_x, norm_w, drift = [], [], [], [], []
    for snap in result:
        xd = snap.as_x_density()
        wd = snap.as_w_density()
        msd_x.append(msd(xd, "X"))
        msd_w.append(msd(wd, "W"))
        norm_x.append(float(np.max(xd.values)))
        norm_w.append(float(np.max(wd.values)))
        drift.append(snap.mass() - mass0)
    logger.debug("msd series: %d snapshots, final msd_x=%.6g msd_w=%.6g", len(msd_x), msd_x[-1], msd_w[-1])

    return MsdSeries(
        times=result.times,
        msd_x=msd_x,
        msd_w=msd_w,
        norm_x=norm_x,
        norm_w=norm_w,
        norm_drift=drift,
        msd_x0=msd(initial_x, "X"),
        msd_w0=msd(initial_w, "W"),
        t0=result.initial.t,
    )


# ---------------------------
# Snapshot CSV input
# ---------------------------

def _sample_moments(x: np.ndarray, W: np.ndarray, rho: np.ndarray):
    h = float(x[1] - x[0])
    dx = np.full(x.size, h)
    dW = h * np.gradient(W, x)
    mx = central_moment(x, rho, dx)
    mw = central_moment(W, rho, dW)
    return mx, mw, float(np.max(rho) / np.sum(dx * rho)), float(np.max(rho) / np.sum(dW * rho))


def msd_series_from_snapshots(path: str) -> MsdSeries:
    """
    MSD series from a combined snapshot CSV (columns t, x, W_of_x, rho,
    measure_weight). The first time block is taken as the initial density.
    """
    blocks: "OrderedDict[float, list]" = OrderedDict()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        needed = ("t", "x", "W_of_x", "rho")
        if any(c not in (reader.fieldnames or []) for c in needed):
            raise ConfigError(f"snapshot CSV needs columns {needed}", field_path=path)
        for r in reader:
            blocks.setdefault(float(r["t"]), []).append((float(r["x"]), float(r["W_of_x"]), float(r["rho"])))
    if len(blocks) < 2:
        raise ConfigError("snapshot CSV needs the initial block and at least one snapshot", field_path=path)

    moments = []
    for t, samples in blocks.items():
        arr = np.asarray(samples)
        order = np.argsort(arr[:, 0])
        moments.append((t,) + _sample_moments(arr[order, 0], arr[order, 1], arr[order, 2]))

    (t0, mx0, mw0, _, _), rest = moments[0], moments[1:]
    return MsdSeries(
        times=[m[0] for m in rest],
        msd_x=[m[1] for m in rest],
        msd_w=[m[2] for m in rest],
        norm_x=[m[3] for m in rest],
        norm_w=[m[4] for m in rest],
        msd_x0=mx0,
        msd_w0=mw0,
        t0=t0,
    )


def series_from_arrays(
    times: Sequence[float],
    msd_x: Sequence[float],
    msd_w: Optional[Sequence[float]] = None,
) -> MsdSeries:
    """Series for synthetic data: peaks unknown, initial moments zero."""
    msd_w = msd_x if msd_w is None else msd_w
    nan = np.full(len(times), np.nan)
    return MsdSeries(times=times, msd_x=msd_x, msd_w=msd_w, norm_x=nan, norm_w=nan)
