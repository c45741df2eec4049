"""
Scaling Module
Power-law fits of MSD series, regime classification and crossover detection.

All fits are ordinary least squares of log(y) on log(t) (scipy.stats.linregress).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from config.settings import CROSSOVER_MIN_DECADES, MIN_FIT_POINTS, NO_KNEE_IMPROVEMENT, NORMAL_BETA_TOL
from core.errors import NonPositiveExponent, SpanTooShort, WindowTooSparse
from analysis.moments import MsdSeries

logger = logging.getLogger(__name__)

REGIMES = ("Ballistic", "SuperDiffusive", "Normal", "SubDiffusive")

_SSR_FLOOR = 1e-12


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    log_prefactor: float
    window: Tuple[float, float]
    r_squared: float
    n_points: int

    @property
    def prefactor(self) -> float:
        return math.exp(self.log_prefactor)

    def predict(self, t) -> np.ndarray:
        return np.exp(self.log_prefactor) * np.asarray(t, dtype=float) ** self.exponent

    def to_record(self, regime: Optional[str] = None) -> dict:
        record = {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "log_prefactor": self.log_prefactor,
            "window": list(self.window),
            "r_squared": self.r_squared,
            "n_points": self.n_points,
        }
        if regime is not None:
            record["regime"] = regime
        return record


@dataclass(frozen=True)
class Crossover:
    early: ScalingFit
    late: ScalingFit
    knee_time: float
    improvement: float
    no_knee: bool

    def to_record(self) -> dict:
        return {
            "early": self.early.to_record(),
            "late": self.late.to_record(),
            "knee_time": self.knee_time,
            "improvement": self.improvement,
            "no_knee": self.no_knee,
        }


def _ols(log_t: np.ndarray, log_y: np.ndarray) -> Tuple[float, float, float, float]:
    """slope, intercept, r^2 and residual sum of squares."""
    fit = stats.linregress(log_t, log_y)
    resid = log_y - (fit.intercept + fit.slope * log_t)
    ssr = float(np.dot(resid, resid))
    r2 = float(fit.rvalue ** 2) if np.isfinite(fit.rvalue) else 1.0
    return float(fit.slope), float(fit.intercept), min(r2, 1.0), ssr


def fit_power_law(
    t: Sequence[float],
    y: Sequence[float],
    window: Optional[Tuple[float, float]] = None,
    what: str = "msd",
) -> ScalingFit:
    """Fit y = C t^a over the points with t inside window (inclusive) and t, y > 0."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (t > 0) & (y > 0) & np.isfinite(y)
    if window is not None:
        lo, hi = window
        if not lo < hi:
            raise WindowTooSparse(f"window [{lo}, {hi}] is empty", field_path="analysis.fit_window")
        keep &= (t >= lo) & (t <= hi)
    n = int(np.count_nonzero(keep))
    if n < MIN_FIT_POINTS:
        raise WindowTooSparse(
            f"{n} usable {what} points in window {window} (need {MIN_FIT_POINTS})",
            field_path="analysis.fit_window",
        )
    slope, intercept, r2, _ = _ols(np.log(t[keep]), np.log(y[keep]))
    return ScalingFit(
        exponent=slope,
        log_prefactor=intercept,
        window=(float(t[keep][0]), float(t[keep][-1])),
        r_squared=r2,
        n_points=n,
    )


def fit_scaling(
    series: MsdSeries,
    coordinate: str = "X",
    window: Optional[Tuple[float, float]] = None,
    excess: bool = True,
) -> ScalingFit:
    """Fit msd ~ t^exponent. With excess, the initial spread is subtracted first."""
    y = series.excess(coordinate) if excess else series.msd(coordinate)
    fit = fit_power_law(series.times, y, window, what=f"msd_{coordinate.lower()}")
    logger.debug("fit %s: exponent %.6f over %s (r2 %.6f)", coordinate, fit.exponent, fit.window, fit.r_squared)
    return fit


def fit_normalization(
    series: MsdSeries,
    coordinate: str = "X",
    window: Optional[Tuple[float, float]] = None,
) -> ScalingFit:
    """Log-log slope of the density's peak value; -1/(2 beta) in x for monomial transforms."""
    return fit_power_law(series.times, series.norm(coordinate), window, what=f"norm_{coordinate.lower()}")


def classify_regime(exponent: float) -> str:
    """
    beta = 1/exponent:
        beta < 0.25          Ballistic
        0.25 <= beta < 1     SuperDiffusive
        |beta - 1| <= 0.02   Normal
        beta > 1             SubDiffusive
    """
    if not (np.isfinite(exponent) and exponent > 0):
        raise NonPositiveExponent(f"exponent {exponent!r} must be positive")
    beta = 1.0 / exponent
    if abs(beta - 1.0) <= NORMAL_BETA_TOL:
        return "Normal"
    if beta < 0.25:
        return "Ballistic"
    if beta < 1.0:
        return "SuperDiffusive"
    return "SubDiffusive"


def detect_crossover(
    series: MsdSeries,
    coordinate: str = "X",
    excess: bool = True,
    min_points: int = MIN_FIT_POINTS,
) -> Crossover:
    """
    Two-segment fit in log-log space. Every split with at least `min_points`
    on each side is tried; the split with the smallest total squared
    residual wins. The knee is where the two fitted lines cross, clipped to
    the gap between the segments.
    """
    y = series.excess(coordinate) if excess else series.msd(coordinate)
    t = series.times
    keep = (t > 0) & (y > 0) & np.isfinite(y)
    t, y = t[keep], y[keep]
    if t.size < 2 or math.log10(t[-1] / t[0]) < CROSSOVER_MIN_DECADES:
        span = math.log10(t[-1] / t[0]) if t.size >= 2 else 0.0
        raise SpanTooShort(f"series spans {span:.2f} decades (need {CROSSOVER_MIN_DECADES:g})")
    if t.size < 2 * min_points:
        raise WindowTooSparse(f"{t.size} points cannot hold two segments of {min_points}")

    lt, ly = np.log(t), np.log(y)
    _, _, _, single = _ols(lt, ly)

    best = None
    for b in range(min_points, t.size - min_points + 1):
        early = _ols(lt[:b], ly[:b])
        late = _ols(lt[b:], ly[b:])
        total = early[3] + late[3]
        if best is None or total < best[0]:
            best = (total, b, early, late)

    total, b, early, late = best
    # floor keeps round-off residuals of an exact power law from posing as a knee
    improvement = (single - total) / max(single, _SSR_FLOOR * t.size)
    no_knee = improvement < NO_KNEE_IMPROVEMENT

    lo, hi = lt[b - 1], lt[b]
    if early[0] != late[0]:
        cross = (late[1] - early[1]) / (early[0] - late[0])
        log_knee = min(max(cross, lo), hi)
    else:
        log_knee = 0.5 * (lo + hi)

    def _fit(seg, sl):
        return ScalingFit(
            exponent=seg[0], log_prefactor=seg[1], window=(float(t[sl][0]), float(t[sl][-1])),
            r_squared=seg[2], n_points=int(t[sl].size),
        )

    result = Crossover(
        early=_fit(early, slice(0, b)),
        late=_fit(late, slice(b, None)),
        knee_time=float(math.exp(log_knee)),
        improvement=float(improvement),
        no_knee=bool(no_knee),
    )
    logger.info(
        "crossover %s: early %.4f, late %.4f, knee t=%.4g%s",
        coordinate, result.early.exponent, result.late.exponent, result.knee_time,
        " (no knee)" if no_knee else "",
    )
    return result
