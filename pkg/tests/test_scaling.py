import numpy as np
import pytest

from analysis.moments import MsdSeries, series_from_arrays
from analysis.scaling import (
    classify_regime,
    detect_crossover,
    fit_normalization,
    fit_power_law,
    fit_scaling,
)
from core.errors import NonPositiveExponent, SpanTooShort, WindowTooSparse

T = np.logspace(-2, 2, 21)


def test_linear_growth():
    fit = fit_power_law(T, 2.0 * T)
    assert fit.exponent == pytest.approx(1.0, abs=1e-10)
    assert fit.prefactor == pytest.approx(2.0, rel=1e-10)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.n_points == 21


def test_sublinear_growth_in_window():
    fit = fit_power_law(T, 5.0 * T ** (1 / 3), window=(0.09, 11.0))
    assert fit.exponent == pytest.approx(1 / 3, abs=1e-10)
    assert fit.prefactor == pytest.approx(5.0, rel=1e-10)
    assert fit.window == pytest.approx((0.1, 10.0))
    assert fit.n_points == 11
    assert np.allclose(fit.predict([1.0, 8.0]), [5.0, 10.0])


@pytest.mark.parametrize("window", [(1.0, 2.0), (5.0, 1.0)])
def test_sparse_window(window):
    with pytest.raises(WindowTooSparse) as info:
        fit_power_law(T, T, window=window)
    assert info.value.field_path == "analysis.fit_window"


def test_excess_fit_removes_initial_spread():
    series = MsdSeries(
        times=T, msd_x=0.5 + 2 * T, msd_w=0.5 + 2 * T, norm_x=T ** -0.5, norm_w=T ** -0.5, msd_x0=0.5, msd_w0=0.5
    )
    assert fit_scaling(series, "X").exponent == pytest.approx(1.0, abs=1e-10)
    assert fit_scaling(series, "X", excess=False).exponent < 0.9
    assert fit_normalization(series, "W").exponent == pytest.approx(-0.5, abs=1e-10)


@pytest.mark.parametrize("exponent, regime", [
    (1.0, "Normal"),
    (1.01, "Normal"),
    (3.0, "SuperDiffusive"),
    (4.0, "SuperDiffusive"),
    (5.0, "Ballistic"),
    (1 / 3, "SubDiffusive"),
    (0.9, "SubDiffusive"),
])
def test_classify_regime(exponent, regime):
    assert classify_regime(exponent) == regime


@pytest.mark.parametrize("exponent", [0.0, -1.0, float("nan")])
def test_classify_rejects_non_positive(exponent):
    with pytest.raises(NonPositiveExponent):
        classify_regime(exponent)


def test_crossover_between_two_power_laws():
    t = np.logspace(-4, 4, 41)
    y = np.where(t < 1.0, 2.0 * t, 2.0 * t ** (1 / 3))
    cross = detect_crossover(series_from_arrays(t, y), "X")
    assert cross.early.exponent == pytest.approx(1.0, abs=1e-9)
    assert cross.late.exponent == pytest.approx(1 / 3, abs=1e-9)
    assert cross.knee_time == pytest.approx(1.0, rel=1e-6)
    assert not cross.no_knee
    assert set(cross.to_record()) == {"early", "late", "knee_time", "improvement", "no_knee"}


def test_single_power_law_has_no_knee():
    t = np.logspace(-4, 4, 41)
    assert detect_crossover(series_from_arrays(t, 2.0 * t)).no_knee


def test_crossover_needs_three_decades():
    t = np.logspace(0, 2, 20)
    with pytest.raises(SpanTooShort):
        detect_crossover(series_from_arrays(t, t))


def test_crossover_needs_two_segments_of_points():
    t = np.logspace(0, 4, 8)
    with pytest.raises(WindowTooSparse):
        detect_crossover(series_from_arrays(t, t))
