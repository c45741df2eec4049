import numpy as np
import pytest

from core.density import DensityField, InitialCondition, check_truncation
from core.errors import ConfigError, TruncationUnsafe
from core.grid import build_grid


def test_check_truncation_returns_edge_ratio():
    values = np.array([1e-14, 1.0, 2.0, 1e-13])
    assert check_truncation(values) == pytest.approx(5e-14)


@pytest.mark.parametrize("values", [np.zeros(4), np.array([1.0, 2.0, 1.0, 0.5])])
def test_check_truncation_rejects(values):
    with pytest.raises(TruncationUnsafe):
        check_truncation(values)


def test_weights_per_measure(cubic):
    grid = build_grid(-1, 1, 10)
    values = np.ones(grid.n)
    f = cubic.derivative(grid.nodes)
    assert np.allclose(DensityField(grid, cubic, values, "X", "dx").weights(), grid.h)
    assert np.allclose(DensityField(grid, cubic, values).weights(), grid.h * f)
    weighted = DensityField(grid, cubic, values, "X", "weighted", exponent=0.5)
    assert np.allclose(weighted.weights(), grid.h * f ** 0.5)


def test_rejects_bad_fields(cubic):
    grid = build_grid(-1, 1, 10)
    with pytest.raises(ValueError):
        DensityField(grid, cubic, np.ones(9))
    with pytest.raises(ValueError):
        DensityField(grid, cubic, np.ones(10), coordinate="Y")
    with pytest.raises(ValueError):
        DensityField(grid, cubic, np.ones(10), measure="dy")


def test_normalized_and_coordinate_change(cubic):
    grid = build_grid(-2, 2, 400)
    W = cubic.evaluate(grid.nodes)
    rho = DensityField(grid, cubic, 3.0 * np.exp(-W * W)).normalized()
    assert rho.mass() == pytest.approx(1.0, abs=1e-14)
    as_x = rho.as_x_density()
    assert (as_x.coordinate, as_x.measure) == ("X", "dx")
    assert as_x.mass() == pytest.approx(1.0, abs=1e-14)
    assert np.array_equal(as_x.abscissa, grid.nodes)
    assert np.array_equal(rho.abscissa, rho.W)


def test_normalizing_zero_mass_fails(identity):
    grid = build_grid(-1, 1, 10)
    with pytest.raises(TruncationUnsafe):
        DensityField(grid, identity, np.zeros(10)).normalized()


def test_at_time(identity):
    grid = build_grid(-1, 1, 4)
    rho = DensityField(grid, identity, np.ones(4)).at_time(0.5, [1, 2, 3, 4])
    assert rho.t == 0.5
    assert rho.values.dtype == float


# ---------------------------
# Initial conditions
# ---------------------------

def test_delta_realizes_normalized_in_w(cubic):
    grid = build_grid(-1, 1, 4000)
    rho = InitialCondition.delta_at().realize(grid, cubic)
    assert rho.mass() == pytest.approx(1.0, abs=1e-12)
    variance = np.sum(rho.weights() * rho.W ** 2 * rho.values)
    assert variance == pytest.approx(InitialCondition.delta_at().w_variance, rel=1e-6)


def test_gaussian_w_record_round_trip():
    ic = InitialCondition.from_record({"kind": "gaussian_w", "width": 0.5, "center": 1.0})
    assert ic == InitialCondition.gaussian_in_w(0.5, 1.0)
    assert ic.to_record() == {"kind": "gaussian_w", "width": 0.5, "center": 1.0}
    assert ic.w_variance == 0.25


def test_mixture_profile(identity):
    ic = InitialCondition.from_record({"kind": "custom", "mixture": [[1, -1, 0.2], [2, 1, 0.2]]})
    x = np.array([-1.0, 1.0])
    assert np.allclose(ic.profile(x, x), [1.0, 2.0], atol=1e-10)
    assert ic.w_variance is None


def test_sampler_and_samples(identity):
    grid = build_grid(-3, 3, 6)
    ic = InitialCondition.custom(lambda x, W: np.exp(-10 * W * W))
    assert ic.realize(grid, identity).mass() == pytest.approx(1.0)
    listed = InitialCondition.from_record({"kind": "custom", "values": [0, 1, 2, 2, 1, 0]})
    assert listed.realize(grid, identity).values[2] == pytest.approx(2.0 / 6.0)
    with pytest.raises(ConfigError):
        InitialCondition.from_record({"kind": "custom", "values": [0, 1, 0]}).realize(grid, identity)


@pytest.mark.parametrize("record, path", [
    ({"kind": "gaussian_w", "width": 0.0}, "initial.width"),
    ({"kind": "gaussian_w"}, "initial.width"),
    ({"kind": "step"}, "initial.kind"),
    ({"kind": "custom", "values": [1, -1]}, "initial.values"),
    ({"kind": "custom", "mixture": [[1, 0, -1]]}, "initial.mixture[0]"),
    ({"kind": "custom"}, "initial"),
    ({"kind": "delta", "center": "left"}, "initial.center"),
])
def test_rejects_bad_records(record, path):
    with pytest.raises(ConfigError) as info:
        InitialCondition.from_record(record)
    assert info.value.field_path == path


def test_initial_condition_touching_the_edge_is_rejected(identity):
    with pytest.raises(TruncationUnsafe):
        InitialCondition.gaussian_in_w(1.0).realize(build_grid(-2, 2, 100), identity)
