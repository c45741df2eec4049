import numpy as np
import pytest

from core.density import InitialCondition
from core.errors import ConfigError, NoKernelAvailable, StepTooLarge, TruncationUnsafe
from core.grid import build_grid
from core.operator_assembly import OperatorSpec
from core.point_transform import PointTransform
from solvers.diffusion_simulator import (
    DiffusionSimulator,
    attractor_distances,
    restart,
    semigroup_defect,
    solve_fd,
    solve_spectral,
    solve_w_closed_form,
)
from solvers.request import SolveRequest, conserved_measure


def _request(pt, variant="Delta3", alpha=0.0, bounds=(-2.0, 2.0, 1000), ic=None, times=(0.05, 0.1, 0.2), **kw):
    return SolveRequest(
        op_spec=OperatorSpec(variant, alpha, pt),
        grid=build_grid(*bounds),
        ic=ic or InitialCondition.gaussian_in_w(0.5),
        snapshot_times=times,
        **kw,
    )


def _moment(snapshot, power):
    return float(np.sum(snapshot.weights() * snapshot.abscissa ** power * snapshot.values))


# ---------------------------
# Requests
# ---------------------------

@pytest.mark.parametrize("kw, path", [
    ({"times": ()}, "times"),
    ({"times": (0.2, 0.1)}, "times"),
    ({"times": (0.0, 0.1)}, "times"),
    ({"method": "MonteCarlo"}, "method.kind"),
    ({"dt": -1e-3}, "solver.dt"),
    ({"dt": 0.1}, "solver.dt"),
    ({"dt_growth": 1.5}, "solver.dt_growth"),
])
def test_request_validation(cubic, kw, path):
    with pytest.raises(ConfigError) as info:
        _request(cubic, **kw)
    assert info.value.field_path == path


def test_effective_dt(cubic):
    assert _request(cubic).effective_dt == 1e-4
    assert _request(cubic, times=(1e-3, 1.0)).effective_dt == pytest.approx(5e-5)
    assert _request(cubic, dt=0.01).effective_dt == 0.01


@pytest.mark.parametrize("variant, alpha, expected", [
    ("Delta3", 0.0, ("dW", 0.0)),
    ("Delta1", 0.0, ("dx", 0.0)),
    ("Delta3", 0.3, ("weighted", 0.7)),
    ("Delta4", 0.0, ("dx", 0.0)),
])
def test_conserved_measure(cubic, variant, alpha, expected):
    measure, exponent = conserved_measure(OperatorSpec(variant, alpha, cubic))
    assert (measure, exponent) == (expected[0], pytest.approx(expected[1]))


def test_applicable_methods(cubic):
    assert DiffusionSimulator(_request(cubic)).applicable_methods() == ["WClosedForm", "Spectral", "FiniteDifference"]
    assert DiffusionSimulator(_request(cubic, "Delta1", 0.3)).applicable_methods() == ["FiniteDifference"]


# ---------------------------
# W closed form
# ---------------------------

def test_closed_form_w_variance_grows_linearly(cubic):
    req = _request(cubic, ic=InitialCondition.delta_at(), times=(0.5,))
    snap = solve_w_closed_form(req)[0]
    assert snap.coordinate == "W"
    assert snap.mass() == pytest.approx(1.0, abs=1e-12)
    assert _moment(snap, 2) == pytest.approx(1.0005, rel=1e-6)


def test_closed_form_is_identity_for_tiny_times(cubic):
    req = _request(cubic, times=(1e-8,))
    result = solve_w_closed_form(req)
    assert np.allclose(result[0].values, result.initial.values, rtol=1e-12, atol=0.0)


def test_closed_form_and_spectral_agree(cubic):
    report = DiffusionSimulator(_request(cubic, alpha=0.3)).cross_check(["WClosedForm", "Spectral"])
    assert report["worst"] < 1e-7


def test_all_methods_agree(cubic):
    report = DiffusionSimulator(_request(cubic, dt=1e-4)).cross_check()
    assert report["methods"] == ["WClosedForm", "Spectral", "FiniteDifference"]
    assert set(report["pairwise_max_norm"]) == {
        "WClosedForm~Spectral",
        "WClosedForm~FiniteDifference",
        "Spectral~FiniteDifference",
    }
    assert report["worst"] < 1e-4


def test_closed_form_needs_w_kernel(cubic):
    with pytest.raises(NoKernelAvailable):
        solve_w_closed_form(_request(cubic, "Delta1", 0.0))


# ---------------------------
# Spectral
# ---------------------------

def test_spectral_keeps_stretched_gaussian_shape():
    pt = PointTransform.monomial(2.0)
    # exp(-|x|^4 / 4 tau) is carried to tau + t unchanged in form
    req = _request(
        pt,
        "Delta1",
        0.0,
        bounds=(-3.0, 3.0, 1200),
        ic=InitialCondition.custom(lambda x, W: np.exp(-x ** 4 / 0.4)),
        times=(0.4,),
    )
    result = solve_spectral(req)
    assert result.diagnostics["kernel"] == "Phi"
    snap = result[0]
    expected = np.exp(-snap.x ** 4 / 2.0)
    expected /= np.sum(snap.grid.h * expected)
    assert np.max(np.abs(snap.values - expected)) < 1e-5


def test_spectral_needs_kernel(cubic):
    with pytest.raises(NoKernelAvailable):
        solve_spectral(_request(cubic, "Delta1", 0.3))


# ---------------------------
# Finite differences
# ---------------------------

def test_fd_second_moment_grows_by_2dt(identity):
    req = _request(
        identity, "Delta1", 0.0, bounds=(-12.0, 12.0, 4800), ic=InitialCondition.delta_at(), times=(0.1, 1.0), dt=1e-3
    )
    result = solve_fd(req)
    start = _moment(result.initial, 2)
    assert start == pytest.approx(5e-4, rel=1e-6)
    assert _moment(result[1], 2) == pytest.approx(start + 2.0, abs=1e-8)
    assert max(abs(d) for d in result.diagnostics["mass_drift"]) < 1e-12
    assert result.times == [0.1, 1.0]


def test_accuracy_monitor_flags_large_steps(identity):
    req = _request(
        identity,
        "Delta1",
        0.0,
        bounds=(-5.0, 5.0, 1000),
        ic=InitialCondition.delta_at(),
        times=(0.1, 0.2),
        dt=0.05,
        accuracy_monitor=True,
    )
    with pytest.raises(StepTooLarge) as info:
        solve_fd(req)
    assert info.value.field_path == "solver.dt"


def test_accuracy_monitor_reports_change(cubic):
    result = solve_fd(_request(cubic, dt=1e-4, accuracy_monitor=True))
    assert 0.0 <= result.diagnostics["accuracy_change"] <= 1e-4


# ---------------------------
# Truncation
# ---------------------------

@pytest.mark.parametrize("solve", [solve_w_closed_form, solve_fd])
def test_density_reaching_the_edge_is_rejected(cubic, solve):
    req = _request(cubic, bounds=(-1.0, 1.0, 400), ic=InitialCondition.delta_at(), times=(5.0,), dt=1e-3)
    with pytest.raises(TruncationUnsafe) as info:
        solve(req)
    assert info.value.exit_code == 3
    assert "widen the grid" in info.value.message


def test_closed_form_reports_edge_loss(cubic):
    # W spans [-10, 10]; at t = 1.5 about 8e-9 of the mass lies past the edges
    req = _request(cubic, ic=InitialCondition.delta_at(), times=(1.5,))
    result = solve_w_closed_form(req)
    assert -1e-7 < result.diagnostics["mass_drift"][0] < -1e-9


# ---------------------------
# Restart, semigroup, attractor
# ---------------------------

def test_restart_continues_from_snapshot(cubic):
    req = _request(cubic, method="WClosedForm", times=(0.1,))
    first = solve_w_closed_form(req)[0]
    follow = restart(req, first, (0.3,))
    assert follow.times == [0.3]
    assert follow.initial.t == 0.1


def test_semigroup_defect_is_small(cubic):
    req = _request(cubic, method="WClosedForm", times=(0.1,))
    assert semigroup_defect(req, 0.1, 0.2) < 1e-8


def test_restart_on_other_grid_is_rejected(cubic):
    req = _request(cubic, method="WClosedForm", times=(0.1,))
    other = solve_w_closed_form(_request(cubic, bounds=(-2.0, 2.0, 500), times=(0.1,)))[0]
    with pytest.raises(ConfigError):
        restart(req, other, (0.3,))


def test_initial_conditions_forget_their_shape(cubic):
    req = _request(cubic, bounds=(-3.2, 3.2, 2000), ic=InitialCondition.delta_at(), times=(0.5,))
    d = attractor_distances(req, InitialCondition.gaussian_in_w(0.5), (0.5, 2.0, 8.0))
    assert d[0] > d[1] > d[2]
    assert d[2] < d[0] / 4


def test_attractor_needs_closed_form(cubic):
    with pytest.raises(NoKernelAvailable):
        attractor_distances(_request(cubic, "Delta1", 0.0), InitialCondition.delta_at(), (1.0,))
