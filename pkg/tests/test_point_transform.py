import numpy as np
import pytest

from core.errors import (
    AllZeroCoefficients,
    ConfigError,
    EvenCoefficientNotDominated,
    EvenLeadingPower,
    NegativeCoefficient,
    NonPositiveBeta,
    Unbounded,
)
from core.point_transform import PointTransform, validate


# ---------------------------
# validate
# ---------------------------

def test_validate_accepts_cubic_and_pure_cube():
    assert validate({"kind": "polynomial", "coeffs": [1, 0, 1]}).coeffs == (1.0, 0.0, 1.0)
    assert validate({"kind": "polynomial", "coeffs": [0, 0, 1]}).coeffs == (0.0, 0.0, 1.0)


@pytest.mark.parametrize("record, error", [
    ({"kind": "polynomial", "coeffs": [1, 2, 1]}, EvenCoefficientNotDominated),
    ({"kind": "polynomial", "coeffs": [1, 0, 0, 0, 1]}, EvenCoefficientNotDominated),
    ({"kind": "polynomial", "coeffs": [0.01, 0.5, 1]}, EvenCoefficientNotDominated),
    ({"kind": "polynomial", "coeffs": [1, 1]}, EvenLeadingPower),
    ({"kind": "polynomial", "coeffs": [1, 0, -1]}, NegativeCoefficient),
    ({"kind": "polynomial", "coeffs": [0, 0, 0]}, AllZeroCoefficients),
    ({"kind": "monomial", "beta": 0}, NonPositiveBeta),
    ({"kind": "monomial", "beta": -2.5}, NonPositiveBeta),
])
def test_validate_rejects(record, error):
    with pytest.raises(error) as info:
        validate(record)
    assert info.value.exit_code == 2
    assert info.value.field_path.startswith("transform")


def test_validate_unknown_kind():
    with pytest.raises(ConfigError) as info:
        validate({"kind": "spline"})
    assert info.value.field_path == "transform.kind"


def test_trailing_zeros_are_dropped():
    assert validate({"kind": "polynomial", "coeffs": [1, 0, 1, 0, 0]}).coeffs == (1.0, 0.0, 1.0)


# ---------------------------
# evaluate / derivative
# ---------------------------

def test_evaluate_examples(cubic):
    assert cubic.evaluate(1.0) == 2.0
    assert PointTransform.monomial(1.0).evaluate(-3.7) == -3.7
    assert PointTransform.monomial(3.0).evaluate(2.0) == 8.0


def test_derivative_examples(cubic, monomial3):
    assert cubic.derivative(1.0) == 4.0
    assert cubic.derivative(0.0) == 1.0
    assert monomial3.derivative(0.0) == 0.0


def test_derivative_unbounded_below_one():
    with pytest.raises(Unbounded):
        PointTransform.monomial(0.5).derivative(np.array([-1.0, 0.0, 1.0]))


@pytest.mark.parametrize("pt", [
    PointTransform.polynomial([1, 0, 1]),
    PointTransform.polynomial([0.5, 0, 1, 0, 0.1]),
    PointTransform.monomial(3.0),
])
def test_odd_symmetry_bit_for_bit(pt):
    x = np.linspace(0.01, 10.0, 500)
    assert np.array_equal(pt.evaluate(-x), -pt.evaluate(x))


def test_monomial_odd_symmetry_non_integer_beta():
    pt = PointTransform.monomial(2.5)
    x = np.linspace(0.01, 10.0, 500)
    assert np.allclose(pt.evaluate(-x), -pt.evaluate(x), rtol=1e-15, atol=0)


@pytest.mark.parametrize("pt", [
    PointTransform.polynomial([1, 0, 1]),
    PointTransform.monomial(2.5),
    PointTransform.monomial(0.5),
])
def test_derivative_matches_central_difference(pt):
    x = np.concatenate([np.linspace(-3.0, -0.2, 40), np.linspace(0.2, 3.0, 40)])
    step = 1e-5
    fd = (pt.evaluate(x + step) - pt.evaluate(x - step)) / (2 * step)
    assert np.max(np.abs(fd / pt.derivative(x) - 1.0)) < 1e-6


def test_monotone_on_random_pairs(cubic):
    rng = np.random.default_rng(7)
    a, b = np.sort(rng.uniform(-10, 10, size=(2, 1000)), axis=0)
    for pt in (cubic, PointTransform.monomial(0.7), PointTransform.polynomial([0, 0, 1])):
        assert np.all(pt.evaluate(a) <= pt.evaluate(b))


# ---------------------------
# invert
# ---------------------------

def test_invert_examples(cubic, monomial3):
    assert cubic.invert(2.0) == pytest.approx(1.0, abs=1e-12)
    assert cubic.invert(0.1) == pytest.approx(0.09903, abs=5e-6)
    assert monomial3.invert(-8.0) == pytest.approx(-2.0, abs=1e-12)


@pytest.mark.parametrize("pt", [
    PointTransform.polynomial([1, 0, 1]),
    PointTransform.polynomial([2, 1, 3]),
    PointTransform.monomial(0.5),
    PointTransform.monomial(2.0),
])
def test_invert_round_trip(pt):
    x = np.linspace(-10.0, 10.0, 201)
    x = x[np.abs(x) > 1e-9]
    back = np.array([pt.invert(pt.evaluate(v), 1e-12) for v in x])
    assert np.max(np.abs(back - x)) < 1e-10


def test_invert_rejects_bad_tolerance(cubic):
    with pytest.raises(ValueError):
        cubic.invert(1.0, rel_tol=0.0)


# ---------------------------
# integrate_derivative_power
# ---------------------------

def test_integral_of_derivative_is_w_difference(cubic):
    a = np.array([-1.0, 0.0, 0.5])
    b = np.array([0.0, 0.5, 2.0])
    assert np.allclose(cubic.integrate_derivative_power(a, b, 1.0), cubic.evaluate(b) - cubic.evaluate(a))


def test_integral_of_squared_derivative_polynomial(cubic):
    # int_0^1 (1 + 3x^2)^2 dx = 1 + 2 + 9/5
    got = cubic.integrate_derivative_power(np.array([0.0]), np.array([1.0]), 2.0)
    assert got[0] == pytest.approx(4.8, rel=1e-12)


def test_integral_monomial_closed_form(monomial3):
    # int_0^1 (3x^2)^2 dx = 9/5
    got = monomial3.integrate_derivative_power(np.array([0.0]), np.array([1.0]), 2.0)
    assert got[0] == pytest.approx(1.8, rel=1e-12)
