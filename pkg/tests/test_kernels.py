import numpy as np
import pytest

from core.errors import BetaTooSmall, NotMonomial
from core.grid import build_grid
from core.operator_assembly import OperatorSpec, assemble
from core.point_transform import PointTransform
from spectral.kernels import (
    BesselKernelSpec,
    bessel_kernel,
    collapse_error,
    eigenrelation_residual,
    kernel_for_operator,
    kernel_table,
    phi_kernel,
    phi_tilde_kernel,
    select_exponent_variant,
)


def _residual(variant, alpha, pt, K, n, x_max=2.0, kernel=phi_kernel):
    grid = build_grid(-x_max, x_max, n)
    op = assemble(OperatorSpec(variant, alpha, pt), grid)
    return eigenrelation_residual(op, kernel([K], grid.nodes, pt, alpha)[0], K)


def test_constant_kernel_at_zero_wavenumber(cubic):
    op = assemble(OperatorSpec("Delta3", 0.0, cubic), build_grid(-2, 2, 40))
    assert eigenrelation_residual(op, np.ones(op.n, dtype=complex), 0.0) < 1e-12


@pytest.mark.parametrize("alpha", [0.0, 0.3])
@pytest.mark.parametrize("K", [1.0, 2.0])
def test_phi_eigenrelation_second_order(cubic, alpha, K):
    coarse = _residual("Delta3", alpha, cubic, K, 2000)
    fine = _residual("Delta3", alpha, cubic, K, 4000)
    assert fine < 1e-3
    assert 3.6 <= coarse / fine <= 4.4


def test_phi_tilde_eigenrelation(cubic):
    assert _residual("Delta4", 0.3, cubic, 2.0, 4000, kernel=phi_tilde_kernel) < 1e-3


def test_bessel_kernel_eigenrelation_cube(monomial3):
    grid = build_grid(-2, 2, 4000)
    op = assemble(OperatorSpec("Delta1", 0.0, monomial3), grid)
    spec = BesselKernelSpec.for_transform(monomial3, "Phi")
    samples = bessel_kernel(spec, [1.0], grid.nodes)[0]
    assert eigenrelation_residual(op, samples, 1.0, exclude_radius=0.1) < 5e-4


@pytest.mark.parametrize("branch", ["Phi", "PhiTilde"])
def test_unit_beta_collapses_to_plane_wave(branch):
    assert collapse_error(branch, "derived") < 1e-10


def test_printed_exponent_does_not_collapse():
    assert collapse_error("PhiTilde", "printed") > 1e-3


def test_selection_prefers_collapsing_variant():
    report = select_exponent_variant("PhiTilde", 2.0, n=1000)
    assert report["selected"] == "derived"
    assert {s["variant"] for s in report["scores"]} == {"derived", "printed"}


def test_bessel_spec_guards(cubic):
    with pytest.raises(NotMonomial):
        BesselKernelSpec.for_transform(cubic)
    with pytest.raises(BetaTooSmall):
        BesselKernelSpec(0.2)


def test_phi_kernels_differ_by_weight(cubic):
    x = np.linspace(-1, 1, 11)
    ratio = phi_tilde_kernel([1.5], x, cubic, 0.3)[0] / phi_kernel([1.5], x, cubic, 0.3)[0]
    assert np.allclose(ratio, cubic.derivative(x) ** 0.4)


@pytest.mark.parametrize("variant, alpha, pt, expected", [
    ("Delta1", 0.0, PointTransform.identity(), "plane"),
    ("Delta2", 0.3, PointTransform.polynomial([1]), "plane"),
    ("Delta3", 0.3, PointTransform.polynomial([1, 0, 1]), "phi"),
    ("Delta4", 0.0, PointTransform.polynomial([1, 0, 1]), "phi_tilde"),
    ("Delta1", 0.5, PointTransform.polynomial([1, 0, 1]), "phi"),
    ("Delta1", 0.0, PointTransform.polynomial([1, 0, 1]), None),
    ("Delta1", 0.0, PointTransform.monomial(3.0), "Phi"),
    ("Delta2", 0.0, PointTransform.monomial(3.0), "PhiTilde"),
    ("Delta1", 1.0, PointTransform.monomial(3.0), "PhiTilde"),
    ("Delta2", 1.0, PointTransform.monomial(3.0), "Phi"),
    ("Delta1", 0.3, PointTransform.monomial(3.0), None),
    ("Delta1", 0.0, PointTransform.monomial(0.2), None),
])
def test_kernel_for_operator(variant, alpha, pt, expected):
    assert kernel_for_operator(OperatorSpec(variant, alpha, pt)) == expected


def test_kernel_table_skips_bessel_for_polynomials(cubic):
    rows = kernel_table(cubic, [-1.0, 0.5, 1.0], [1.0, 2.0])
    assert {r["kernel"] for r in rows} == {"phi", "phi_tilde"}
    assert len(rows) == 2 * 2 * 3
    assert rows[0]["K"] == 2.0


def test_kernel_table_monomial_has_all_four(monomial3):
    rows = kernel_table(monomial3, np.linspace(-1, 1, 4), [0.5])
    assert {r["kernel"] for r in rows} == {"phi", "phi_tilde", "Phi", "PhiTilde"}
    assert all(r["K"] == 0.125 for r in rows)
