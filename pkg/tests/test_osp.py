import pytest

from analysis.osp import osp_to_pt, pt_to_osp
from core.errors import ConfigError, NonPositiveBeta


def test_plain_diffusion_maps_to_identity():
    params = osp_to_pt(1.0, 0.0)
    assert params.beta == 1.0
    assert params.scale == 1.0
    assert params.regime == "Normal"


def test_scale_carries_dimension():
    params = osp_to_pt(2.0, 2.0, D=0.5)
    assert params.beta == 1.0
    assert params.scale == 2.0
    assert params.composite_exponent == 2.0


def test_subdiffusive_pair():
    params = osp_to_pt(1.0, 2.0)
    assert params.beta == 2.0
    assert params.transform.is_monomial and params.transform.beta == 2.0
    record = params.to_record()
    assert record["msd_exponent"] == 0.5
    assert record["regime"] == "SubDiffusive"


def test_unrepresentable_pair():
    with pytest.raises(NonPositiveBeta) as info:
        osp_to_pt(3.0, 2.0)
    assert info.value.field_path == "g"


@pytest.mark.parametrize("args, path", [
    ((0.0, 1.0), "c"),
    ((1.0, float("inf")), "g"),
    ((1.0, 1.0, -1.0), "D"),
])
def test_rejects_bad_parameters(args, path):
    with pytest.raises(ConfigError) as info:
        osp_to_pt(*args)
    assert info.value.field_path == path


@pytest.mark.parametrize("beta, c", [(2.0, 1.0), (0.5, 3.0), (1.0, 2.0)])
def test_inverse_map(beta, c):
    assert osp_to_pt(c, pt_to_osp(beta, c)).beta == pytest.approx(beta)


def test_inverse_map_guards():
    with pytest.raises(NonPositiveBeta):
        pt_to_osp(0.0, 1.0)
    with pytest.raises(ConfigError):
        pt_to_osp(1.0, 0.0)
