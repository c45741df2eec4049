import numpy as np
import pytest

from core.errors import BadBounds, OddNodeCountOnSymmetricDomain
from core.grid import build_grid


def test_four_node_grid():
    grid = build_grid(-2, 2, 4)
    assert grid.h == 1.0
    assert grid.nodes.tolist() == [-1.5, -0.5, 0.5, 1.5]
    assert grid.half_nodes.tolist() == [-2.0, -1.0, 0.0, 1.0, 2.0]


def test_fine_symmetric_grid_has_no_node_at_zero():
    grid = build_grid(-10, 10, 4000)
    assert grid.nodes.size == 4000
    assert grid.h == pytest.approx(0.005)
    assert not np.any(grid.nodes == 0.0)
    assert np.array_equal(grid.nodes, -grid.nodes[::-1])
    assert np.all(np.diff(grid.nodes) > 0)


def test_asymmetric_grid_allows_odd_count():
    grid = build_grid(0, 1, 7)
    assert grid.n == 7
    assert grid.nodes[0] == pytest.approx(1 / 14)


def test_ghost_nodes():
    grid = build_grid(-2, 2, 4)
    assert grid.ghost_nodes.tolist() == [-2.5, 2.5]


@pytest.mark.parametrize("args, error", [
    ((1.0, 1.0, 10), BadBounds),
    ((2.0, -2.0, 10), BadBounds),
    ((-1.0, 1.0, 2), BadBounds),
    ((0.0, float("inf"), 10), BadBounds),
    ((-1.0, 1.0, 11), OddNodeCountOnSymmetricDomain),
])
def test_rejects(args, error):
    with pytest.raises(error):
        build_grid(*args)
