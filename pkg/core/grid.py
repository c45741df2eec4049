"""
Cell-centered truncated grids on the real line.

Nodes sit at x_i = x_min + (i + 1/2) h, so a symmetric domain with an even
node count never places a node on x = 0, where dW/dx may vanish or blow up.
"""

from dataclasses import dataclass, field

import numpy as np

from config.settings import MIN_GRID_NODES
from core.errors import BadBounds, OddNodeCountOnSymmetricDomain


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int
    nodes: np.ndarray = field(repr=False, compare=False)
    half_nodes: np.ndarray = field(repr=False, compare=False)

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def is_symmetric(self) -> bool:
        return self.x_min == -self.x_max

    @property
    def ghost_nodes(self) -> np.ndarray:
        """Nodes one cell outside each edge (Dirichlet ghosts)."""
        return np.array([self.x_min - 0.5 * self.h, self.x_max + 0.5 * self.h])

    def to_record(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "n": self.n}


def build_grid(x_min: float, x_max: float, n: int, min_nodes: int = MIN_GRID_NODES) -> Grid1D:
    """Build a cell-centered grid; half_nodes holds the n + 1 cell faces."""
    x_min, x_max = float(x_min), float(x_max)
    if not (np.isfinite(x_min) and np.isfinite(x_max)) or x_min >= x_max:
        raise BadBounds(f"need x_min < x_max, got ({x_min}, {x_max})", field_path="grid")
    if int(n) != n or n < min_nodes:
        raise BadBounds(f"n must be an integer >= {min_nodes}, got {n}", field_path="grid.n")
    n = int(n)
    if x_min == -x_max and n % 2:
        raise OddNodeCountOnSymmetricDomain(
            f"symmetric domain needs an even node count, got {n}", field_path="grid.n"
        )

    h = (x_max - x_min) / n
    i = np.arange(n, dtype=float)
    nodes = x_min + (i + 0.5) * h
    half_nodes = x_min + np.arange(n + 1, dtype=float) * h
    if x_min == -x_max:
        # exact mirror symmetry of node positions
        half = n // 2
        nodes[:half] = -nodes[half:][::-1]
        half_nodes[half] = 0.0
        half_nodes[:half] = -half_nodes[half + 1:][::-1]
    return Grid1D(x_min=x_min, x_max=x_max, n=n, nodes=nodes, half_nodes=half_nodes)
