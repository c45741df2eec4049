"""
Spectral Solver
Diagonalizes the operator with its eigen-kernel family, multiplies by
exp(-K^2 D t) and transforms back.

    plane / phi / phi_tilde  -> uniform K grid, biorthogonal analysis/synthesis
    Phi / PhiTilde           -> uniform k grid with K = W(k), unitary Bessel pair

The K grid is sized once from the earliest snapshot: the propagator is
dropped beyond exp(-SPECTRAL_DECAY), and the spacing keeps periodic images
of the W profile outside the domain.
"""

import logging
import math
from dataclasses import replace

import numpy as np

from config.settings import MAX_K_NODES, SPECTRAL_DECAY
from core.errors import NoKernelAvailable, TruncationUnsafe
from solvers.request import SolveResult
from spectral.kernels import BesselKernelSpec, kernel_for_operator
from spectral.transforms import (
    KGrid,
    bessel_inverse,
    bessel_transform,
    gft_apply,
    gft_synthesize,
)

logger = logging.getLogger(__name__)


def _even_count(span: float, step: float) -> int:
    n = int(math.ceil(span / step))
    n += n % 2
    if n > MAX_K_NODES:
        raise TruncationUnsafe(f"spectral grid would need {n} nodes (limit {MAX_K_NODES}); shrink the domain or raise t")
    return max(n, 2)


class SpectralSolver:

    def __init__(self, simulator):
        self.simulator = simulator

    @property
    def kernel(self):
        return kernel_for_operator(self.simulator.spec)

    def supports(self) -> bool:
        return self.kernel is not None

    # ---------------------------
    # K grids
    # ---------------------------

    def plane_kgrid(self, t_min: float) -> KGrid:
        sim = self.simulator
        W = np.asarray(sim.spec.transform.evaluate(sim.grid.ghost_nodes), dtype=float)
        span = float(W[1] - W[0])
        K_max = math.sqrt(SPECTRAL_DECAY / (sim.spec.D * t_min))
        dK = math.pi / span
        return KGrid.uniform(K_max, _even_count(2.0 * K_max, dK), mode="UniformK")

    def bessel_kgrid(self, t_min: float) -> KGrid:
        sim = self.simulator
        beta = sim.spec.transform.beta
        X = float(np.max(np.abs(sim.grid.ghost_nodes)))
        k_max = (SPECTRAL_DECAY / (sim.spec.D * t_min)) ** (1.0 / (2.0 * beta))
        # phase |k x|^beta must move by less than pi/2 per k cell
        dk = (math.pi / 2.0) ** (1.0 / beta) / X
        if beta >= 1.0:
            dk = min(dk, math.pi / (2.0 * beta * k_max ** (beta - 1.0) * X ** beta))
        return KGrid.uniform(k_max, _even_count(2.0 * k_max, dk), mode="KEqualsWofK", transform=sim.spec.transform)

    # ---------------------------
    # Solve
    # ---------------------------

    def solve(self) -> SolveResult:
        sim = self.simulator
        kernel = self.kernel
        if kernel is None:
            raise NoKernelAvailable(
                f"no spectral kernel for {sim.spec.variant}, alpha = {sim.spec.alpha}, "
                f"transform {sim.spec.transform.kind}",
                field_path="method.kind",
            )
        initial = sim.initial_density()
        spans = [t - sim.request.t0 for t in sim.request.snapshot_times]
        D = sim.spec.D

        if kernel in ("Phi", "PhiTilde"):
            spec = BesselKernelSpec.for_transform(sim.spec.transform, kernel)
            kgrid = self.bessel_kgrid(spans[0])
            hat0 = bessel_transform(initial, spec, kgrid)

            def back(hat):
                return bessel_inverse(hat, sim.grid, spec).values
        else:
            # eigenfunctions f^{p_in} exp(iKW): analyse with the partner weight f^{1 - p_in}
            kgrid = self.plane_kgrid(spans[0])
            hat0 = gft_apply(initial, "phi_tilde", sim.spec.exponents[0], sim.spec.transform, kgrid)

            def back(hat):
                return gft_synthesize(hat, sim.grid, sim.spec.transform).values

        logger.debug("spectral: %s kernel on %d K nodes", kernel, kgrid.n)
        snapshots = []
        for t, span in zip(sim.request.snapshot_times, spans):
            values = back(hat0.propagated(D, span))
            snapshots.append(initial.at_time(t, values))
        if sim.spec.exponents[0] == 0.0 and sim.spec.exponents[2] == 1.0:
            snapshots = [replace(s, coordinate="W") for s in snapshots]

        return SolveResult(
            method="Spectral",
            snapshots=snapshots,
            initial=initial,
            diagnostics={
                "kernel": kernel,
                "k_nodes": kgrid.n,
                "mass_drift": [s.mass() - initial.mass() for s in snapshots],
            },
        )
