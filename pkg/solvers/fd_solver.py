"""
Finite Difference Solver
Crank-Nicolson time stepping of d rho/dt = A rho in x, where A is the
assembled tridiagonal operator (D already folded in).

    (I - dt/2 A) rho^{n+1} = (I + dt/2 A) rho^n

Each step is one banded solve. Snapshot times are hit exactly by shortening
the step that would overshoot them. The first step after a start is taken
as two implicit-Euler half steps so the stiff modes near x = 0 (where f
vanishes or blows up) are damped instead of oscillating.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import solve_banded

from config.settings import (
    ACCURACY_MONITOR_TOL,
    LEAKAGE_LIMIT,
    LEAKAGE_REPORT_LEVEL,
    POSITIVITY_SLACK,
    SNAPSHOT_EDGE_LIMIT,
)
from core.density import DensityField, check_truncation
from core.errors import StepTooLarge, TruncationUnsafe
from core.operator_assembly import AssembledOperator
from solvers.request import SolveResult

logger = logging.getLogger(__name__)


class FiniteDifferenceSolver:

    def __init__(self, simulator):
        self.simulator = simulator

    def supports(self) -> bool:
        return True

    # ---------------------------
    # Stepping
    # ---------------------------

    @staticmethod
    def _system(op: AssembledOperator, dt: float, theta: float) -> np.ndarray:
        ab = -theta * dt * op.banded
        ab[1] += 1.0
        return ab

    @staticmethod
    def _boundary_rate(op: AssembledOperator, weights: np.ndarray, u: np.ndarray) -> float:
        """Mass flowing out through the two Dirichlet faces per unit time."""
        # column sums of diag(weights) A vanish except at the two edge columns
        left = weights[0] * op.diag[0] + weights[1] * op.sub[1]
        right = weights[-1] * op.diag[-1] + weights[-2] * op.sup[-2]
        return -float(left * u[0] + right * u[-1])

    def march(
        self,
        op: AssembledOperator,
        weights: np.ndarray,
        u0: np.ndarray,
        t0: float,
        times: Tuple[float, ...],
        dt: float,
        dt_growth: Optional[float],
    ) -> Tuple[List[np.ndarray], dict]:
        u = np.array(u0, dtype=float)
        t = float(t0)
        out: List[np.ndarray] = []
        leak = 0.0
        leaks: List[float] = []
        steps = 0
        rate = self._boundary_rate(op, weights, u)
        fresh = True

        for target in times:
            while t < target:
                step = max(dt, dt_growth * t) if dt_growth else dt
                final = t + step >= target * (1.0 - 1e-14)
                if final:
                    step = target - t
                if fresh:
                    half = self._system(op, 0.5 * step, 1.0)
                    u = solve_banded((1, 1), half, u, check_finite=False)
                    u = solve_banded((1, 1), half, u, check_finite=False)
                    fresh = False
                else:
                    rhs = u + 0.5 * step * op.apply(u)
                    u = solve_banded((1, 1), self._system(op, step, 0.5), rhs, check_finite=False)
                new_rate = self._boundary_rate(op, weights, u)
                leak += 0.5 * step * (rate + new_rate)
                rate = new_rate
                t = target if final else t + step
                steps += 1
            out.append(u.copy())
            leaks.append(leak)
            logger.debug("fd: reached t=%.6g after %d steps", target, steps)

        return out, {"steps": steps, "leakage": leaks}

    # ---------------------------
    # Solve
    # ---------------------------

    def solve(self) -> SolveResult:
        sim = self.simulator
        req = sim.request
        op = sim.operator
        initial = sim.initial_density()
        weights = initial.weights()
        dt = req.effective_dt

        values, info = self.march(op, weights, initial.values, req.t0, req.snapshot_times, dt, req.dt_growth)
        snapshots = [initial.at_time(t, v) for t, v in zip(req.snapshot_times, values)]

        mass0 = initial.mass()
        drift = [s.mass() - mass0 for s in snapshots]
        minimum = [float(np.min(v)) for v in values]
        diagnostics = {
            "dt": dt,
            "steps": info["steps"],
            "mass_drift": drift,
            "leakage": info["leakage"],
            "min_value": minimum,
            "positivity_ok": all(m >= -POSITIVITY_SLACK for m in minimum),
        }
        if info["leakage"][-1] > LEAKAGE_REPORT_LEVEL:
            logger.info("boundary leakage %.3e by t=%.6g", info["leakage"][-1], req.snapshot_times[-1])
        if not diagnostics["positivity_ok"]:
            logger.warning("Crank-Nicolson undershoot: min node value %.3e", min(minimum))
        self._check_truncation(snapshots, info["leakage"], mass0)

        if req.accuracy_monitor:
            diagnostics["accuracy_change"] = self._monitor(op, weights, initial, values, dt)

        return SolveResult(method="FiniteDifference", snapshots=snapshots, initial=initial, diagnostics=diagnostics)

    @staticmethod
    def _check_truncation(snapshots, leakage, mass0: float) -> None:
        for snap in snapshots:
            check_truncation(snap.values, f"finite-difference density at t={snap.t:g}", SNAPSHOT_EDGE_LIMIT)
        lost = abs(leakage[-1]) / mass0
        if lost > LEAKAGE_LIMIT:
            raise TruncationUnsafe(
                f"{lost:.3e} of the mass left through the boundary by t={snapshots[-1].t:g} "
                f"(limit {LEAKAGE_LIMIT:.0e}); widen the grid",
                field_path="grid",
            )

    def _monitor(self, op, weights, initial: DensityField, values, dt: float) -> float:
        """Re-run with dt/2 (and half the growth rate); raise if any snapshot moves by more than the tolerance."""
        req = self.simulator.request
        growth = 0.5 * req.dt_growth if req.dt_growth else None
        halved, _ = self.march(op, weights, initial.values, req.t0, req.snapshot_times, 0.5 * dt, growth)
        change = max(float(np.max(np.abs(a - b))) for a, b in zip(values, halved))
        if change > ACCURACY_MONITOR_TOL:
            logger.warning("accuracy monitor: halving dt moved a snapshot by %.3e", change)
            raise StepTooLarge(
                f"halving dt changes snapshots by {change:.3e} (> {ACCURACY_MONITOR_TOL:g}); reduce solver.dt",
                field_path="solver.dt",
            )
        logger.debug("accuracy monitor: change %.3e", change)
        return change
