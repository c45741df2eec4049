"""
Diffusion Simulator Module
Orchestrates one solve request: owns the grid, the operator and the three
solver components, and provides the cross-method and semigroup checks.
"""

import itertools
import logging
from dataclasses import replace
from functools import cached_property
from typing import Dict, List, Optional, Sequence

import numpy as np

from core.density import DensityField, InitialCondition
from core.errors import ConfigError, NoKernelAvailable
from core.operator_assembly import AssembledOperator, assemble
from solvers.fd_solver import FiniteDifferenceSolver
from solvers.request import SolveRequest, SolveResult, conserved_measure
from solvers.spectral_solver import SpectralSolver
from solvers.w_closed_form import WClosedFormSolver

logger = logging.getLogger(__name__)


class DiffusionSimulator:

    def __init__(self, request: SolveRequest):
        self.request = request
        self.spec = request.op_spec
        self.grid = request.grid

        # Components
        self.closed_form = WClosedFormSolver(self)
        self.spectral = SpectralSolver(self)
        self.finite_difference = FiniteDifferenceSolver(self)

        self._components = {
            "WClosedForm": self.closed_form,
            "Spectral": self.spectral,
            "FiniteDifference": self.finite_difference,
        }

    @cached_property
    def operator(self) -> AssembledOperator:
        return assemble(self.spec, self.grid)

    def initial_density(self) -> DensityField:
        """The start profile normalized under the measure the operator conserves."""
        measure, exponent = conserved_measure(self.spec)
        start = self.request.initial
        if start is None:
            start = self.request.ic.realize(self.grid, self.spec.transform)
        elif start.grid.n != self.grid.n:
            raise ConfigError("restart density lives on a different grid", field_path="grid.n")
        field = replace(start, coordinate="X", measure=measure, exponent=exponent, t=self.request.t0)
        return field.normalized()

    def applicable_methods(self) -> List[str]:
        return [name for name, comp in self._components.items() if comp.supports()]

    def solve(self, method: Optional[str] = None) -> SolveResult:
        method = method or self.request.method
        component = self._components.get(method)
        if component is None:
            raise ConfigError(f"unknown method '{method}'", field_path="method.kind")
        logger.info("solving %s alpha=%g with %s on n=%d", self.spec.variant, self.spec.alpha, method, self.grid.n)
        return component.solve()

    def cross_check(self, methods: Optional[Sequence[str]] = None) -> Dict[str, object]:
        """Run every applicable method and report pairwise max-norm differences per snapshot."""
        methods = list(methods or self.applicable_methods())
        results = {m: self.solve(m) for m in methods}
        pairs = {}
        for a, b in itertools.combinations(methods, 2):
            diffs = [float(np.max(np.abs(sa.values - sb.values))) for sa, sb in zip(results[a], results[b])]
            pairs[f"{a}~{b}"] = diffs
        worst = max((max(d) for d in pairs.values()), default=0.0)
        return {"methods": methods, "pairwise_max_norm": pairs, "worst": worst, "results": results}


# ---------------------------
# Convenience entry points
# ---------------------------

def _with_method(req: SolveRequest, method: str) -> SolveRequest:
    return req if req.method == method else replace(req, method=method)


def solve_w_closed_form(req: SolveRequest) -> SolveResult:
    return DiffusionSimulator(_with_method(req, "WClosedForm")).solve()


def solve_spectral(req: SolveRequest) -> SolveResult:
    return DiffusionSimulator(_with_method(req, "Spectral")).solve()


def solve_fd(req: SolveRequest) -> SolveResult:
    return DiffusionSimulator(_with_method(req, "FiniteDifference")).solve()


def restart(req: SolveRequest, snapshot: DensityField, times: Sequence[float]) -> SolveResult:
    """Continue a solve from a snapshot to later times."""
    follow = replace(req, initial=snapshot, t0=snapshot.t, snapshot_times=tuple(times))
    return DiffusionSimulator(follow).solve()


def semigroup_defect(req: SolveRequest, t1: float, t2: float) -> float:
    """max |solve(t1 + t2) - solve(t2 | restart at solve(t1))|."""
    first = DiffusionSimulator(replace(req, snapshot_times=(t1,), initial=None, t0=0.0)).solve()[0]
    direct = DiffusionSimulator(replace(req, snapshot_times=(t1 + t2,), initial=None, t0=0.0)).solve()[0]
    chained = restart(req, first, (t1 + t2,))[0]
    return float(np.max(np.abs(direct.values - chained.values)))


def attractor_distances(
    req: SolveRequest,
    other: InitialCondition,
    times: Sequence[float],
) -> List[float]:
    """
    max_W | t^{1/2} (rho_a - rho_b) | for the request's initial condition and
    `other`, both normalized to unit mass in W.
    """
    if not DiffusionSimulator(req).closed_form.supports():
        raise NoKernelAvailable("attractor check needs a W-domain closed form", field_path="operator.variant")
    a = solve_w_closed_form(replace(req, snapshot_times=tuple(times), initial=None, t0=0.0))
    b = solve_w_closed_form(replace(req, ic=other, snapshot_times=tuple(times), initial=None, t0=0.0))
    return [
        float(np.sqrt(t) * np.max(np.abs(sa.as_w_density().values - sb.as_w_density().values)))
        for t, sa, sb in zip(times, a, b)
    ]
