"""
Point transformations W(x).

A point transformation is either a signed monomial W(x) = sgn(x)|x|^beta or
an odd-degree polynomial W(x) = sum_{j=1}^{2J+1} a_j x^j whose coefficients
satisfy the positivity and dominance rules. Instances are immutable once
validated and are safe to share between workers.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from config.settings import INVERT_DEFAULT_REL_TOL, INVERT_MAX_ITER
from core.errors import (
    AllZeroCoefficients,
    ConfigError,
    EvenCoefficientNotDominated,
    EvenLeadingPower,
    NegativeCoefficient,
    NoConvergence,
    NonPositiveBeta,
    Unbounded,
)

ArrayLike = Union[float, np.ndarray]

_GAUSS_POINTS = 16


@dataclass(frozen=True)
class PointTransform:
    kind: str
    beta: float = 1.0
    coeffs: Tuple[float, ...] = ()

    # ---------------------------
    # Construction / validation
    # ---------------------------

    @classmethod
    def monomial(cls, beta: float) -> "PointTransform":
        return validate({"kind": "monomial", "beta": beta})

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "PointTransform":
        return validate({"kind": "polynomial", "coeffs": list(coeffs)})

    @classmethod
    def identity(cls) -> "PointTransform":
        return cls(kind="monomial", beta=1.0)

    def to_record(self) -> dict:
        if self.kind == "monomial":
            return {"kind": "monomial", "beta": float(self.beta)}
        return {"kind": "polynomial", "coeffs": [float(c) for c in self.coeffs]}

    @property
    def is_monomial(self) -> bool:
        return self.kind == "monomial"

    @property
    def degree(self) -> float:
        return self.beta if self.is_monomial else float(len(self.coeffs))

    @property
    def _is_odd_polynomial(self) -> bool:
        return all(c == 0.0 for c in self.coeffs[1::2])

    # ---------------------------
    # Evaluation
    # ---------------------------

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        if self.is_monomial:
            out = np.sign(x) * np.abs(x) ** self.beta
        elif self._is_odd_polynomial:
            # x * q(x^2) keeps W(-x) == -W(x) bit for bit
            x2 = x * x
            acc = np.zeros_like(x)
            for c in reversed(self.coeffs[0::2]):
                acc = acc * x2 + c
            out = x * acc
        else:
            acc = np.zeros_like(x)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            out = x * acc
        return out if out.ndim else float(out)

    def derivative(self, x: ArrayLike) -> ArrayLike:
        """dW/dx >= 0. Raises Unbounded at x = 0 for monomials with beta < 1."""
        x = np.asarray(x, dtype=float)
        if self.is_monomial:
            if self.beta == 1.0:
                out = np.ones_like(x)
            else:
                if self.beta < 1.0 and np.any(x == 0.0):
                    raise Unbounded(
                        f"dW/dx is infinite at x = 0 for beta = {self.beta}; use a grid avoiding x = 0"
                    )
                with np.errstate(divide="ignore"):
                    out = self.beta * np.abs(x) ** (self.beta - 1.0)
                if self.beta > 1.0:
                    out = np.where(x == 0.0, 0.0, out)
        else:
            acc = np.zeros_like(x)
            n = len(self.coeffs)
            for j in range(n, 0, -1):
                acc = acc * x + j * self.coeffs[j - 1]
            out = acc
        return out if out.ndim else float(out)

    def integrate_derivative_power(self, a: np.ndarray, b: np.ndarray, m: float) -> np.ndarray:
        """Integral of (dW/dx)^m over [a, b], elementwise; inf where it diverges."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if m == 0.0:
            return b - a
        if m == 1.0:
            return np.asarray(self.evaluate(b) - self.evaluate(a), dtype=float)

        if self.is_monomial:
            q = m * (self.beta - 1.0) + 1.0
            if q > 0.0:
                scale = self.beta ** m / q
                return scale * (np.sign(b) * np.abs(b) ** q - np.sign(a) * np.abs(a) ** q)
        elif float(m).is_integer():
            deriv = np.polynomial.Polynomial([j * c for j, c in enumerate(self.coeffs, start=1)])
            prim = (deriv ** int(m)).integ()
            return prim(b) - prim(a)

        nodes, weights = np.polynomial.legendre.leggauss(_GAUSS_POINTS)
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        pts = mid[..., None] + half[..., None] * nodes
        vals = np.asarray(self.derivative(pts)) ** m
        out = half * np.sum(weights * vals, axis=-1)
        if self.is_monomial:
            out = np.where((a <= 0.0) & (b >= 0.0), np.inf, out)
        return out

    # ---------------------------
    # Inversion
    # ---------------------------

    def invert(self, w: float, rel_tol: float = INVERT_DEFAULT_REL_TOL) -> float:
        """Return x with |W(x) - w| <= rel_tol * max(1, |w|)."""
        if rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        w = float(w)
        tol = rel_tol * max(1.0, abs(w))
        if w == 0.0:
            return 0.0

        if self.is_monomial:
            x = math.copysign(abs(w) ** (1.0 / self.beta), w)
            if abs(self.evaluate(x) - w) <= tol:
                return x

        # Bracket: W is monotone, so expand until the bounds straddle w
        bound = max(1.0, abs(w)) ** (1.0 / max(self.degree, 1.0))
        lo, hi = -bound, bound
        for _ in range(INVERT_MAX_ITER):
            if self.evaluate(lo) <= w <= self.evaluate(hi):
                break
            lo, hi = 2.0 * lo, 2.0 * hi
        else:
            raise NoConvergence(f"could not bracket w = {w}")

        x = 0.5 * (lo + hi)
        for _ in range(INVERT_MAX_ITER):
            r = self.evaluate(x) - w
            if r == 0.0:
                return x
            if r > 0:
                hi = x
            else:
                lo = x
            try:
                slope = self.derivative(x)
            except Unbounded:
                slope = np.inf
            step_ok = False
            if slope > 0 and np.isfinite(slope):
                x_new = x - r / slope
                step_ok = lo < x_new < hi
            if not step_ok:
                x_new = 0.5 * (lo + hi)
            if abs(x_new - x) <= 4.0 * np.finfo(float).eps * max(1.0, abs(x)) or hi - lo <= np.finfo(float).eps * max(1.0, abs(x)):
                x = x_new
                break
            x = x_new

        if abs(self.evaluate(x) - w) > tol:
            raise NoConvergence(f"inversion of w = {w} did not reach tolerance {tol:.3g}")
        return x


# ---------------------------
# Validation
# ---------------------------

def _check_monotone(coeffs: Sequence[float]) -> None:
    """Reject coefficient sets whose derivative still dips below zero."""
    deriv = np.polynomial.Polynomial([j * c for j, c in enumerate(coeffs, start=1)])
    if deriv.degree() < 1:
        return
    roots = deriv.roots()
    real = np.sort(roots[np.abs(roots.imag) < 1e-9].real)
    if real.size == 0:
        return
    probes = np.concatenate([[real[0] - 1.0], 0.5 * (real[1:] + real[:-1]), [real[-1] + 1.0]])
    scale = max(abs(c) for c in coeffs)
    if np.any(deriv(probes) < -1e-12 * scale):
        raise EvenCoefficientNotDominated(
            f"even coefficients of {list(coeffs)} are large enough to make dW/dx change sign",
            field_path="transform.coeffs",
        )


def validate(candidate: Union[dict, PointTransform]) -> PointTransform:
    """Validate a transform record ({"kind": ..., ...}) and return a PointTransform."""
    if isinstance(candidate, PointTransform):
        candidate = candidate.to_record()
    if not isinstance(candidate, dict):
        raise ConfigError("transform must be an object", field_path="transform")

    kind = str(candidate.get("kind", "")).lower()

    if kind == "monomial":
        try:
            beta = float(candidate.get("beta"))
        except (TypeError, ValueError):
            raise NonPositiveBeta("beta must be a positive real", field_path="transform.beta")
        if not np.isfinite(beta) or beta <= 0:
            raise NonPositiveBeta(f"beta = {beta} is not positive", field_path="transform.beta")
        return PointTransform(kind="monomial", beta=beta)

    if kind == "polynomial":
        raw = candidate.get("coeffs")
        if not isinstance(raw, (list, tuple)) or not raw:
            raise AllZeroCoefficients("coeffs must be a non-empty list", field_path="transform.coeffs")
        try:
            coeffs = [float(c) for c in raw]
        except (TypeError, ValueError):
            raise ConfigError("coeffs must be reals", field_path="transform.coeffs")

        # trailing zeros do not change W
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs.pop()

        if any(c < 0 for c in coeffs):
            raise NegativeCoefficient(f"negative coefficient in {coeffs}", field_path="transform.coeffs")
        if all(c == 0 for c in coeffs):
            raise AllZeroCoefficients("at least one coefficient must be positive", field_path="transform.coeffs")
        if len(coeffs) % 2 == 0:
            raise EvenLeadingPower(
                f"highest power {len(coeffs)} is even", field_path="transform.coeffs"
            )
        # a_{2m} < a_{2m+1}; list index j-1 holds a_j
        for j in range(2, len(coeffs), 2):
            a_even, a_odd = coeffs[j - 1], coeffs[j]
            if a_even >= a_odd:
                raise EvenCoefficientNotDominated(
                    f"a_{j} = {a_even} >= a_{j + 1} = {a_odd}", field_path="transform.coeffs"
                )
        _check_monotone(coeffs)
        return PointTransform(kind="polynomial", coeffs=tuple(coeffs))

    raise ConfigError(f"unknown transform kind '{kind}'", field_path="transform.kind")
