"""
Fractal-diffusion (O'Shaughnessy-Procaccia) parameters and their point-transformation form.

With y = x^c the radial equation with dimension c and exponent g becomes

    d rho/dt = c^2 beta^2 D d/dy (dW/dy)^{-2} d/dy rho,   W(y) = y^beta,   beta = g/2 - c + 2

so the composite map is W = x^{beta c}.
"""

import math
from dataclasses import dataclass

from core.errors import ConfigError, NonPositiveBeta
from core.point_transform import PointTransform
from analysis.scaling import classify_regime


@dataclass(frozen=True)
class OspParams:
    c: float
    g: float
    beta: float
    scale: float

    @property
    def transform(self) -> PointTransform:
        """Monomial in the auxiliary variable y."""
        return PointTransform.monomial(self.beta)

    @property
    def composite_exponent(self) -> float:
        return self.beta * self.c

    @property
    def regime(self) -> str:
        return classify_regime(1.0 / self.beta)

    def to_record(self) -> dict:
        return {
            "c": self.c,
            "g": self.g,
            "beta": self.beta,
            "scale": self.scale,
            "composite_exponent": self.composite_exponent,
            "msd_exponent": 1.0 / self.beta,
            "regime": self.regime,
        }


def osp_to_pt(c: float, g: float, D: float = 1.0) -> OspParams:
    c, g, D = float(c), float(g), float(D)
    if not (c > 0 and math.isfinite(c)):
        raise ConfigError(f"dimension c = {c} must be positive", field_path="c")
    if not math.isfinite(g):
        raise ConfigError(f"g = {g} must be finite", field_path="g")
    if not (D > 0 and math.isfinite(D)):
        raise ConfigError(f"D = {D} must be positive", field_path="D")
    beta = g / 2.0 - c + 2.0
    if beta <= 0.0:
        raise NonPositiveBeta(
            f"c = {c:g}, g = {g:g} give beta = g/2 - c + 2 = {beta:g}; no point transformation represents this pair",
            field_path="g",
        )
    return OspParams(c=c, g=g, beta=beta, scale=c * c * beta * beta * D)


def pt_to_osp(beta: float, c: float) -> float:
    """g for a given beta once the dimension c is pinned (the map (c, g) -> beta is not one-to-one)."""
    beta, c = float(beta), float(c)
    if not beta > 0:
        raise NonPositiveBeta(f"beta = {beta} must be positive", field_path="beta")
    if not c > 0:
        raise ConfigError(f"dimension c = {c} must be positive", field_path="c")
    return 2.0 * (beta + c - 2.0)
