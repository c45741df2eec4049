r"""
Bessel functions of the first kind for fractional orders.

J_nu(z) is evaluated by the ascending power series

    J_nu(z) = sum_m (-1)^m (z/2)^{2m+nu} / (m! Gamma(m+nu+1))

summed term by term through the ratio of successive terms, for
z <= BESSEL_Z_SWITCH, and by the Hankel large-argument expansion

    J_nu(z) ~ sqrt(2/(pi z)) (P cos(chi) - Q sin(chi)),  chi = z - (nu/2 + 1/4) pi

beyond it. Orders are limited to |nu| <= BESSEL_MAX_ORDER, which covers the
kernels of monomial transforms with beta >= 1/4. For nu = +-1/2 the Hankel
expansion terminates and is used for every z > 0.
"""

import numpy as np
from scipy.special import rgamma

from config.settings import (
    BESSEL_MAX_ORDER,
    BESSEL_OVERLAP_WINDOW,
    BESSEL_SERIES_TERMS,
    BESSEL_Z_SWITCH,
)
from core.errors import OrderOutOfRange

_ASYMPTOTIC_TERMS = 60


def _series(nu: float, z: np.ndarray) -> np.ndarray:
    if nu < 0.0 and float(nu).is_integer():
        return (-1.0) ** int(-nu) * _series(-nu, z)
    half = 0.5 * z
    q = -half * half
    term = half ** nu * rgamma(nu + 1.0)
    out = term.copy()
    # t_m = t_{m-1} * (-(z/2)^2) / (m (m + nu))
    for m in range(1, BESSEL_SERIES_TERMS):
        term = term * q / (m * (m + nu))
        out += term
    return out


def _asymptotic(nu: float, z: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    p = np.ones_like(z)
    q = np.zeros_like(z)
    term = np.ones_like(z)
    prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_TERMS):
        term = term * (mu - (2.0 * k - 1.0) ** 2) / (8.0 * k * z)
        mag = np.abs(term)
        # stop each lane once the divergent tail starts growing
        active &= mag < prev
        if not np.any(active):
            break
        contrib = np.where(active, term, 0.0)
        if k % 2 == 0:
            p += (-1.0) ** (k // 2) * contrib
        else:
            q += (-1.0) ** ((k - 1) // 2) * contrib
        prev = mag
        if np.all(mag[active] < 1e-18):
            break
    chi = z - (0.5 * nu + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * z)) * (p * np.cos(chi) - q * np.sin(chi))


def _at_zero(nu: float) -> float:
    if nu == 0.0:
        return 1.0
    if nu > 0.0 or float(nu).is_integer():
        return 0.0
    return np.inf


def bessel_j(nu: float, z) -> np.ndarray:
    """J_nu(z) for |nu| <= BESSEL_MAX_ORDER and z >= 0 (array or scalar)."""
    nu = float(nu)
    if abs(nu) > BESSEL_MAX_ORDER:
        raise OrderOutOfRange(f"|nu| = {abs(nu)} exceeds {BESSEL_MAX_ORDER}")
    z_arr = np.asarray(z, dtype=float)
    flat = z_arr.ravel()
    if np.any(flat < 0.0):
        raise ValueError("bessel_j expects z >= 0")

    out = np.empty_like(flat)
    zero = flat == 0.0
    out[zero] = _at_zero(nu)

    if abs(nu) == 0.5:
        large = ~zero
    else:
        large = flat > BESSEL_Z_SWITCH
    small = ~zero & ~large
    if np.any(small):
        out[small] = _series(nu, flat[small])
    if np.any(large):
        out[large] = _asymptotic(nu, flat[large])

    out = out.reshape(z_arr.shape)
    return out if out.ndim else float(out)


def overlap_discrepancy(nu: float, samples: int = 41) -> float:
    """Max |series - asymptotic| over the validation window around the switch point."""
    lo, hi = BESSEL_OVERLAP_WINDOW
    z = np.linspace(lo, hi, samples)
    return float(np.max(np.abs(_series(nu, z) - _asymptotic(nu, z))))
