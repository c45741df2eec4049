"""
Spectral Transforms Module
Quadrature application of the W-Fourier, biorthogonal and Bessel-kernel
transforms on cell-centered grids, plus the checks built on them.

All integrals are midpoint sums: over x with weight h (or h f_i for dW), over
K with the KGrid weights. Kernel matrices are built K_CHUNK rows at a time.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from config.settings import K_CHUNK
from core.density import DensityField, check_truncation
from core.errors import ConfigError, NotMonomial
from core.grid import Grid1D
from core.point_transform import PointTransform
from utils.file_utils import write_csv
from spectral.kernels import (
    SQRT_2PI,
    BesselKernelSpec,
    bessel_kernel,
    chunked_rows,
    eigenrelation_residual,
    phi_kernel,
    phi_tilde_kernel,
)

logger = logging.getLogger(__name__)

K_MODES = ("UniformK", "KEqualsWofK")
GFT_KERNELS = ("phi", "phi_tilde")
SPECTRAL_COLUMNS = ("k", "K", "re_rho_hat", "im_rho_hat")

__all__ = [
    "KGrid",
    "SpectralField",
    "wft_forward",
    "wft_inverse",
    "gft_apply",
    "gft_synthesize",
    "bessel_transform",
    "bessel_inverse",
    "eigenrelation_residual",
    "gram_matrix",
    "biorthogonality_ratio",
]


@dataclass(frozen=True, eq=False)
class KGrid:
    k_nodes: np.ndarray = field(repr=False)
    K_nodes: np.ndarray = field(repr=False)
    mode: str = "KEqualsWofK"
    dk: float = 1.0
    K_weights: np.ndarray = field(default=None, repr=False)

    @classmethod
    def uniform(
        cls,
        k_max: float,
        n: int,
        mode: str = "KEqualsWofK",
        transform: Optional[PointTransform] = None,
    ) -> "KGrid":
        """Cell-centered k grid on [-k_max, k_max]; k = 0 is never a node for even n."""
        if mode not in K_MODES:
            raise ConfigError(f"mode must be one of {K_MODES}", field_path="kgrid.mode")
        if not (k_max > 0) or n < 2:
            raise ConfigError("need k_max > 0 and at least two K nodes", field_path="kgrid")
        dk = 2.0 * k_max / n
        k = -k_max + (np.arange(n) + 0.5) * dk
        half = n // 2
        if n % 2 == 0:
            k[:half] = -k[half:][::-1]
        if mode == "UniformK" or transform is None:
            return cls(k_nodes=k, K_nodes=k.copy(), mode="UniformK", dk=dk, K_weights=np.full(n, dk))
        K = np.asarray(transform.evaluate(k), dtype=float)
        weights = dk * np.asarray(transform.derivative(k), dtype=float)
        return cls(k_nodes=k, K_nodes=K, mode=mode, dk=dk, K_weights=weights)

    @classmethod
    def from_values(cls, K_values: Sequence[float]) -> "KGrid":
        """K nodes given explicitly (weights from neighbour spacing)."""
        K = np.asarray(K_values, dtype=float)
        if K.ndim != 1 or K.size == 0 or np.any(np.diff(K) <= 0):
            raise ConfigError("K values must be strictly increasing", field_path="kgrid")
        if K.size > 1:
            edges = np.concatenate([[K[0] - 0.5 * (K[1] - K[0])], 0.5 * (K[1:] + K[:-1]), [K[-1] + 0.5 * (K[-1] - K[-2])]])
            weights = np.diff(edges)
        else:
            weights = np.ones(1)
        dk = float(np.mean(weights))
        return cls(k_nodes=K.copy(), K_nodes=K, mode="UniformK", dk=dk, K_weights=weights)

    @property
    def n(self) -> int:
        return int(self.k_nodes.size)


@dataclass(frozen=True, eq=False)
class SpectralField:
    kgrid: KGrid
    values: np.ndarray = field(repr=False)
    kernel: str = "plane"
    alpha: float = 0.0
    t: float = 0.0

    def propagated(self, D: float, t: float) -> "SpectralField":
        """Multiply by exp(-K^2 D t)."""
        K = self.kgrid.K_nodes
        return SpectralField(self.kgrid, self.values * np.exp(-K * K * D * t), self.kernel, self.alpha, self.t + t)

    def norm_squared(self, measure: str = "dk") -> float:
        w = self.kgrid.dk if measure == "dk" else self.kgrid.K_weights
        return float(np.sum(w * np.abs(self.values) ** 2))

    def rows(self):
        return [[k, K, v.real, v.imag] for k, K, v in zip(self.kgrid.k_nodes, self.kgrid.K_nodes, self.values)]

    def dump_csv(self, path: str) -> str:
        return write_csv(path, SPECTRAL_COLUMNS, self.rows())


# ---------------------------
# W-Fourier transform
# ---------------------------

def _analysis(weighted: np.ndarray, K: np.ndarray, W: np.ndarray) -> np.ndarray:
    out = np.empty(K.size, dtype=complex)
    for rows in chunked_rows(K.size, K_CHUNK):
        out[rows] = np.exp(-1j * np.outer(K[rows], W)) @ weighted
    return out / SQRT_2PI


def _synthesis(weighted_hat: np.ndarray, K: np.ndarray, W: np.ndarray) -> np.ndarray:
    out = np.zeros(W.size, dtype=complex)
    for rows in chunked_rows(K.size, K_CHUNK):
        out += weighted_hat[rows] @ np.exp(1j * np.outer(K[rows], W))
    return out / SQRT_2PI


def wft_forward(density: DensityField, kgrid: KGrid) -> SpectralField:
    """rho_hat(K) = int dW exp(-iKW) rho(W) / sqrt(2 pi), sampled on the x grid."""
    check_truncation(density.values, "density")
    weights = density.grid.h * density.f
    hat = _analysis(weights * density.values, kgrid.K_nodes, density.W)
    return SpectralField(kgrid, hat, kernel="plane", t=density.t)


def wft_inverse(spectral: SpectralField, grid: Grid1D, transform: PointTransform) -> DensityField:
    W = np.asarray(transform.evaluate(grid.nodes), dtype=float)
    values = _synthesis(spectral.kgrid.K_weights * spectral.values, spectral.kgrid.K_nodes, W)
    return DensityField(grid=grid, transform=transform, values=values.real, coordinate="W", measure="dW", t=spectral.t)


# ---------------------------
# Biorthogonal transforms
# ---------------------------

def _analysis_power(kernel_choice: str, alpha: float) -> float:
    if kernel_choice not in GFT_KERNELS:
        raise ConfigError(f"kernel must be one of {GFT_KERNELS}", field_path="kernel")
    if not (0.0 <= alpha <= 1.0):
        raise ConfigError(f"alpha = {alpha} outside [0, 1]", field_path="operator.alpha")
    return alpha if kernel_choice == "phi" else 1.0 - alpha


def gft_apply(
    density: DensityField,
    kernel_choice: str,
    alpha: float,
    pt: PointTransform,
    kgrid: KGrid,
) -> SpectralField:
    """
    Analysis <kernel_K | rho> under dx. With kernel_choice "phi" this is
    int dx f^alpha exp(-iKW) rho / sqrt(2 pi); its synthesis partner is phi_tilde.
    """
    p = _analysis_power(kernel_choice, alpha)
    check_truncation(density.values, "density")
    x = density.grid.nodes
    f = np.asarray(pt.derivative(x), dtype=float)
    W = np.asarray(pt.evaluate(x), dtype=float)
    hat = _analysis(density.grid.h * f ** p * density.values, kgrid.K_nodes, W)
    return SpectralField(kgrid, hat, kernel=kernel_choice, alpha=alpha, t=density.t)


def gft_synthesize(
    spectral: SpectralField,
    grid: Grid1D,
    pt: PointTransform,
    measure: str = "dx",
    exponent: float = 0.0,
) -> DensityField:
    """int dK partner_K(x) rho_hat(K), the partner of the analysis kernel."""
    p = _analysis_power(spectral.kernel, spectral.alpha)
    x = grid.nodes
    f = np.asarray(pt.derivative(x), dtype=float)
    W = np.asarray(pt.evaluate(x), dtype=float)
    values = f ** (1.0 - p) * _synthesis(spectral.kgrid.K_weights * spectral.values, spectral.kgrid.K_nodes, W)
    return DensityField(
        grid=grid, transform=pt, values=values.real, coordinate="X", measure=measure, exponent=exponent, t=spectral.t
    )


def gram_matrix(pt: PointTransform, alpha: float, grid: Grid1D, K_values: Sequence[float]) -> np.ndarray:
    """G_jl = sum_i h conj(phi_tilde_{K_j}(x_i)) phi_{K_l}(x_i)."""
    x = grid.nodes
    tilde = phi_tilde_kernel(K_values, x, pt, alpha)
    plain = phi_kernel(K_values, x, pt, alpha)
    return grid.h * (np.conj(tilde) @ plain.T)


def biorthogonality_ratio(pt: PointTransform, alpha: float, grid: Grid1D, K_values: Sequence[float]) -> float:
    """Largest off-diagonal Gram magnitude relative to the smallest diagonal one."""
    G = gram_matrix(pt, alpha, grid, K_values)
    diag = np.abs(np.diag(G))
    off = np.abs(G - np.diag(np.diag(G)))
    return float(np.max(off) / np.min(diag))


# ---------------------------
# Bessel-kernel transforms
# ---------------------------

def _require_monomial(pt: PointTransform, spec: BesselKernelSpec) -> None:
    if not pt.is_monomial:
        raise NotMonomial("Bessel transforms need a monomial W", field_path="transform.kind")
    if pt.beta != spec.beta:
        raise ConfigError(
            f"kernel beta {spec.beta} does not match transform beta {pt.beta}", field_path="kernel.beta"
        )


def bessel_transform(density: DensityField, spec: BesselKernelSpec, kgrid: KGrid) -> SpectralField:
    """rho_hat(k) = int dx kernel_k(x) rho(x), indexed by k with K = W(k)."""
    _require_monomial(density.transform, spec)
    check_truncation(density.values, "density")
    x = density.grid.nodes
    weighted = density.grid.h * density.values
    out = np.empty(kgrid.n, dtype=complex)
    for rows in chunked_rows(kgrid.n, K_CHUNK):
        out[rows] = bessel_kernel(spec, kgrid.k_nodes[rows], x) @ weighted
    return SpectralField(kgrid, out, kernel=spec.branch, t=density.t)


def bessel_inverse(spectral: SpectralField, grid: Grid1D, spec: BesselKernelSpec) -> DensityField:
    """rho(x) = int dk conj(kernel_k(x)) rho_hat(k)."""
    out = np.zeros(grid.n, dtype=complex)
    weighted = spectral.kgrid.dk * spectral.values
    for rows in chunked_rows(spectral.kgrid.n, K_CHUNK):
        out += weighted[rows] @ np.conj(bessel_kernel(spec, spectral.kgrid.k_nodes[rows], grid.nodes))
    return DensityField(
        grid=grid, transform=spec.transform, values=out.real, coordinate="X", measure="dx", t=spectral.t
    )


def bessel_parseval_defect(density: DensityField, spec: BesselKernelSpec, kgrid: KGrid) -> float:
    """| ||rho_hat||^2_dk / ||rho||^2_dx - 1 |."""
    spectral = bessel_transform(density, spec, kgrid)
    ref = float(np.sum(density.grid.h * density.values ** 2))
    return abs(spectral.norm_squared("dk") / ref - 1.0)
