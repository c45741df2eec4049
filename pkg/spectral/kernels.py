r"""
Transform kernels.

    plane wave      <W|K>        = exp(i K W) / sqrt(2 pi)
    phi_K(x)        = f^alpha     exp(i K W) / sqrt(2 pi)    eigenfunction of Delta3
    phi_tilde_K(x)  = f^(1-alpha) exp(i K W) / sqrt(2 pi)    eigenfunction of Delta4

For monomial W = sgn(x)|x|^beta and alpha = 0 there are also Bessel kernels,
indexed by k with K = W(k) and eta = k x:

    Phi_k(x)       = (beta/2) |eta|^(beta - 1/2) [J_{-1+1/2beta}(|eta|^beta) - i sgn(eta) J_{1-1/2beta}(|eta|^beta)]
    PhiTilde_k(x)  = (beta/2) |eta|^e           [J_{-1/2beta}(|eta|^beta)   + i sgn(eta) J_{1/2beta}(|eta|^beta)]

Phi_k solves the Delta1 (alpha = 0) eigenproblem and PhiTilde_k the Delta2
one, both with eigenvalue -K^2. The PhiTilde exponent e has two readings,
"derived" (beta - 1/2) and "printed" ((beta - 1)/2); only the first collapses
to the plane wave at beta = 1. The beta/2 prefactor makes both transforms
unitary under dx and dk.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy.special import gamma, rgamma

from config.settings import K_CHUNK
from core.errors import BetaTooSmall, ConfigError, NotMonomial
from core.grid import build_grid
from core.operator_assembly import AssembledOperator, OperatorSpec, assemble
from core.point_transform import PointTransform
from spectral.bessel import bessel_j

logger = logging.getLogger(__name__)

SQRT_2PI = np.sqrt(2.0 * np.pi)

BESSEL_BRANCHES = ("Phi", "PhiTilde")
EXPONENT_VARIANTS = ("derived", "printed")
KERNEL_TABLE_COLUMNS = ("x", "k", "K", "kernel", "re", "im")
MIN_BESSEL_BETA = 0.25


@dataclass(frozen=True)
class BesselKernelSpec:
    beta: float
    branch: str = "Phi"
    exponent_variant: str = "derived"

    def __post_init__(self):
        if not (self.beta > 0):
            raise ConfigError(f"beta = {self.beta} must be positive", field_path="kernel.beta")
        if self.beta < MIN_BESSEL_BETA:
            raise BetaTooSmall(
                f"beta = {self.beta} < {MIN_BESSEL_BETA} puts the Bessel orders out of range",
                field_path="kernel.beta",
            )
        if self.branch not in BESSEL_BRANCHES:
            raise ConfigError(f"branch must be one of {BESSEL_BRANCHES}", field_path="kernel.branch")
        if self.exponent_variant not in EXPONENT_VARIANTS:
            raise ConfigError(
                f"exponent_variant must be one of {EXPONENT_VARIANTS}", field_path="kernel.exponent_variant"
            )

    @classmethod
    def for_transform(cls, pt: PointTransform, branch: str = "Phi", exponent_variant: str = "derived"):
        if not pt.is_monomial:
            raise NotMonomial("Bessel kernels exist only for monomial W", field_path="transform.kind")
        return cls(beta=pt.beta, branch=branch, exponent_variant=exponent_variant)

    @property
    def transform(self) -> PointTransform:
        return PointTransform(kind="monomial", beta=float(self.beta))

    @property
    def orders(self):
        """(even-part order, odd-part order)."""
        nu = 1.0 / (2.0 * self.beta)
        if self.branch == "Phi":
            return nu - 1.0, 1.0 - nu
        return -nu, nu

    @property
    def exponent(self) -> float:
        if self.branch == "PhiTilde" and self.exponent_variant == "printed":
            return 0.5 * (self.beta - 1.0)
        return self.beta - 0.5

    @property
    def odd_sign(self) -> float:
        return -1.0 if self.branch == "Phi" else 1.0


# ---------------------------
# Plane-wave family
# ---------------------------

def plane_wave(K: np.ndarray, W: np.ndarray, sign: int = 1) -> np.ndarray:
    """exp(sign i K W)/sqrt(2 pi) on the outer product K x W."""
    K = np.atleast_1d(np.asarray(K, dtype=float))
    W = np.atleast_1d(np.asarray(W, dtype=float))
    return np.exp(sign * 1j * np.outer(K, W)) / SQRT_2PI


def phi_kernel(K, x, pt: PointTransform, alpha: float, sign: int = 1) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    f = np.asarray(pt.derivative(x), dtype=float)
    return plane_wave(K, pt.evaluate(x), sign) * f ** alpha


def phi_tilde_kernel(K, x, pt: PointTransform, alpha: float, sign: int = 1) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    f = np.asarray(pt.derivative(x), dtype=float)
    return plane_wave(K, pt.evaluate(x), sign) * f ** (1.0 - alpha)


# ---------------------------
# Bessel family
# ---------------------------

def _even_at_zero(spec: BesselKernelSpec) -> float:
    # |eta|^e (|eta|^beta / 2)^order / Gamma(order + 1) as eta -> 0
    order = spec.orders[0]
    power = spec.exponent + spec.beta * order
    if power > 0:
        return 0.0
    if power < 0:
        return np.inf if rgamma(order + 1.0) != 0 else 0.0
    return 0.5 * spec.beta * 2.0 ** (-order) / gamma(order + 1.0)


def bessel_kernel(spec: BesselKernelSpec, k, x) -> np.ndarray:
    """Samples of Phi_k(x) or PhiTilde_k(x) on the outer product k x x."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    eta = np.outer(k, x)
    a = np.abs(eta)
    z = a ** spec.beta
    nu_even, nu_odd = spec.orders
    zero = a == 0.0
    safe = np.where(zero, 1.0, a)
    zsafe = np.where(zero, 1.0, z)

    amp = 0.5 * spec.beta * safe ** spec.exponent
    even = amp * bessel_j(nu_even, zsafe)
    odd = amp * bessel_j(nu_odd, zsafe)
    out = even + spec.odd_sign * 1j * np.sign(eta) * odd
    if np.any(zero):
        out = np.where(zero, _even_at_zero(spec), out)
    return out


def kernel_matrix(
    name: str,
    K_or_k: np.ndarray,
    x: np.ndarray,
    pt: PointTransform,
    alpha: float = 0.0,
    sign: int = 1,
    exponent_variant: str = "derived",
) -> np.ndarray:
    """Dispatch by kernel name: plane, phi, phi_tilde, Phi, PhiTilde."""
    if name == "plane":
        return plane_wave(K_or_k, pt.evaluate(x), sign)
    if name == "phi":
        return phi_kernel(K_or_k, x, pt, alpha, sign)
    if name == "phi_tilde":
        return phi_tilde_kernel(K_or_k, x, pt, alpha, sign)
    if name in BESSEL_BRANCHES:
        spec = BesselKernelSpec.for_transform(pt, name, exponent_variant)
        return bessel_kernel(spec, K_or_k, x)
    raise ConfigError(f"unknown kernel '{name}'", field_path="kernel")


def chunked_rows(n_rows: int, chunk: int = K_CHUNK) -> Iterable[slice]:
    for start in range(0, n_rows, chunk):
        yield slice(start, min(start + chunk, n_rows))


# ---------------------------
# Eigenrelation and variant selection
# ---------------------------

def eigenrelation_residual(
    op: AssembledOperator,
    kernel_samples: np.ndarray,
    K: float,
    exclude_radius: float = 0.0,
) -> float:
    """
    max over interior nodes of |(A/D) kernel + K^2 kernel| / max |kernel|.
    Nodes with |x| < exclude_radius are skipped.
    """
    samples = np.asarray(kernel_samples)
    applied = (op.diag * samples).astype(complex)
    applied[1:] += op.sub[1:] * samples[:-1]
    applied[:-1] += op.sup[:-1] * samples[1:]
    resid = np.abs(applied / op.spec.D + K * K * samples)
    mask = np.zeros(op.n, dtype=bool)
    mask[1:-1] = True
    if exclude_radius > 0:
        mask &= np.abs(op.grid.nodes) >= exclude_radius
    scale = float(np.max(np.abs(samples)))
    if scale == 0.0 or not np.any(mask):
        return 0.0
    return float(np.max(resid[mask]) / scale)


def operator_for_branch(branch: str, beta: float, D: float = 1.0) -> OperatorSpec:
    """Delta1 (alpha = 0) for Phi, Delta2 (alpha = 0) for PhiTilde."""
    variant = "Delta1" if branch == "Phi" else "Delta2"
    return OperatorSpec(variant, 0.0, PointTransform(kind="monomial", beta=float(beta)), D)


def collapse_error(spec_branch: str, exponent_variant: str, samples: int = 400) -> float:
    """Max |Bessel kernel - plane wave| at beta = 1 over |kx| in [0.1, 50]."""
    eta = np.concatenate([-np.geomspace(50.0, 0.1, samples), np.geomspace(0.1, 50.0, samples)])
    spec = BesselKernelSpec(1.0, spec_branch, exponent_variant)
    got = bessel_kernel(spec, [1.0], eta)[0]
    sign = -1 if spec_branch == "Phi" else 1
    want = np.exp(sign * 1j * eta) / SQRT_2PI
    return float(np.max(np.abs(got - want)))


def select_exponent_variant(
    branch: str,
    beta: float,
    K: float = 1.0,
    x_max: float = 2.0,
    n: int = 2000,
    collapse_tol: float = 1e-10,
) -> Dict[str, object]:
    """
    Score both exponent readings of a Bessel kernel: the beta = 1 collapse
    error and the eigenrelation residual of the matching operator at beta.
    The chosen variant collapses within tolerance and has the smaller residual.
    """
    grid = build_grid(-x_max, x_max, n)
    op = assemble(operator_for_branch(branch, beta), grid)
    k = float(np.sign(K) * abs(K) ** (1.0 / beta))
    scores: List[Dict[str, object]] = []
    for variant in EXPONENT_VARIANTS:
        spec = BesselKernelSpec(beta, branch, variant)
        samples = bessel_kernel(spec, [k], grid.nodes)[0]
        scores.append({
            "variant": variant,
            "collapse_error": collapse_error(branch, variant),
            "eigen_residual": eigenrelation_residual(op, samples, K, exclude_radius=0.05 * x_max),
        })
    passing = [s for s in scores if s["collapse_error"] <= collapse_tol] or scores
    best = min(passing, key=lambda s: s["eigen_residual"])
    logger.debug("exponent variant for %s at beta=%g: %s", branch, beta, best["variant"])
    return {"branch": branch, "beta": beta, "selected": best["variant"], "scores": scores}


# ---------------------------
# Tables
# ---------------------------

def kernel_table(
    pt: PointTransform,
    x: Sequence[float],
    k_values: Sequence[float],
    kernels: Sequence[str] = ("phi", "phi_tilde", "Phi", "PhiTilde"),
    alpha: float = 0.0,
    exponent_variant: str = "derived",
) -> List[dict]:
    """Rows (x, k, K, kernel, re, im); Bessel kernels are skipped for polynomial W."""
    x = np.asarray(x, dtype=float)
    k_values = np.asarray(k_values, dtype=float)
    K_values = np.asarray(pt.evaluate(k_values), dtype=float)
    rows: List[dict] = []
    for name in kernels:
        if name in BESSEL_BRANCHES:
            if not pt.is_monomial:
                logger.info("skipping %s: transform is not a monomial", name)
                continue
            values = kernel_matrix(name, k_values, x, pt, exponent_variant=exponent_variant)
        else:
            values = kernel_matrix(name, K_values, x, pt, alpha)
        for j, (k, K) in enumerate(zip(k_values, K_values)):
            for i, xi in enumerate(x):
                v = values[j, i]
                rows.append({"x": xi, "k": k, "K": K, "kernel": name, "re": v.real, "im": v.imag})
    return rows


def kernel_for_operator(spec: OperatorSpec) -> Optional[str]:
    """
    Name of the eigen-kernel family that diagonalizes the operator, or None.
    Delta3 propagates in the phi_K basis, Delta4 in phi_tilde_K; Delta1/Delta2
    use the Bessel kernels for monomial W at alpha in {0, 1}.
    """
    pt = spec.transform
    if pt.degree == 1.0:
        # W = a x: every ordering is D d^2/dW^2
        return "plane"
    if spec.variant == "Delta3":
        return "phi"
    if spec.variant == "Delta4":
        return "phi_tilde"
    if spec.alpha == 0.5:
        # Delta1 and Delta2 both reduce to Delta3 at alpha = 1/2
        return "phi"
    if not pt.is_monomial or spec.alpha not in (0.0, 1.0) or pt.beta < MIN_BESSEL_BETA:
        return None
    plain = (spec.variant == "Delta1") == (spec.alpha == 0.0)
    return "Phi" if plain else "PhiTilde"
