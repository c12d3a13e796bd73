"""Monotone metrics, area functional, f-correlation and skew information.

All quantities are computed from coefficients in the eigenbasis of rho:
with a = U^dag A_0 U and lambda the spectrum,

    Var(A)  = sum_ij (lambda_i + lambda_j)/2 |a_ij|^2
    I^f(A)  = sum_ij [(lambda_i + lambda_j)/2 - m_ftilde(lambda_i, lambda_j)] |a_ij|^2

which is O(n^3) and keeps the exact zeros on the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InternalConsistencyError
from .fop import MonotoneFunction, tilde
from .means import kernel_matrix, mean_kernel
from .states import DensityMatrix, as_observable, as_state, as_tangent, center

NEG_CLAMP = 1e-10


def clamp_nonnegative(value: float, scale: float = 1.0, what: str = "quantity") -> float:
    """Round tiny negatives to 0; larger negatives indicate a bug."""
    if value >= 0:
        return value
    if value >= -NEG_CLAMP * max(scale, 1.0):
        return 0.0
    raise InternalConsistencyError(f"{what} is negative: {value:.6g}")


@dataclass(frozen=True)
class MetricContext:
    rho: DensityMatrix
    f: MonotoneFunction
    f_tilde: MonotoneFunction = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rho", as_state(self.rho))
        object.__setattr__(self, "f_tilde", tilde(self.f))

    @property
    def dim(self) -> int:
        return self.rho.dim

    def coefficients(self, a, centered: bool = True) -> np.ndarray:
        """Matrix of A_0 (or A) in rho's eigenbasis."""
        a = center(self.rho, a) if centered else as_observable(a, self.dim)
        return self.rho.spec.to_eigenbasis(a)

    def arithmetic_kernel(self) -> np.ndarray:
        lam = self.rho.eigenvalues
        return 0.5 * (lam[:, None] + lam[None, :])

    def tilde_kernel(self) -> np.ndarray:
        lam = self.rho.eigenvalues
        return mean_kernel(self.f_tilde, lam[:, None], lam[None, :])

    def skew_kernel(self) -> np.ndarray:
        """(lambda_i + lambda_j)/2 - m_ftilde(lambda_i, lambda_j)."""
        k = self.arithmetic_kernel() - self.tilde_kernel()
        np.fill_diagonal(k, 0.0)
        return k


def _pair_sum(kernel, a, b) -> float:
    """Re sum_ij kernel_ij conj(a_ij) b_ij."""
    return float(np.real(np.sum(kernel * np.conj(a) * b)))


# ---------------------------------------------------------------------------
# metric


def inner(ctx: MetricContext, u, v) -> float:
    """<u, v>_{rho,f} = Tr(u c_f(L_rho, R_rho)(v)); requires a faithful state."""
    u = as_tangent(u, ctx.dim)
    v = as_tangent(v, ctx.dim)
    c = kernel_matrix(ctx.f, ctx.rho.eigenvalues, "cm")
    spec = ctx.rho.spec
    return _pair_sum(c, spec.to_eigenbasis(u), spec.to_eigenbasis(v))


def norm_squared(ctx: MetricContext, u) -> float:
    val = inner(ctx, u, u)
    return clamp_nonnegative(val, what="metric norm")


def area(ctx: MetricContext, u, v) -> float:
    """sqrt(g(u,u) g(v,v) - g(u,v)^2) for the metric of ``ctx``."""
    guu = norm_squared(ctx, u)
    gvv = norm_squared(ctx, v)
    guv = inner(ctx, u, v)
    rad = clamp_nonnegative(guu * gvv - guv * guv, scale=guu * gvv, what="area radicand")
    return float(np.sqrt(rad))


# ---------------------------------------------------------------------------
# correlations


def c_correlation(rho, g: MonotoneFunction, a, b=None, centered: bool = True) -> float:
    """Tr(m_g(L_rho, R_rho)(A_0) B_0); raw A, B when ``centered`` is False.

    Boundary (non-faithful) states are allowed; the mean is extended
    continuously.
    """
    rho = as_state(rho)
    b = a if b is None else b
    spec = rho.spec
    if centered:
        at = spec.to_eigenbasis(center(rho, a))
        bt = spec.to_eigenbasis(center(rho, b))
    else:
        at = spec.to_eigenbasis(as_observable(a, rho.dim))
        bt = spec.to_eigenbasis(as_observable(b, rho.dim))
    lam = rho.eigenvalues
    m = mean_kernel(g, lam[:, None], lam[None, :])
    return _pair_sum(m, at, bt)


def f_correlation(ctx: MetricContext, a, b) -> complex:
    """Corr^f(A, B) = Tr(rho A B) - Tr(m_ftilde(L_rho, R_rho)(A) B)."""
    a = as_observable(a, ctx.dim)
    b = as_observable(b, ctx.dim)
    first = complex(np.trace(ctx.rho.matrix @ a @ b))
    return first - c_correlation(ctx.rho, ctx.f_tilde, a, b, centered=False)


def skew_information(ctx: MetricContext, a) -> float:
    """Metric adjusted skew information I^f(A) = Var(A) - C^ftilde(A_0)."""
    w = np.abs(ctx.coefficients(a)) ** 2
    val = float(np.sum(ctx.skew_kernel() * w))
    scale = float(np.sum(ctx.arithmetic_kernel() * w))
    return clamp_nonnegative(val, scale=scale, what="skew information")


def re_correlation(ctx: MetricContext, a, b) -> float:
    """Re Corr^f(A, B) from centered eigenbasis coefficients."""
    return _pair_sum(ctx.skew_kernel(), ctx.coefficients(a), ctx.coefficients(b))


def variance_split(ctx: MetricContext, a):
    """(quantum, classical) = (I^f(A), C^ftilde(A_0)); they sum to Var(A)."""
    at = ctx.coefficients(a)
    w = np.abs(at) ** 2
    scale = float(np.sum(ctx.arithmetic_kernel() * w))
    quantum = clamp_nonnegative(float(np.sum(ctx.skew_kernel() * w)), scale, "skew information")
    classical = clamp_nonnegative(float(np.sum(ctx.tilde_kernel() * w)), scale, "C^ftilde")
    return quantum, classical


def require_faithful(rho: DensityMatrix, what: str):
    if not rho.faithful:
        raise DomainError(f"{what} requires a faithful state")
