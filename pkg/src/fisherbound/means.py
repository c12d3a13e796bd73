"""Kubo-Ando means: scalar, matrix, and as superoperators s(L_rho, R_rho).

The superoperator form never materializes an n^2 x n^2 matrix.  In the
eigenbasis of rho the pair (L_rho, R_rho) acts on X by
``X_ij -> s(lambda_i, lambda_j) X_ij``; :func:`superop_matrix` builds the
explicit n^2 x n^2 version and is kept as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, SingularStateError
from .fop import MonotoneFunction, eval_f

# eigenvalue counts as zero below ZERO_RTOL * max eigenvalue
ZERO_RTOL = 1e-12
HERMITICITY_RTOL = 1e-10

MODES = ("mean", "cm", "hat_cm")


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_dim: int
    hermiticity_residual: float = 0.0

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def to_eigenbasis(self, x: np.ndarray) -> np.ndarray:
        u = self.eigenvectors
        return u.conj().T @ x @ u

    def from_eigenbasis(self, x: np.ndarray) -> np.ndarray:
        u = self.eigenvectors
        return u @ x @ u.conj().T

    def is_faithful(self) -> bool:
        lam = self.eigenvalues
        return bool(lam[0] > ZERO_RTOL * lam[-1])


def hermiticity_residual(x: np.ndarray) -> float:
    return float(np.linalg.norm(x - x.conj().T))


def spectral(x, check: bool = True) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {x.shape}")
    resid = hermiticity_residual(x)
    if check and resid > HERMITICITY_RTOL * max(np.linalg.norm(x), 1e-300):
        raise DomainError(f"matrix is not Hermitian (residual {resid:.3g})")
    lam, u = np.linalg.eigh(0.5 * (x + x.conj().T))
    return SpectralDecomposition(lam, u, x.shape[0], resid)


def hermitian_part(x: np.ndarray):
    """(X + X^dag)/2 and the Frobenius norm of the discarded part."""
    h = 0.5 * (x + x.conj().T)
    return h, float(np.linalg.norm(x - h))


# ---------------------------------------------------------------------------
# scalar


def mean_kernel(f: MonotoneFunction, x, y) -> np.ndarray:
    """Vectorized m_f(x, y) = y f(x/y), extended continuously to the boundary.

    On the boundary m_f(x, 0) = x f(0) and m_f(0, 0) = 0.  Interior
    points are evaluated with the ratio min/max <= 1 to avoid cancellation
    at extreme ratios.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("means are defined for nonnegative arguments only")
    x, y = np.broadcast_arrays(x, y)
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    out = np.array(hi * f.f_at_zero, dtype=float)
    inside = lo > 0
    if np.any(inside):
        out[inside] = hi[inside] * eval_f(f, lo[inside] / hi[inside])
    return out


def scalar_mean(f: MonotoneFunction, x, y):
    out = mean_kernel(f, x, y)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# matrix


@dataclass(frozen=True)
class PositiveMatrixPair:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _check_pd(self.a, "a")
        b = _check_pd(self.b, "b")
        if a.shape != b.shape:
            raise DomainError("pair dimensions differ")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def _check_pd(m, name):
    m = np.asarray(m, dtype=complex)
    sd = spectral(m)
    lam = sd.eigenvalues
    if not lam[-1] > 0 or lam[0] <= ZERO_RTOL * lam[-1]:
        raise DomainError(f"{name} is not positive definite (min eigenvalue {lam[0]:.3g})")
    return m


def _apply_function(sd: SpectralDecomposition, fn) -> np.ndarray:
    u = sd.eigenvectors
    return (u * fn(sd.eigenvalues)) @ u.conj().T


def matrix_mean(f: MonotoneFunction, a, b=None) -> np.ndarray:
    """A^(1/2) f(A^(-1/2) B A^(-1/2)) A^(1/2) for positive definite A, B.

    Accepts either ``(f, pair)`` or ``(f, a, b)``.
    """
    pair = a if isinstance(a, PositiveMatrixPair) else PositiveMatrixPair(a, b)
    sa = spectral(pair.a)
    a_half = _apply_function(sa, np.sqrt)
    a_mhalf = _apply_function(sa, lambda v: 1.0 / np.sqrt(v))
    inner, _ = hermitian_part(a_mhalf @ pair.b @ a_mhalf)
    fi = _apply_function(spectral(inner, check=False), lambda v: eval_f(f, np.maximum(v, 1e-300)))
    out, _ = hermitian_part(a_half @ fi @ a_half)
    return out


# ---------------------------------------------------------------------------
# superoperators


def _first_singular(lam):
    lam = np.asarray(lam)
    bad = lam <= ZERO_RTOL * lam.max()
    return float(lam[np.argmax(bad)]) if np.any(bad) else None


def kernel_matrix(f: MonotoneFunction, eigenvalues, mode: str = "mean") -> np.ndarray:
    """S_ij = s(lambda_i, lambda_j) for the requested mode."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    lam = np.asarray(eigenvalues, dtype=float)
    xi, yj = lam[:, None], lam[None, :]
    m = mean_kernel(f, xi, yj)
    if mode == "mean":
        return m
    bad = _first_singular(lam)
    if bad is not None:
        raise SingularStateError(
            f"{mode} superoperator needs a faithful state; eigenvalue {bad:.3g} is zero",
            eigenvalue=bad,
        )
    if mode == "cm":
        return 1.0 / m
    return (xi - yj) ** 2 / m


def superop_apply(f: MonotoneFunction, spec: SpectralDecomposition, x, mode: str = "mean",
                  diagnostics: Optional[dict] = None) -> np.ndarray:
    """Apply s(L_rho, R_rho) to X through rho's eigenbasis.

    Hermitian input yields Hermitian output; the anti-Hermitian round-off
    that is dropped is stored in ``diagnostics["discarded"]`` when a dict
    is passed.
    """
    x = np.asarray(x, dtype=complex)
    s = kernel_matrix(f, spec.eigenvalues, mode)
    out = spec.from_eigenbasis(s * spec.to_eigenbasis(x))
    if hermiticity_residual(x) <= HERMITICITY_RTOL * max(np.linalg.norm(x), 1e-300):
        out, dropped = hermitian_part(out)
        if diagnostics is not None:
            diagnostics["discarded"] = dropped
    return out


def superop_matrix(f: MonotoneFunction, rho, mode: str = "mean") -> np.ndarray:
    """Explicit n^2 x n^2 matrix of s(L_rho, R_rho) on row-major vec(X).

    Built from the Kubo-Ando formula applied to the commuting pair
    L = rho (x) I and R = I (x) rho^T, with no use of rho's eigenbasis.
    Requires a faithful rho.
    """
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    eye = np.eye(n)
    left = np.kron(rho, eye)
    right = np.kron(eye, rho.T)
    m = matrix_mean(f, right, left)
    if mode == "mean":
        return m
    minv = np.linalg.inv(m)
    if mode == "cm":
        return minv
    diff = left - right
    return diff @ diff @ minv


def apply_superop_matrix(mat: np.ndarray, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    return (mat @ x.reshape(-1)).reshape(n, n)
