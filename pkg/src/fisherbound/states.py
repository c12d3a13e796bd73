"""Density matrices, observables, covariances and reproducible sampling."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .means import HERMITICITY_RTOL, ZERO_RTOL, SpectralDecomposition, hermitian_part, spectral

TRACE_TOL = 1e-12
PSD_TOL = 1e-12
MAX_DIM = 16


class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    The spectral decomposition is computed once.  Eigenvalues below
    ``ZERO_RTOL * max`` are stored as exact zeros so that boundary
    formulas see a genuine boundary point.
    """

    __slots__ = ("matrix", "spec")

    def __init__(self, matrix, check: bool = True):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"density matrix must be square, got {m.shape}")
        if check:
            tr = np.trace(m)
            if abs(tr - 1.0) > TRACE_TOL:
                raise DomainError(f"trace is {tr.real:.15g}, expected 1")
        raw = spectral(m, check=check)
        lam = raw.eigenvalues
        if check and lam[0] < -PSD_TOL:
            raise DomainError(f"not positive semidefinite (min eigenvalue {lam[0]:.3g})")
        lam = np.where(lam < ZERO_RTOL * lam[-1], 0.0, lam)
        m, _ = hermitian_part(m)
        m.setflags(write=False)
        self.matrix = m
        self.spec = SpectralDecomposition(lam, raw.eigenvectors, m.shape[0], raw.hermiticity_residual)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spec.eigenvalues

    @property
    def faithful(self) -> bool:
        return bool(self.eigenvalues[0] > 0.0)

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.eigenvalues))

    @property
    def is_pure(self) -> bool:
        return self.rank == 1

    def expect(self, a) -> float:
        return float(np.real(np.trace(self.matrix @ a)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, eigenvalues={np.round(self.eigenvalues, 6)})"


def as_state(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def as_observable(a, dim: Optional[int] = None) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"observable must be square, got {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DomainError(f"dimension mismatch: observable {a.shape[0]}, state {dim}")
    norm = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > HERMITICITY_RTOL * max(norm, 1.0):
        raise DomainError("observable is not Hermitian")
    return 0.5 * (a + a.conj().T)


def as_tangent(u, dim: Optional[int] = None) -> np.ndarray:
    """Validate a traceless Hermitian tangent vector."""
    u = as_observable(u, dim)
    if abs(np.trace(u)) > 1e-10 * max(np.linalg.norm(u), 1.0):
        raise DomainError("tangent vector must be traceless")
    return u


# ---------------------------------------------------------------------------
# covariance structure


def center(rho, a) -> np.ndarray:
    """A - Tr(rho A) I."""
    rho = as_state(rho)
    a = as_observable(a, rho.dim)
    return a - rho.expect(a) * np.eye(rho.dim)


def covariance(rho, a, b) -> complex:
    """Tr(rho A B) - Tr(rho A) Tr(rho B)."""
    rho = as_state(rho)
    a = as_observable(a, rho.dim)
    b = as_observable(b, rho.dim)
    return complex(np.trace(rho.matrix @ a @ b) - rho.expect(a) * rho.expect(b))


def variance(rho, a) -> float:
    rho = as_state(rho)
    a0 = center(rho, a)
    v = float(np.real(np.trace(rho.matrix @ a0 @ a0)))
    return max(v, 0.0) if v > -PSD_TOL else v


def sym_covariance(rho, a, b) -> float:
    return covariance(rho, a, b).real


def commutator_expectation(rho, a, b) -> complex:
    """Tr(rho [A, B]), a purely imaginary number."""
    rho = as_state(rho)
    a = as_observable(a, rho.dim)
    b = as_observable(b, rho.dim)
    return complex(np.trace(rho.matrix @ (a @ b - b @ a)))


def commutator_tangent(rho, a) -> np.ndarray:
    """i [rho, A], a traceless Hermitian matrix."""
    rho = as_state(rho)
    a = as_observable(a, rho.dim)
    r = rho.matrix
    out, _ = hermitian_part(1j * (r @ a - a @ r))
    return out


# ---------------------------------------------------------------------------
# sampling


class Ensemble(str, enum.Enum):
    HILBERT_SCHMIDT = "hilbert_schmidt"
    DIAGONAL_DIRICHLET = "diagonal_dirichlet"
    PURE = "pure"


@dataclass(frozen=True)
class SamplerConfig:
    dimension: int
    seed: int
    purity_floor: float = 1e-3
    ensemble: Ensemble = Ensemble.HILBERT_SCHMIDT
    require_faithful: bool = True

    def __post_init__(self):
        if not (2 <= int(self.dimension) <= MAX_DIM):
            raise DomainError(f"dimension must be in [2, {MAX_DIM}], got {self.dimension}")
        if not (0.0 < self.purity_floor <= 1.0):
            raise DomainError("purity_floor must lie in (0, 1]")
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "ensemble", Ensemble(self.ensemble))


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream for ``seed``."""
    return np.random.Generator(np.random.Philox(int(seed)))


def trial_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for trial ``index`` of a run seeded by ``seed``."""
    ss = np.random.SeedSequence([int(seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_pure(rng, dim: int) -> DensityMatrix:
    psi = _complex_normal(rng, dim)
    psi /= np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))


def random_state(rng, dim: int, ensemble=Ensemble.HILBERT_SCHMIDT,
                 purity_floor: float = 1e-3, require_faithful: bool = True) -> DensityMatrix:
    ensemble = Ensemble(ensemble)
    if ensemble is Ensemble.PURE:
        return random_pure(rng, dim)
    floor = purity_floor / dim
    while True:
        if ensemble is Ensemble.HILBERT_SCHMIDT:
            g = _complex_normal(rng, (dim, dim))
            m = g @ g.conj().T
            m /= np.trace(m).real
        else:
            m = np.diag(rng.dirichlet(np.ones(dim))).astype(complex)
        rho = DensityMatrix(m)
        if not require_faithful or rho.eigenvalues[0] >= floor:
            return rho


def sample(config: SamplerConfig) -> DensityMatrix:
    rng = make_rng(config.seed)
    return random_state(rng, config.dimension, config.ensemble,
                        config.purity_floor, config.require_faithful)


def random_observable(rng, dim: int, scale: float = 1.0) -> np.ndarray:
    """GUE-like Hermitian matrix: N(0,1) diagonal, complex normal off-diagonal."""
    diag = rng.standard_normal(dim)
    off = _complex_normal(rng, (dim, dim))
    upper = np.triu(off, 1)
    return scale * (np.diag(diag) + upper + upper.conj().T)


def sample_observable(dimension: int, seed: int, scale: float = 1.0) -> np.ndarray:
    if not (2 <= dimension <= MAX_DIM):
        raise DomainError(f"dimension must be in [2, {MAX_DIM}], got {dimension}")
    return random_observable(make_rng(seed), dimension, scale)


# ---------------------------------------------------------------------------
# JSON schema {"dim": n, "re": [[...]], "im": [[...]]}


def matrix_to_dict(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_dict(d: dict) -> np.ndarray:
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    m = re + 1j * im
    if m.shape != (d["dim"], d["dim"]):
        raise DomainError(f"matrix shape {m.shape} does not match dim {d['dim']}")
    return m


def dumps_matrix(m) -> str:
    return json.dumps(matrix_to_dict(m))


def loads_matrix(s: str) -> np.ndarray:
    return matrix_from_dict(json.loads(s))


# Pauli matrices used by the two-level constructions.
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
