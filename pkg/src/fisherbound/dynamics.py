"""Landau-von Neumann evolution rho(t) = exp(-itH) rho exp(itH)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InternalConsistencyError
from .fop import MonotoneFunction
from .inequalities import covariance_area_sq, main_gap
from .means import hermitian_part, spectral
from .qfi import MetricContext, area, require_faithful
from .report import GapReport, make_report
from .states import DensityMatrix, as_observable, as_state, commutator_tangent

FD_STEP = 1e-5
FD_RTOL = 1e-6


@dataclass(frozen=True)
class Evolution:
    rho0: DensityMatrix
    hamiltonian: np.ndarray
    times: tuple = (0.0,)

    def __post_init__(self):
        rho = as_state(self.rho0)
        object.__setattr__(self, "rho0", rho)
        object.__setattr__(self, "hamiltonian", as_observable(self.hamiltonian, rho.dim))
        times = tuple(float(t) for t in self.times)
        if not all(math.isfinite(t) for t in times):
            raise ValueError("times must be finite")
        object.__setattr__(self, "times", times)


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i t H) through the eigendecomposition of H."""
    sd = spectral(h)
    u = sd.eigenvectors
    return (u * np.exp(-1j * t * sd.eigenvalues)) @ u.conj().T


def evolve(ev: Evolution, t: float) -> DensityMatrix:
    u = propagator(ev.hamiltonian, t)
    m, _ = hermitian_part(u @ ev.rho0.matrix @ u.conj().T)
    m /= np.trace(m).real
    return DensityMatrix(m)


def velocity(rho, h) -> np.ndarray:
    """d rho / dt = i [rho, H]."""
    return commutator_tangent(rho, h)


def derivative_check(ev: Evolution, step: float = FD_STEP) -> GapReport:
    """Central difference of the trajectory at t=0 against i[rho, H].

    The report passes when the relative Frobenius residual is below 1e-6.
    """
    fd = (evolve(ev, step).matrix - evolve(ev, -step).matrix) / (2.0 * step)
    exact = velocity(ev.rho0, ev.hamiltonian)
    denom = max(np.linalg.norm(exact), 1e-8 * np.linalg.norm(ev.hamiltonian), 1e-300)
    resid = float(np.linalg.norm(fd - exact) / denom)
    return make_report("derivative", FD_RTOL, resid, 0.0, dim=ev.rho0.dim,
                       matrices=(ev.rho0.matrix, ev.hamiltonian),
                       details={"residual": resid, "step": step})


def dynamic_bound(rho, f: MonotoneFunction, h, k, seed=None) -> GapReport:
    """Area^{Cov^s}(H, K) >= f(0)/2 Area^f(velocity under H, velocity under K).

    Both sides are square roots of the main inequality's sides; the verdict
    is checked against :func:`main_gap` on the same inputs.
    """
    rho = as_state(rho)
    require_faithful(rho, "dynamic_bound")
    h = as_observable(h, rho.dim)
    k = as_observable(k, rho.dim)
    lhs = math.sqrt(covariance_area_sq(rho, h, k))
    if f.regular:
        rhs = 0.5 * f.f_at_zero * area(MetricContext(rho, f), velocity(rho, h), velocity(rho, k))
    else:
        rhs = 0.0
    squared = main_gap(rho, f, h, k)
    total = lhs + rhs
    tol = squared.tolerance / total if total > 0 else math.sqrt(squared.tolerance)
    rep = make_report("dynamic", lhs, rhs, tol, f_label=f.label, seed=seed, dim=rho.dim,
                      matrices=(rho.matrix, h, k),
                      details={"main_gap": squared.gap})
    if abs(rep.gap * total - squared.gap) > squared.tolerance:
        raise InternalConsistencyError("dynamic bound is inconsistent with the main inequality")
    if rep.ok != squared.ok:
        raise InternalConsistencyError("dynamic bound verdict differs from the main inequality")
    return rep


def trajectory(ev: Evolution, f: MonotoneFunction, k) -> list:
    """dynamic_bound evaluated along ev.times; rows (t, lhs, rhs, gap)."""
    rows = []
    for t in ev.times:
        rep = dynamic_bound(evolve(ev, t), f, ev.hamiltonian, k)
        rows.append((t, rep.lhs, rep.rhs, rep.gap))
    return rows


def group_residual(ev: Evolution, s: float, t: float) -> float:
    """|| rho(s + t) - rho_s(t) ||, where rho_s(t) restarts from rho(s)."""
    direct = evolve(ev, s + t).matrix
    restarted = evolve(Evolution(evolve(ev, s), ev.hamiltonian), t).matrix
    return float(np.linalg.norm(direct - restarted))


def time_grid(stop: float, count: int) -> Sequence[float]:
    return tuple(np.linspace(0.0, stop, count))
