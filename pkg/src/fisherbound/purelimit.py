"""Pure states: boundary equalities and radial limits of the main bound."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .fop import MonotoneFunction
from .inequalities import covariance_area_sq, main_gap, tolerance_for
from .qfi import MetricContext, f_correlation, re_correlation, skew_information
from .report import GapReport, make_report
from .states import DensityMatrix, as_observable, as_state, covariance, sym_covariance, variance

DEFAULT_EPSILONS = (1e-2, 1e-3, 1e-4, 1e-5)


@dataclass(frozen=True)
class RadialFamily:
    """D_eps = (1 - eps) P + eps (I - P)/(n - 1) approaching the pure state P."""

    pure: DensityMatrix
    epsilons: tuple = DEFAULT_EPSILONS
    mixer: str = "isotropic"

    def __post_init__(self):
        pure = as_state(self.pure)
        if not pure.is_pure:
            raise DomainError("radial family needs a rank-one state")
        eps = tuple(float(e) for e in self.epsilons)
        if not eps or any(not (0.0 < e < 0.5) for e in eps):
            raise DomainError("epsilons must lie in (0, 1/2)")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise DomainError("epsilons must be strictly decreasing")
        if self.mixer != "isotropic":
            raise DomainError(f"unknown mixer {self.mixer!r}")
        object.__setattr__(self, "pure", pure)
        object.__setattr__(self, "epsilons", eps)


def member(fam: RadialFamily, eps: float) -> DensityMatrix:
    if not (0.0 < eps < 0.5):
        raise DomainError(f"eps must lie in (0, 1/2), got {eps}")
    p = fam.pure.matrix
    n = p.shape[0]
    return DensityMatrix((1.0 - eps) * p + eps * (np.eye(n) - p) / (n - 1))


def top_projector(rho: DensityMatrix) -> np.ndarray:
    v = rho.spec.eigenvectors[:, -1]
    return np.outer(v, v.conj())


def pure_equalities(pure, f: MonotoneFunction, a, b) -> GapReport:
    """Check the pure-state equalities for a regular ``f``.

    lhs is Var(A)Var(B) - Cov^s^2 and rhs is I^f(A)I^f(B) - (Re Corr^f)^2.
    ``details`` records |Var(A)Var(B) - I^f(A)I^f(B)|, |I^f(A) - Var(A)|
    and |Corr^f(A,B) - Cov(A,B)|.
    """
    pure = as_state(pure)
    if not pure.is_pure:
        raise DomainError("pure_equalities needs a rank-one state")
    a = as_observable(a, pure.dim)
    b = as_observable(b, pure.dim)
    ctx = MetricContext(pure, f)
    va, vb = variance(pure, a), variance(pure, b)
    ia, ib = skew_information(ctx, a), skew_information(ctx, b)
    rc = re_correlation(ctx, a, b)
    corr = f_correlation(ctx, a, b)
    cov = covariance(pure, a, b)
    lhs = va * vb - sym_covariance(pure, a, b) ** 2
    rhs = ia * ib - rc * rc
    return make_report(
        "pure_equalities", lhs, rhs, tolerance_for(va, vb), f_label=f.label, dim=pure.dim,
        matrices=(pure.matrix, a, b),
        details={
            "product_diff": abs(va * vb - ia * ib),
            "skew_diff_a": abs(ia - va),
            "skew_diff_b": abs(ib - vb),
            "corr_diff": abs(corr - cov),
            "regular": f.regular,
        },
    )


@dataclass
class RadialSweep:
    epsilons: tuple
    labels: tuple
    q: np.ndarray  # shape (len(labels), len(epsilons))
    limit: float
    scale: float
    rows: list = field(default_factory=list)

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(self.q - self.limit)

    @property
    def spread(self) -> np.ndarray:
        return self.q.max(axis=0) - self.q.min(axis=0)

    def spread_monotone(self) -> bool:
        s = self.spread
        return bool(np.all(np.diff(s) < 0)) if s.size > 1 else True

    def residuals_monotone(self) -> bool:
        r = self.residuals
        return bool(np.all(np.diff(r, axis=1) < 0)) if r.shape[1] > 1 else True

    def converged(self, spread_tol: float = 1e-6, value_tol: float = 1e-5) -> bool:
        return bool(
            self.spread_monotone()
            and self.residuals_monotone()
            and self.spread[-1] <= spread_tol * self.scale
            and float(self.residuals[:, -1].max()) <= value_tol * self.scale
        )


def radial_limit_sweep(fam: RadialFamily, fs: Sequence[MonotoneFunction], a, b) -> RadialSweep:
    """q_f(eps) = (f(0)/2 Area^f_{D_eps}(i[D_eps,A], i[D_eps,B]))^2 along the family."""
    fs = list(fs)
    for f in fs:
        if not f.regular:
            raise DomainError(f"radial limits exist only for regular functions, got {f.label}")
    a = as_observable(a, fam.pure.dim)
    b = as_observable(b, fam.pure.dim)
    limit = covariance_area_sq(fam.pure, a, b)
    scale = max(1.0, variance(fam.pure, a) * variance(fam.pure, b))
    q = np.zeros((len(fs), len(fam.epsilons)))
    for j, eps in enumerate(fam.epsilons):
        d = member(fam, eps)
        for i, f in enumerate(fs):
            q[i, j] = main_gap(d, f, a, b).details["rhs_area"]
    sweep = RadialSweep(fam.epsilons, tuple(f.label for f in fs), q, limit, scale)
    spread = sweep.spread
    for i, f in enumerate(fs):
        for j, eps in enumerate(fam.epsilons):
            sweep.rows.append((f.label, eps, q[i, j], abs(q[i, j] - limit), spread[j]))
    return sweep
