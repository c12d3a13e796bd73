"""Uncertainty inequalities, the H/K decomposition and known counterexamples.

Each ``*_gap`` function returns a :class:`~fisherbound.report.GapReport`
whose ``gap`` is ``lhs - rhs``; the tolerance is
``1e-9 * max(1, Var(A) Var(B))`` because every inequality here is
homogeneous of degree four in the observables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, InternalConsistencyError
from .fop import (
    FunctionGrid,
    MonotoneFunction,
    bkm,
    catalog,
    default_grid,
    eval_f,
    rld,
    sld,
    wy,
    wyd,
)
from .means import kernel_matrix, scalar_mean
from .qfi import (
    MetricContext,
    c_correlation,
    clamp_nonnegative,
    f_correlation,
    skew_information,
)
from .report import GapReport, make_report
from .states import (
    SIGMA_X,
    SIGMA_Y,
    DensityMatrix,
    as_observable,
    as_state,
    center,
    commutator_expectation,
    sym_covariance,
    variance,
)

GAP_RTOL = 1e-9
ROUTE_RTOL = 1e-9
HK_RTOL = 1e-8
PROPORTIONAL_RTOL = 1e-10
COUNTEREXAMPLE_LAMBDAS = tuple(np.round(np.arange(0.55, 0.951, 0.05), 2))


def tolerance_for(var_a: float, var_b: float) -> float:
    return GAP_RTOL * max(1.0, var_a * var_b)


def _setup(rho, a, b):
    rho = as_state(rho)
    a = as_observable(a, rho.dim)
    b = as_observable(b, rho.dim)
    return rho, a, b


def covariance_area_sq(rho, a, b) -> float:
    """Var(A) Var(B) - (Re Cov(A, B))^2, the squared covariance area."""
    va, vb = variance(rho, a), variance(rho, b)
    c = sym_covariance(rho, a, b)
    return clamp_nonnegative(va * vb - c * c, scale=va * vb, what="covariance area")


# ---------------------------------------------------------------------------
# H function and decomposition


def h_function(f: MonotoneFunction, x, y, w, z):
    """H_f(x,y,w,z) = [(x+y)(w+z) - (x-y)^2/y (w-z)^2/z f(0)/f(x/y) f(0)/f(w/z)] / 2.

    Vectorized over broadcastable arrays; all arguments must be > 0.
    """
    x, y, w, z = (np.asarray(v, dtype=float) for v in (x, y, w, z))
    if any(np.any(v <= 0) for v in (x, y, w, z)):
        raise DomainError("h_function arguments must be > 0")
    base = (x + y) * (w + z)
    if not f.regular:
        out = 0.5 * base
    else:
        f0 = f.f_at_zero
        p = (x - y) ** 2 / y * f0 / eval_f(f, x / y)
        q = (w - z) ** 2 / z * f0 / eval_f(f, w / z)
        out = 0.5 * (base - p * q)
    return float(out) if out.ndim == 0 else out


def h_bounds(x, y, w, z):
    """Lower and upper envelopes of H_f over all f."""
    x, y, w, z = (np.asarray(v, dtype=float) for v in (x, y, w, z))
    lower = 2.0 * (x * y * (w * w + z * z) + w * z * (x * x + y * y)) / ((x + y) * (w + z))
    upper = 0.5 * (x + y) * (w + z)
    return lower, upper


@dataclass
class HKDecomposition:
    h_values: np.ndarray
    k_values: np.ndarray
    f_of_f: float


def _k_tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """K_ijkl = |a_ij|^2 |b_kl|^2 + |a_kl|^2 |b_ij|^2 - 2 Re(a_ij b_ji) Re(a_kl b_lk)."""
    p = np.abs(a) ** 2
    q = np.abs(b) ** 2
    r = np.real(a * b.T)
    return (
        np.einsum("ij,kl->ijkl", p, q)
        + np.einsum("ij,kl->ijkl", q, p)
        - 2.0 * np.einsum("ij,kl->ijkl", r, r)
    )


def hk_decompose(rho, f: MonotoneFunction, a, b) -> HKDecomposition:
    """Write the main gap as (1/4) sum_ijkl H_f(l_i,l_j,l_k,l_l) K_ijkl."""
    rho, a, b = _setup(rho, a, b)
    if not rho.faithful:
        raise DomainError("hk_decompose requires a faithful state")
    spec = rho.spec
    # a_ij = <A_0 phi_i, phi_j> is the (j, i) entry of U^dag A_0 U
    at = spec.to_eigenbasis(center(rho, a)).T
    bt = spec.to_eigenbasis(center(rho, b)).T
    lam = rho.eigenvalues
    li = lam[:, None, None, None]
    lj = lam[None, :, None, None]
    lk = lam[None, None, :, None]
    ll = lam[None, None, None, :]
    h = h_function(f, li, lj, lk, ll)
    k = _k_tensor(at, bt)
    return HKDecomposition(h, k, float(0.25 * np.sum(h * k)))


# ---------------------------------------------------------------------------
# the inequalities


def schrodinger_gap(rho, a, b) -> GapReport:
    """Var(A)Var(B) - Cov^s(A,B)^2 >= |Tr(rho [A,B])|^2 / 4.

    ``details["heisenberg"]`` holds the weaker form without covariance.
    """
    rho, a, b = _setup(rho, a, b)
    va, vb = variance(rho, a), variance(rho, b)
    lhs = covariance_area_sq(rho, a, b)
    rhs = 0.25 * abs(commutator_expectation(rho, a, b)) ** 2
    tol = tolerance_for(va, vb)
    heis = make_report("heisenberg", va * vb, rhs, tol, dim=rho.dim)
    return make_report(
        "schrodinger", lhs, rhs, tol, dim=rho.dim, matrices=(rho.matrix, a, b),
        details={"heisenberg": heis.to_row()},
    )


def main_gaps(rho, fs: Sequence[MonotoneFunction], a, b, seed: Optional[int] = None) -> list:
    """:func:`main_gap` for several functions, sharing the per-state work.

    The eigenbasis coefficients of A_0, B_0 and of the commutators
    i[rho, A], i[rho, B] are computed once; only the kernels depend on f.
    """
    rho, a, b = _setup(rho, a, b)
    va, vb = variance(rho, a), variance(rho, b)
    tol = tolerance_for(va, vb)
    lhs = covariance_area_sq(rho, a, b)
    spec = rho.spec
    lam = rho.eigenvalues
    at = spec.to_eigenbasis(center(rho, a))
    bt = spec.to_eigenbasis(center(rho, b))
    # i[rho, X] has entries i (lambda_i - lambda_j) x_ij in the eigenbasis
    dl = 1j * (lam[:, None] - lam[None, :])
    ut, vt = dl * at, dl * bt
    fingerprint_of = (rho.matrix, a, b)
    out = []
    for f in fs:
        ctx = MetricContext(rho, f)
        k = ctx.skew_kernel()
        ia = clamp_nonnegative(_pair(k, at, at), scale=va, what="skew information")
        ib = clamp_nonnegative(_pair(k, bt, bt), scale=vb, what="skew information")
        rc = _pair(k, at, bt)
        via_corr = clamp_nonnegative(ia * ib - rc * rc, scale=ia * ib, what="correlation area")

        via_area = None
        if f.regular and rho.faithful:
            c = kernel_matrix(f, lam, "cm")
            guu, gvv, guv = _pair(c, ut, ut), _pair(c, vt, vt), _pair(c, ut, vt)
            rad = clamp_nonnegative(guu * gvv - guv * guv, scale=guu * gvv, what="area radicand")
            via_area = (0.5 * f.f_at_zero) ** 2 * rad
        elif not f.regular:
            via_area = 0.0
        if via_area is not None and abs(via_area - via_corr) > ROUTE_RTOL * max(1.0, va * vb):
            raise InternalConsistencyError(
                f"main bound routes disagree for {f.label}: area {via_area!r} vs corr {via_corr!r}"
            )
        out.append(make_report(
            "main", lhs, via_corr, tol, f_label=f.label, seed=seed, dim=rho.dim,
            matrices=fingerprint_of,
            details={"rhs_area": via_area, "rhs_corr": via_corr, "skew_a": ia, "skew_b": ib,
                     "re_corr": rc},
        ))
    return out


def _pair(kernel, x, y) -> float:
    return float(np.real(np.sum(kernel * np.conj(x) * y)))


def main_gap(rho, f: MonotoneFunction, a, b, seed: Optional[int] = None) -> GapReport:
    """Var(A)Var(B) - Cov^s(A,B)^2 >= (f(0)/2 Area^f(i[rho,A], i[rho,B]))^2.

    The bound is computed twice: from the metric area of the commutators
    and from I^f(A) I^f(B) - (Re Corr^f(A,B))^2.  On boundary states only
    the second route is available.
    """
    return main_gaps(rho, [f], a, b, seed=seed)[0]


def bound(rho, f: MonotoneFunction, a, b) -> float:
    """(f(0)/2 Area^f)^2, the right-hand side of the main inequality."""
    return main_gap(rho, f, a, b).rhs


def variance_bound_gap(rho, f: MonotoneFunction, a) -> GapReport:
    """Var(A) >= I^f(A) + C^{RLD}(A_0) (C uses the harmonic mean)."""
    rho = as_state(rho)
    ctx = MetricContext(rho, f)
    va = variance(rho, a)
    rhs = skew_information(ctx, a) + c_correlation(rho, rld(), a)
    return make_report("variance_bound", va, rhs, GAP_RTOL * max(1.0, va), f_label=f.label,
                       dim=rho.dim)


def refined_gaps(rho, fs: Sequence[MonotoneFunction], a, b, seed: Optional[int] = None) -> list:
    """Var(A)Var(B) >= [I^f(A) + C^{RLD}(A_0)] [I^f(B) + C^{RLD}(B_0)] for each f.

    ``details`` carries the two single-observable factors as report rows.
    """
    rho, a, b = _setup(rho, a, b)
    va, vb = variance(rho, a), variance(rho, b)
    ca, cb = c_correlation(rho, rld(), a), c_correlation(rho, rld(), b)
    at = rho.spec.to_eigenbasis(center(rho, a))
    bt = rho.spec.to_eigenbasis(center(rho, b))
    out = []
    for f in fs:
        k = MetricContext(rho, f).skew_kernel()
        ia = clamp_nonnegative(_pair(k, at, at), scale=va, what="skew information")
        ib = clamp_nonnegative(_pair(k, bt, bt), scale=vb, what="skew information")
        ra = make_report("variance_bound", va, ia + ca, GAP_RTOL * max(1.0, va), f_label=f.label,
                         dim=rho.dim)
        rb = make_report("variance_bound", vb, ib + cb, GAP_RTOL * max(1.0, vb), f_label=f.label,
                         dim=rho.dim)
        out.append(make_report(
            "refined", va * vb, ra.rhs * rb.rhs, tolerance_for(va, vb), f_label=f.label,
            seed=seed, dim=rho.dim, matrices=(rho.matrix, a, b),
            details={"factor_a": ra.to_row(), "factor_b": rb.to_row()},
        ))
    return out


def refined_heisenberg_gap(rho, f: MonotoneFunction, a, b, seed: Optional[int] = None) -> GapReport:
    """Var(A)Var(B) >= [I^f(A) + C^{RLD}(A_0)] [I^f(B) + C^{RLD}(B_0)]."""
    return refined_gaps(rho, [f], a, b, seed=seed)[0]


def hansen_gap(rho, f: MonotoneFunction, a, b) -> GapReport:
    """Var(A)Var(B) >= I^f(A) I^f(B)."""
    rho, a, b = _setup(rho, a, b)
    ctx = MetricContext(rho, f)
    va, vb = variance(rho, a), variance(rho, b)
    rhs = skew_information(ctx, a) * skew_information(ctx, b)
    return make_report("hansen", va * vb, rhs, tolerance_for(va, vb), f_label=f.label,
                       dim=rho.dim)


def park_luo_gap(rho, f: MonotoneFunction, a, b, seed: Optional[int] = None) -> GapReport:
    """Var(A)Var(B) >= C^f(A_0) C^f(B_0) + |Tr(rho [A,B])|^2 / 4, mean of f itself."""
    rho, a, b = _setup(rho, a, b)
    va, vb = variance(rho, a), variance(rho, b)
    ca = c_correlation(rho, f, a)
    cb = c_correlation(rho, f, b)
    comm = 0.25 * abs(commutator_expectation(rho, a, b)) ** 2
    return make_report(
        "park_luo", va * vb, ca * cb + comm, tolerance_for(va, vb), f_label=f.label,
        seed=seed, dim=rho.dim, matrices=(rho.matrix, a, b),
        details={"c_a": ca, "c_b": cb, "commutator_term": comm},
    )


def two_level_setup(lambda1: float):
    """rho = diag(l1, 1 - l1), A = -sigma_y, B = sigma_x."""
    if not (0.5 < lambda1 < 1.0):
        raise DomainError(f"lambda1 must lie in (1/2, 1), got {lambda1}")
    rho = DensityMatrix(np.diag([lambda1, 1.0 - lambda1]).astype(complex))
    return rho, -SIGMA_Y.copy(), SIGMA_X.copy()


@dataclass
class ParkLuoWitness:
    x0: float
    rho: DensityMatrix
    a: np.ndarray
    b: np.ndarray
    report: GapReport


def witness_park_luo(f: MonotoneFunction, grid: Optional[FunctionGrid] = None) -> Optional[ParkLuoWitness]:
    """Two-level violation of the Park-Luo inequality when f(x0) > sqrt(x0).

    Grid points are folded onto x > 1 by symmetry; the point with the
    largest excess 4 (f(x)^2 - x) / (1 + x)^2 is used.  Returns None when
    no grid point gives an excess above the report tolerance.
    """
    x = (grid or default_grid()).array
    x = np.unique(np.where(x < 1.0, 1.0 / x, x))
    x = x[x > 1.0]
    excess = 4.0 * (eval_f(f, x) ** 2 - x) / (1.0 + x) ** 2
    i = int(np.argmax(excess))
    if excess[i] <= GAP_RTOL:
        return None
    x0 = float(x[i])
    rho, a, b = two_level_setup(x0 / (1.0 + x0))
    rep = park_luo_gap(rho, f, a, b)
    if rep.ok:
        raise InternalConsistencyError(f"park-luo witness for {f.label} at x0={x0} did not violate")
    return ParkLuoWitness(x0, rho, a, b, rep)


def equality_certificate(rho, a, b) -> str:
    """'proportional' when A_0 = c B_0 for a real c (or B_0 = 0), else 'strict'."""
    rho, a, b = _setup(rho, a, b)
    a0, b0 = center(rho, a), center(rho, b)
    na, nb = np.linalg.norm(a0), np.linalg.norm(b0)
    scale = max(na, nb)
    if scale == 0.0 or nb <= PROPORTIONAL_RTOL * scale:
        return "proportional"
    c = float(np.real(np.vdot(b0, a0))) / nb**2
    if np.linalg.norm(a0 - c * b0) <= PROPORTIONAL_RTOL * scale:
        return "proportional"
    return "strict"


def ordering_chain(rho, a, b, betas: Sequence[float] = tuple(np.round(np.arange(0.05, 0.501, 0.05), 2)),
                   slack: float = GAP_RTOL):
    """Check bound(SLD) >= bound(WY) >= bound(WYD(beta)) ... >= bound(non-regular) = 0.

    Equivalently, for the gap F = lhs - bound:
    F(SLD) <= F(WY) = F(1/2) <= F(beta) for decreasing beta <= F(non-regular) = lhs.
    Returns (labels, gaps, number_of_violations).
    """
    rho, a, b = _setup(rho, a, b)
    fs = [sld(), wy()] + [wyd(bt) for bt in sorted(betas, reverse=True)] + [bkm()]
    gaps = main_gaps(rho, fs, a, b)
    values = [g.gap for g in gaps]
    scale = max(1.0, variance(rho, a) * variance(rho, b))
    bad = sum(1 for u, v in zip(values, values[1:]) if u > v + slack * scale)
    lhs = gaps[0].lhs
    if abs(values[-1] - lhs) > slack * scale:
        bad += 1
    return [f.label for f in fs], values, bad


# ---------------------------------------------------------------------------
# counterexamples


@dataclass
class CounterexampleRow:
    lambda1: float
    f_label: str
    var_a: float
    var_b: float
    skew_product: float
    commutator_term: float
    area_bound: float
    reduced_criterion: bool
    confirmed: bool


@dataclass
class CounterexampleSweep:
    rows: list = field(default_factory=list)
    converse: list = field(default_factory=list)

    @property
    def all_confirmed(self) -> bool:
        return all(r.confirmed for r in self.rows) and all(r.ok is False for r in self.converse)

    def reports(self) -> list:
        out = []
        for r in self.rows:
            out.append(make_report("independence", r.skew_product, r.commutator_term,
                                   GAP_RTOL, f_label=r.f_label, dim=2,
                                   details={"lambda1": r.lambda1}))
        return out + list(self.converse)


def independence_counterexample(lambdas: Sequence[float] = COUNTEREXAMPLE_LAMBDAS,
                                fs: Optional[Sequence[MonotoneFunction]] = None) -> CounterexampleSweep:
    """I^f(A) I^f(B) < |Tr(rho[A,B])|^2 / 4 on the two-level family, for every f.

    Also records the converse failure with A = B, where the commutator
    term vanishes but I^f(A)^2 > 0 for regular f.
    """
    fs = list(fs) if fs is not None else catalog()
    sweep = CounterexampleSweep()
    for l1 in lambdas:
        rho, a, b = two_level_setup(float(l1))
        l2 = 1.0 - l1
        comm = 0.25 * abs(commutator_expectation(rho, a, b)) ** 2
        for f in fs:
            ctx = MetricContext(rho, f)
            ia, ib = skew_information(ctx, a), skew_information(ctx, b)
            gap = main_gap(rho, f, a, b)
            m = scalar_mean(ctx.f_tilde, l1, l2)
            reduced = l2 < m
            strict = ia * ib < comm - GAP_RTOL
            if strict != reduced:
                raise InternalConsistencyError(
                    f"{f.label} at lambda1={l1}: direct and reduced criteria disagree"
                )
            sweep.rows.append(CounterexampleRow(
                float(l1), f.label, variance(rho, a), variance(rho, b), ia * ib, comm,
                gap.rhs, reduced, strict and gap.rhs < comm,
            ))
            if f.regular:
                ia2 = ia * ia
                sweep.converse.append(make_report(
                    "commutator_dominates_skew", 0.0, ia2, GAP_RTOL, f_label=f.label, dim=2,
                    details={"lambda1": float(l1)},
                ))
    return sweep


def commuting_area_example(f: MonotoneFunction):
    """Commuting A, B on a qutrit with non-proportional commutators.

    The Schrodinger right side |Tr(rho[A,B])|^2/4 vanishes while
    (f(0)/2 Area^f)^2 is positive.  Returns (rho, A, B, area_bound, commutator_term).
    """
    theta, phi = 0.7, 0.4
    c, s = np.cos(theta), np.sin(theta)
    rot1 = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=complex)
    c2, s2 = np.cos(phi), np.sin(phi)
    rot2 = np.array([[1, 0, 0], [0, c2, -s2 * 1j], [0, -s2 * 1j, c2]], dtype=complex)
    u = rot1 @ rot2
    rho = DensityMatrix(u @ np.diag([0.5, 0.3, 0.2]) @ u.conj().T)
    a = np.diag([1.0, 0.0, 0.0]).astype(complex)
    b = np.diag([0.0, 1.0, 0.0]).astype(complex)
    rep = main_gap(rho, f, a, b)
    comm = 0.25 * abs(commutator_expectation(rho, a, b)) ** 2
    return rho, a, b, rep.rhs, comm


@dataclass
class CauchySchwarzWitness:
    rho: DensityMatrix
    a: np.ndarray
    b: np.ndarray
    f_label: str
    corr_ab_sq: float
    corr_product: float


def cauchy_schwarz_violation(rho, f: MonotoneFunction, a, b, tol: float = GAP_RTOL) -> Optional[CauchySchwarzWitness]:
    """Witness when |Corr^f(A,B)|^2 > Corr^f(A,A) Corr^f(B,B) + tol."""
    rho, a, b = _setup(rho, a, b)
    ctx = MetricContext(rho, f)
    cab = f_correlation(ctx, a, b)
    caa = f_correlation(ctx, a, a).real
    cbb = f_correlation(ctx, b, b).real
    lhs = abs(cab) ** 2
    if lhs > caa * cbb + tol * max(1.0, abs(caa * cbb)):
        return CauchySchwarzWitness(rho, a, b, f.label, lhs, caa * cbb)
    return None


def find_cauchy_schwarz_witness(candidates, fs: Optional[Sequence[MonotoneFunction]] = None):
    """First violation of the Cauchy-Schwarz estimate among (rho, A, B) candidates."""
    fs = list(fs) if fs is not None else catalog()
    for rho, a, b in candidates:
        for f in fs:
            w = cauchy_schwarz_violation(rho, f, a, b)
            if w is not None:
                return w
    return None
