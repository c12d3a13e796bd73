"""Normalized symmetric operator monotone functions.

Every member of the catalog is an immutable :class:`MonotoneFunction`.  The
functions are evaluated in closed form (vectorized over numpy arrays), and
the value at zero is stored analytically rather than obtained by a limit.

Catalog keys (used by the CLI and in reports)::

    sld  wy  rld  bkm  sqrt  wyd:<beta>  bridge:<gamma>  tilde:<key>
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, InternalConsistencyError, ParameterError
from .report import GapReport, make_report

# |x - 1| below this uses the second-order expansion for 0/0 closed forms.
SERIES_RADIUS = 1e-6


class Kind(str, enum.Enum):
    SLD = "sld"
    WY = "wy"
    WYD = "wyd"
    RLD = "rld"
    BKM = "bkm"
    BRIDGE = "bridge"
    SQRT = "sqrt"
    TILDE = "tilde"
    CUSTOM = "custom"


@dataclass(frozen=True)
class MonotoneFunction:
    """A function f in F_op together with f(0) and its parameters.

    Instances are callable: ``f(x)`` is ``eval_f(f, x)``.
    """

    kind: Kind
    f_at_zero: float
    label: str
    beta: Optional[float] = None
    gamma: Optional[float] = None
    inner: Optional["MonotoneFunction"] = None
    evaluator: Optional[Callable] = field(default=None, compare=False, repr=False)
    verified: bool = True

    @property
    def regular(self) -> bool:
        return self.f_at_zero > 0.0

    @property
    def key(self) -> str:
        return self.label

    def __call__(self, x):
        return eval_f(self, x)


@dataclass(frozen=True)
class FunctionGrid:
    """Strictly increasing positive sample points used for scalar checks."""

    points: tuple

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("grid must be a nonempty 1-d sequence")
        if np.any(pts <= 0):
            raise DomainError("grid points must be strictly positive")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("grid points must be strictly increasing")
        if not (pts.min() < 1.0 < pts.max()):
            raise DomainError("grid must contain points on both sides of 1")
        object.__setattr__(self, "points", tuple(float(p) for p in pts))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points)

    def __len__(self):
        return len(self.points)


def default_grid_listing() -> np.ndarray:
    """The 44 listed entries: 41 log-spaced points on [1e-4, 1e4] and 1-1e-6, 1, 1+1e-6.

    x = 1 occurs twice (it is also the middle log-spaced point).
    """
    return np.concatenate(
        [np.logspace(-4, 4, 41), [1.0 - SERIES_RADIUS, 1.0, 1.0 + SERIES_RADIUS]]
    )


def default_grid() -> FunctionGrid:
    """The 43 distinct points of :func:`default_grid_listing`, increasing."""
    return FunctionGrid(tuple(np.unique(default_grid_listing())))


# ---------------------------------------------------------------------------
# constructors


def sld() -> MonotoneFunction:
    return MonotoneFunction(Kind.SLD, 0.5, "sld")


def wy() -> MonotoneFunction:
    return MonotoneFunction(Kind.WY, 0.25, "wy")


def rld() -> MonotoneFunction:
    return MonotoneFunction(Kind.RLD, 0.0, "rld")


def bkm() -> MonotoneFunction:
    return MonotoneFunction(Kind.BKM, 0.0, "bkm")


def sqrt_fn() -> MonotoneFunction:
    return MonotoneFunction(Kind.SQRT, 0.0, "sqrt")


def wyd(beta: float) -> MonotoneFunction:
    """Wigner-Yanase-Dyson function; beta in (-1, 0) or (0, 1/2]."""
    beta = float(beta)
    if not ((-1.0 < beta < 0.0) or (0.0 < beta <= 0.5)):
        raise ParameterError(f"wyd beta must lie in (-1,0) U (0,1/2], got {beta!r}")
    f0 = beta * (1.0 - beta) if beta > 0 else 0.0
    return MonotoneFunction(Kind.WYD, f0, f"wyd:{beta:g}", beta=beta)


def bridge(gamma: float) -> MonotoneFunction:
    """Power mean bridge ((1 + x**gamma) / 2) ** (1/gamma), gamma in [1/2, 1]."""
    gamma = float(gamma)
    if not (0.5 <= gamma <= 1.0):
        raise ParameterError(f"bridge gamma must lie in [1/2, 1], got {gamma!r}")
    return MonotoneFunction(
        Kind.BRIDGE, 0.5 ** (1.0 / gamma), f"bridge:{gamma:g}", gamma=gamma
    )


def custom(evaluator: Callable, f_at_zero: float, label: str = "custom") -> MonotoneFunction:
    """Wrap a user function. Operator monotonicity is never checked."""
    if f_at_zero < 0:
        raise ParameterError("f_at_zero must be nonnegative")
    return MonotoneFunction(
        Kind.CUSTOM, float(f_at_zero), label, evaluator=evaluator, verified=False
    )


def tilde(f: MonotoneFunction) -> MonotoneFunction:
    """The transform x -> ((x + 1) - (x - 1)**2 f(0)/f(x)) / 2.

    A regular ``f`` is sent to a non-regular function (value 0 at zero);
    a non-regular ``f`` is sent to the arithmetic function (1 + x)/2.
    """
    f0 = 0.0 if f.regular else 0.5
    return MonotoneFunction(
        Kind.TILDE, f0, f"tilde:{f.label}", inner=f, verified=f.verified
    )


_SIMPLE = {"sld": sld, "wy": wy, "rld": rld, "bkm": bkm, "sqrt": sqrt_fn}


def from_key(key: str) -> MonotoneFunction:
    """Parse a catalog key such as ``"wyd:0.25"`` or ``"tilde:sld"``."""
    key = key.strip().lower()
    if key in _SIMPLE:
        return _SIMPLE[key]()
    name, sep, arg = key.partition(":")
    if not sep:
        raise KeyError(f"unknown function key {key!r}")
    if name == "tilde":
        return tilde(from_key(arg))
    try:
        value = float(arg)
    except ValueError:
        raise KeyError(f"bad parameter in function key {key!r}") from None
    if name == "wyd":
        return wyd(value)
    if name == "bridge":
        return bridge(value)
    raise KeyError(f"unknown function key {key!r}")


CATALOG_KEYS = (
    "sld",
    "wy",
    "wyd:0.1",
    "wyd:0.25",
    "wyd:0.49",
    "wyd:-0.5",
    "rld",
    "bkm",
    "bridge:0.75",
    "sqrt",
)


def catalog(regular_only: bool = False) -> list:
    fs = [from_key(k) for k in CATALOG_KEYS]
    if regular_only:
        fs = [f for f in fs if f.regular]
    return fs


# ---------------------------------------------------------------------------
# evaluation


def _near_one(x):
    return np.abs(x - 1.0) < SERIES_RADIUS


def _with_series(x, closed, c2):
    """closed(x) away from 1, 1 + h/2 + c2 h^2 near it."""
    near = _near_one(x)
    safe = np.where(near, 2.0, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = closed(safe)
    h = x - 1.0
    return np.where(near, 1.0 + 0.5 * h + c2 * h * h, out)


def _eval_wyd(beta, x):
    def closed(t):
        lt = np.log(t)
        return beta * (1 - beta) * (t - 1.0) ** 2 / (
            np.expm1(beta * lt) * np.expm1((1 - beta) * lt)
        )

    return _with_series(x, closed, -(beta * beta - beta + 1.0) / 12.0)


def _eval_bkm(x):
    return _with_series(x, lambda t: (t - 1.0) / np.log(t), -1.0 / 12.0)


def _evaluate(f: MonotoneFunction, x: np.ndarray) -> np.ndarray:
    k = f.kind
    if k is Kind.SLD:
        return 0.5 * (1.0 + x)
    if k is Kind.WY:
        return 0.25 * (1.0 + np.sqrt(x)) ** 2
    if k is Kind.RLD:
        return 2.0 * x / (1.0 + x)
    if k is Kind.SQRT:
        return np.sqrt(x)
    if k is Kind.BKM:
        return _eval_bkm(x)
    if k is Kind.WYD:
        return _eval_wyd(f.beta, x)
    if k is Kind.BRIDGE:
        g = f.gamma
        return (0.5 * (1.0 + x**g)) ** (1.0 / g)
    if k is Kind.TILDE:
        inner = f.inner
        if not inner.regular:
            return 0.5 * (1.0 + x)
        return 0.5 * ((x + 1.0) - (x - 1.0) ** 2 * inner.f_at_zero / _evaluate(inner, x))
    if k is Kind.CUSTOM:
        return np.asarray(f.evaluator(x), dtype=float)
    raise AssertionError(k)


def eval_f(f: MonotoneFunction, x):
    """Evaluate ``f`` at positive ``x`` (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{f.label}: argument must be > 0")
    out = _evaluate(f, arr)
    if np.ndim(x) == 0:
        return float(out)
    return out


def f_zero(f: MonotoneFunction) -> float:
    return f.f_at_zero


# ---------------------------------------------------------------------------
# ordering and axioms


def tilde_leq(f: MonotoneFunction, g: MonotoneFunction, grid: Optional[FunctionGrid] = None) -> bool:
    """True iff tilde(f) <= tilde(g) at every grid point.

    The pointwise comparison is cross-checked against the equivalent
    criterion f(0)/f(x) >= g(0)/g(x); a clear disagreement raises
    :class:`InternalConsistencyError`.
    """
    x = (grid or default_grid()).array
    slack = 1e-12 * np.maximum(1.0, x)
    d_direct = eval_f(tilde(f), x) - eval_f(tilde(g), x)
    ratio_f = f.f_at_zero / eval_f(f, x)
    ratio_g = g.f_at_zero / eval_f(g, x)
    d_ratio = 0.5 * (x - 1.0) ** 2 * (ratio_g - ratio_f)
    ok_direct = d_direct <= slack
    ok_ratio = d_ratio <= slack
    clash = (ok_direct != ok_ratio) & (np.abs(d_direct - d_ratio) > 1e-9 * np.maximum(1.0, x))
    if np.any(clash):
        bad = float(x[np.argmax(clash)])
        raise InternalConsistencyError(
            f"tilde ordering of {f.label} vs {g.label} disagrees with f(0)/f criterion at x={bad}"
        )
    return bool(np.all(ok_direct))


def axiom_violations(f: MonotoneFunction, grid: Optional[FunctionGrid] = None) -> dict:
    """Worst violation of each scalar axiom, scaled by max(1, f(x))."""
    x = (grid or default_grid()).array
    fx = eval_f(f, x)
    scale = np.maximum(1.0, np.abs(fx))
    sym = np.abs(x * eval_f(f, 1.0 / x) - fx) / scale
    mono = np.maximum(0.0, fx[:-1] - fx[1:]) / scale[:-1]
    harmonic = 2.0 * x / (1.0 + x)
    arithmetic = 0.5 * (1.0 + x)
    envelope = np.maximum(np.maximum(harmonic - fx, fx - arithmetic), 0.0) / scale
    return {
        "normalization": abs(eval_f(f, 1.0) - 1.0),
        "symmetry": float(np.max(sym)),
        "monotone": float(np.max(mono, initial=0.0)),
        "envelope": float(np.max(envelope)),
    }


def check_axioms(f: MonotoneFunction, grid: Optional[FunctionGrid] = None, tol: float = 1e-12) -> GapReport:
    """Check normalization, symmetry, monotonicity and the mean envelope."""
    v = axiom_violations(f, grid)
    worst = max(v.values())
    if not math.isfinite(worst):
        worst = math.inf
    details = dict(v)
    details["verified_operator_monotone"] = f.verified
    return make_report(
        "axioms", lhs=-worst, rhs=0.0, tolerance=tol, f_label=f.label, details=details
    )
