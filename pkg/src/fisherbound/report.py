"""GapReport: the record produced by every inequality evaluation."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

HOLDS = "holds"
EQUALITY = "equality"
VIOLATED = "violated"

CSV_COLUMNS = ("name", "f_label", "dim", "seed", "lhs", "rhs", "gap", "tol", "verdict")


def verdict_for(gap: float, tolerance: float) -> str:
    if abs(gap) <= tolerance:
        return EQUALITY
    if gap > tolerance:
        return HOLDS
    return VIOLATED


def fingerprint(*matrices) -> str:
    """Short stable hash of the matrices that define an evaluation."""
    h = hashlib.sha256()
    for m in matrices:
        if m is None:
            continue
        a = np.ascontiguousarray(np.asarray(m, dtype=complex))
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()[:16]


@dataclass
class GapReport:
    name: str
    lhs: float
    rhs: float
    gap: float
    tolerance: float
    verdict: str
    f_label: str = ""
    state_fingerprint: str = ""
    seed: Optional[int] = None
    dim: Optional[int] = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """Holds or is an equality."""
        return self.verdict != VIOLATED

    def to_row(self) -> dict:
        return {
            "name": self.name,
            "f_label": self.f_label,
            "dim": self.dim,
            "seed": self.seed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "tol": self.tolerance,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        row = self.to_row()
        row["state_fingerprint"] = self.state_fingerprint
        row["details"] = _jsonable(self.details)
        return json.dumps(row, sort_keys=True)


def make_report(name, lhs, rhs, tolerance, f_label="", seed=None, dim=None,
                matrices=(), details=None) -> GapReport:
    lhs = float(lhs)
    rhs = float(rhs)
    gap = lhs - rhs
    return GapReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        gap=gap,
        tolerance=float(tolerance),
        verdict=verdict_for(gap, tolerance),
        f_label=f_label,
        state_fingerprint=fingerprint(*matrices) if matrices else "",
        seed=seed,
        dim=dim,
        details=details or {},
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def to_csv(reports: Iterable[GapReport]) -> str:
    """RFC-4180 CSV with 17 significant digits for floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        row = r.to_row()
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def to_jsonl(reports: Iterable[GapReport]) -> str:
    return "".join(r.to_json() + "\n" for r in reports)


def summarize(reports) -> dict:
    """Counts per verdict and worst (most negative) gap per report name."""
    reports = list(reports)
    counts = {HOLDS: 0, EQUALITY: 0, VIOLATED: 0}
    worst = {}
    for r in reports:
        counts[r.verdict] += 1
        prev = worst.get(r.name)
        if prev is None or r.gap < prev["gap"]:
            worst[r.name] = {"gap": r.gap, "f_label": r.f_label, "seed": r.seed, "dim": r.dim}
    return {"total": len(reports), "counts": counts, "worst_gaps": worst}
