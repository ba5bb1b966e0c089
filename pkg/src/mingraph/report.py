"""Residual reports shared by the pipeline and verification suites."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ResidualReport", "MAX_LISTED_FAILURES"]

MAX_LISTED_FAILURES = 20


def _num(v):
    """JSON-safe float: non-finite values become None."""
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _num(v)
    if isinstance(v, complex):
        return [_num(v.real), _num(v.imag)]
    return v


@dataclass
class ResidualReport:
    label: str
    sample_count: int
    max_residual: float
    p99_residual: float
    failures: list = field(default_factory=list)
    passed: bool = False
    wall_time_ms: float | None = None
    tolerance: float = 0.0
    details: dict = field(default_factory=dict)

    @classmethod
    def from_residuals(cls, label: str, residuals, points=None, tol: float = 1e-6,
                       details: dict | None = None) -> "ResidualReport":
        """Summarise residuals; NaN entries count as infinite.

        ``points`` is a list-like of sample locations aligned with the
        residuals (complex numbers, (x, y) pairs or reals).
        """
        r = np.asarray(residuals, dtype=float).ravel()
        r = np.where(np.isnan(r), np.inf, r)
        details = dict(details or {})
        if r.size == 0:
            return cls(label, 0, math.nan, math.nan, [], False, None, tol,
                       {**details, "failureCount": 0, "empty": True})
        mx = float(np.max(r))
        p99 = float(np.percentile(r, 99, method="higher"))
        bad = np.flatnonzero(r > tol)
        listed = []
        for i in bad[:MAX_LISTED_FAILURES]:
            p = None if points is None else points[i]
            if isinstance(p, (complex, np.complexfloating)):
                p = [float(p.real), float(p.imag)]
            elif p is not None and np.ndim(p) == 1:
                p = [float(c) for c in p]
            elif p is not None:
                p = float(p)
            listed.append((p, float(r[i])))
        details["failureCount"] = int(bad.size)
        return cls(label, int(r.size), mx, p99, listed, bool(p99 <= tol), None, tol, details)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "sampleCount": int(self.sample_count),
            "maxResidual": _num(self.max_residual),
            "p99Residual": _num(self.p99_residual),
            "failures": [[_jsonable(p), _num(v)] for p, v in self.failures],
            "passed": bool(self.passed),
            "wallTimeMs": _num(self.wall_time_ms),
            "tolerance": _num(self.tolerance),
            "details": _jsonable(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False, allow_nan=False)
