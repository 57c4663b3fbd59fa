"""Certificates: the verdict and worst-case margin of one certification run."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .. import __version__

SCHEMA = "skewflow.certificate/1"
BASE_HYPOTHESES = (
    "measurability assumed: (sm)/(ssm) are hypotheses, not checked",
    "falsification only: inequalities certified on the sampled grid",
)


@dataclass
class Certificate:
    kind: str
    verdict: str
    worst_violation: float
    worst_point: dict | None
    tolerance: float
    constants: dict
    grid: dict
    hypotheses: list[str]
    parts: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    precondition: dict | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self, timestamp: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "tool_version": __version__,
            "kind": self.kind,
            "verdict": self.verdict,
            "worst_violation": self.worst_violation,
            "worst_point": self.worst_point,
            "tolerance": self.tolerance,
            "constants": self.constants,
            "grid": self.grid,
            "hypotheses": self.hypotheses,
            "parts": self.parts,
            "notes": self.notes,
        }
        if self.precondition is not None:
            out["precondition"] = self.precondition
        if timestamp:
            out["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return _json_safe(out)

    def to_json(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp), indent=2, sort_keys=False)


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    return obj


def rows_to_csv(rows) -> str:
    """CSV with header n,t,s,value; used for witness sequences and envelopes."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "t", "s", "value"])
    for n, t, s, value in rows:
        writer.writerow([n, repr(float(t)), repr(float(s)), repr(float(value))])
    return buf.getvalue()


class MarginTracker:
    """Running worst margin per inequality part, over batched (triple, probe) arrays."""

    def __init__(self):
        self.parts: dict[str, dict] = {}
        self.overflow = 0

    def add(self, part: str, margins, t, s, t0, x_offset: float) -> None:
        margins = np.asarray(margins, dtype=float)
        bad = np.isnan(margins)
        if np.any(bad):
            self.overflow += int(np.sum(bad))
            margins = np.where(bad, np.inf, margins)
        entry = self.parts.setdefault(part, {"worst_violation": -np.inf, "worst_point": None, "evaluations": 0})
        entry["evaluations"] += int(margins.size)
        if margins.size == 0:
            return
        idx = np.unravel_index(np.argmax(margins), margins.shape)
        value = float(margins[idx])
        if value > entry["worst_violation"] or entry["worst_point"] is None:
            i = idx[0] if margins.ndim > 1 else 0
            probe = idx[-1]
            entry["worst_violation"] = max(value, entry["worst_violation"])
            entry["worst_point"] = {
                "t": float(np.broadcast_to(t, margins.shape[:1])[i]),
                "s": float(np.broadcast_to(s, margins.shape[:1])[i]),
                "t0": float(np.broadcast_to(t0, margins.shape[:1])[i]),
                "probe": int(probe),
                "x_offset": float(x_offset),
            }

    def certificate(self, kind: str, tolerance: float, constants: dict, grid, hypotheses, notes=None) -> Certificate:
        notes = list(notes or [])
        if self.overflow:
            notes.append(f"overflow: {self.overflow} evaluations were not finite and count as violations")
        worst, point = -np.inf, None
        for entry in self.parts.values():
            if point is None or entry["worst_violation"] > worst:
                worst, point = entry["worst_violation"], entry["worst_point"]
        verdict = "pass" if worst <= tolerance else "fail"
        return Certificate(kind, verdict, worst, point, tolerance, constants, grid.describe(),
                           list(hypotheses), dict(self.parts), notes)


def margin(lhs, rhs) -> np.ndarray:
    """log lhs - log rhs, with 0 <= anything giving -inf and NaN (overflow) preserved."""
    lhs, rhs = np.broadcast_arrays(np.asarray(lhs, float), np.asarray(rhs, float))
    with np.errstate(invalid="ignore"):
        out = lhs - rhs
    out = np.where(np.isneginf(lhs), -np.inf, out)
    return np.where(np.isnan(lhs) | np.isnan(rhs), np.nan, out)
