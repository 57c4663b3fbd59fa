"""Exponent fits, uniformity witnesses and envelope functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..core import CocycleSpec, log_norms, split_cocycle
from ..errors import ContractError
from ..grid import Grid
from ..signal_space import Signal
from .certificate import rows_to_csv

DIRECTIONS = ("forward", "backward")
DIVERGENCE_THRESHOLD = 1e3
MIN_DISTINCT_GAPS = 10


def _direction(direction: str) -> str:
    if direction not in DIRECTIONS:
        raise ContractError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    return direction


@dataclass(frozen=True)
class ExponentFit:
    nu_hat: float
    r2: float
    direction: str
    per_probe: tuple[float, ...]
    samples: int

    def to_dict(self) -> dict:
        return {"nu_hat": self.nu_hat, "r2": self.r2, "direction": self.direction,
                "per_probe": list(self.per_probe), "samples": self.samples}


def estimate_exponent(sys: CocycleSpec, grid: Grid | None = None, fam=None, k: int | None = None,
                      direction: str = "forward") -> ExponentFit:
    """Least-squares slope of log||Phi(t,t0,x)v|| - log||Phi(s,t0,x)v|| against t - s.

    The fit has an intercept, so an N(.) that is roughly constant over the grid
    does not bias the slope.  Forward returns the decay rate (negated slope),
    backward the growth rate (the slope); across probes the smallest rate wins.
    """
    _direction(direction)
    grid = grid or Grid()
    if fam is not None and k is not None:
        sys = split_cocycle(sys, fam, k)
    t, s, t0 = grid.triples()
    gap = t - s
    if np.unique(np.round(gap, 12)).size < MIN_DISTINCT_GAPS:
        raise ContractError(f"need at least {MIN_DISTINCT_GAPS} distinct gaps t - s for a fit")
    v = grid.probes(sys.dim)
    rates, fits = [], []
    for x in grid.points(sys.base):
        with np.errstate(invalid="ignore"):
            diff = log_norms(sys, t, t0, x, v) - log_norms(sys, s, t0, x, v)
        for j in range(diff.shape[-1]):
            y = diff[:, j]
            ok = np.isfinite(y)
            if np.unique(np.round(gap[ok], 12)).size < MIN_DISTINCT_GAPS:
                continue  # probe killed by the projector, or overflowed
            slope, intercept = np.polyfit(gap[ok], y[ok], 1)
            resid = y[ok] - (slope * gap[ok] + intercept)
            total = np.sum((y[ok] - y[ok].mean()) ** 2)
            r2 = 1.0 - float(np.sum(resid ** 2) / total) if total > 0 else 1.0
            rates.append(-slope if direction == "forward" else slope)
            fits.append(r2)
    if not rates:
        raise ContractError("no probe produced a finite fit")
    worst = int(np.argmin(rates))
    return ExponentFit(float(rates[worst]), float(fits[worst]), direction, tuple(float(r) for r in rates), int(t.size))


@dataclass(frozen=True)
class Witness:
    """A sequence n -> (t_n, s_n) with a unit probe direction.

    ``strict`` witnesses need t_n > s_n; when the floating-point times
    collapse the sequence is truncated rather than evaluated at a zero gap.
    """

    rule: Callable[[int], tuple[float, float]]
    probe: tuple[float, ...]
    mode: str = "stable"
    strict: bool = True
    label: str = ""
    start: int = 1
    closed_form: Callable[[int], float] | None = None


@dataclass
class ProbeReport:
    label: str
    mode: str
    ns: list[int]
    times: list[tuple[float, float]]
    log_values: list[float]
    falsified: bool
    notes: list[str] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        out = []
        for lv in self.log_values:
            out.append(math.exp(lv) if lv < 709.0 else math.inf)
        return out

    @property
    def verdict(self) -> str:
        n = self.ns[-1] if self.ns else 0
        return f"uniform bound falsified up to n={n}" if self.falsified else "not falsified"

    def to_dict(self) -> dict:
        return {"label": self.label, "mode": self.mode, "verdict": self.verdict, "falsified": self.falsified,
                "threshold": DIVERGENCE_THRESHOLD,
                "sequence": [{"n": n, "t": t, "s": s, "value": v, "log_value": lv}
                             for n, (t, s), v, lv in zip(self.ns, self.times, self.values, self.log_values)],
                "notes": self.notes}

    def to_csv(self) -> str:
        return rows_to_csv((n, t, s, v) for n, (t, s), v in zip(self.ns, self.times, self.values))


def diverges(log_values) -> bool:
    """Strictly increasing over the last half and ending at or above the threshold."""
    lv = list(log_values)
    if len(lv) < 2:
        return False
    tail = lv[len(lv) // 2:] if len(lv) > 2 else lv
    rising = all(b > a for a, b in zip(tail, tail[1:]))
    return rising and lv[-1] >= math.log(DIVERGENCE_THRESHOLD)


def uniformity_probe(sys: CocycleSpec, witness: Witness, n_max: int, mode: str | None = None,
                     x: Signal | None = None) -> ProbeReport:
    """r_n = ||Phi(t_n, s_n, x) e|| (stable mode) or its reciprocal (instable mode).

    Values are carried as logs, so sequences run far past the range of floats.
    """
    mode = mode or witness.mode
    if mode not in ("stable", "instable"):
        raise ContractError(f"mode must be 'stable' or 'instable', got {mode!r}")
    x = sys.base if x is None else x
    probe = np.asarray(witness.probe, float)[:, None]
    report = ProbeReport(witness.label, mode, [], [], [], False)
    for n in range(witness.start, n_max + 1):
        t, s = (float(c) for c in witness.rule(n))
        if s < 0 or t < s or (witness.strict and not t > s):
            report.notes.append(f"truncated at n={n}: times collapse in floating point (t={t!r}, s={s!r})")
            break
        try:
            lv = float(log_norms(sys, np.array(t), np.array(s), x, probe)[0])
        except (ValueError, FloatingPointError) as exc:
            report.notes.append(f"truncated at n={n}: {exc}")
            break
        if not math.isfinite(lv):
            report.notes.append(f"truncated at n={n}: norm is not finite")
            break
        report.ns.append(n)
        report.times.append((t, s))
        report.log_values.append(lv if mode == "stable" else -lv)
    report.falsified = diverges(report.log_values)
    return report


@dataclass(frozen=True)
class Envelope:
    direction: str
    gaps: tuple[float, ...]
    raw: tuple[float, ...]
    values: tuple[float, ...]

    def __call__(self, u):
        """Nondecreasing envelope; between nodes the next node's value (an upper step)."""
        gaps = np.asarray(self.gaps)
        idx = np.searchsorted(gaps, np.asarray(u, float), side="left")
        if np.any(idx >= gaps.size):
            raise ContractError("envelope evaluated beyond its last gap")
        return np.asarray(self.values)[idx]

    def to_csv(self) -> str:
        return rows_to_csv((i, u, 0.0, v) for i, (u, v) in enumerate(zip(self.gaps, self.values)))

    def to_dict(self) -> dict:
        return {"direction": self.direction, "gaps": list(self.gaps), "raw": list(self.raw),
                "values": list(self.values)}


def envelope_estimate(sys: CocycleSpec, direction: str, gaps, grid: Grid | None = None) -> Envelope:
    """Max norm ratio at t = s + u over the grid's (s, t0, x, v), made nondecreasing.

    Any nondecreasing bound f has f(u) >= f(0) >= 1 because Phi(s, s) = I, so
    the running maximum starts from 1.
    """
    _direction(direction)
    grid = grid or Grid()
    gaps = np.asarray(gaps, dtype=float)
    if gaps.ndim != 1 or gaps.size == 0:
        raise ContractError("gaps must be a nonempty list")
    if np.any(gaps < 0) or np.any(np.diff(gaps) < 0):
        raise ContractError("gaps must be nonnegative and sorted ascending")
    _, s, t0 = grid.triples()
    v = grid.probes(sys.dim)
    raw = np.full(gaps.size, -np.inf)
    for x in grid.points(sys.base):
        ls = log_norms(sys, s, t0, x, v)
        for i, u in enumerate(gaps):
            if u == 0.0:
                raw[i] = 0.0
                continue
            lt = log_norms(sys, s + u, t0, x, v)
            ratio = lt - ls if direction == "forward" else ls - lt
            ratio = np.where(np.isneginf(ls) & np.isneginf(lt), -np.inf, ratio)
            ratio = np.where(np.isnan(ratio), np.inf, ratio)
            raw[i] = max(raw[i], float(np.max(ratio)))
    values = np.maximum.accumulate(np.maximum(raw, 0.0))
    with np.errstate(over="ignore"):
        return Envelope(direction, tuple(gaps.tolist()), tuple(np.exp(raw).tolist()), tuple(np.exp(values).tolist()))
