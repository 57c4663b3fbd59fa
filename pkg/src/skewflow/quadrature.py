"""Composite Simpson quadrature with a Richardson error estimate.

The integrand is sampled once on the step-h grid; the step-2h rule reuses every
other node.  The returned value is the Richardson-extrapolated combination
S_h + (S_h - S_2h)/15 and the error estimate is |S_h - S_2h|/15 plus a small
rounding floor, so the estimate dominates the O(h^6) error of the value.

Batches of intervals are supported: ``a`` and ``b`` may be arrays, in which
case the integrand receives nodes of shape ``(*batch, N + 1)`` and every
interval uses the same panel count N (so its own step is at most ``h``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadParams:
    step: float = 0.01

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("quadrature step must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: float | np.ndarray
    error: float | np.ndarray
    panels: int


def panel_count(length: float, step: float) -> int:
    # multiple of 4 so that the 2h rule also has an even panel count
    return max(4, 4 * math.ceil(length / (4.0 * step) - 1e-12))


def nodes(a, b, step: float):
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    length = b - a
    n = panel_count(float(np.max(np.abs(length), initial=0.0)), step)
    k = np.arange(n + 1) / n
    return a[..., None] + length[..., None] * k, length / n, n


def _simpson_weights(n: int) -> np.ndarray:
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w


def _weights(n: int) -> tuple[np.ndarray, np.ndarray]:
    w2 = np.zeros(n + 1)
    w2[0::2] = _simpson_weights(n // 2)
    return _simpson_weights(n), w2


def _combine(samples: np.ndarray, h: np.ndarray, n: int):
    w, w2 = _weights(n)
    s_h = h / 3.0 * (samples @ w)
    s_2h = 2.0 * h / 3.0 * (samples @ w2)
    diff = (s_h - s_2h) / 15.0
    floor = 16.0 * _EPS * (np.abs(h) / 3.0 * (np.abs(samples) @ w))
    return s_h + diff, np.abs(diff) + floor


def simpson(f: Callable[[np.ndarray], np.ndarray], a, b, params: QuadParams = QuadParams()) -> QuadResult:
    """Integrate ``f`` over [a, b] (elementwise for array bounds)."""
    x, h, n = nodes(a, b, params.step)
    samples = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    value, error = _combine(samples, h, n)
    if value.ndim == 0:
        value, error = float(value), float(error)
    return QuadResult(value, error, n)


def integrate_log_samples(logs: np.ndarray, h, n: int):
    """Integrate exp(logs) sampled on a ``nodes`` grid; returns (log value, log error).

    ``logs`` has shape ``(*batch, n + 1)``; rows that are identically -inf give -inf.
    """
    logs = np.asarray(logs, dtype=float)
    peak = np.max(logs, axis=-1)
    safe_peak = np.where(np.isfinite(peak), peak, 0.0)
    with np.errstate(invalid="ignore"):
        scaled = np.exp(logs - safe_peak[..., None])
    value, error = _combine(scaled, np.asarray(h, float), n)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_value = np.log(np.where(value > 0, value, 0.0)) + safe_peak
        log_error = np.log(np.where(error > 0, error, 0.0)) + safe_peak
    dead = np.isneginf(peak)
    return np.where(dead, -np.inf, log_value), np.where(dead, -np.inf, log_error)


def simpson_log(log_f: Callable[[np.ndarray], np.ndarray], a, b, params: QuadParams = QuadParams()):
    """Integrate exp(log_f) over [a, b] without overflow; returns (log value, log error, panels)."""
    x, h, n = nodes(a, b, params.step)
    logs = np.broadcast_to(np.asarray(log_f(x), dtype=float), x.shape)
    log_value, log_error = integrate_log_samples(logs, h, n)
    return log_value, log_error, n


def signal_integral(x, lower, upper, lag=0.0, params: QuadParams = QuadParams()):
    """Batched integral of x(tau - lag) over [lower, upper] (Richardson value only).

    ``lower``, ``upper``, ``lag`` and the signal's offset broadcast together.
    """
    offset = np.asarray(x.offset, dtype=float)
    lower, upper, lag, offset = np.broadcast_arrays(
        np.asarray(lower, float), np.asarray(upper, float), np.asarray(lag, float), offset)
    pts, h, n = nodes(lower, upper, params.step)
    samples = x.rule(pts - lag[..., None] + offset[..., None])
    value, _ = _combine(np.asarray(samples, dtype=float), h, n)
    return value
