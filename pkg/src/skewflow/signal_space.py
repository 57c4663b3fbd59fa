"""Points of the phase space X: continuous nonnegative signals on [0, inf).

A :class:`Signal` is an evaluable rule together with a translation offset, so
``translate(translate(x, a), b)`` is represented exactly as ``x`` shifted by
``a + b``.  The offset may be an array; this lets a whole batch of translates
of one signal be evaluated with numpy broadcasting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DomainError

Rule = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Signal:
    rule: Rule
    description: str = ""
    offset: float | np.ndarray = 0.0
    tags: dict = field(default_factory=dict, compare=False)

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.rule(tau + self.offset)

    @property
    def batched(self) -> bool:
        return np.ndim(self.offset) > 0

    def check_nonnegative(self, times) -> None:
        """Raise DomainError if the signal is negative at any of ``times``."""
        values = np.asarray(self(times))
        if np.any(~np.isfinite(values)) or np.any(values < 0):
            raise DomainError(f"signal {self.description!r} is negative or non-finite on the sampled grid")


@dataclass(frozen=True)
class MetricParams:
    n_terms: int = 30
    samples_per_unit: int = 64

    def __post_init__(self):
        if self.n_terms < 1:
            raise ValueError("n_terms must be >= 1")
        if self.samples_per_unit < 2:
            raise ValueError("samples_per_unit must be >= 2")


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear interpolation through (time, value) nodes.

    Evaluating outside [first node, last node] raises DomainError rather than
    extrapolating.
    """

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values) or len(self.times) < 2:
            raise ValueError("need at least two nodes with one value each")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("node times must be strictly increasing")

    def __call__(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        if np.any(tau < self.times[0]) or np.any(tau > self.times[-1]) or np.any(np.isnan(tau)):
            raise DomainError(f"table evaluated outside [{self.times[0]}, {self.times[-1]}]")
        return np.interp(tau, self.times, self.values)


def constant(c: float, description: str | None = None) -> Signal:
    c = float(c)
    return Signal(lambda tau: np.full(np.shape(tau), c), description or f"{c!r}")


def translate(x: Signal, t) -> Signal:
    """Return x_t, the signal s -> x(t + s)."""
    if np.any(np.asarray(t) < 0):
        raise DomainError(f"translation by a negative time {t!r}")
    return replace(x, offset=x.offset + (t if np.ndim(t) else float(t)))


def distance(x: Signal, y: Signal, params: MetricParams = MetricParams()) -> tuple[float, float]:
    """Truncated Frechet distance sum_{n<=N} 2^-n d_n/(1+d_n) and its tail bound 2^-N.

    ``d_n`` is the sup of |x - y| over [0, n], estimated on a uniform grid.
    """
    n = params.n_terms
    spu = params.samples_per_unit
    grid = np.arange(n * spu + 1) / spu
    gap = np.abs(np.asarray(x(grid), dtype=float) - np.asarray(y(grid), dtype=float))
    running = np.maximum.accumulate(gap)
    d = running[spu * np.arange(1, n + 1)]
    weights = 0.5 ** np.arange(1, n + 1)
    # fsum keeps the partial sums monotone in n_terms
    value = math.fsum(weights * (d / (1.0 + d)))
    return value, 0.5 ** n
