"""Positive time-dependent bound functions N(.) and their log-space evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from ..errors import DomainError

FORMS = ("constant", "exponential", "tabulated", "rule")


@dataclass(frozen=True)
class BoundSpec:
    """N(t) = scale * base(t), where base is one of:

    - ``constant``: c
    - ``exponential``: c * exp(a * t)
    - ``tabulated``: step interpolation of (time, value) pairs (value of the last node <= t)
    - ``rule``: an arbitrary vectorised callable, optionally with an exact log
    """

    form: str
    c: float = 1.0
    a: float = 0.0
    table: tuple[tuple[float, float], ...] = ()
    rule: Callable | None = None
    log_rule: Callable | None = None
    text: str = ""
    scale: float = 1.0

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown bound form {self.form!r}")
        if self.form in ("constant", "exponential") and not self.c > 0:
            raise ValueError("bound constant c must be positive")
        if self.form == "tabulated" and not self.table:
            raise ValueError("tabulated bound needs at least one node")
        if self.form == "rule" and self.rule is None and self.log_rule is None:
            raise ValueError("rule bound needs a callable")
        if not self.scale > 0:
            raise ValueError("bound scale must be positive")

    @classmethod
    def constant(cls, c: float) -> "BoundSpec":
        return cls("constant", c=float(c))

    @classmethod
    def exponential(cls, c: float, a: float) -> "BoundSpec":
        return cls("exponential", c=float(c), a=float(a))

    @classmethod
    def tabulated(cls, pairs) -> "BoundSpec":
        pairs = tuple(sorted((float(t), float(v)) for t, v in pairs))
        return cls("tabulated", table=pairs)

    @classmethod
    def from_rule(cls, rule: Callable | None, text: str, log_rule: Callable | None = None) -> "BoundSpec":
        return cls("rule", rule=rule, log_rule=log_rule, text=text)

    def scaled(self, k: float) -> "BoundSpec":
        return replace(self, scale=self.scale * float(k))

    def log_value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.form == "constant":
            out = np.full(t.shape, math.log(self.c))
        elif self.form == "exponential":
            out = math.log(self.c) + self.a * t
        elif self.form == "tabulated":
            times = np.array([p[0] for p in self.table])
            values = np.array([p[1] for p in self.table])
            idx = np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(times) - 1)
            out = _checked_log(values[idx], self)
        elif self.log_rule is not None:
            out = np.broadcast_to(np.asarray(self.log_rule(t), dtype=float), t.shape)
        else:
            out = _checked_log(np.broadcast_to(np.asarray(self.rule(t), dtype=float), t.shape), self)
        if np.any(np.isnan(out)) or np.any(np.isneginf(out)):
            raise DomainError(f"bound {self.describe()} is not positive on the tested horizon")
        return out + math.log(self.scale)

    def __call__(self, t):
        return np.exp(self.log_value(t))

    def describe(self) -> str:
        if self.form == "constant":
            core = f"{self.c!r}"
        elif self.form == "exponential":
            core = f"{self.c!r}*exp({self.a!r}*t)"
        elif self.form == "tabulated":
            core = f"step{list(self.table)}"
        else:
            core = self.text or "<rule>"
        return core if self.scale == 1.0 else f"{self.scale!r}*({core})"


def _checked_log(values: np.ndarray, bound: BoundSpec) -> np.ndarray:
    if np.any(~(values > 0)):
        raise DomainError(f"bound {bound.describe()} is not positive on the tested horizon")
    return np.log(values)


def as_bound(value) -> BoundSpec:
    """Coerce a number or BoundSpec to a BoundSpec."""
    if isinstance(value, BoundSpec):
        return value
    return BoundSpec.constant(float(value))
