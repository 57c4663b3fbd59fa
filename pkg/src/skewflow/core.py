"""Skew-evolution semiflows C = (phi, Phi) on X x R^n with the l1 norm.

A :class:`CocycleSpec` bundles the semiflow rule phi(t, s, x), the
matrix-valued cocycle rule Phi(t, s, x) and optional extras:

* ``log_rule`` -- logs of the (positive) diagonal entries of a diagonal
  cocycle, used for overflow-free norm evaluation;
* ``shift`` -- the accumulated lambda of a lambda-shift, Phi_lambda = e^{-lambda (t-s)} Phi;
* ``projector`` -- a right factor P(x), so the system represents Phi(t, s, x) P(x).

All rules accept numpy arrays for ``t`` and ``s`` (broadcast together) and a
:class:`Signal` whose offset may be an array of the same shape; matrix rules
return ``(..., n, n)`` and log rules ``(..., n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import CocycleOverflowError, ContractError, DomainError
from .grid import Grid
from .signal_space import Signal, translate

MatrixRule = Callable[[np.ndarray, np.ndarray, Signal], np.ndarray]
SemiflowRule = Callable[[np.ndarray, np.ndarray, Signal], Signal]


def translation_semiflow(t, s, x: Signal) -> Signal:
    return translate(x, np.asarray(t) - np.asarray(s))


def check_times(t, s) -> None:
    t, s = np.asarray(t, float), np.asarray(s, float)
    if np.any(s < 0) or np.any(t < s):
        raise DomainError(f"need t >= s >= 0, got t={t!r}, s={s!r}")


@dataclass(frozen=True)
class CocycleSpec:
    dim: int
    rule: MatrixRule
    base: Signal
    label: str = ""
    log_rule: MatrixRule | None = None
    semiflow: SemiflowRule = translation_semiflow
    shift: float = 0.0
    projector: Callable[[Signal], np.ndarray] | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ContractError("dimension must be >= 1")

    def matrix(self, t, s, x: Signal) -> np.ndarray:
        t, s = np.asarray(t, float), np.asarray(s, float)
        with np.errstate(over="ignore", invalid="ignore"):
            m = np.asarray(self.rule(t, s, x), dtype=float)
            if self.shift:
                m = m * np.exp(-self.shift * (t - s))[..., None, None]
        if self.projector is not None:
            m = m @ np.asarray(self.projector(x), dtype=float)
        return m

    def log_diagonal(self, t, s, x: Signal) -> np.ndarray:
        """Logs of the diagonal of Phi (ignores ``projector``); needs ``log_rule``."""
        if self.log_rule is None:
            raise ContractError(f"system {self.label!r} has no log-space rule")
        t, s = np.asarray(t, float), np.asarray(s, float)
        logs = np.asarray(self.log_rule(t, s, x), dtype=float)
        if self.shift:
            logs = logs - (self.shift * (t - s))[..., None]
        return logs


def _check_vector(sys: CocycleSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[0] != sys.dim:
        raise ContractError(f"vector of length {v.shape[0]} for a system of dimension {sys.dim}")
    return v


def l1_norm(v) -> float:
    return float(np.sum(np.abs(v)))


def linf_norm(w) -> float:
    return float(np.max(np.abs(w)))


def eval_semiflow(sys: CocycleSpec, t: float, s: float, x: Signal) -> Signal:
    check_times(t, s)
    return sys.semiflow(t, s, x)


def eval_cocycle(sys: CocycleSpec, t: float, s: float, x: Signal, v) -> np.ndarray:
    """Return Phi(t, s, x) v."""
    check_times(t, s)
    v = _check_vector(sys, v)
    out = sys.matrix(t, s, x) @ v
    if not np.all(np.isfinite(out)):
        raise CocycleOverflowError(f"Phi({t}, {s}) of {sys.label!r} is not finite")
    return out


def adjoint_apply(sys: CocycleSpec, t: float, s: float, x: Signal, w) -> np.ndarray:
    """Return Phi(t, s, x)^T w, the dual action on (R^n, l-infinity)."""
    check_times(t, s)
    w = _check_vector(sys, w)
    out = sys.matrix(t, s, x).T @ w
    if not np.all(np.isfinite(out)):
        raise CocycleOverflowError(f"Phi({t}, {s})^T of {sys.label!r} is not finite")
    return out


def shift_cocycle(sys: CocycleSpec, lam: float) -> CocycleSpec:
    """The lambda-shift e^{-lambda (t - t0)} Phi(t, t0, x)."""
    lam = float(lam)
    return replace(sys, shift=sys.shift + lam, label=f"{sys.label}|shift({lam:g})")


def split_cocycle(sys: CocycleSpec, fam, k: int, grid: Grid | None = None) -> CocycleSpec:
    """The subsystem C_k with cocycle Phi(t, t0, x) P_k(x); k is 1-based.

    Raises :class:`~skewflow.projectors.IncompatibleFamilyError` (carrying the
    compliance report) when ``fam`` fails its checks on ``grid``.
    """
    from .projectors import IncompatibleFamilyError, check_family

    if not 1 <= k <= fam.count:
        raise ContractError(f"projector index {k} out of range 1..{fam.count}")
    report = check_family(fam, sys, grid or Grid(triple_count=50))
    if not report.passed:
        raise IncompatibleFamilyError(report)
    p_k = fam.rules[k - 1]
    if sys.projector is None:
        projector = p_k
    else:
        outer = sys.projector

        def projector(x, outer=outer, p_k=p_k):
            return np.asarray(outer(x), float) @ np.asarray(p_k(x), float)

    return replace(sys, projector=projector, label=f"{sys.label}|P{k}")


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    peak = np.max(a, axis=axis, keepdims=True)
    safe = np.where(np.isfinite(peak), peak, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - safe), axis=axis)) + np.squeeze(safe, axis=axis)
    return np.where(np.isneginf(np.squeeze(peak, axis=axis)), -np.inf, out)


def _log_abs(a: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(a))


def log_norms(sys: CocycleSpec, t, s, x: Signal, probes: np.ndarray) -> np.ndarray:
    """log ||Phi(t, s, x) v||_1 for each probe column; shape ``(*batch, p)``.

    Diagonal systems with a log rule are evaluated in log space.  Matrix
    systems are evaluated directly; non-finite results come back as NaN so
    callers can report them.
    """
    probes = _check_vector(sys, probes)
    if sys.projector is not None:
        probes = np.asarray(sys.projector(x), float) @ probes
    if sys.log_rule is not None:
        logs = sys.log_diagonal(t, s, x)
        return _logsumexp(logs[..., :, None] + _log_abs(probes), axis=-2)
    with np.errstate(over="ignore", invalid="ignore"):
        y = np.asarray(sys.rule(np.asarray(t, float), np.asarray(s, float), x), float) @ probes
        norm = np.sum(np.abs(y), axis=-2)
        out = _log_abs(norm)
        if sys.shift:
            out = out - (sys.shift * (np.asarray(t, float) - np.asarray(s, float)))[..., None]
    return np.where(np.isfinite(norm), out, np.nan)


def log_dual_norms(sys: CocycleSpec, t, s, x: Signal, duals: np.ndarray) -> np.ndarray:
    """log ||Phi(t, s, x)^T w||_inf for each dual probe column; shape ``(*batch, p)``."""
    duals = _check_vector(sys, duals)
    if sys.log_rule is not None:
        logs = sys.log_diagonal(t, s, x)
        if sys.projector is None:
            return np.max(logs[..., :, None] + _log_abs(duals), axis=-2)
        peak = np.max(logs, axis=-1, keepdims=True)
        scaled = np.exp(logs - peak)[..., :, None] * duals
        pt = np.swapaxes(np.asarray(sys.projector(x), float), -1, -2)
        return _log_abs(np.max(np.abs(pt @ scaled), axis=-2)) + peak
    with np.errstate(over="ignore", invalid="ignore"):
        m = sys.matrix(t, s, x)
        y = np.swapaxes(m, -1, -2) @ duals
        norm = np.max(np.abs(y), axis=-2)
    return np.where(np.isfinite(norm), _log_abs(norm), np.nan)


def cocycle_residual(sys: CocycleSpec, grid: Grid, probes: np.ndarray | None = None) -> float:
    """Worst relative defect of Phi(t, s, phi(s, t0, x)) Phi(s, t0, x) v = Phi(t, t0, x) v."""
    return axiom_residuals(sys, grid, probes)["composition"]


def axiom_residuals(sys: CocycleSpec, grid: Grid, probes: np.ndarray | None = None) -> dict:
    """Worst relative residuals of the identity and composition axioms, with the worst triple."""
    t, s, t0 = grid.triples()
    v = grid.probes(sys.dim) if probes is None else _check_vector(sys, probes)
    worst = {"identity": 0.0, "composition": 0.0, "worst_point": None}
    eye = np.eye(sys.dim)
    for x in grid.points(sys.base):
        later = sys.semiflow(s, t0, x)
        with np.errstate(over="ignore", invalid="ignore"):
            lhs = sys.matrix(t, s, later) @ (sys.matrix(s, t0, x) @ v)
            rhs = sys.matrix(t, t0, x) @ v
            scale = np.maximum(1.0, np.sum(np.abs(rhs), axis=-2))
            res = np.sum(np.abs(lhs - rhs), axis=-2) / scale
            ident = sys.matrix(t, t, x) @ v - (eye @ v if sys.projector is None else sys.projector(x) @ v)
            ires = np.sum(np.abs(ident), axis=-2)
        res = np.where(np.isfinite(res), res, np.inf)
        idx = np.unravel_index(np.argmax(res), res.shape)
        if res[idx] >= worst["composition"]:
            worst["composition"] = float(res[idx])
            worst["worst_point"] = {"t": float(t[idx[0]]), "s": float(s[idx[0]]), "t0": float(t0[idx[0]]),
                                    "probe": int(idx[1]), "x_offset": float(np.max(x.offset))}
        worst["identity"] = max(worst["identity"], float(np.max(np.where(np.isfinite(ires), ires, np.inf))))
    return worst
