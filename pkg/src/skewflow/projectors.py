"""Projector families x -> P_k(x) and their compatibility with a cocycle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import CocycleSpec
from .errors import ContractError, SkewflowError
from .grid import Grid
from .signal_space import Signal

ProjectorRule = Callable[[Signal], np.ndarray]


@dataclass(frozen=True)
class ProjectorFamily:
    rules: tuple[ProjectorRule, ...]
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.rules) not in (2, 3):
            raise ContractError("a projector family has 2 or 3 members")

    @property
    def count(self) -> int:
        return len(self.rules)

    def at(self, k: int, x: Signal) -> np.ndarray:
        """P_k(x) for 1-based k."""
        return np.asarray(self.rules[k - 1](x), dtype=float)

    @classmethod
    def constant(cls, matrices: Sequence, label: str = "") -> "ProjectorFamily":
        mats = [np.array(m, dtype=float) for m in matrices]
        rules = tuple((lambda x, m=m: m) for m in mats)
        return cls(rules, label, {"constant": [m.tolist() for m in mats]})

    @classmethod
    def coordinate(cls, dim: int, blocks: Sequence[Sequence[int]], label: str = "") -> "ProjectorFamily":
        """Coordinate projectors onto the given (1-based) index blocks."""
        mats = []
        for block in blocks:
            m = np.zeros((dim, dim))
            for i in block:
                m[i - 1, i - 1] = 1.0
            mats.append(m)
        return cls.constant(mats, label or f"coordinate{[list(b) for b in blocks]}")


class IncompatibleFamilyError(SkewflowError):
    def __init__(self, report: "ComplianceReport"):
        super().__init__(f"projector family fails compatibility: {report.summary()}")
        self.report = report


@dataclass
class ComplianceReport:
    idempotence: float
    complementarity: float
    commutation: float
    tolerance: float
    worst_point: dict | None = None

    @property
    def passed(self) -> bool:
        return max(self.idempotence, self.complementarity, self.commutation) <= self.tolerance

    def summary(self) -> str:
        return (f"idempotence={self.idempotence:.3g} complementarity={self.complementarity:.3g} "
                f"commutation={self.commutation:.3g} tol={self.tolerance:g}")

    def to_dict(self) -> dict:
        return {"verdict": "pass" if self.passed else "fail", "idempotence": self.idempotence,
                "complementarity": self.complementarity, "commutation": self.commutation,
                "tolerance": self.tolerance, "worst_point": self.worst_point}


def _max_abs(a) -> float:
    a = np.asarray(a)
    finite = np.isfinite(a)
    return float(np.max(np.where(finite, np.abs(a), np.inf), initial=0.0))


def _algebra_residuals(mats: list[np.ndarray], dim: int) -> tuple[float, float]:
    idem = max(_max_abs(p @ p - p) for p in mats)
    comp = _max_abs(sum(mats) - np.eye(dim))
    for i, p in enumerate(mats):
        for j, q in enumerate(mats):
            if i != j:
                comp = max(comp, _max_abs(p @ q))
    return idem, comp


def check_family(fam: ProjectorFamily, sys: CocycleSpec, grid: Grid, tol: float = 1e-9) -> ComplianceReport:
    """Idempotence, complementarity and commutation P_k(phi(t,s,x)) Phi v = Phi P_k(x) v.

    The commutation residual is normalised by max(1, ||Phi(t, s, x) v||).
    Quantifies over (t, s) pairs from the grid triples and the grid's points x.
    """
    n = sys.dim
    t, s, _ = grid.triples()
    v = grid.probes(n)
    idem = comp = commut = 0.0
    worst = None
    for x in grid.points(sys.base):
        moved = sys.semiflow(t, s, x)
        here = [np.broadcast_to(fam.at(k, x), (n, n)) for k in range(1, fam.count + 1)]
        for p in here:
            if p.shape[-1] != n:
                raise ContractError(f"projector of size {p.shape} for a system of dimension {n}")
        i_, c_ = _algebra_residuals(here, n)
        idem, comp = max(idem, i_), max(comp, c_)
        with np.errstate(over="ignore", invalid="ignore"):
            m = sys.matrix(t, s, x)
            scale = np.maximum(1.0, np.sum(np.abs(m @ v), axis=-2))
            for k in range(1, fam.count + 1):
                there = np.asarray(fam.at(k, moved), float)
                r = np.sum(np.abs(there @ (m @ v) - m @ (here[k - 1] @ v)), axis=-2) / scale
                r = np.where(np.isfinite(r), r, np.inf)
                idx = np.unravel_index(np.argmax(r), r.shape)
                if r[idx] > commut:
                    commut = float(r[idx])
                    worst = {"t": float(t[idx[0]]), "s": float(s[idx[0]]), "probe": int(idx[1]), "k": k}
                if there.ndim == 3:
                    i_, c_ = _algebra_residuals([np.asarray(fam.at(j, moved), float) for j in range(1, fam.count + 1)], n)
                    idem, comp = max(idem, i_), max(comp, c_)
    return ComplianceReport(idem, comp, commut, tol, worst)
