"""Pointwise inequality checks over a sampled grid.

Every check works on log-norms, so a margin is ``log lhs - log rhs``: the
first-order relative excess of the left side.  A certificate passes when the
worst margin over all sampled (t, s, t0, x, v) is at most the tolerance.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..core import CocycleSpec, log_norms
from ..errors import ContractError
from ..grid import Grid
from ..projectors import ProjectorFamily, check_family
from .bounds import BoundSpec, as_bound
from .certificate import BASE_HYPOTHESES, Certificate, MarginTracker, margin

DEFAULT_TOL = 1e-9


def hypotheses_for(sys: CocycleSpec, *extra: str) -> list[str]:
    hyps = list(BASE_HYPOTHESES)
    hyps += list(sys.meta.get("hypotheses", ()))
    hyps += [f"flag: {flag}" for flag in sorted(sys.meta.get("flags", ()))]
    hyps += list(extra)
    return hyps


def sample(sys: CocycleSpec, grid: Grid):
    """Grid triples and probes, after checking the sampled points of X are admissible."""
    reach = grid.horizon + max(grid.translates, default=0.0) + grid.horizon
    sys.base.check_nonnegative(np.linspace(0.0, reach, 257))
    t, s, t0 = grid.triples()
    return t, s, t0, grid.probes(sys.dim)


def _col(a) -> np.ndarray:
    return np.asarray(a, dtype=float)[:, None]


def check_forward_bound(sys: CocycleSpec, bound: BoundSpec | float, rho: float, grid: Grid | None = None,
                        tol: float = DEFAULT_TOL, kind: str = "forward_bound") -> Certificate:
    """||Phi(t,t0,x)v|| <= N(s) e^{rho (t-s)} ||Phi(s,t0,x)v||.

    rho = omega > 0 is exponential growth, rho = 0 stability and rho = -nu < 0
    exponential stability.
    """
    grid = grid or Grid()
    bound = as_bound(bound)
    t, s, t0, v = sample(sys, grid)
    tracker = MarginTracker()
    log_n = _col(bound.log_value(s))
    for x in grid.points(sys.base):
        lt = log_norms(sys, t, t0, x, v)
        ls = log_norms(sys, s, t0, x, v)
        tracker.add("forward", margin(lt, log_n + _col(rho * (t - s)) + ls), t, s, t0, x.offset)
    return tracker.certificate(kind, tol, {"N": bound.describe(), "rho": float(rho)}, grid, hypotheses_for(sys))


def check_backward_bound(sys: CocycleSpec, bound: BoundSpec | float, rho: float, grid: Grid | None = None,
                         tol: float = DEFAULT_TOL, kind: str = "backward_bound") -> Certificate:
    """||Phi(s,t0,x)v|| <= N(t) e^{rho (t-s)} ||Phi(t,t0,x)v||.

    rho = omega > 0 is exponential decay, rho = 0 instability and rho = -nu < 0
    exponential instability.
    """
    grid = grid or Grid()
    bound = as_bound(bound)
    t, s, t0, v = sample(sys, grid)
    tracker = MarginTracker()
    log_n = _col(bound.log_value(t))
    for x in grid.points(sys.base):
        lt = log_norms(sys, t, t0, x, v)
        ls = log_norms(sys, s, t0, x, v)
        tracker.add("backward", margin(ls, log_n + _col(rho * (t - s)) + lt), t, s, t0, x.offset)
    return tracker.certificate(kind, tol, {"N": bound.describe(), "rho": float(rho)}, grid, hypotheses_for(sys))


def _precondition_failure(kind, report, constants, grid, sys, tol) -> Certificate:
    cert = Certificate(kind, "fail", np.inf, report.worst_point, tol, constants, grid.describe(),
                       hypotheses_for(sys), notes=["projector family is not compatible with the system"])
    cert.precondition = report.to_dict()
    return cert


def check_dichotomy(sys: CocycleSpec, fam: ProjectorFamily, n1, n2, nu1: float, nu2: float,
                    grid: Grid | None = None, tol: float = DEFAULT_TOL) -> Certificate:
    """Exponential dichotomy; nu1 = nu2 = 0 is plain dichotomy.

    stable:   e^{nu1 (t-s)} ||Phi(t,t0,x)P1 v|| <= N1(s) ||Phi(s,t0,x)P1 v||
    unstable: e^{nu2 (t-s)} ||Phi(s,t0,x)P2 v|| <= N2(t) ||Phi(t,t0,x)P2 v||
    """
    grid = grid or Grid()
    if fam.count != 2:
        raise ContractError("dichotomy needs a family of two projectors")
    n1, n2 = as_bound(n1), as_bound(n2)
    constants = {"N1": n1.describe(), "N2": n2.describe(), "nu1": float(nu1), "nu2": float(nu2)}
    report = check_family(fam, sys, grid)
    if not report.passed:
        return _precondition_failure("dichotomy", report, constants, grid, sys, tol)
    t, s, t0, v = sample(sys, grid)
    gap = _col(t - s)
    log_n1, log_n2 = _col(n1.log_value(s)), _col(n2.log_value(t))
    tracker = MarginTracker()
    for x in grid.points(sys.base):
        v1, v2 = fam.at(1, x) @ v, fam.at(2, x) @ v
        tracker.add("stable", margin(nu1 * gap + log_norms(sys, t, t0, x, v1),
                                     log_n1 + log_norms(sys, s, t0, x, v1)), t, s, t0, x.offset)
        tracker.add("unstable", margin(nu2 * gap + log_norms(sys, s, t0, x, v2),
                                       log_n2 + log_norms(sys, t, t0, x, v2)), t, s, t0, x.offset)
    cert = tracker.certificate("dichotomy", tol, constants, grid, hypotheses_for(sys))
    cert.precondition = report.to_dict()
    return cert


def check_rate_ordering(rates: Sequence[float]) -> None:
    nu1, nu2, nu3, nu4 = rates
    if not (nu1 < nu2 <= 0 <= nu3 < nu4):
        raise ContractError(f"trichotomy rates must satisfy nu1 < nu2 <= 0 <= nu3 < nu4, got {tuple(rates)}")


def check_trichotomy(sys: CocycleSpec, fam: ProjectorFamily, bounds: Sequence, rates: Sequence[float] = (0, 0, 0, 0),
                     grid: Grid | None = None, tol: float = DEFAULT_TOL, variant: str = "exponential",
                     enforce_ordering: bool = True) -> Certificate:
    """Exponential trichotomy (parts Pes, Qeis, Reg, Redc) or the plain variant.

    exponential, with bounds (N1..N4) and rates (nu1..nu4):
      Pes:  ||Phi(t)P1v|| <= N1(s) e^{nu1 (t-s)} ||Phi(s)P1v||
      Qeis: ||Phi(s)P2v|| e^{nu4 (t-s)} <= N4(t) ||Phi(t)P2v||
      Reg:  ||Phi(t)P3v|| <= N3(s) e^{nu3 (t-s)} ||Phi(s)P3v||
      Redc: ||Phi(s)P3v|| e^{nu2 (t-s)} <= N2(t) ||Phi(t)P3v||
    plain, with bounds (N1, N2, N3) all evaluated at t0 and ``rates`` ignored:
      t1: ||Phi(t)P1v|| <= N1 ||Phi(s)P1v||;  t2: ||Phi(s)P2v|| <= N2 ||Phi(t)P2v||
      t3: ||Phi(s)P3v|| <= N3 ||Phi(t)P3v|| <= N3^2 ||Phi(s)P3v||
    Here Phi(r) abbreviates Phi(r, t0, x).
    """
    grid = grid or Grid()
    if fam.count != 3:
        raise ContractError("trichotomy needs a family of three projectors")
    if variant not in ("exponential", "plain"):
        raise ContractError(f"unknown trichotomy variant {variant!r}")
    bounds = [as_bound(b) for b in bounds]
    extra = []
    if variant == "exponential":
        if len(bounds) != 4 or len(rates) != 4:
            raise ContractError("exponential trichotomy needs four bounds and four rates")
        if enforce_ordering:
            check_rate_ordering(rates)
        else:
            extra.append("rate ordering nu1 < nu2 <= 0 <= nu3 < nu4 not enforced")
    elif len(bounds) != 3:
        raise ContractError("plain trichotomy needs three bounds")
    constants = {f"N{i + 1}": b.describe() for i, b in enumerate(bounds)}
    if variant == "exponential":
        constants.update({f"nu{i + 1}": float(r) for i, r in enumerate(rates)})
    kind = "trichotomy" if variant == "exponential" else "trichotomy_plain"
    report = check_family(fam, sys, grid)
    if not report.passed:
        return _precondition_failure(kind, report, constants, grid, sys, tol)
    t, s, t0, v = sample(sys, grid)
    gap = _col(t - s)
    tracker = MarginTracker()
    for x in grid.points(sys.base):
        vs = [fam.at(k, x) @ v for k in (1, 2, 3)]
        lt = [log_norms(sys, t, t0, x, vk) for vk in vs]
        ls = [log_norms(sys, s, t0, x, vk) for vk in vs]
        add = lambda part, m: tracker.add(part, m, t, s, t0, x.offset)  # noqa: E731
        if variant == "exponential":
            nu1, nu2, nu3, nu4 = rates
            n1, n2, n3, n4 = bounds
            add("Pes", margin(lt[0], _col(n1.log_value(s)) + nu1 * gap + ls[0]))
            add("Qeis", margin(ls[1] + nu4 * gap, _col(n4.log_value(t)) + lt[1]))
            add("Reg", margin(lt[2], _col(n3.log_value(s)) + nu3 * gap + ls[2]))
            add("Redc", margin(ls[2] + nu2 * gap, _col(n2.log_value(t)) + lt[2]))
        else:
            l1, l2, l3 = (_col(b.log_value(t0)) for b in bounds)
            add("t1", margin(lt[0], l1 + ls[0]))
            add("t2", margin(ls[1], l2 + lt[1]))
            add("t3_lower", margin(ls[2], l3 + lt[2]))
            add("t3_upper", margin(l3 + lt[2], 2.0 * l3 + ls[2]))
    cert = tracker.certificate(kind, tol, constants, grid, hypotheses_for(sys, *extra))
    cert.precondition = report.to_dict()
    return cert
