"""Integral characterisations of dichotomy and trichotomy.

Integrals are taken with the Simpson/Richardson engine in log space; the
error estimate is added to the integral before comparing, so a pass means the
inequality holds even with the quadrature error pushed against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import CocycleSpec, log_dual_norms, log_norms
from ..errors import ContractError
from ..grid import Grid
from ..projectors import ProjectorFamily, check_family
from ..quadrature import QuadParams, integrate_log_samples, nodes
from ..signal_space import translate
from .bounds import BoundSpec, as_bound
from .certificate import Certificate, MarginTracker, margin
from .checks import DEFAULT_TOL, _col, _precondition_failure, hypotheses_for, sample


def _upper(log_value, log_error):
    return np.logaddexp(log_value, log_error)


def _positive_rates(**rates):
    for name, value in rates.items():
        if not value > 0:
            raise ContractError(f"{name} must be positive, got {value!r}")


def integral_dichotomy(sys: CocycleSpec, fam: ProjectorFamily, alpha: float, beta: float, m1, m2,
                       grid: Grid | None = None, quad: QuadParams = QuadParams(),
                       tol: float = DEFAULT_TOL) -> Certificate:
    """(ed1) int_{t0}^{t} e^{alpha (tau-t0)} ||Phi(tau,t0,x)P1 v|| dtau <= M1(t0) ||P1 v||
    (ed2) int_{t0}^{t} e^{beta (t-tau)} ||Phi(tau,t0,x)P2 v|| dtau <= M2(t) ||Phi(t,t0,x)P2 v||
    """
    _positive_rates(alpha=alpha, beta=beta)
    grid = grid or Grid()
    m1, m2 = as_bound(m1), as_bound(m2)
    constants = {"alpha": float(alpha), "beta": float(beta), "M1": m1.describe(), "M2": m2.describe(),
                 "quad_step": quad.step}
    report = check_family(fam, sys, grid)
    if not report.passed:
        return _precondition_failure("integral_dichotomy", report, constants, grid, sys, tol)
    t, s, t0, v = sample(sys, grid)
    tracker = MarginTracker()
    log_m1, log_m2 = m1.log_value(t0), m2.log_value(t)
    for x in grid.points(sys.base):
        v1, v2 = fam.at(1, x) @ v, fam.at(2, x) @ v
        with np.errstate(divide="ignore"):
            log_p1v = np.log(np.sum(np.abs(v1), axis=0))
        log_end = log_norms(sys, t, t0, x, v2)
        for i in range(t.size):
            tau, h, n = nodes(t0[i], t[i], quad.step)
            l1 = alpha * (tau - t0[i])[:, None] + log_norms(sys, tau, t0[i], x, v1)
            l2 = beta * (t[i] - tau)[:, None] + log_norms(sys, tau, t0[i], x, v2)
            i1 = _upper(*integrate_log_samples(l1.T, h, n))
            i2 = _upper(*integrate_log_samples(l2.T, h, n))
            tracker.add("ed1", margin(i1, log_m1[i] + log_p1v)[None], t[i], s[i], t0[i], x.offset)
            tracker.add("ed2", margin(i2, log_m2[i] + log_end[i])[None], t[i], s[i], t0[i], x.offset)
    cert = tracker.certificate("integral_dichotomy", tol, constants, grid,
                               hypotheses_for(sys, "C1 exponential growth and C2 exponential decay assumed"))
    cert.precondition = report.to_dict()
    return cert


def integral_trichotomy(sys: CocycleSpec, fam: ProjectorFamily, alpha: float, beta: float,
                        n_tilde, n_bar, m_tilde, m_bar, g_tilde, g_bar,
                        grid: Grid | None = None, quad: QuadParams = QuadParams(),
                        tol: float = DEFAULT_TOL) -> Certificate:
    """(et1) int_{t0}^{t} e^{alpha (t-s)} ||Phi(t,s,phi(s,t0,x))^T P1(x)^T w||_inf ds <= Ntil(t0) ||P1(x)^T w||_inf
    (et2) int_{t0}^{t} e^{-beta (s-t0)} ||Phi(s,t0,x)P2 v|| ds <= Nbar(t) e^{-beta (t-t0)} ||Phi(t,t0,x)P2 v||
    (et3) ||Phi(t,t0,x)P3 v|| <= Mtil(s) gtil(t-s) ||Phi(s,t0,x)P3 v||
    (et4) ||Phi(s,t0,x)P3 v|| <= Mbar(t) gbar(t-s) ||Phi(t,t0,x)P3 v||

    Dual probes w have sup-norm 1.  The (et2) integral starts at t0.
    """
    _positive_rates(alpha=alpha, beta=beta)
    grid = grid or Grid()
    n_tilde, n_bar, m_tilde, m_bar, g_tilde, g_bar = map(as_bound, (n_tilde, n_bar, m_tilde, m_bar, g_tilde, g_bar))
    constants = {"alpha": float(alpha), "beta": float(beta), "Ntil": n_tilde.describe(), "Nbar": n_bar.describe(),
                 "Mtil": m_tilde.describe(), "Mbar": m_bar.describe(), "gtil": g_tilde.describe(),
                 "gbar": g_bar.describe(), "quad_step": quad.step, "et2_lower_limit": "t0"}
    report = check_family(fam, sys, grid)
    if not report.passed:
        return _precondition_failure("integral_trichotomy", report, constants, grid, sys, tol)
    t, s, t0, v = sample(sys, grid)
    w = grid.dual_probes(sys.dim)
    gap = t - s
    tracker = MarginTracker()
    log_nt, log_nb = n_tilde.log_value(t0), n_bar.log_value(t)
    for x in grid.points(sys.base):
        p1t = fam.at(1, x).T
        w1 = p1t @ w
        with np.errstate(divide="ignore"):
            log_w1 = np.log(np.max(np.abs(w1), axis=0))
        v2, v3 = fam.at(2, x) @ v, fam.at(3, x) @ v
        lt2 = log_norms(sys, t, t0, x, v2)
        for i in range(t.size):
            r, h, n = nodes(t0[i], t[i], quad.step)
            moved = translate(x, r - t0[i])
            l1 = alpha * (t[i] - r)[:, None] + log_dual_norms(sys, np.full_like(r, t[i]), r, moved, w1)
            i1 = _upper(*integrate_log_samples(l1.T, h, n))
            tracker.add("et1", margin(i1, log_nt[i] + log_w1)[None], t[i], s[i], t0[i], x.offset)
            l2 = -beta * (r - t0[i])[:, None] + log_norms(sys, r, t0[i], x, v2)
            i2 = _upper(*integrate_log_samples(l2.T, h, n))
            rhs2 = log_nb[i] - beta * (t[i] - t0[i]) + lt2[i]
            tracker.add("et2", margin(i2, rhs2)[None], t[i], s[i], t0[i], x.offset)
        lt3, ls3 = log_norms(sys, t, t0, x, v3), log_norms(sys, s, t0, x, v3)
        tracker.add("et3", margin(lt3, _col(m_tilde.log_value(s) + g_tilde.log_value(gap)) + ls3), t, s, t0, x.offset)
        tracker.add("et4", margin(ls3, _col(m_bar.log_value(t) + g_bar.log_value(gap)) + lt3), t, s, t0, x.offset)
    cert = tracker.certificate("integral_trichotomy", tol, constants, grid,
                               hypotheses_for(sys, "(et2) integrated from t0 to t",
                                              "C1 exponential growth, *-strong measurability assumed",
                                              "C2 exponential decay, strong measurability assumed"))
    cert.precondition = report.to_dict()
    return cert


@dataclass(frozen=True)
class DichotomyIntegralConstants:
    alpha: float
    beta: float
    m1: BoundSpec
    m2: BoundSpec


def dichotomy_integral_constants(n1, nu1: float, n2, nu2: float) -> DichotomyIntegralConstants:
    """alpha = nu1/2, beta = nu2/2, M1 = N1/alpha, M2 = N2/beta."""
    _positive_rates(nu1=nu1, nu2=nu2)
    alpha, beta = nu1 / 2.0, nu2 / 2.0
    return DichotomyIntegralConstants(alpha, beta, as_bound(n1).scaled(1 / alpha), as_bound(n2).scaled(1 / beta))


@dataclass(frozen=True)
class TrichotomyIntegralConstants:
    alpha: float
    beta: float
    n_tilde: BoundSpec
    n_bar: BoundSpec
    m_tilde: BoundSpec
    m_bar: BoundSpec
    g_tilde: BoundSpec
    g_bar: BoundSpec

    def as_args(self) -> tuple:
        return (self.alpha, self.beta, self.n_tilde, self.n_bar, self.m_tilde, self.m_bar, self.g_tilde, self.g_bar)


def trichotomy_integral_constants(bounds, rates) -> TrichotomyIntegralConstants:
    """Constants for (et1)-(et4) built from trichotomic characteristics.

    alpha = -nu1/2 and Ntil = 2 N1 / |nu1|; beta = nu4/2 and Nbar = N4 / beta
    (the instability branch on P2); Mtil = N3, gtil(u) = e^{nu3 u};
    Mbar = N2, gbar(u) = e^{-nu2 u}.
    """
    n1, n2, n3, n4 = map(as_bound, bounds)
    nu1, nu2, nu3, nu4 = (float(r) for r in rates)
    if not nu1 < 0 or not nu4 > 0:
        raise ContractError("need nu1 < 0 and nu4 > 0 to build integral constants")
    alpha, beta = -nu1 / 2.0, nu4 / 2.0
    return TrichotomyIntegralConstants(
        alpha, beta, n1.scaled(2.0 / abs(nu1)), n4.scaled(1.0 / beta), n3, n2,
        BoundSpec.exponential(1.0, nu3), BoundSpec.exponential(1.0, -nu2))
