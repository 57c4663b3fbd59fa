"""Dispatch a compiled certification request to the matching check."""

from __future__ import annotations

from .certify import (
    DEFAULT_TOL,
    Certificate,
    check_backward_bound,
    check_dichotomy,
    check_forward_bound,
    check_trichotomy,
    integral_dichotomy,
    integral_trichotomy,
)
from .certify.checks import hypotheses_for
from .core import CocycleSpec, axiom_residuals
from .dsl.compile import CompiledRequest
from .errors import ContractError
from .grid import Grid
from .projectors import ProjectorFamily
from .quadrature import QuadParams

KINDS = ("forward", "backward", "dichotomy", "trichotomy", "trichotomy_plain",
         "integral_dichotomy", "integral_trichotomy", "axioms")


def _need(req: CompiledRequest, bounds=(), rates=()):
    missing = [b for b in bounds if b not in req.bounds] + [r for r in rates if r not in req.rates]
    if missing:
        raise ContractError(f"{req.kind} needs constants: {', '.join(missing)}")
    return [req.bounds[b] for b in bounds], [req.rates[r] for r in rates]


def _family(fam, kind):
    if fam is None:
        raise ContractError(f"{kind} needs a projector family")
    return fam


def certify_axioms(sys: CocycleSpec, grid: Grid, tol: float = DEFAULT_TOL) -> Certificate:
    res = axiom_residuals(sys, grid)
    worst = max(res["identity"], res["composition"])
    parts = {"identity": {"worst_violation": res["identity"]},
             "composition": {"worst_violation": res["composition"], "worst_point": res["worst_point"]}}
    notes = []
    if "as_printed" in sys.meta.get("flags", ()):
        notes.append("as_printed system: residuals are reported, not asserted")
    return Certificate("axioms", "pass" if worst <= tol else "fail", worst, res["worst_point"], tol, {},
                       grid.describe(), hypotheses_for(sys), parts, notes)


def run_request(sys: CocycleSpec, fam: ProjectorFamily | None, req: CompiledRequest, grid: Grid | None = None,
                quad: QuadParams = QuadParams(), tol: float = DEFAULT_TOL, flags=()) -> Certificate:
    grid = grid or Grid()
    kind = req.kind
    if kind == "forward":
        (n,), (rho,) = _need(req, ["N"], ["rho"])
        return check_forward_bound(sys, n, rho, grid, tol)
    if kind == "backward":
        (n,), (rho,) = _need(req, ["N"], ["rho"])
        return check_backward_bound(sys, n, rho, grid, tol)
    if kind == "dichotomy":
        (n1, n2), (nu1, nu2) = _need(req, ["N1", "N2"], ["nu1", "nu2"])
        return check_dichotomy(sys, _family(fam, kind), n1, n2, nu1, nu2, grid, tol)
    if kind == "trichotomy":
        bounds, rates = _need(req, ["N1", "N2", "N3", "N4"], ["nu1", "nu2", "nu3", "nu4"])
        return check_trichotomy(sys, _family(fam, kind), bounds, rates, grid, tol,
                                enforce_ordering="unordered_rates" not in flags)
    if kind == "trichotomy_plain":
        bounds, _ = _need(req, ["N1", "N2", "N3"])
        return check_trichotomy(sys, _family(fam, kind), bounds, grid=grid, tol=tol, variant="plain")
    if kind == "integral_dichotomy":
        (m1, m2), (alpha, beta) = _need(req, ["M1", "M2"], ["alpha", "beta"])
        return integral_dichotomy(sys, _family(fam, kind), alpha, beta, m1, m2, grid, quad, tol)
    if kind == "integral_trichotomy":
        bounds, (alpha, beta) = _need(req, ["Ntil", "Nbar", "Mtil", "Mbar", "gtil", "gbar"], ["alpha", "beta"])
        return integral_trichotomy(sys, _family(fam, kind), alpha, beta, *bounds, grid=grid, quad=quad, tol=tol)
    if kind == "axioms":
        return certify_axioms(sys, grid, tol)
    raise ContractError(f"unknown certification kind {kind!r}; expected one of {KINDS}")
