import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import diag_exp, scalar_exp
from skewflow.certify import (BoundSpec, Witness, check_backward_bound, check_dichotomy, check_forward_bound,
                              check_trichotomy, dichotomy_integral_constants, envelope_estimate,
                              estimate_exponent, integral_dichotomy, integral_trichotomy,
                              trichotomy_integral_constants, uniformity_probe)
from skewflow.certify.certificate import margin, rows_to_csv
from skewflow.certify.estimate import diverges
from skewflow.core import shift_cocycle
from skewflow.errors import ContractError, DomainError
from skewflow.grid import Grid
from skewflow.projectors import ProjectorFamily
from skewflow.quadrature import QuadParams

SMALL = Grid(triple_count=40)
TINY = Grid(triple_count=12, horizon=6.0)


# bounds

def test_bound_forms():
    assert float(BoundSpec.constant(2.0)(5.0)) == pytest.approx(2.0)
    assert float(BoundSpec.exponential(3.0, 0.5)(2.0)) == pytest.approx(3.0 * math.e)
    tab = BoundSpec.tabulated([(0, 1.0), (2, 4.0)])
    assert np.allclose(tab(np.array([0.0, 1.9, 2.0, 5.0])), [1.0, 1.0, 4.0, 4.0])
    assert float(BoundSpec.exponential(1.0, 2.0).scaled(0.5)(1.0)) == pytest.approx(0.5 * math.e ** 2)


def test_bound_log_value_never_overflows():
    assert float(BoundSpec.exponential(1.0, 6.0).log_value(200.0)) == pytest.approx(1200.0)


def test_bound_must_be_positive():
    with pytest.raises(ValueError):
        BoundSpec.constant(0.0)
    with pytest.raises(DomainError):
        BoundSpec.from_rule(lambda t: 1.0 - t, "1 - t").log_value(np.array([0.5, 2.0]))


# certificates

def test_certificate_json_is_strict_and_stable():
    cert = check_forward_bound(scalar_exp(-2.0), 1.0, -1.0, SMALL)
    text = cert.to_json(timestamp=False)
    out = json.loads(text)
    assert out["verdict"] == "pass" and "timestamp" not in out
    assert out["schema"].startswith("skewflow.certificate/")
    assert set(out) >= {"kind", "worst_violation", "worst_point", "tolerance", "constants", "grid", "hypotheses"}
    assert text == check_forward_bound(scalar_exp(-2.0), 1.0, -1.0, SMALL).to_json(timestamp=False)
    assert "timestamp" in cert.to_dict()


def test_certificate_handles_infinite_margin():
    sys = diag_exp([0.0, 0.0])
    fam = ProjectorFamily.constant([np.array([[1.0, 1.0], [0, 0]]), np.array([[0.0, -1.0], [0, 1]])])
    cert = check_dichotomy(sys, fam, 1, 1, 0, 0, SMALL)
    assert cert.verdict == "pass"  # oblique, but it commutes with the identity cocycle
    bad = check_dichotomy(diag_exp([1.0, -1.0]), fam, 1, 1, 1, 1, SMALL)
    assert bad.verdict == "fail" and bad.precondition["verdict"] == "fail"
    assert json.loads(bad.to_json(False))["worst_violation"] == "inf"


def test_margin_zero_lhs():
    assert margin(-np.inf, 0.0) == -np.inf
    assert np.isnan(margin(np.nan, 0.0))


def test_rows_to_csv():
    assert rows_to_csv([(1, 2.0, 1.0, 3.5)]) == "n,t,s,value\n1,2.0,1.0,3.5\n"


# scalar oracles

@given(st.floats(-3, 3), st.floats(-1.5, 1.5))
def test_forward_pass_iff_rho_dominates(a, delta):
    if abs(delta) < 1e-3:
        return
    cert = check_forward_bound(scalar_exp(a), 1.0, a + delta, TINY)
    assert cert.passed == (delta > 0)


@given(st.floats(-3, 3), st.floats(-1.5, 1.5))
def test_backward_pass_iff_rho_dominates(a, delta):
    if abs(delta) < 1e-3:
        return
    cert = check_backward_bound(scalar_exp(a), 1.0, -a + delta, TINY)
    assert cert.passed == (delta > 0)


def test_backward_equality_case():
    cert = check_backward_bound(scalar_exp(3.0), 1.0, -3.0, SMALL)
    assert cert.passed and abs(cert.worst_violation) < 1e-12


def test_forward_failure_reports_worst_point():
    cert = check_forward_bound(scalar_exp(-2.0), 1.0, -3.0, SMALL)
    assert not cert.passed
    pt = cert.worst_point
    assert cert.worst_violation == pytest.approx(pt["t"] - pt["s"], rel=1e-9)


# regime implications: relaxing a passed check keeps it passed

@given(st.lists(st.floats(-3, 3), min_size=1, max_size=3), st.floats(0, 2), st.floats(0, 2))
def test_forward_relaxation_monotone(rates, rho_up, n_up):
    sys = diag_exp(rates)
    rho = max(rates) - 0.5
    base = check_forward_bound(sys, 1.0, rho, TINY)
    relaxed = check_forward_bound(sys, 1.0 + n_up, rho + rho_up, TINY)
    assert relaxed.worst_violation <= base.worst_violation + 1e-12
    if base.passed and rho < 0:
        assert check_forward_bound(sys, 1.0, 0.0, TINY).passed


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=3), st.floats(0, 2))
def test_backward_relaxation_monotone(rates, rho_up):
    sys = diag_exp(rates)
    rho = -min(rates) + 0.25
    base = check_backward_bound(sys, 1.0, rho, TINY)
    assert check_backward_bound(sys, 1.0, rho + rho_up, TINY).worst_violation <= base.worst_violation + 1e-12


@given(st.floats(0.1, 3), st.floats(0.1, 3))
def test_exponential_dichotomy_implies_plain(a, b):
    sys = diag_exp([-a, b])
    fam = ProjectorFamily.coordinate(2, [[1], [2]])
    assert check_dichotomy(sys, fam, 1, 1, a, b, TINY).passed
    assert check_dichotomy(sys, fam, 1, 1, 0, 0, TINY).passed
    assert not check_dichotomy(sys, fam, 1, 1, a + 0.5, b, TINY).passed


def test_dichotomy_needs_two_projectors():
    with pytest.raises(ContractError):
        check_dichotomy(diag_exp([1, 2, 3]), ProjectorFamily.coordinate(3, [[1], [2], [3]]), 1, 1, 1, 1, TINY)


def test_trichotomy_diagonal_closed_form():
    sys = diag_exp([-2.0, 3.0, 0.0])
    fam = ProjectorFamily.coordinate(3, [[1], [2], [3]])
    ok = check_trichotomy(sys, fam, [1, 1, 1, 1], [-2.0, -0.0, 0.0, 3.0], SMALL)
    assert ok.passed and set(ok.parts) == {"Pes", "Qeis", "Reg", "Redc"}
    assert not check_trichotomy(sys, fam, [1, 1, 1, 1], [-2.5, 0.0, 0.0, 3.0], SMALL).passed
    plain = check_trichotomy(sys, fam, [1, 1, 1], grid=SMALL, variant="plain")
    assert plain.passed and plain.kind == "trichotomy_plain"


def test_trichotomy_rate_ordering():
    sys = diag_exp([-2.0, 3.0, 0.0])
    fam = ProjectorFamily.coordinate(3, [[1], [2], [3]])
    with pytest.raises(ContractError):
        check_trichotomy(sys, fam, [1, 1, 1, 1], [-1.0, -2.0, 0.0, 3.0], SMALL)
    cert = check_trichotomy(sys, fam, [1, 1, 1, 1], [-2.0, -2.0, 0.0, 3.0], SMALL, enforce_ordering=False)
    assert any("not enforced" in h for h in cert.hypotheses)


# integral forms

def test_integral_dichotomy_scalar_oracle():
    sys = diag_exp([-2.0, 2.0])
    fam = ProjectorFamily.coordinate(2, [[1], [2]])
    c = dichotomy_integral_constants(1.0, 2.0, 1.0, 2.0)
    assert (c.alpha, c.beta) == (1.0, 1.0)
    cert = integral_dichotomy(sys, fam, c.alpha, c.beta, c.m1, c.m2, SMALL)
    assert cert.passed and set(cert.parts) == {"ed1", "ed2"}
    # the supremum over t of the ed1 integral is 1/(nu - alpha) = 1
    assert not integral_dichotomy(sys, fam, 1.0, 1.0, 0.5, c.m2, SMALL).passed


def test_integral_rates_must_be_positive():
    fam = ProjectorFamily.coordinate(2, [[1], [2]])
    with pytest.raises(ContractError):
        integral_dichotomy(diag_exp([-1.0, 1.0]), fam, 0.0, 1.0, 1, 1, TINY)


def test_integral_trichotomy_diagonal():
    sys = diag_exp([-2.0, 2.0, 0.0])
    fam = ProjectorFamily.coordinate(3, [[1], [2], [3]])
    c = trichotomy_integral_constants([1, 1, 1, 1], [-2.0, 0.0, 0.0, 2.0])
    assert (c.alpha, c.beta) == (1.0, 1.0)
    cert = integral_trichotomy(sys, fam, *c.as_args(), grid=TINY)
    assert cert.passed and set(cert.parts) == {"et1", "et2", "et3", "et4"}


# exponent fits

@given(st.floats(-4, 4))
def test_fit_recovers_scalar_rate(a):
    fit = estimate_exponent(scalar_exp(-a), SMALL)
    assert fit.nu_hat == pytest.approx(a, abs=1e-6) and fit.r2 > 0.999 or a == pytest.approx(0, abs=1e-6)


@given(st.floats(-2, 2))
def test_fit_shift_covariance(lam):
    sys = diag_exp([-1.0, -3.0])
    base = estimate_exponent(sys, SMALL).nu_hat
    assert estimate_exponent(shift_cocycle(sys, lam), SMALL).nu_hat == pytest.approx(base + lam, abs=1e-9)


def test_fit_takes_slowest_direction():
    assert estimate_exponent(diag_exp([-1.0, -3.0]), SMALL).nu_hat == pytest.approx(1.0, abs=1e-9)
    assert estimate_exponent(diag_exp([1.0, 3.0]), SMALL, direction="backward").nu_hat == pytest.approx(1.0, abs=1e-9)


def test_fit_on_split():
    fam = ProjectorFamily.coordinate(2, [[1], [2]])
    fit = estimate_exponent(diag_exp([-1.0, -3.0]), SMALL, fam, 2)
    assert fit.nu_hat == pytest.approx(3.0, abs=1e-9)


def test_fit_needs_distinct_gaps():
    with pytest.raises(ContractError):
        estimate_exponent(scalar_exp(-1.0), Grid(explicit=((2.0, 1.0, 0.0),)))
    with pytest.raises(ContractError):
        estimate_exponent(scalar_exp(-1.0), SMALL, direction="sideways")


# witnesses and envelopes

def test_diverges_rule():
    assert diverges([0, 1, 2, 3, 7.0])
    assert not diverges([0, 1, 2, 3, 6.0])
    assert not diverges([0, 8, 7.5, 7.2])
    assert not diverges([10.0])


def test_probe_reproduces_closed_form():
    sys = scalar_exp(1.0)
    w = Witness(lambda n: (2.0 * n, float(n)), (1.0,), "stable", label="e^n")
    rep = uniformity_probe(sys, w, 8)
    assert np.allclose(rep.log_values, np.arange(1, 9), rtol=1e-14)
    assert rep.falsified and rep.verdict == "uniform bound falsified up to n=8"
    inv = uniformity_probe(sys, w, 8, mode="instable")
    assert not inv.falsified and inv.values[0] == pytest.approx(math.exp(-1))
    assert inv.to_csv().splitlines()[0] == "n,t,s,value"


def test_probe_truncates_on_collapse():
    w = Witness(lambda n: (n + 10.0 ** -n, float(n)), (1.0,), label="collapse")
    rep = uniformity_probe(scalar_exp(1.0), w, 30)
    assert rep.ns[-1] < 30 and "collapse" in rep.notes[0]


def test_envelope_of_growth():
    env = envelope_estimate(scalar_exp(2.0), "forward", [0.0, 1.0, 2.0], SMALL)
    assert np.allclose(env.values, [1.0, math.e ** 2, math.e ** 4])
    assert float(env(0.5)) == pytest.approx(math.e ** 2)
    with pytest.raises(ContractError):
        env(3.0)


def test_envelope_is_nondecreasing_and_at_least_one():
    env = envelope_estimate(scalar_exp(-2.0), "forward", [0.0, 0.5, 1.0, 4.0], SMALL)
    assert env.values == (1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ContractError):
        envelope_estimate(scalar_exp(-2.0), "forward", [1.0, 0.5], SMALL)


@given(st.floats(-2, 2), st.floats(-3, 1))
def test_forward_check_shift_covariant(lam, rho):
    sys = diag_exp([-1.0, 0.5])
    a = check_forward_bound(sys, 2.0, rho, TINY)
    b = check_forward_bound(shift_cocycle(sys, lam), 2.0, rho - lam, TINY)
    assert b.worst_violation == pytest.approx(a.worst_violation, abs=1e-9)
    assert a.passed == b.passed or abs(a.worst_violation) < 1e-8


@given(st.floats(0, 2))
def test_growth_transported_by_negative_shift(alpha):
    sys = diag_exp([0.4, -1.0])
    assert check_forward_bound(sys, 1.0, 0.4, TINY).passed
    assert check_forward_bound(shift_cocycle(sys, -alpha), 1.0, 0.4 + alpha, TINY).passed


@given(st.floats(0.2, 3), st.floats(0.2, 3))
def test_dichotomy_implies_integral_dichotomy(a, b):
    sys = diag_exp([-a, b])
    fam = ProjectorFamily.coordinate(2, [[1], [2]])
    assert check_dichotomy(sys, fam, 1.0, 1.0, a, b, TINY).passed
    c = dichotomy_integral_constants(1.0, a, 1.0, b)
    assert integral_dichotomy(sys, fam, c.alpha, c.beta, c.m1, c.m2, TINY, QuadParams(0.02)).passed


def test_quadrature_step_halving_moves_margin_within_error():
    sys = diag_exp([-1.0, 1.0])
    fam = ProjectorFamily.coordinate(2, [[1], [2]])
    grid = Grid(triple_count=6, horizon=5.0)
    coarse = integral_dichotomy(sys, fam, 0.5, 0.5, 2.0, 2.0, grid, QuadParams(0.02))
    fine = integral_dichotomy(sys, fam, 0.5, 0.5, 2.0, 2.0, grid, QuadParams(0.01))
    assert abs(coarse.worst_violation - fine.worst_violation) <= 1e-8
