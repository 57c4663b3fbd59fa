import math

import numpy as np
import pytest

from skewflow.certify import uniformity_probe
from skewflow.errors import ContractError
from skewflow.gallery import IDS, describe, dip_time, export_source, make_example, nues_nodes
from skewflow.grid import Grid
from skewflow.runner import run_request

GRID = Grid()


def run(entry, kind, which="stated", grid=GRID):
    return run_request(entry.system, entry.family, entry.compile(entry.request(kind, which)), grid,
                       flags=entry.flags)


def test_ids_and_unknown():
    assert len(IDS) == 6
    with pytest.raises(ContractError):
        make_example("ex_nope")
    with pytest.raises(ContractError):
        make_example("ex_nued", alpha=(1.0,))


def test_dip_times():
    assert dip_time(0) == 1.0 and dip_time(3) == 3.0 + math.exp(-9)
    t, v = zip(*nues_nodes(1))
    assert all(b > a for a, b in zip(t, t[1:])) and min(v) > 0 and t[-1] == 200


def test_ses_stated_bounds_pass():
    entry = make_example("ex_ses")
    for kind in ("forward", "backward"):
        assert run(entry, kind).passed


def test_ses_parametrised():
    entry = make_example("ex_ses", alpha=(-1.0, -2.0), l=0.5)
    assert entry.system.dim == 2
    assert run(entry, "forward").passed
    assert entry.metadata["l"] == 0.5


def test_ses_entry_closed_form():
    # int_s^t x(tau - s) dtau for x = e^-tau + 1 is (t - s) + 1 - e^{-(t-s)}
    entry = make_example("ex_ses")
    t, s = 3.0, 1.0
    m = entry.system.matrix(np.array(t), np.array(s), entry.system.base)
    j = (t - s) + 1 - math.exp(-(t - s))
    assert m[0, 0] == pytest.approx(math.exp(j), rel=1e-10)
    assert m[1, 1] == pytest.approx(math.exp(-j), rel=1e-10)


def test_nues1_forward_and_witness():
    entry = make_example("ex_nues1")
    assert run(entry, "forward").passed
    rep = uniformity_probe(entry.system, entry.witnesses[0], 5)
    closed = entry.witnesses[0].closed_form
    for n, v in zip(rep.ns, rep.values):
        assert v == pytest.approx(closed(n), rel=1e-9)
    assert rep.falsified


def test_nues2_backward_and_witness():
    entry = make_example("ex_nues2")
    assert run(entry, "backward").passed
    rep = uniformity_probe(entry.system, entry.witnesses[0], 3)
    for n, v in zip(rep.ns, rep.values):
        assert v == pytest.approx(1 / math.exp(-2 * n + math.exp(-n * n)), rel=1e-9)  # instable mode


def test_nues_dips_collapse_in_floating_point():
    entry = make_example("ex_nues1")
    rep = uniformity_probe(entry.system, entry.witnesses[0], 30)
    assert rep.ns[-1] == 5 and "collapse" in rep.notes[0]


def test_nued_stated_passes_on_default_grid():
    assert run(make_example("ex_nued"), "dichotomy").passed


def test_nued_stated_fails_at_explicit_point():
    # at (t, s, t0) = (pi/2, 0, 0) the stable exponent pi/2 - pi exceeds -2 (t - s) by pi/2
    entry = make_example("ex_nued")
    cert = run(entry, "dichotomy", grid=Grid(explicit=((math.pi / 2, 0.0, 0.0),)))
    assert not cert.passed
    assert cert.parts["stable"]["worst_violation"] == pytest.approx(math.pi / 2, rel=1e-12)


def test_nued_derived_passes():
    entry = make_example("ex_nued")
    assert run(entry, "dichotomy", "derived").passed
    assert run(entry, "dichotomy", "derived", Grid(explicit=((math.pi / 2, 0.0, 0.0),))).passed


def test_nued_witnesses():
    entry = make_example("ex_nued")
    stable, stated, extra = (uniformity_probe(entry.system, w, 4) for w in entry.witnesses)
    for w, rep in zip(entry.witnesses, (stable, stated, extra)):
        for n, lv in zip(rep.ns, rep.log_values):
            assert lv == pytest.approx(math.log(w.closed_form(n)), rel=1e-12)
    assert stable.falsified and extra.falsified and not stated.falsified


def test_tri_anchored_derived_trichotomy():
    entry = make_example("ex_tri_anchored")
    assert run(entry, "trichotomy", "derived").passed
    assert run(entry, "axioms").passed


def test_tri_as_printed_flags():
    entry = make_example("ex_tri")
    assert entry.flags == {"as_printed", "unordered_rates"}
    cert = run(entry, "trichotomy")
    assert cert.parts["Pes"]["worst_violation"] <= 1e-9
    assert cert.parts["Qeis"]["worst_violation"] > 1.0  # N4 = e^{-l t} < 1
    axioms = run(entry, "axioms")
    assert not axioms.passed and any("as_printed" in n for n in axioms.notes)


@pytest.mark.parametrize("gid", IDS)
def test_export_and_describe(gid):
    entry = make_example(gid)
    text = export_source(entry)
    assert text.startswith(f"# {gid}\n") and f"dim {entry.system.dim}" in text
    info = describe(entry)
    assert info["id"] == gid and info["dim"] == entry.system.dim


def test_ses_contracting_forward_rate():
    # alpha_i < 0 with int_s^t x >= l (t - s) gives rho = max(alpha) * l / 2 with room to spare
    entry = make_example("ex_ses", alpha=(-1.0, -3.0))
    req = entry.compile(entry.request("forward"))
    assert req.rates["rho"] == -0.5
    assert run_request(entry.system, None, req, GRID).passed
