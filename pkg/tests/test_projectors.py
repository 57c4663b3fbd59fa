import numpy as np
import pytest

from conftest import diag_exp
from skewflow.errors import ContractError
from skewflow.gallery import make_example
from skewflow.grid import Grid
from skewflow.projectors import ProjectorFamily, check_family

GRID = Grid(triple_count=40)


def test_coordinate_family_compatible():
    sys = diag_exp([1.0, -1.0, 0.0])
    assert check_family(ProjectorFamily.coordinate(3, [[1], [2], [3]]), sys, GRID).passed


def test_family_size_enforced():
    with pytest.raises(ContractError):
        ProjectorFamily.coordinate(2, [[1, 2]])


def test_non_idempotent_detected():
    fam = ProjectorFamily.constant([np.diag([2.0, 0.0]), np.diag([-1.0, 1.0])])
    rep = check_family(fam, diag_exp([1.0, 2.0]), GRID)
    assert not rep.passed and rep.idempotence >= 1.0
    assert rep.complementarity == pytest.approx(2.0)  # P1 P2 = diag(-2, 0)


def test_incomplete_detected():
    fam = ProjectorFamily.coordinate(3, [[1], [2]])
    rep = check_family(fam, diag_exp([1.0, 2.0, 3.0]), GRID)
    assert rep.complementarity == pytest.approx(1.0)
    assert rep.to_dict()["verdict"] == "fail"


def test_oblique_family_fails_commutation():
    p = np.array([[1.0, 1.0], [0.0, 0.0]])
    fam = ProjectorFamily.constant([p, np.eye(2) - p])
    rep = check_family(fam, diag_exp([1.0, -1.0]), GRID)
    assert rep.idempotence == 0.0 and rep.complementarity == 0.0
    assert rep.commutation > 1e-3 and rep.worst_point is not None


@pytest.mark.parametrize("gid", ["ex_nued", "ex_tri_anchored"])
def test_gallery_families(gid):
    entry = make_example(gid)
    assert check_family(entry.family, entry.system, GRID).passed


@pytest.mark.parametrize("lam", [-1.5, 0.0, 2.0])
def test_compliance_under_shift(lam):
    from skewflow.core import shift_cocycle

    good = ProjectorFamily.coordinate(2, [[1], [2]])
    sys = diag_exp([0.3, -0.4], log_rule=False)
    shifted = shift_cocycle(sys, lam)
    assert check_family(good, sys, GRID).commutation == check_family(good, shifted, GRID).commutation == 0.0
    # residuals are normalised by max(1, |Phi v|), so only the verdict is shift invariant here
    p = np.array([[1.0, 1.0], [0.0, 0.0]])
    oblique = ProjectorFamily.constant([p, np.eye(2) - p])
    assert not check_family(oblique, sys, GRID).passed and not check_family(oblique, shifted, GRID).passed


def test_constant_coordinate_residuals_exactly_zero():
    entry = make_example("ex_tri_anchored")
    rep = check_family(entry.family, entry.system, GRID)
    assert (rep.idempotence, rep.complementarity, rep.commutation) == (0.0, 0.0, 0.0)
