import pytest

from cproj.curvature import flatness
from cproj.errors import ManifestError, PreconditionError
from cproj.manifest import adapted, fixture, pseudo_hermitian_of
from cproj.pseudohermitian import (
    beltrami_check,
    beltrami_report,
    induced_checks,
    induced_structure,
    pseudo_hermitian,
    standard_j,
    tanaka_checks,
    tanaka_connection,
    webster_curvature,
)
from cproj.tensor import contract, identity, is_zero_array
from conftest import assert_passed

slow = pytest.mark.slow


def ph(name):
    return pseudo_hermitian_of(fixture(name))


@pytest.mark.parametrize("name", ["heis3", pytest.param("heis5", marks=slow)])
def test_heisenberg(name):
    p = ph(name)
    tanaka = tanaka_connection(p)
    assert tanaka.unique
    assert is_zero_array(tanaka.connection.gamma)
    assert tanaka.transverse_symmetry
    web = webster_curvature(p, tanaka)
    assert web.constant
    assert is_zero_array(web.R)
    assert flatness(induced_structure(p, tanaka)).flat


@pytest.mark.parametrize(
    "name,constant",
    [
        ("heis3", True),
        ("sphere3", True),
        ("pert3", False),
        pytest.param("pert5", False, marks=slow),
    ],
)
def test_beltrami(name, constant):
    p = ph(name)
    tanaka = tanaka_connection(p)
    assert webster_curvature(p, tanaka).constant == constant
    assert flatness(induced_structure(p, tanaka)).flat == constant
    assert_passed(beltrami_check(p, tanaka))


@pytest.mark.parametrize("name", ["sphere3", "pert3"])
def test_beltrami_report(name):
    report = beltrami_report(ph(name))
    assert_passed(report)
    assert "flat-iff-constant-curvature" in report
    assert report["cotton-from-ricci"].status == "info"


@pytest.mark.parametrize("name", ["heis3", "sphere3", "pert3"])
def test_tanaka(name):
    p = ph(name)
    tanaka = tanaka_connection(p)
    report = tanaka_checks(p, tanaka)
    assert_passed(report)
    assert tanaka.rank_without_j <= tanaka.rank
    assert report["rank-without-j-parallel"].status == "info"


@pytest.mark.parametrize("name", ["sphere3", "pert3"])
def test_induced_structure(name):
    assert_passed(induced_checks(ph(name)))


def test_invalid_j():
    frame, _ = adapted(fixture("heis3"))

    with pytest.raises(PreconditionError):
        pseudo_hermitian(frame, identity(frame.K, 2))


def test_standard_j_squares_to_minus_one():
    frame, _ = adapted(fixture("heis3"))
    p = pseudo_hermitian(frame, standard_j(frame.K, 2))
    assert is_zero_array(contract("ip,pj->ij", p.J, p.J) + identity(frame.K, 2))


def test_missing_block():
    with pytest.raises(ManifestError):
        ph("flat3")
