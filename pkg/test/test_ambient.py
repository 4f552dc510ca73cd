import pytest

from cproj.ambient import (
    ambient_connection,
    ambient_curvature_blocks,
    perturbed,
    vanishing_torsion_identities,
    verify_ambient_axioms,
)
from cproj.errors import PreconditionError
from cproj.tensor import is_zero_array
from conftest import assert_passed, structure

slow = pytest.mark.slow


@pytest.mark.parametrize(
    "name",
    [
        "flat3",
        "def3",
        pytest.param("flat5", marks=slow),
        pytest.param("def5", marks=slow),
        pytest.param("tor5", marks=slow),
    ],
)
def test_ambient_axioms(name):
    S = structure(name)
    A = ambient_connection(S)
    R = A.curvature()
    assert_passed(verify_ambient_axioms(A, R))
    assert_passed(ambient_curvature_blocks(S, A, R=R))


@pytest.mark.parametrize("name", ["def3", pytest.param("def5", marks=slow)])
def test_torsion_free_ambient(name):
    S = structure(name)
    A = ambient_connection(S)
    report = ambient_curvature_blocks(S, A)
    assert report["torsion-free-ambient"].status == "pass"
    assert_passed(report)
    assert is_zero_array(A.torsion)


@pytest.mark.parametrize(
    "which,index,axiom",
    [
        ("P", (0, 0), "ricci-flat"),
        ("P", (0, 1), "omega-parallel"),
        ("O", (1, 1, 1), "projected-same-geodesics"),
    ],
)
def test_perturbation_breaks_axioms(which, index, axiom):
    A = ambient_connection(structure("flat3"))
    report = verify_ambient_axioms(perturbed(A, which, index))
    assert report[axiom].failed


def test_perturbed_unknown_component():
    A = ambient_connection(structure("flat3"))

    with pytest.raises(NotImplementedError):
        perturbed(A, "Q", (0, 0))


@pytest.mark.parametrize("name", ["flat3", "def3", pytest.param("def5", marks=slow)])
def test_vanishing_torsion_identities(name):
    assert_passed(vanishing_torsion_identities(structure(name)))


@slow
def test_vanishing_torsion_identities_need_torsion_free():
    with pytest.raises(PreconditionError):
        vanishing_torsion_identities(structure("tor5"))
