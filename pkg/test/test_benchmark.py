import pytest

from cproj.ambient import ambient_connection
from cproj.curvature import invariant_tensors
from cproj.manifest import build_structure, fixture
from cproj.structure import canonicalize
from conftest import structure


@pytest.mark.parametrize("name", ["def3", "pert3"])
def test_build_structure(name, benchmark):
    manifest = fixture(name)
    benchmark(build_structure, manifest)


@pytest.mark.parametrize("name", ["def3", pytest.param("def5", marks=pytest.mark.slow)])
def test_canonicalize(name, benchmark):
    S = structure(name)
    benchmark(canonicalize, S.canonical, S.frame)


@pytest.mark.parametrize("name", ["def3", pytest.param("tor5", marks=pytest.mark.slow)])
def test_invariant_tensors(name, benchmark):
    benchmark(invariant_tensors, structure(name))


@pytest.mark.parametrize("name", ["def3", pytest.param("def5", marks=pytest.mark.slow)])
def test_ambient_curvature(name, benchmark):
    A = ambient_connection(structure(name))
    benchmark(A.curvature)
