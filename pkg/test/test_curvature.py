import numpy as np
import pytest

from cproj.curvature import (
    bianchi_suite,
    cotton_weyl_relation,
    curvature_difference_check,
    flatness,
    flatness_report,
    invariant_tensors,
    ricci_identity_check,
    scale_covariance_check,
)
from cproj.errors import PreconditionError
from cproj.structure import flat_structure
from cproj.tensor import antisymmetrize, is_zero_array, zeros
from conftest import assert_passed, structure

slow = pytest.mark.slow


@pytest.mark.parametrize(
    "name", ["flat3", "def3", pytest.param("def5", marks=slow), pytest.param("tor5", marks=slow)]
)
def test_bianchi(name):
    S = structure(name)
    assert_passed(bianchi_suite(S))


@pytest.mark.parametrize(
    "name,flat,obstructions",
    [
        ("flat3", True, ()),
        ("def3", False, ("cotton",)),
        pytest.param("flat5", True, (), marks=slow),
        pytest.param("def5", False, ("weyl",), marks=slow),
        pytest.param("tor5", False, ("torsion",), marks=slow),
    ],
)
def test_flatness(name, flat, obstructions):
    result = flatness(structure(name))
    assert result.flat == flat
    assert set(obstructions) <= set(result.obstructions)
    assert_passed(flatness_report(structure(name)))


def test_flat_model_tensors_vanish():
    data = invariant_tensors(flat_structure(2))

    for T in (data.R, data.P, data.Q, data.W, data.C):
        assert is_zero_array(T)


@pytest.mark.parametrize("factor", ["2", "1 + x1"])
def test_scale_covariance_dimension_three(factor):
    S = structure("def3")
    f = S.frame.chart.parse(factor)
    assert_passed(scale_covariance_check(S, f))


@slow
def test_scale_covariance_with_torsion():
    S = structure("tor5")
    f = S.frame.chart.parse("1 + x1")
    assert_passed(scale_covariance_check(S, f))


@slow
def test_weyl_invariance():
    S = structure("def5")
    report = scale_covariance_check(S, S.frame.chart.parse("1 + x1"))
    assert not report["weyl-scale-law"].failed


@pytest.mark.parametrize("name", ["def3", pytest.param("def5", marks=slow)])
def test_cotton_weyl(name):
    assert_passed(cotton_weyl_relation(structure(name)))


@slow
def test_cotton_weyl_needs_torsion_free():
    with pytest.raises(PreconditionError):
        cotton_weyl_relation(structure("tor5"))


def test_skew_q_is_skew_p():
    data = invariant_tensors(structure("def3"))
    assert is_zero_array(antisymmetrize(data.Q, (0, 1)) + antisymmetrize(data.P, (0, 1)) * 2)


def test_ricci_identity():
    S = structure("def3")
    C = S.frame.chart
    x = C.gens
    sigma = np.array([C.zero, x[1] * x[2], C.one + x[0]], dtype=object)
    check = ricci_identity_check(S.canonical, sigma, "d")
    assert not check.failed


def test_curvature_difference():
    S = structure("def3")
    K = S.K
    lam = zeros(K, (3, 3, 3))
    lam[1, 1, 2] = S.frame.chart.gens[1]
    check = curvature_difference_check(S.canonical, S.canonical.deformed(lam))
    assert not check.failed
