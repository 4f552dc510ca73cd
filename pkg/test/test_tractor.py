import dataclasses

import numpy as np
import pytest

from cproj.errors import PreconditionError
from cproj.tensor import h_block, identity, is_zero_array
from cproj.tractor import (
    Density,
    KappaBlocks,
    algebra_basis,
    contact_hessian,
    del_star_kappa,
    g_zero,
    gauge_action,
    gauge_report,
    hessian_report,
    is_member,
    is_normal,
    k_membership,
    pairing,
    tractor_connection,
    tractor_curvature,
    tractor_report,
)
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
def test_tractor_report(name):
    assert_passed(tractor_report(structure(name)))


def test_tractor_connection_preserves_form():
    T = tractor_connection(structure("def3"))
    assert is_zero_array(T.omega_residual())


@pytest.mark.parametrize(
    "name,normal",
    [("def3", True), pytest.param("def5", True, marks=slow), pytest.param("tor5", False, marks=slow)],
)
def test_normality(name, normal):
    S = structure(name)
    assert is_normal(S) == normal


@pytest.mark.parametrize("name", ["flat3", "def3", pytest.param("tor5", marks=slow)])
def test_curvature_is_member(name):
    kappa = tractor_curvature(structure(name))
    assert_passed(k_membership(kappa))
    assert is_member(kappa)


def test_flat_curvature_vanishes():
    kappa = tractor_curvature(structure("flat3"))
    along_h, along_reeb = del_star_kappa(kappa)
    assert is_zero_array(along_h)
    assert is_zero_array(along_reeb)

    for kij in kappa.matrices():
        assert is_zero_array(kij)


def test_dual_basis():
    S = structure("flat3")
    basis = algebra_basis(h_block(S.frame.w))
    h = basis.lower.shape[0]
    K = S.K

    for i in range(h):
        for j in range(h):
            expected = K.one if i == j else K.zero
            assert pairing(basis.upper[i], basis.lower[j]) == expected

    assert pairing(basis.reeb_dual, basis.reeb) == K.one


def test_gauge_report():
    S = structure("def3")
    kappa = tractor_curvature(S)
    report = gauge_report(kappa, S.frame.chart, np.random.default_rng(0), trials=2)
    assert_passed(report)
    assert "membership-preserved-under-gauge@1" in report


@slow
def test_gauge_report_with_torsion():
    S = structure("tor5")
    kappa = tractor_curvature(S)
    assert_passed(gauge_report(kappa, S.frame.chart, np.random.default_rng(1), trials=5))


def test_identity_gauge():
    S = structure("def3")
    kappa = tractor_curvature(S)
    K = S.K
    h = kappa.h
    same = gauge_action(kappa, [K.zero] * h, K.zero, K.one, identity(K, h))

    for a, b in zip(same.matrices(), kappa.matrices()):
        assert is_zero_array(a - b)


def test_g_zero_preconditions():
    S = structure("flat3")
    K = S.K
    w_h = h_block(S.frame.w)

    with pytest.raises(PreconditionError):
        g_zero(K.zero, identity(K, 2), w_h)

    F = identity(K, 2)
    F[0, 0] = K(2)

    with pytest.raises(PreconditionError):
        g_zero(K.one, F, w_h)


@pytest.mark.parametrize("h", ["x1^2", "x2 + x0", "1 + x1*x2"])
def test_hessian(h):
    S = structure("def3")
    C = S.frame.chart
    report = hessian_report(S, Density(C.parse(h)), C.parse("1 + x1"))
    assert_passed(report)


@slow
@pytest.mark.parametrize("h", ["x1^2", "x2 + x0", "1 + x1*x3"])
def test_hessian_dimension_five(h):
    S = structure("def5")
    C = S.frame.chart
    assert_passed(hessian_report(S, Density(C.parse(h)), C.parse("1 + x1")))


def test_contact_hessian_needs_weight_one():
    S = structure("flat3")

    with pytest.raises(PreconditionError):
        contact_hessian(S, Density(S.frame.chart.parse("x1"), weight=2))


def test_contact_hessian_flat_linear():
    S = structure("flat3")
    C = S.frame.chart
    L = contact_hessian(S, Density(C.parse("x1")))
    assert is_zero_array(L)


def test_gauge_membership_skipped_outside_k():
    S = structure("def3")
    kappa = tractor_curvature(S)
    blocks = {f.name: getattr(kappa, f.name) for f in dataclasses.fields(kappa)}
    blocks["a"] = kappa.a + kappa.w
    outside = KappaBlocks(**blocks)
    assert not is_member(outside)

    report = gauge_report(outside, S.frame.chart, np.random.default_rng(0))
    assert report["membership-preserved@0"].status == "skipped"
    assert report["membership-preserved-under-gauge@0"].status == "skipped"
