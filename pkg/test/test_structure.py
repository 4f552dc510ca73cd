import numpy as np
import pytest

from cproj.errors import PreconditionError, RepresentativeError
from cproj.geometry import FrameConnection, flat_model
from cproj.manifest import fixture, torsion_tensor
from cproj.curvature import invariant_tensors
from cproj.scalar import chart, random_polynomial
from cproj.structure import (
    ContactProjectiveStructure,
    admits_contact_geodesics,
    canonical_report,
    canonicalize,
    contact_torsion,
    covariant_derivative_scale_check,
    decompose_difference,
    deform,
    flat_structure,
    lowered,
    random_symmetric_deformation,
    same_contact_geodesics,
    torsion_identities,
    torsion_prescription,
    torsion_scale_check,
    verify_canonical_conditions,
)
from cproj.tensor import h_block, is_zero_array, symmetric_tensor, zeros
from conftest import assert_passed, structure


def random_connection(n: int, seed: int, degree: int = 2) -> FrameConnection:
    """Flat model frame with random coefficients admitting contact geodesics"""
    _, frame, _ = flat_model(n)
    C = frame.chart
    rng = np.random.default_rng(seed)
    m = C.dim
    gamma = zeros(C.K, (m, m, m))

    for _ in range(4):
        a, b, c = (int(i) for i in rng.integers(0, m, size=3))
        gamma[a, b, c] = random_polynomial(C, degree, rng)

    # keep nabla_(i theta_j) = 0
    gamma[1:, 1:, 0] = gamma[1:, 1:, 0] - gamma[1:, 1:, 0].T
    return FrameConnection(frame, gamma)


@pytest.mark.parametrize(
    "name",
    ["flat3", "def3", pytest.param("flat5", marks=pytest.mark.slow),
     pytest.param("def5", marks=pytest.mark.slow), pytest.param("tor5", marks=pytest.mark.slow)],
)
def test_fixture_is_canonical(name):
    S = structure(name)
    assert_passed(canonical_report(S.canonical, S.frame))


@pytest.mark.parametrize(
    "n,seed",
    [(2, 0), (2, 1), (2, 2), pytest.param(3, 3, marks=pytest.mark.slow)],
)
def test_canonicalize_random(n, seed):
    conn = random_connection(n, seed)
    assert admits_contact_geodesics(conn)
    report = canonical_report(conn)
    assert_passed(report)
    assert "idempotent" in report


def test_canonicalize_flat_is_identity():
    _, frame, conn = flat_model(2)
    assert is_zero_array(canonicalize(conn).gamma - conn.gamma)
    assert_passed(verify_canonical_conditions(conn))


def test_no_contact_geodesics():
    _, frame, conn = flat_model(2)
    gamma = conn.gamma.copy()
    gamma[1, 1, 0] = frame.K.one
    bad = FrameConnection(frame, gamma)
    assert not admits_contact_geodesics(bad)

    with pytest.raises(RepresentativeError):
        canonicalize(bad)


def test_same_contact_geodesics():
    _, frame, conn = flat_model(2)
    K = frame.K
    # delta_i^k sigma_j + delta_j^k sigma_i with sigma = (1, 0)
    lam = zeros(K, (3, 3, 3))
    lam[1, 1, 1] = K(2)
    lam[1, 2, 2] = lam[2, 1, 2] = K.one
    assert same_contact_geodesics(lam, 2)

    lam = zeros(K, (3, 3, 3))
    lam[1, 1, 1] = K.one
    assert not same_contact_geodesics(lam, 2)

    lam = zeros(K, (3, 3, 3))
    lam[1, 1, 0] = K.one
    assert not same_contact_geodesics(lam, 2)


@pytest.mark.parametrize("seed", range(5))
def test_dimension_three_vanishing(seed):
    C = chart(2)
    rng = np.random.default_rng(seed)
    S = deform(flat_structure(2), random_symmetric_deformation(C, rng, degree=2))
    assert is_zero_array(contact_torsion(S))
    assert is_zero_array(invariant_tensors(S).W)


def test_deformation_preconditions():
    S = flat_structure(3)
    P = zeros(S.K, (4, 4, 4))
    P[0, 0, 2] = S.K.one

    with pytest.raises(PreconditionError):
        deform(S, P)


def test_torsion_prescription_needs_skew():
    S = flat_structure(3)
    tau = zeros(S.K, (4, 4, 4))
    tau[0, 1, 0] = S.K.one

    with pytest.raises(PreconditionError):
        torsion_prescription(tau, S.frame)


def test_decompose_difference():
    S = flat_structure(3)
    K = S.K
    x = S.frame.chart.gens
    A = symmetric_tensor(K, (4, 4, 4), {(0, 0, 0): K.one + x[2] ** 2})
    tau = torsion_tensor(fixture("tor5"))
    B = torsion_prescription(tau, S.frame)
    A_part, B_part = decompose_difference(A + B, S.frame)
    assert is_zero_array(A_part - A)
    assert is_zero_array(B_part - B)


@pytest.mark.slow
def test_prescribed_torsion():
    S = structure("tor5")
    tau = torsion_tensor(fixture("tor5"))
    assert is_zero_array(h_block(lowered(S.torsion, S.frame)) - tau)
    assert_passed(torsion_identities(S))


def test_symmetric_deformation_is_torsion_free():
    S = structure("def3")
    assert is_zero_array(contact_torsion(S))


@pytest.mark.slow
@pytest.mark.parametrize("factor", ["2", "1 + x1", "1 + x1*x2"])
def test_torsion_scale_invariance(factor):
    S = structure("tor5")
    f = S.frame.chart.parse(factor)
    assert_passed(torsion_scale_check(S, f))


@pytest.mark.parametrize("factor", ["2", "1 + x1"])
def test_one_form_scale_law(factor):
    S = structure("def3")
    f = S.frame.chart.parse(factor)
    sigma = np.array(S.frame.chart.gens, dtype=object)
    assert_passed(covariant_derivative_scale_check(S, f, sigma))


def test_structure_fields():
    S = flat_structure(2)
    assert isinstance(S, ContactProjectiveStructure)
    assert S.n == 2
    assert is_zero_array(S.torsion[1:, 1:, 0] - h_block(S.frame.w))
