import pytest

from cproj.ambient import ambient_coefficients, ambient_connection
from cproj.curvature import flatness
from cproj.errors import PreconditionError
from cproj.geometry import FrameConnection, coordinate_frame, flat_model
from cproj.projective import (
    adapted_symplectic_representative,
    flat_affine,
    projective_residual,
    subordinate_report,
    symplectic_lift,
    symplectic_lift_report,
    thomas_ambient,
    thomas_comparison,
    thomas_report,
    volume_parallel,
)
from cproj.scalar import euclidean_chart, symplectic_chart
from cproj.structure import difference_tensor, same_contact_geodesics
from cproj.tensor import const, identity, is_zero_array, zeros
from conftest import assert_passed, structure

slow = pytest.mark.slow


def curved_affine(k: int = 1) -> FrameConnection:
    C = symplectic_chart(k)
    x = C.gens
    gamma = zeros(C.K, (2 * k,) * 3)
    gamma[0, 0, 1] = x[0] * x[1]
    gamma[0, 1, 0] = gamma[1, 0, 0] = x[1]
    return FrameConnection(coordinate_frame(C), gamma)


@pytest.mark.parametrize(
    "name", ["def3", pytest.param("def5", marks=slow), pytest.param("tor5", marks=slow)]
)
def test_subordinate(name):
    S = structure(name)
    assert_passed(subordinate_report(S, ambient_connection(S)))


@pytest.mark.parametrize("name", ["flat3", "def3", pytest.param("def5", marks=slow)])
def test_thomas_equals_ambient(name):
    report = thomas_comparison(structure(name))
    assert "thomas-equals-ambient" in report
    assert_passed(report)


@slow
def test_thomas_comparison_skipped_with_torsion():
    report = thomas_comparison(structure("tor5"))
    assert report["thomas-equals-ambient"].status == "skipped"


def test_thomas_report_flat():
    conn = flat_affine(symplectic_chart(1))
    assert_passed(thomas_report(conn))
    K = conn.K
    expected = ambient_coefficients(zeros(K, (2, 2, 2)), zeros(K, (2, 2)))
    assert is_zero_array(thomas_ambient(conn).gamma - expected)


def test_thomas_ambient_needs_volume():
    C = symplectic_chart(1)
    gamma = zeros(C.K, (2, 2, 2))
    gamma[0, 0, 0] = C.gens[0]
    conn = FrameConnection(coordinate_frame(C), gamma)
    assert not volume_parallel(conn)

    with pytest.raises(PreconditionError):
        thomas_ambient(conn)


def test_thomas_ambient_needs_torsion_free():
    C = symplectic_chart(1)
    gamma = zeros(C.K, (2, 2, 2))
    gamma[0, 1, 0] = C.one
    conn = FrameConnection(coordinate_frame(C), gamma)

    with pytest.raises(PreconditionError):
        thomas_ambient(conn)


def test_symplectic_lift_of_flat_affine():
    conn = flat_affine(symplectic_chart(1))
    assert_passed(symplectic_lift_report(conn))
    lifted = symplectic_lift(conn)
    form, frame, flat = flat_model(2)
    assert is_zero_array(lifted.frame.vectors - frame.vectors)
    assert is_zero_array(lifted.frame.covectors - frame.covectors)
    assert is_zero_array(lifted.frame.form.theta - form.theta)
    assert is_zero_array(lifted.canonical.gamma - flat.gamma)
    assert flatness(lifted).flat


def projective_change(gamma_form) -> FrameConnection:
    """Flat connection on the plane changed by :math:`\\gamma_{(i}\\delta_{j)}^k`"""
    C = symplectic_chart(1)
    K = C.K
    g = [K(c) for c in gamma_form]
    delta = identity(K, 2)
    gamma = zeros(K, (2, 2, 2))

    for i in range(2):
        for j in range(2):
            for k in range(2):
                gamma[i, j, k] = (delta[i, k] * g[j] + delta[j, k] * g[i]) * const(K, 1, 2)

    return FrameConnection(coordinate_frame(C), gamma)


def test_symplectic_lift_of_projective_change():
    conn = projective_change((1, 0))
    assert is_zero_array(projective_residual(conn.gamma))
    assert_passed(symplectic_lift_report(conn))

    # same contact geodesics as the flat model, whose projections are straight lines
    _, _, flat = flat_model(2)
    lam = difference_tensor(flat, symplectic_lift(conn).canonical)
    assert same_contact_geodesics(lam, 2)
    assert is_zero_array(projective_residual(lam[1:, 1:, 1:]))


@pytest.mark.parametrize(
    "conn", [curved_affine(), projective_change((1, 0))], ids=["curved", "change"]
)
def test_adapted_representative_is_fixed_point(conn):
    adapted = adapted_symplectic_representative(conn)
    again = adapted_symplectic_representative(adapted)
    assert is_zero_array(again.gamma - adapted.gamma)


def test_symplectic_lift_curved():
    conn = curved_affine()
    assert_passed(symplectic_lift_report(conn))


def test_adapted_representative_is_projectively_equivalent():
    conn = curved_affine()
    adapted = adapted_symplectic_representative(conn)
    assert is_zero_array(projective_residual(adapted.gamma - conn.gamma))


def test_adapted_representative_needs_even_dimension():
    C = euclidean_chart(3)
    conn = FrameConnection(coordinate_frame(C), zeros(C.K, (3, 3, 3)))

    with pytest.raises(ValueError):
        adapted_symplectic_representative(conn)


def test_flat_affine_is_adapted():
    conn = flat_affine(symplectic_chart(2))
    assert is_zero_array(adapted_symplectic_representative(conn).gamma)
