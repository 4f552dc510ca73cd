import numpy as np
import pytest

from cproj.errors import NonContactFormError
from cproj.geometry import (
    ContactForm,
    FrameConnection,
    bracket,
    change_frame,
    default_adapted_frame,
    flat_model,
    frame_invariants,
    jacobi_residual,
    reeb,
    rescale,
    standard_omega,
)
from cproj.scalar import chart, is_zero
from cproj.tensor import coerce, identity, is_zero_array, zeros
from conftest import assert_passed


@pytest.mark.parametrize("n", [2, 3])
def test_flat_model(n):
    form, frame, conn = flat_model(n)
    assert_passed(frame_invariants(frame))
    assert is_zero_array(frame.w - standard_omega(frame.K, n))
    assert is_zero_array(reeb(form) - frame.reeb)
    assert is_zero_array(conn.torsion[1:, 1:, 1:])


def test_reeb_of_flat_form():
    form, _, _ = flat_model(2)
    T = reeb(form)
    assert T[0] == form.chart.K(2)
    assert is_zero_array(T[1:])


def test_degenerate_form():
    C = chart(2)
    form = ContactForm(C, [C.one, C.zero, C.zero])
    assert not form.is_contact()

    with pytest.raises(NonContactFormError):
        reeb(form)


def test_volume_form_factor():
    form, _, _ = flat_model(3)
    assert not is_zero(form.volume_form_factor())


@pytest.mark.parametrize("factor", ["2", "1 + x1", "1 + x1*x2"])
def test_rescale(factor):
    form, frame, _ = flat_model(2)
    f = form.chart.parse(factor)
    new = rescale(frame, f)
    assert_passed(frame_invariants(new))
    assert is_zero_array(new.form.theta - form.theta * f * f)
    assert is_zero_array(new.vectors[1:] - frame.vectors[1:])


def test_rescale_by_zero():
    _, frame, _ = flat_model(2)

    with pytest.raises(NonContactFormError):
        rescale(frame, frame.K.zero)


def test_default_adapted_frame():
    C = chart(2)
    x0, x1, x2 = C.gens
    form = ContactForm(C, [C.one, -x2 / 2, x1 / 2 + x1**3 / 3])
    frame = default_adapted_frame(form)
    assert_passed(frame_invariants(frame))
    assert is_zero(frame.w[1, 2] - (C.one + x1**2))


def test_bracket_of_contact_directions():
    _, frame, _ = flat_model(2)
    K = frame.K
    e = identity(K, 3)
    # [E_1, E_2] = -omega_12 T
    assert is_zero_array(bracket(frame, e[1], e[2]) - coerce(K, [-1, 0, 0]))
    assert is_zero_array(jacobi_residual(frame))


def test_change_frame_round_trip():
    form, frame, _ = flat_model(2)
    K = frame.K
    x = form.chart.gens
    gamma = zeros(K, (3, 3, 3))
    gamma[1, 2, 1] = x[1]
    gamma[0, 0, 0] = x[2] * x[2]
    conn = FrameConnection(frame, gamma)
    other = default_adapted_frame(form)
    back = change_frame(change_frame(conn, other), frame)
    assert is_zero_array(back.gamma - conn.gamma)


def test_connection_shape():
    _, frame, _ = flat_model(2)

    with pytest.raises(ValueError):
        FrameConnection(frame, np.zeros((2, 2, 2), dtype=object))
