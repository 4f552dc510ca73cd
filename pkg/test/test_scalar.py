import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.polys.domains import QQ

from cproj import scalar
from cproj.config import configure
from cproj.errors import ScalarError
from cproj.scalar import (
    chart,
    differentiate,
    evaluate,
    format_scalar,
    is_zero,
    normalize,
    parse_scalar,
    random_point,
    random_polynomial,
)

C = chart(2)
x0, x1, x2 = C.gens


@st.composite
def polynomials(draw):
    coeffs = draw(st.lists(st.integers(-5, 5), min_size=1, max_size=4))
    powers = draw(
        st.lists(
            st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
            min_size=len(coeffs),
            max_size=len(coeffs),
        )
    )
    s = C.zero

    for c, (a, b, d) in zip(coeffs, powers):
        s = s + C.K(c) * x0**a * x1**b * x2**d

    return s


@st.composite
def nonzero_polynomials(draw):
    s = draw(polynomials())
    return s if s else C.one + x1**2


@given(polynomials(), polynomials(), polynomials())
@settings(max_examples=25, deadline=None)
def test_field_axioms(a, b, c):
    assert is_zero((a + b) + c - (a + (b + c)))
    assert is_zero(a * (b + c) - (a * b + a * c))
    assert is_zero(a * b - b * a)


@given(nonzero_polynomials())
@settings(max_examples=25, deadline=None)
def test_inverse(a):
    assert is_zero(a * (C.one / a) - C.one)


@given(polynomials(), nonzero_polynomials())
@settings(max_examples=25, deadline=None)
def test_leibniz(a, b):
    q = a / b

    for mu in range(C.dim):
        lhs = differentiate(a * q, mu)
        rhs = differentiate(a, mu) * q + a * differentiate(q, mu)
        assert is_zero(lhs - rhs)


@given(polynomials(), nonzero_polynomials())
@settings(max_examples=25, deadline=None)
def test_partials_commute(a, b):
    q = a / b
    assert is_zero(differentiate(differentiate(q, 1), 2) - differentiate(differentiate(q, 2), 1))


def test_log_derivative_of_rescale_factor():
    f = C.one + x1
    assert is_zero(differentiate(f, 1) / f - C.one / (C.one + x1))


def test_normalize_is_canonical():
    a = (x1**2 - C.one) / (C.K(2) * x1 - C.K(2))
    b = (x1 + C.one) / C.K(2)
    assert normalize(a) == normalize(b)


def test_evaluate():
    s = (x1 + x2) / (C.one + x0**2)
    assert evaluate(s, (QQ(1), QQ(2), QQ(3))) == QQ(5, 2)

    with pytest.raises(ScalarError):
        evaluate(C.one / x1, (QQ(0), QQ(0), QQ(1)))


def test_random_point_avoids_poles():
    rng = np.random.default_rng(0)
    s = C.one / (x1 - x2)
    point = random_point(C.K, rng, [s])
    evaluate(s, point)


def test_random_polynomial_degree():
    rng = np.random.default_rng(1)
    s = random_polynomial(C, 2, rng)
    assert s.denom.is_ground
    assert all(sum(m) <= 2 for m in s.numer.monoms())


@pytest.mark.parametrize(
    "text", ["(1 + x1)^2/2 - x0*x2", "-3/4", "x1/(1 + x1^2 + x2^2)", "x0 - x0"]
)
def test_parse_format(text):
    s = parse_scalar(text, C)
    assert parse_scalar(format_scalar(s), C) == s


def test_parse_value():
    assert is_zero(parse_scalar("(1 + x1)^2", C) - (C.one + x1) ** 2)


@pytest.mark.parametrize("text", ["x1 + y", "x7", "(x1", "1/0", "x1 $ 2"])
def test_parse_errors(text):
    with pytest.raises(ScalarError):
        parse_scalar(text, C)


def test_differentiate_out_of_range():
    with pytest.raises(ScalarError):
        differentiate(x1, 3)


def test_zero_denominator_constant():
    with pytest.raises(ScalarError):
        C.const(1, 0)


def test_crosscheck_catches_bad_normal_form(monkeypatch):
    previous = configure(crosscheck=True, sanity_points=2)
    monkeypatch.setattr(scalar, "canonical_pair", lambda s: (s.numer * 2, s.denom))

    try:
        with pytest.raises(ScalarError):
            is_zero(C.one + x1**2)

        assert is_zero(C.zero)
        configure(crosscheck=False)
        assert not is_zero(C.one + x1**2)
    finally:
        configure(crosscheck=previous.crosscheck, sanity_points=previous.sanity_points)
