import numpy as np
import pytest

from cproj.errors import NonContactFormError, PreconditionError
from cproj.geometry import inverse_omega, standard_omega
from cproj.scalar import chart
from cproj.tensor import (
    antisymmetrize,
    coerce,
    contract,
    determinant,
    embed_h,
    h_block,
    identity,
    inverse,
    is_zero_array,
    lower_index,
    matrix_rank,
    raise_index,
    solve_linear,
    symmetric_tensor,
    symmetrize,
    zeros,
)

C = chart(3)
K = C.K
x = C.gens


def test_symmetrize_split():
    T = coerce(K, np.array(list(range(27)), dtype=object).reshape(3, 3, 3)) * x[1]
    sym = symmetrize(T, (0, 1))
    skew = antisymmetrize(T, (0, 1))
    assert is_zero_array(sym + skew - T)
    assert is_zero_array(sym - sym.transpose(1, 0, 2))
    assert is_zero_array(skew + skew.transpose(1, 0, 2))


def test_symmetric_tensor():
    T = symmetric_tensor(K, (4, 4, 4), {(0, 0, 1): x[2]})
    assert T[1, 0, 0] == x[2] and T[0, 1, 0] == x[2]
    assert is_zero_array(symmetrize(T, (0, 1, 2)) - T)


def test_raise_lower_round_trip():
    w = standard_omega(K, 3)
    winv = inverse_omega(w)
    v = zeros(K, (5,))
    v[1:] = [x[1], x[2], K(3), x[0] * x[4]]
    assert is_zero_array(lower_index(raise_index(v, winv, 0), w, 0) - v)


def test_inverse_omega():
    w = standard_omega(K, 3)
    winv = inverse_omega(w)
    product = contract("kl,lj->kj", h_block(winv), h_block(w))
    assert is_zero_array(product + identity(K, 4))


def test_inverse_and_determinant():
    M = coerce(K, [[1, x[1]], [0, 2]])
    assert determinant(M) == K(2)
    assert is_zero_array(contract("ij,jk->ik", M, inverse(M)) - identity(K, 2))

    with pytest.raises(NonContactFormError):
        inverse(coerce(K, [[1, x[1]], [2, 2 * x[1]]]))


def test_solve_linear():
    rows = coerce(K, [[1, 1], [1, -1], [2, 0]])
    rhs = coerce(K, [x[1], x[2], x[1] + x[2]])
    solution, rank = solve_linear(K, rows, rhs)
    assert rank == 2
    assert is_zero_array(contract("ij,j->i", rows, solution) - rhs)
    assert matrix_rank(K, rows) == 2


def test_solve_linear_inconsistent():
    rows = coerce(K, [[1, 1], [2, 2]])
    rhs = coerce(K, [1, 3])

    with pytest.raises(PreconditionError):
        solve_linear(K, rows, rhs)


def test_embed_h():
    T = coerce(K, [[1, 2], [3, 4]])
    E = embed_h(T, K)
    assert E.shape == (3, 3)
    assert is_zero_array(E[0]) and is_zero_array(E[:, 0])
    assert is_zero_array(h_block(E) - T)
