"""Index algebra of frame tensors with Scalar components

Tensors are numpy object arrays whose entries are :data:`~cproj.scalar.Scalar`.
Slot variance is described by a string with one character per slot, ``"u"`` for
an upper (vector) slot and ``"d"`` for a lower (covector) slot.

Note:
    Scalars must always appear to the right of an array in products and sums,
    e.g. ``T * s`` rather than ``s * T``.
"""

import logging
from itertools import permutations
from math import factorial
from typing import Callable, Sequence, Tuple

import numpy as np
from more_itertools import distinct_permutations
from sympy.polys.fields import FracElement, FracField
from sympy.polys.matrices import DomainMatrix

from cproj.errors import NonContactFormError, PreconditionError
from cproj.scalar import Scalar, is_zero
from cproj.types import ObjMxM, ObjMxMxM, ObjMxMxMxM, ScalarArray, Variance

logger = logging.getLogger(__name__)


def zeros(K: FracField, shape: Tuple[int, ...]) -> ScalarArray:
    out = np.empty(shape, dtype=object)
    out.fill(K.zero)
    return out


def identity(K: FracField, m: int) -> ObjMxM:
    out = zeros(K, (m, m))
    np.fill_diagonal(out, K.one)
    return out


def coerce(K: FracField, arr) -> ScalarArray:
    """Convert every entry (ints, rationals or Scalars) into an element of ``K``"""
    arr = np.asarray(arr, dtype=object)

    def convert(x):
        if isinstance(x, FracElement):
            return x if x.field == K else x.set_field(K)
        return K(x)

    return np.vectorize(convert, otypes=[object])(arr) if arr.size else arr


def field_of(arr: ScalarArray) -> FracField:
    for x in np.asarray(arr, dtype=object).flat:
        if isinstance(x, FracElement):
            return x.field

    raise ValueError("Expect an array with at least one Scalar entry")


def contract(subscripts: str, *operands: ScalarArray) -> ScalarArray:
    """Einstein summation over object arrays"""
    K = field_of(operands[0])
    out = np.einsum(subscripts, *operands, dtype=object, optimize=False)
    return _unwrap(coerce(K, out))


def _unwrap(arr: ScalarArray):
    """Full contractions come back as a Scalar rather than a 0-d array"""
    return arr[()] if arr.ndim == 0 else arr


def const(K: FracField, p: int, q: int = 1) -> Scalar:
    return K(p) / K(q)


def is_zero_array(arr: ScalarArray) -> bool:
    return all(is_zero(x) for x in np.asarray(arr, dtype=object).flat)


def nonzero_entries(arr: ScalarArray):
    """Index tuples and values of the entries that are not identically zero"""
    arr = np.asarray(arr, dtype=object)
    return [(idx, arr[idx]) for idx in np.ndindex(arr.shape) if not is_zero(arr[idx])]


def degree(s: Scalar) -> int:
    """Total degree of the numerator plus that of the denominator"""
    if not s.numer:
        return 0

    return max(sum(e) for e in s.numer.monoms()) + max(sum(e) for e in s.denom.monoms())


def alternate(arr: ScalarArray, axes: Sequence[int], sign: bool = True) -> ScalarArray:
    """Average over permutations of ``axes``, with signs when ``sign`` is set

    ``alternate(T, (0, 1))`` is :math:`T_{[ab]c}` and
    ``alternate(T, (0, 1, 2), sign=False)`` is :math:`T_{(abc)}`.
    """
    K = field_of(arr)
    axes = tuple(axes)
    total = zeros(K, arr.shape)

    for perm in permutations(range(len(axes))):
        order = list(range(arr.ndim))

        for src, dst in enumerate(perm):
            order[axes[src]] = axes[dst]

        term = np.transpose(arr, order)
        total = total + (term if not sign or _parity(perm) == 0 else -term)

    return total * const(K, 1, factorial(len(axes)))


def symmetrize(arr: ScalarArray, axes: Sequence[int]) -> ScalarArray:
    return alternate(arr, axes, sign=False)


def antisymmetrize(arr: ScalarArray, axes: Sequence[int]) -> ScalarArray:
    return alternate(arr, axes, sign=True)


def _parity(perm: Sequence[int]) -> int:
    perm = list(perm)
    parity = 0

    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            parity ^= 1

    return parity


def raise_index(T: ScalarArray, winv: ObjMxM, axis: int) -> ScalarArray:
    """:math:`T^p = \\omega^{pq} T_q` on slot ``axis``"""
    out = np.tensordot(winv, T, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def lower_index(T: ScalarArray, w: ObjMxM, axis: int) -> ScalarArray:
    """:math:`T_p = T^q \\omega_{qp}` on slot ``axis``"""
    out = np.tensordot(w, T, axes=([0], [axis]))
    return np.moveaxis(out, 0, axis)


def h_block(arr: ScalarArray, axes: Sequence[int] | None = None) -> ScalarArray:
    """Restriction to the contact distribution: drop the index 0 on ``axes``"""
    axes = range(arr.ndim) if axes is None else axes
    index = [slice(None)] * arr.ndim

    for axis in axes:
        index[axis] = slice(1, None)

    return arr[tuple(index)]


def embed_h(arr: ScalarArray, K: FracField) -> ScalarArray:
    """Extend an H-tensor by zeros to the full frame"""
    out = zeros(K, tuple(d + 1 for d in arr.shape))
    out[(slice(1, None),) * arr.ndim] = arr
    return out


def covariant_derivative(
    gamma: ObjMxMxM,
    derivative: Callable[[ScalarArray, int], ScalarArray],
    T: ScalarArray,
    variance: Variance,
    weight: int = 0,
) -> ScalarArray:
    """Covariant derivative :math:`\\nabla_\\alpha T` with a new leading slot

    Args:
        gamma (ObjMxMxM): coefficients with
            :math:`\\nabla_{E_\\alpha} E_\\beta = \\Gamma_{\\alpha\\beta}^\\gamma E_\\gamma`
        derivative (Callable): frame derivative ``(T, weight) -> E_alpha(T)`` with
            the frame index as the new leading slot
        T (ScalarArray): the components of the tensor
        variance (Variance): ``"u"``/``"d"`` per slot of ``T``
        weight (int, optional): homogeneity weight of ``T``. Defaults to 0.

    Returns:
        ScalarArray: the array with slots ``(alpha, *slots of T)``
    """
    if len(variance) != T.ndim:
        raise ValueError(f"Expect one variance per slot, got {variance} for {T.shape}")

    out = derivative(T, weight)

    for slot, kind in enumerate(variance):
        if kind == "d":
            term = -np.tensordot(gamma, T, axes=([2], [slot]))
        elif kind == "u":
            term = np.tensordot(gamma, T, axes=([1], [slot]))
        else:
            raise ValueError(f"Unknown variance {kind}")

        out = out + np.moveaxis(term, 1, 1 + slot)

    return out


def torsion_of(gamma: ObjMxMxM, c: ObjMxMxM) -> ObjMxMxM:
    """:math:`\\tau_{\\alpha\\beta}^\\gamma = \\Gamma_{\\alpha\\beta}^\\gamma -
    \\Gamma_{\\beta\\alpha}^\\gamma - c_{\\alpha\\beta}^\\gamma`"""
    return gamma - gamma.transpose(1, 0, 2) - c


def curvature_of(
    A: ScalarArray,
    derivative: Callable[[ScalarArray, int], ScalarArray],
    c: ObjMxMxM,
) -> ScalarArray:
    """Curvature of a matrix valued connection form ``A[alpha]`` in a frame

    :math:`F_{\\alpha\\beta} = E_\\alpha A_\\beta - E_\\beta A_\\alpha +
    [A_\\alpha, A_\\beta] - c_{\\alpha\\beta}^\\sigma A_\\sigma` where the rows of
    each matrix carry the upper index.
    """
    dA = derivative(A, 0)
    prod = contract("aij,bjk->abik", A, A)
    return (
        dA
        - dA.transpose(1, 0, 2, 3)
        + prod
        - prod.transpose(1, 0, 2, 3)
        - contract("abs,sij->abij", c, A)
    )


def linear_curvature(
    gamma: ObjMxMxM,
    derivative: Callable[[ScalarArray, int], ScalarArray],
    c: ObjMxMxM,
) -> ObjMxMxMxM:
    """:math:`R_{\\alpha\\beta\\gamma}^\\sigma` of a linear connection given by Γ"""
    F = curvature_of(gamma.transpose(0, 2, 1), derivative, c)
    return F.transpose(0, 1, 3, 2)


def domain_matrix(rows: ScalarArray) -> DomainMatrix:
    rows = np.asarray(rows, dtype=object)
    K = field_of(rows)
    return DomainMatrix(
        [[x for x in row] for row in coerce(K, rows)], rows.shape, K.to_domain()
    )


def inverse(M: ObjMxM) -> ObjMxM:
    """Exact inverse of a square Scalar matrix

    Raises:
        NonContactFormError: when the matrix is singular
    """
    dm = domain_matrix(M)

    if not dm.det():
        raise NonContactFormError("frame matrix is not invertible")

    return np.array(dm.inv().to_list(), dtype=object)


def determinant(M: ObjMxM) -> Scalar:
    return domain_matrix(M).det()


def solve_linear(
    K: FracField, rows: ScalarArray, rhs: ScalarArray
) -> Tuple[ScalarArray, int]:
    """Solve a possibly overdetermined consistent system ``rows @ x = rhs``

    Free unknowns are set to zero.

    Raises:
        PreconditionError: when the system is inconsistent

    Returns:
        Tuple[ScalarArray, int]: the solution and the rank of ``rows``
    """
    rows = coerce(K, rows)
    rhs = coerce(K, rhs)
    num_eq, num_unknowns = rows.shape
    sparse = {}

    for i in range(num_eq):
        entries = {j: rows[i, j] for j in range(num_unknowns) if rows[i, j]}

        if rhs[i]:
            entries[num_unknowns] = rhs[i]

        if entries:
            sparse[i] = entries

    augmented = DomainMatrix(sparse, (num_eq, num_unknowns + 1), K.to_domain())
    reduced, pivots = augmented.rref()
    logger.debug("linear solve: %d equations, %d unknowns", num_eq, num_unknowns)

    if num_unknowns in pivots:
        raise PreconditionError("inconsistent linear system")

    table = reduced.to_list()
    solution = zeros(K, (num_unknowns,))

    for row, col in enumerate(pivots):
        solution[col] = table[row][num_unknowns]

    return solution, len(pivots)


def matrix_rank(K: FracField, rows: ScalarArray) -> int:
    rows = coerce(K, rows)
    sparse = {
        i: {j: rows[i, j] for j in range(rows.shape[1]) if rows[i, j]}
        for i in range(rows.shape[0])
    }
    sparse = {i: r for i, r in sparse.items() if r}
    return DomainMatrix(sparse, rows.shape, K.to_domain()).rank()


def h_trace(T: ScalarArray, a: int, b: int) -> ScalarArray:
    """Trace over a pair of slots restricted to the contact distribution"""
    return np.trace(h_block(T, (a, b)), axis1=a, axis2=b)


def omega_trace(T: ScalarArray, a: int, b: int, winv: ObjMxM) -> ScalarArray:
    """:math:`\\omega^{pq}T_{\\dots p\\dots q\\dots}` over slots ``a`` and ``b``"""
    return _unwrap(np.tensordot(T, winv, axes=([a, b], [0, 1])))


def symmetric_tensor(K: FracField, shape: Tuple[int, ...], entries: dict) -> ScalarArray:
    """Completely symmetric tensor from its entries on sorted index tuples"""
    out = zeros(K, shape)

    for idx, value in entries.items():
        for perm in distinct_permutations(idx):
            out[perm] = value

    return out
