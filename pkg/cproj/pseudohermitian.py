"""Pseudo-hermitian structures, the Tanaka connection and the Beltrami equivalence

``J[i, j]`` holds :math:`J_i{}^j` on the contact distribution, so that
:math:`J(E_i) = J_i^pE_p`. The lowered form is :math:`J_{ij} = J_i^p\\omega_{pj}`
and the Levi metric is :math:`g_{ij} = -J_{ij}`.
"""

import logging
from typing import Tuple

import equinox as eqx
import numpy as np

from cproj.curvature import curvature, flatness, invariant_tensors, ricci
from cproj.errors import PreconditionError
from cproj.geometry import AdaptedFrame, FrameConnection, bracket, standard_omega
from cproj.report import Report, check, identity_tag, note, skipped, verdict
from cproj.scalar import Scalar
from cproj.structure import ContactProjectiveStructure, verify_canonical_conditions
from cproj.tensor import (
    antisymmetrize,
    const,
    contract,
    determinant,
    embed_h,
    h_block,
    identity,
    is_zero_array,
    lower_index,
    matrix_rank,
    solve_linear,
    symmetrize,
    zeros,
)
from cproj.types import ObjHxH, ObjMxM, ObjMxMxM, ObjMxMxMxM, ScalarArray

logger = logging.getLogger(__name__)


def standard_j(K, n: int) -> ObjHxH:
    """:math:`J(E_i) = E_{n-1+i}`, :math:`J(E_{n-1+i}) = -E_i` with positive Levi
    metric for the standard ω"""
    return h_block(standard_omega(K, n))


class PseudoHermitian(eqx.Module):
    frame: AdaptedFrame
    J: ObjHxH

    @property
    def K(self):
        return self.frame.K

    @property
    def n(self) -> int:
        return self.frame.n

    @property
    def J_full(self) -> ObjMxM:
        """J extended by zeros to the Reeb direction"""
        return embed_h(self.J, self.K)

    @property
    def J_low(self) -> ObjHxH:
        return lower_index(self.J, h_block(self.frame.w), 1)

    @property
    def g(self) -> ObjHxH:
        return -self.J_low

    def apply(self, X: ScalarArray) -> ScalarArray:
        """:math:`J(X)` for frame components, the Reeb component is dropped"""
        return contract("a,ab->b", X, self.J_full)


def _bracket_residuals(ph: PseudoHermitian) -> Tuple[ScalarArray, ScalarArray]:
    """θ-components of :math:`[JX, Y] + [X, JY]` and the integrability defect
    :math:`[JX, JY] - [X, Y] - J([JX, Y] + [X, JY])` over frame fields of H"""
    frame = ph.frame
    K = ph.K
    m = frame.dim
    basis = identity(K, m)
    compat = zeros(K, (m - 1, m - 1))
    integr = zeros(K, (m - 1, m - 1, m))

    for a in range(1, m):
        for b in range(1, m):
            X, Y = basis[a], basis[b]
            JX, JY = ph.apply(X), ph.apply(Y)
            mixed = bracket(frame, JX, Y) + bracket(frame, X, JY)
            compat[a - 1, b - 1] = mixed[0]
            integr[a - 1, b - 1] = (
                bracket(frame, JX, JY) - bracket(frame, X, Y) - ph.apply(mixed)
            )

    return compat, integr


def pseudo_hermitian_checks(ph: PseudoHermitian) -> Report:
    K = ph.K
    h = ph.J.shape[0]
    compat, integr = _bracket_residuals(ph)
    g = ph.g
    return Report(
        "pseudo-hermitian",
        identity_tag(
            "pseudo-hermitian-structure",
            [
                check("j-squared", contract("ip,pj->ij", ph.J, ph.J) + identity(K, h)),
                check("j-compatible", compat),
                check("j-integrable", integr),
                check("levi-metric-symmetric", g - g.T),
                verdict("levi-metric-nondegenerate", bool(determinant(g))),
            ],
        ),
    )


def pseudo_hermitian(frame: AdaptedFrame, J: ObjHxH) -> PseudoHermitian:
    """Validated pseudo-hermitian structure

    Raises:
        PreconditionError: when J does not square to -1, is not compatible with
            dθ, is not integrable or has a degenerate Levi metric
    """
    ph = PseudoHermitian(frame, np.asarray(J, dtype=object))
    report = pseudo_hermitian_checks(ph)

    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        raise PreconditionError(f"not an integrable pseudo-hermitian structure: {names}")

    return ph


class TanakaConnection(eqx.Module):
    """The pseudo-hermitian connection with its torsion and the ranks of the linear
    system that determines it

    ``A[alpha, beta]`` is the pseudo-hermitian torsion
    :math:`A_\\alpha^\\beta = \\tau_{0\\alpha}^\\beta`.
    """

    connection: FrameConnection
    A: ObjMxM
    rank: int = eqx.field(static=True)
    rank_without_j: int = eqx.field(static=True)
    unknowns: int = eqx.field(static=True)

    @property
    def unique(self) -> bool:
        return self.rank == self.unknowns

    @property
    def A_h(self) -> ObjHxH:
        return h_block(self.A)

    @property
    def transverse_symmetry(self) -> bool:
        return is_zero_array(self.A_h)


class _LinearSystem:
    """Rows over the unknowns :math:`\\Gamma_{\\alpha\\beta}^\\gamma`"""

    def __init__(self, K, m: int):
        self.K = K
        self.m = m
        self.rows = []
        self.rhs = []

    def index(self, a: int, b: int, c: int) -> int:
        return (a * self.m + b) * self.m + c

    def add(self, terms, rhs: Scalar):
        row = zeros(self.K, (self.m**3,))

        for (a, b, c), coeff in terms:
            if coeff:
                row[self.index(a, b, c)] = row[self.index(a, b, c)] + coeff

        self.rows.append(row)
        self.rhs.append(rhs)

    def arrays(self, count: int | None = None):
        rows = self.rows if count is None else self.rows[:count]
        rhs = self.rhs if count is None else self.rhs[:count]
        return np.array(rows, dtype=object), np.array(rhs, dtype=object)


def tanaka_connection(ph: PseudoHermitian) -> TanakaConnection:
    """Solve for the connection with :math:`\\bar\\nabla\\theta = 0`,
    :math:`\\bar\\nabla d\\theta = 0`, :math:`\\tau_{ij}^\\gamma =
    \\omega_{ij}\\delta_0^\\gamma`, :math:`JA = -AJ` and :math:`\\bar\\nabla J = 0`

    The last condition is appended after the others so that the rank of the
    system without it can be reported as well.

    Raises:
        PreconditionError: when the system is inconsistent
    """
    frame = ph.frame
    K = ph.K
    m = frame.dim
    w = frame.w
    c = frame.c
    J = ph.J_full
    dw = frame.derivative(w)
    dJ = frame.derivative(J)
    system = _LinearSystem(K, m)
    H = range(1, m)

    # theta parallel
    for a in range(m):
        for b in range(m):
            system.add([((a, b, 0), K.one)], K.zero)

    # dtheta parallel
    for a in range(m):
        for b in range(m):
            for g in range(m):
                terms = [((a, b, s), -w[s, g]) for s in range(m)]
                terms += [((a, g, s), -w[b, s]) for s in range(m)]
                system.add(terms, -dw[a, b, g])

    # torsion on the contact distribution
    for i in H:
        for j in H:
            for g in range(m):
                rhs = c[i, j, g] + (w[i, j] if g == 0 else K.zero)
                system.add([((i, j, g), K.one), ((j, i, g), -K.one)], rhs)

    # JA = -AJ with A_i^j = Gamma_0i^j - Gamma_i0^j - c_0i^j
    for i in H:
        for j in H:
            terms = []
            rhs = K.zero

            for p in H:
                terms += [((0, p, j), J[i, p]), ((p, 0, j), -J[i, p])]
                terms += [((0, i, p), J[p, j]), ((i, 0, p), -J[p, j])]
                rhs = rhs + J[i, p] * c[0, p, j] + c[0, i, p] * J[p, j]

            system.add(terms, rhs)

    without_j = len(system.rows)

    # J parallel
    for a in range(m):
        for b in range(m):
            for g in range(m):
                terms = [((a, b, s), -J[s, g]) for s in range(m)]
                terms += [((a, s, g), J[b, s]) for s in range(m)]
                system.add(terms, -dJ[a, b, g])

    rows, rhs = system.arrays()
    solution, rank = solve_linear(K, rows, rhs)
    rank_without_j = matrix_rank(K, system.arrays(without_j)[0])
    logger.debug(
        "tanaka connection: rank %d (%d without J), %d unknowns", rank, rank_without_j, m**3
    )

    if rank < m**3:
        logger.warning("the pseudo-hermitian connection is not unique, free unknowns set to 0")

    conn = FrameConnection(frame, solution.reshape((m, m, m)))
    A = conn.torsion[0]
    return TanakaConnection(conn, A, rank, rank_without_j, m**3)


def tanaka_checks(ph: PseudoHermitian, tanaka: TanakaConnection | None = None) -> Report:
    tanaka = tanaka_connection(ph) if tanaka is None else tanaka
    conn = tanaka.connection
    frame = ph.frame
    K = ph.K
    m = frame.dim
    tau = conn.torsion
    expected = zeros(K, (m - 1, m - 1, m))
    expected[:, :, 0] = h_block(frame.w)
    A_h = tanaka.A_h
    A_low = lower_index(A_h, h_block(frame.w), 1)

    conditions = (
        check("theta-parallel", conn.gamma[:, :, 0]),
        check("dtheta-parallel", conn.nabla(frame.w, "dd")),
        check("contact-torsion", tau[1:, 1:] - expected),
        check(
            "torsion-anticommutes-with-j",
            contract("ip,pj->ij", ph.J, A_h) + contract("ip,pj->ij", A_h, ph.J),
        ),
        check("j-parallel", conn.nabla(ph.J_full, "du")),
        check("torsion-reeb-row", tanaka.A[0]),
        check("torsion-reeb-column", tanaka.A[:, 0]),
        check("torsion-symmetric", antisymmetrize(A_low, (0, 1))),
    )
    uniqueness = (
        verdict("unique", tanaka.unique, detail=f"rank {tanaka.rank} of {tanaka.unknowns}"),
        note(
            "rank-without-j-parallel",
            zeros(K, (1,)),
            detail=f"rank {tanaka.rank_without_j} of {tanaka.unknowns}",
        ),
    )
    return Report(
        "tanaka connection",
        identity_tag("tanaka-conditions", conditions)
        + identity_tag("tanaka-uniqueness", uniqueness),
    )


def induced_difference(tanaka: TanakaConnection) -> ObjMxMxM:
    """:math:`\\Lambda_{\\alpha\\beta}^\\gamma = -\\delta_\\alpha^0A_\\beta^\\gamma`"""
    K = tanaka.connection.K
    m = tanaka.connection.dim
    lam = zeros(K, (m, m, m))
    lam[0] = -tanaka.A
    return lam


def induced_structure(
    ph: PseudoHermitian, tanaka: TanakaConnection | None = None
) -> ContactProjectiveStructure:
    """The contact projective structure of the contact geodesics of the Tanaka
    connection, with its canonical representative for θ"""
    tanaka = tanaka_connection(ph) if tanaka is None else tanaka
    conn = tanaka.connection.deformed(induced_difference(tanaka))
    return ContactProjectiveStructure(ph.frame, conn)


def induced_checks(ph: PseudoHermitian, tanaka: TanakaConnection | None = None) -> Report:
    tanaka = tanaka_connection(ph) if tanaka is None else tanaka
    S = induced_structure(ph, tanaka)
    conn = S.canonical
    frame = ph.frame
    K = ph.K
    A_h = tanaka.A_h
    AJ = contract("ip,pj->ij", A_h, ph.J)
    R_bar = curvature(tanaka.connection)
    R = curvature(conn)
    dA = conn.nabla(embed_h(A_h, K), "du")

    extra = [
        check("contact-torsion-vanishes", h_block(S.torsion)),
        check("contact-j-parallel", h_block(conn.nabla(ph.J_full, "du"))),
        check("reeb-derivative-of-j", conn.nabla(ph.J_full, "du")[0, 1:, 1:] - AJ * K(2)),
        check(
            "curvature-difference-contact",
            h_block(R_bar - R) - contract("ij,kl->ijkl", h_block(frame.w), A_h),
        ),
        check(
            "curvature-difference-reeb",
            (R_bar - R)[0, 1:, 1:, 1:] + h_block(dA),
        ),
    ]

    if tanaka.transverse_symmetry:
        extra.append(
            check(
                "transverse-symmetry-same-connection",
                conn.gamma - tanaka.connection.gamma,
            )
        )

    checks = verify_canonical_conditions(conn).checks + identity_tag("induced-structure", extra)
    return Report("induced structure", checks)


class WebsterCurvature(eqx.Module):
    """Curvature of the Tanaka connection under transverse symmetry

    ``R4[i, j, k, l]`` is :math:`R_{ijk}^p\\omega_{pl}` on the contact distribution
    and ``scalar`` is :math:`R = R_{pq}J^{pq}`.
    """

    R: ObjMxMxMxM
    R4: ScalarArray
    ricci: ObjHxH
    scalar: Scalar
    constant: bool = eqx.field(static=True)


def _j_combination(K, w_h: ObjHxH, J_low: ObjHxH) -> ScalarArray:
    """:math:`\\omega_{jl}J_{ik} - \\omega_{il}J_{jk} + \\omega_{jk}J_{il} -
    \\omega_{ik}J_{jl} - 2\\omega_{ij}J_{kl}`"""
    return (
        contract("jl,ik->ijkl", w_h, J_low)
        - contract("il,jk->ijkl", w_h, J_low)
        + contract("jk,il->ijkl", w_h, J_low)
        - contract("ik,jl->ijkl", w_h, J_low)
        - contract("ij,kl->ijkl", w_h, J_low) * K(2)
    )


def _constant_curvature_residual(ph: PseudoHermitian, R4, scalar) -> ScalarArray:
    K = ph.K
    n = ph.n
    w_h = h_block(ph.frame.w)
    return R4 * K(4 * n * (n - 1)) - _j_combination(K, w_h, ph.J_low) * scalar


def webster_curvature(
    ph: PseudoHermitian, tanaka: TanakaConnection | None = None
) -> WebsterCurvature:
    """Curvature, Ricci tensor and scalar curvature of the Tanaka connection

    The structure has constant holomorphic sectional curvature iff the curvature
    is the ω/J combination with factor R and R is constant.

    Raises:
        PreconditionError: when the pseudo-hermitian torsion does not vanish
    """
    tanaka = tanaka_connection(ph) if tanaka is None else tanaka

    if not tanaka.transverse_symmetry:
        raise PreconditionError("Webster curvature checks need transverse symmetry, A != 0")

    frame = ph.frame
    w_h = h_block(frame.w)
    winv_h = h_block(frame.winv)
    R = curvature(tanaka.connection)
    R4 = lower_index(h_block(R), w_h, 3)
    Ric = h_block(ricci(R))
    J_up = contract("pa,qb,ab->pq", winv_h, winv_h, ph.J_low)
    scalar = contract("pq,pq->", Ric, J_up)
    constant = is_zero_array(
        _constant_curvature_residual(ph, R4, scalar)
    ) and is_zero_array(frame.derivative(np.array(scalar, dtype=object)))
    return WebsterCurvature(R, R4, Ric, scalar, constant)


def webster_checks(ph: PseudoHermitian, tanaka: TanakaConnection | None = None) -> Report:
    tanaka = tanaka_connection(ph) if tanaka is None else tanaka
    web = webster_curvature(ph, tanaka)
    K = ph.K
    n = ph.n
    frame = ph.frame
    w = frame.w
    J_low_full = embed_h(ph.J_low, K)
    RJ = contract("abgp,pd->abgd", web.R, J_low_full)

    checks = [
        check("reeb-curvature-vanishes", lower_index(web.R[0, 1:, 1:, 1:], h_block(w), 2)),
        check("curvature-j-skew", RJ + RJ.transpose(0, 1, 3, 2)),
        check("curvature-pair-symmetry", RJ - RJ.transpose(2, 3, 0, 1)),
    ]

    if web.constant:
        checks.append(check("einstein", web.ricci * K(2 * (n - 1)) - ph.J_low * web.scalar))

    checks.append(
        note(
            "constant-curvature-residual",
            _constant_curvature_residual(ph, web.R4, web.scalar),
            detail=f"constant={web.constant}",
        )
    )
    return Report("webster curvature", identity_tag("webster-curvature", checks))


def beltrami_check(ph: PseudoHermitian, tanaka: TanakaConnection | None = None) -> Report:
    """Flatness of the induced structure against constancy of the holomorphic
    sectional curvature"""
    tanaka = tanaka_connection(ph) if tanaka is None else tanaka
    web = webster_curvature(ph, tanaka)
    S = induced_structure(ph, tanaka)
    data = invariant_tensors(S)
    result = flatness(S, data)
    checks = [
        verdict(
            "flat-iff-constant-curvature",
            result.flat == web.constant,
            detail=f"{result}; constant curvature={web.constant}",
        ),
    ]

    if S.n == 2:
        # in dimension three the Cotton tensor is the symmetrized derivative of Ricci
        conn = S.canonical
        Ric_full = embed_h(web.ricci, ph.K)
        dRic = h_block(conn.nabla(Ric_full, "dd"))
        checks.append(
            note(
                "cotton-from-ricci",
                data.C - symmetrize(dRic, (0, 1, 2)) * const(ph.K, 1, S.n),
                detail="C_ijk - (1/n) nabla_(i R_jk)",
            )
        )

    return Report("beltrami", identity_tag("beltrami-equivalence", checks))


def beltrami_report(ph: PseudoHermitian) -> Report:
    tanaka = tanaka_connection(ph)
    reports = [
        pseudo_hermitian_checks(ph),
        tanaka_checks(ph, tanaka),
        induced_checks(ph, tanaka),
    ]

    if tanaka.transverse_symmetry:
        reports += [webster_checks(ph, tanaka), beltrami_check(ph, tanaka)]
    else:
        reason = "no transverse symmetry"
        reports.append(
            Report(
                "beltrami",
                (
                    skipped("webster-curvature", reason, tag="webster-curvature"),
                    skipped("flat-iff-constant-curvature", reason, tag="beltrami-equivalence"),
                ),
            )
        )

    return Report("beltrami", tuple(c for r in reports for c in r.checks))
