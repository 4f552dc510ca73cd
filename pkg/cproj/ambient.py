"""The ambient connection on the symplectification of a contact projective structure

Ambient tensors are stored in the frame :math:`F_\\infty = \\mathbb{X}`,
:math:`F_\\alpha = \\hat E_\\alpha` evaluated on the unit section ``t = 1``.
Index 0 of an ambient array is :math:`\\infty` and index ``alpha + 1`` is the
horizontal lift of :math:`E_\\alpha`, so the Reeb lift sits at index 1. The
fiber coordinate never enters the coefficient field: a component of
homogeneity ``w`` stands for ``value * t**w`` and the Euler field acts on it by
multiplication with ``w``.
"""

import logging

import equinox as eqx
import numpy as np

from cproj.curvature import CurvatureData, curvature, invariant_tensors, nabla_h, ricci
from cproj.errors import PreconditionError
from cproj.geometry import AdaptedFrame, FrameConnection
from cproj.report import Report, check, identity_tag, skipped
from cproj.structure import (
    ContactProjectiveStructure,
    geodesic_residual,
    lowered,
    theta_derivative,
)
from cproj.tensor import (
    antisymmetrize,
    const,
    contract,
    embed_h,
    h_block,
    identity,
    inverse,
    is_zero_array,
    lower_index,
    omega_trace,
    raise_index,
    symmetrize,
    zeros,
)
from cproj.types import ObjM, ObjMxM, ObjMxMxM, ObjMxMxMxM, ScalarArray, Variance

logger = logging.getLogger(__name__)

INF, REEB = 0, 1
H = slice(2, None)


class AmbientFrame(eqx.Module):
    """The frame :math:`\\{\\mathbb{X}, \\hat E_\\alpha\\}` over an adapted frame

    Horizontal lifts commute with the Euler field and bracket like their
    projections, so the structure functions are those of the base frame.
    """

    base: AdaptedFrame

    @property
    def K(self):
        return self.base.K

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def c(self) -> ObjMxMxM:
        out = zeros(self.K, (self.dim,) * 3)
        out[1:, 1:, 1:] = self.base.c
        return out

    @property
    def omega(self) -> ObjMxM:
        """:math:`\\Omega_{IJ}` at ``t = 1``, of homogeneity 2"""
        K = self.K
        out = zeros(K, (self.dim, self.dim))
        out[INF, REEB] = K(2)
        out[REEB, INF] = K(-2)
        out[H, H] = h_block(self.base.w)
        return out

    @property
    def omega_inv(self) -> ObjMxM:
        """:math:`\\Omega^{IJ}` with :math:`\\Omega^{IK}\\Omega_{KJ} = -\\delta_I^J`"""
        return -inverse(self.omega)

    def derivative(self, T: ScalarArray, weight: int = 0) -> ScalarArray:
        """:math:`F_I(T)` for components of homogeneity ``weight``"""
        T = np.asarray(T, dtype=object)
        out = zeros(self.K, (self.dim,) + T.shape)
        out[INF] = T * self.K(weight)
        out[1:] = self.base.derivative(T)
        return out

    def raise_index(self, T: ScalarArray, axis: int) -> ScalarArray:
        return raise_index(T, self.omega_inv, axis)

    def lower_index(self, T: ScalarArray, axis: int) -> ScalarArray:
        return lower_index(T, self.omega, axis)


def euler_field(frame: AmbientFrame) -> ObjM:
    out = zeros(frame.K, (frame.dim,))
    out[INF] = frame.K.one
    return out


def tautological_form(frame: AmbientFrame) -> ObjM:
    """:math:`\\alpha = t^2\\phi^0`, of homogeneity 2"""
    out = zeros(frame.K, (frame.dim,))
    out[REEB] = frame.K.one
    return out


def ambient_coefficients(gamma: ObjMxMxM, P: ObjMxM) -> ObjMxMxM:
    """Coefficients on the frame :math:`\\{\\mathbb{X}, \\hat E_\\alpha\\}` with
    :math:`\\hat\\nabla_V\\mathbb{X} = V`,
    :math:`\\hat\\nabla_\\mathbb{X}\\hat E_\\alpha = \\hat E_\\alpha` and
    :math:`\\hat\\nabla_{\\hat E_\\alpha}\\hat E_\\beta = \\Gamma_{\\alpha\\beta}^\\gamma
    \\hat E_\\gamma + P_{\\alpha\\beta}\\mathbb{X}`"""
    K = P[0, 0].field
    M = gamma.shape[0] + 1
    out = zeros(K, (M, M, M))
    out[INF, INF, INF] = K.one

    for a in range(1, M):
        out[a, INF, a] = K.one
        out[INF, a, a] = K.one

    out[1:, 1:, 1:] = gamma
    out[1:, 1:, INF] = P
    return out


class AmbientConnection(eqx.Module):
    """Ambient connection assembled from the canonical representative ``base``
    and the tensors P and O on the base

    :math:`\\hat\\nabla_{\\hat E_\\alpha}\\hat E_\\beta = (\\nabla_\\alpha E_\\beta)^\\wedge
    + (O_{\\alpha\\beta}^\\gamma E_\\gamma)^\\wedge + P_{\\alpha\\beta}\\mathbb{X}`,
    :math:`\\hat\\nabla_V\\mathbb{X} = V` and
    :math:`\\hat\\nabla_\\mathbb{X}\\hat E_\\alpha = \\hat E_\\alpha`.
    """

    base: FrameConnection
    P: ObjMxM
    O: ObjMxMxM
    Q: ObjMxM

    @property
    def frame(self) -> AmbientFrame:
        return AmbientFrame(self.base.frame)

    @property
    def K(self):
        return self.base.K

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    @property
    def gamma(self) -> ObjMxMxM:
        return ambient_coefficients(self.base.gamma + self.O, self.P)

    @property
    def linear(self) -> FrameConnection:
        return FrameConnection(self.frame, self.gamma)

    @property
    def torsion(self) -> ObjMxMxM:
        return self.linear.torsion

    def nabla(self, T: ScalarArray, variance: Variance, weight: int = 0) -> ScalarArray:
        return self.linear.nabla(T, variance, weight)

    def curvature(self) -> ObjMxMxMxM:
        return curvature(self.linear)

    def projected(self) -> FrameConnection:
        """:math:`\\bar\\nabla_XY = \\rho_*(\\hat\\nabla_{\\hat X}\\hat Y)` for the unit section"""
        return self.base.deformed(self.O)


def _div(dT: ScalarArray, winv_h: ObjMxM, slot: int) -> ScalarArray:
    """:math:`\\nabla^pT_{\\dots p\\dots} = \\omega^{pq}\\nabla_qT_{\\dots p\\dots}` for
    ``dT`` with the derivative slot leading and restricted to H"""
    return np.tensordot(dT, winv_h, axes=([slot, 0], [0, 1]))


def raise_both(T: ObjMxM, winv_h: ObjMxM) -> ObjMxM:
    """:math:`T^{pq} = \\omega^{pa}\\omega^{qb}T_{ab}`"""
    return contract("pa,qb,ab->pq", winv_h, winv_h, T)


def p_tensor(S: ContactProjectiveStructure, data: CurvatureData) -> ObjMxM:
    """The full :math:`P_{\\alpha\\beta}` with the Reeb components
    :math:`P_{0i}`, :math:`P_{i0}` and :math:`P_{00}` fixed by Ricci flatness"""
    frame = S.frame
    conn = S.canonical
    K = frame.K
    n = frame.n
    m = frame.dim
    winv_h = h_block(frame.winv)
    tl = h_block(lowered(S.torsion, frame))

    dP = h_block(nabla_h(conn, data.P, "dd"), (0,))
    dQ = h_block(nabla_h(conn, data.Q, "dd"), (0,))
    div_p = _div(dP, winv_h, 2)
    div_q = _div(dQ, winv_h, 2)
    tau_p = contract("pa,qb,iab,qp->i", winv_h, winv_h, tl, data.P)

    full = zeros(K, (m, m))
    full[1:, 1:] = data.P
    full[0, 1:] = div_p * const(K, 2, 2 * n - 1) + div_q * const(K, 1, 2 * n - 1)
    full[1:, 0] = (
        div_p * const(K, 2, 2 * n - 1)
        - div_q * const(K, 1, 2 * (n - 1) * (2 * n - 1))
        - tau_p * const(K, 1, n - 1)
    )

    row = zeros(K, (m,))
    row[1:] = full[0, 1:]
    d_row = h_block(conn.nabla(row, "d"))
    upper = raise_both(data.P, winv_h) * K(2) + raise_both(data.Q, winv_h)
    full[0, 0] = (
        omega_trace(d_row, 1, 0, winv_h)
        - contract("pq,qp->", upper, data.P)
    ) * const(K, 1, n - 1)
    return full


def o_tensor(S: ContactProjectiveStructure, P: ObjMxM, Q: ObjMxM) -> ObjMxMxM:
    """:math:`O_{\\alpha\\beta}^\\gamma = 2(\\delta_\\alpha^0P_\\beta^\\gamma +
    \\delta_\\beta^0P_\\alpha^\\gamma - \\delta_\\alpha^0\\delta_\\beta^0P_0^\\gamma) +
    \\delta_\\alpha^0Q_\\beta^\\gamma - \\frac12\\delta_0^\\gamma\\omega_{\\alpha\\beta}`"""
    frame = S.frame
    K = frame.K
    m = frame.dim
    winv_h = h_block(frame.winv)
    two = K(2)
    P_up = raise_index(P[:, 1:], winv_h, 1)
    Q_up = raise_index(Q, winv_h, 1)

    out = zeros(K, (m, m, m))
    out[1:, 1:, 0] = h_block(frame.w) * const(K, -1, 2)
    out[0, 1:, 1:] = P_up[1:] * two + Q_up
    out[1:, 0, 1:] = P_up[1:] * two
    out[0, 0, 1:] = P_up[0] * two
    return out


def ambient_connection(
    S: ContactProjectiveStructure, data: CurvatureData | None = None
) -> AmbientConnection:
    data = invariant_tensors(S) if data is None else data
    P = p_tensor(S, data)
    A = AmbientConnection(S.canonical, P, o_tensor(S, P, data.Q), data.Q)
    logger.debug("ambient connection assembled in dimension %d", A.dim)
    return A


def perturbed(A: AmbientConnection, which: str, index, delta=1) -> AmbientConnection:
    """Copy of ``A`` with one component of P or O shifted by ``delta``

    Args:
        A (AmbientConnection): the connection to perturb
        which (str): ``"P"`` or ``"O"``
        index (tuple): the base frame index of the component
        delta (int, optional): the shift. Defaults to 1.
    """
    if which not in ("P", "O"):
        raise NotImplementedError(f"Unknown ambient component {which}")

    fields = dict(P=A.P.copy(), O=A.O.copy())
    value = fields[which]
    value[index] = value[index] + A.K(delta)
    return AmbientConnection(A.base, fields["P"], fields["O"], A.Q)


def ricci_traces(A: AmbientConnection, R: ObjMxMxMxM):
    """:math:`\\hat R_{IJ} = \\hat R_{IPJ}^P` and
    :math:`\\hat S_{IJ} = \\hat R_Q{}^Q{}_{IJ}`"""
    frame = A.frame
    R4 = lower_index(R, frame.omega, 3)
    return ricci(R), omega_trace(R4, 0, 1, frame.omega_inv), R4


def verify_ambient_axioms(A: AmbientConnection, R: ObjMxMxMxM | None = None) -> Report:
    R = A.curvature() if R is None else R
    frame = A.frame
    K = A.K
    n = frame.n
    M = A.dim
    Ric, S_hat, _ = ricci_traces(A, R)
    tau = A.torsion
    not_reeb = [INF] + list(range(2, M))
    bar = A.projected()
    geodesic_theta, geodesic_h = geodesic_residual(A.O, n)

    euler = (
        check("euler-field-derivative", A.nabla(euler_field(frame), "u") - identity(K, M)),
        check("euler-field-torsion", tau[INF]),
    )
    induced = (
        check(
            "projected-contact-geodesics",
            h_block(symmetrize(theta_derivative(bar), (0, 1))),
        ),
        check("projected-same-geodesics-reeb", geodesic_theta),
        check("projected-same-geodesics", geodesic_h),
    )
    tautological = check(
        "tautological-form-derivative",
        A.nabla(tautological_form(frame), "d", weight=2) - frame.omega * const(K, 1, 2),
        tag="ambient-tautological-form",
    )

    return Report(
        "ambient axioms",
        identity_tag("ambient-euler-field", euler)
        + (
            check(
                "omega-parallel",
                A.nabla(frame.omega, "dd", weight=2),
                tag="ambient-omega-parallel",
            ),
            check("ricci-flat", Ric, tag="ambient-ricci-flat"),
            check(
                "trace-s-on-ker-alpha",
                S_hat[np.ix_(not_reeb, not_reeb)],
                tag="ambient-trace-condition",
            ),
        )
        + identity_tag("ambient-induces-structure", induced)
        + (tautological,),
    )


def ambient_curvature_blocks(
    S: ContactProjectiveStructure,
    A: AmbientConnection,
    data: CurvatureData | None = None,
    R: ObjMxMxMxM | None = None,
) -> Report:
    """Blocks of the ambient curvature against the tensors of the base"""
    data = invariant_tensors(S) if data is None else data
    R = A.curvature() if R is None else R
    frame = S.frame
    amb = A.frame
    conn = S.canonical
    K = frame.K
    n = frame.n
    half = const(K, 1, 2)
    w_h = h_block(frame.w)
    winv_h = h_block(frame.winv)
    P = A.P
    Ph = data.P
    tau_hat = A.torsion
    tau_h = h_block(S.torsion)
    Ric_hat, S_hat, R4_hat = ricci_traces(A, R)

    U = R[H, H, H, INF]
    V = R[H, H, REEB, INF] * half
    A_block = R[REEB, H, H, INF]

    dP = h_block(nabla_h(conn, Ph, "dd"), (0,))
    col = zeros(K, (frame.dim,))
    col[1:] = P[1:, 0]
    d_col = h_block(conn.nabla(col, "d"))
    P_upper = raise_both(Ph, winv_h)
    P_skew_i0 = (P[1:, 0] - P[0, 1:]) * half

    blocks = (
        check("weyl-block", R[H, H, H, H] - data.W),
        check("cotton-block", lower_index(R[REEB, H, H, H], w_h, 2) - data.C),
    )
    torsion = (
        check("torsion-contact-block", tau_hat[H, H, H] - tau_h),
        check("torsion-reeb-block", tau_hat[REEB, H, H] - raise_index(data.Q, winv_h, 1)),
        check("torsion-euler-component", tau_hat[1:, 1:, INF] - (P - P.T)),
        check("torsion-reeb-component", tau_hat[H, H, REEB]),
        check("torsion-reeb-reeb-component", tau_hat[H, REEB, REEB]),
    )
    traces = (
        check("u-trace", omega_trace(U, 1, 2, winv_h) - P_skew_i0),
        check("a-trace", np.atleast_1d(omega_trace(A_block, 0, 1, winv_h))),
        check(
            "v-trace",
            np.atleast_1d(omega_trace(V, 0, 1, winv_h) - S_hat[REEB, REEB] * const(K, 1, 4)),
        ),
    )
    s_tensor = (
        check("s-i0-from-u", S_hat[H, REEB] - omega_trace(U, 0, 1, winv_h) * K(2)),
        check(
            "s-i0-from-p",
            S_hat[H, REEB]
            + _div(dP, winv_h, 1) * K(4)
            - P[1:, 0] * K(2)
            - P[0, 1:] * K(4 * (n - 1)),
        ),
        check(
            "s-00-from-p",
            np.atleast_1d(
                S_hat[REEB, REEB]
                - omega_trace(d_col, 0, 1, winv_h) * K(4)
                - P[0, 0] * K(4 * (n - 1))
                - contract("pq,pq->", Ph, P_upper) * K(8)
            ),
        ),
        check(
            "s-i0-torsion-invariant",
            S_hat[H, REEB] * K(1 - n) - s_i0_invariant(S, data),
        ),
    )
    bianchi = (
        check("curvature-symmetric-last-pair", antisymmetrize(R4_hat, (2, 3))),
        check(
            "torsion-cyclic",
            antisymmetrize(lower_index(tau_hat, amb.omega, 2), (0, 1, 2)),
        ),
        check("torsion-trace-free", np.trace(tau_hat, axis1=1, axis2=2)),
        check("contracted-first-bianchi", contracted_first_bianchi(A, R, Ric_hat, S_hat)),
    )

    if is_zero_array(tau_h):
        torsion_free = (
            check("torsion-free-ambient", tau_hat),
            check("s-i0-vanishes", S_hat[H, REEB]),
            check("s-00-vanishes", np.atleast_1d(S_hat[REEB, REEB])),
        )
    else:
        torsion_free = (skipped("torsion-free-ambient", "contact torsion is not zero"),)

    checks = (
        identity_tag("ambient-curvature-blocks", blocks)
        + identity_tag("ambient-torsion-blocks", torsion)
        + identity_tag("ambient-block-traces", traces)
        + identity_tag("ambient-s-tensor", s_tensor)
        + identity_tag("ambient-bianchi", bianchi)
        + identity_tag("ambient-torsion-free", torsion_free)
    )
    return Report("ambient curvature", checks)


def s_i0_invariant(S: ContactProjectiveStructure, data: CurvatureData) -> ObjM:
    """:math:`\\tau^{pqr}(W_{pqri} + 2\\omega_{ri}P_{pq})`"""
    frame = S.frame
    w_h = h_block(frame.w)
    winv_h = h_block(frame.winv)
    tl = h_block(lowered(S.torsion, frame))
    tau_up = contract("pa,qb,rc,abc->pqr", winv_h, winv_h, winv_h, tl)
    W4 = lower_index(data.W, w_h, 3)
    return contract("pqr,pqri->i", tau_up, W4) + contract(
        "pqr,ri,pq->i", tau_up, w_h, data.P
    ) * frame.K(2)


def contracted_first_bianchi(A: AmbientConnection, R, Ric_hat, S_hat) -> ObjMxM:
    """:math:`2\\hat R_{KL} + \\hat S_{KL}` minus the :math:`\\Omega`-trace over the
    first pair of the cyclic sum of :math:`\\hat\\nabla_I\\hat\\tau_{JKL} +
    \\hat\\tau_{IJ}^P\\hat\\tau_{PKL}`"""
    frame = A.frame
    tau = A.torsion
    tau_low = lower_index(tau, frame.omega, 2)
    Y = A.nabla(tau_low, "ddd", weight=2) + contract("ijp,pkl->ijkl", tau, tau_low)
    cyclic = Y + np.einsum("jkil->ijkl", Y) + np.einsum("kijl->ijkl", Y)
    rhs = np.tensordot(frame.omega_inv, cyclic, axes=([0, 1], [0, 1]))
    return Ric_hat * frame.K(2) + S_hat - rhs


def vanishing_torsion_identities(
    S: ContactProjectiveStructure,
    A: AmbientConnection | None = None,
    data: CurvatureData | None = None,
    R: ObjMxMxMxM | None = None,
) -> Report:
    """Ambient curvature blocks in terms of P, C, W when the contact torsion vanishes

    Raises:
        PreconditionError: when the contact torsion does not vanish
    """
    if not is_zero_array(h_block(S.torsion)):
        raise PreconditionError("these identities need vanishing contact torsion")

    data = invariant_tensors(S) if data is None else data
    A = ambient_connection(S, data) if A is None else A
    R = A.curvature() if R is None else R
    frame = S.frame
    conn = S.canonical
    K = frame.K
    n = frame.n
    half = const(K, 1, 2)
    w_h = h_block(frame.w)
    winv_h = h_block(frame.winv)
    C = data.C
    P_upper = raise_both(data.P, winv_h)
    W4 = lower_index(data.W, w_h, 3)

    U = R[H, H, H, INF]
    V = R[H, H, REEB, INF] * half
    A_block = R[REEB, H, H, INF]
    B = R[REEB, H, REEB, INF] * half

    dC = h_block(nabla_h(conn, C, "ddd"), (0,))
    div_c = np.tensordot(dC, winv_h, axes=([0, 3], [0, 1]))
    dW = h_block(nabla_h(conn, data.W, "dddu"), (0,))
    div_w = np.trace(dW, axis1=0, axis2=4)

    C_up = embed_h(contract("qa,pb,abi->qpi", winv_h, winv_h, C), K)
    first = conn.nabla(C_up, "uud")
    second = h_block(conn.nabla(first, "duud"))
    div2_c = contract("pqqpi->i", second)

    a_block = check(
        "a-from-cotton",
        A_block * K(2 * (1 - n))
        - div_c
        - contract("pijq,pq->ij", W4, P_upper) * K(2),
        tag="a-block-identity",
    )
    u_block = identity_tag(
        "u-block-identity",
        (
            check("u-from-cotton", U + antisymmetrize(C, (0, 1))),
            check("u-from-weyl", U * K(1 - 2 * n) - div_w),
        ),
    )
    b_block = check(
        "b-from-cotton",
        B * K(2 * (n - 1)) - div2_c + contract("ipq,pq->i", C, P_upper) * K(2),
        tag="b-block-identity",
    )
    v_block = identity_tag(
        "v-block-identity",
        (
            check("v-from-a", V + antisymmetrize(A_block, (0, 1))),
            check(
                "v-from-cotton",
                V * K(2 * (n - 1))
                - antisymmetrize(div_c, (0, 1))
                + contract("ijpq,pq->ij", W4, P_upper),
            ),
        ),
    )
    return Report("vanishing torsion", (a_block,) + u_block + (b_block,) + v_block)
