"""Curvature of canonical representatives and the invariant tensors P, Q, W, C

Index conventions follow :mod:`cproj.tensor`: ``R[a, b, c, s]`` is
:math:`R_{abc}^s` with :math:`R(E_a, E_b)E_c = R_{abc}^sE_s`, lowered tensors
are lowered on their last slot with ω and H-tensors exclude the Reeb index.
"""

import logging
from typing import Tuple

import equinox as eqx
import numpy as np

from cproj.errors import PreconditionError
from cproj.geometry import FrameConnection, log_derivative
from cproj.report import Report, check, identity_tag, skipped, verdict
from cproj.scalar import Scalar
from cproj.structure import ContactProjectiveStructure, lowered, rescaled, scale_difference
from cproj.tensor import (
    antisymmetrize,
    const,
    contract,
    embed_h,
    h_block,
    h_trace,
    identity,
    is_zero_array,
    linear_curvature,
    lower_index,
    omega_trace,
    raise_index,
    symmetrize,
    zeros,
)
from cproj.types import ObjHxH, ObjHxHxH, ObjHxHxHxH, ObjMxM, ObjMxMxMxM, ScalarArray

logger = logging.getLogger(__name__)


def curvature(conn: FrameConnection) -> ObjMxMxMxM:
    """:math:`R_{\\alpha\\beta\\gamma}^\\sigma` from Γ and the structure functions"""
    return linear_curvature(conn.gamma, conn.frame.derivative, conn.frame.c)


def ricci(R: ObjMxMxMxM) -> ObjMxM:
    """:math:`R_{\\alpha\\beta} = R_{\\alpha\\sigma\\beta}^\\sigma`"""
    return np.trace(R, axis1=1, axis2=3)


def _entry(x) -> ScalarArray:
    return np.atleast_1d(np.asarray(x, dtype=object))


class CurvatureData(eqx.Module):
    """Curvature of a canonical representative with its trace and invariant parts

    ``R``, ``R4`` and ``ricci`` are full frame arrays, the remaining tensors are
    restricted to the contact distribution.
    """

    R: ObjMxMxMxM
    R4: ObjMxMxMxM
    ricci: ObjMxM
    rho: ObjHxH
    P: ObjHxH
    Q: ObjHxH
    W: ObjHxHxHxH
    C: ObjHxHxH

    @property
    def ricci_h(self) -> ObjHxH:
        return h_block(self.ricci)

    def to_dict(self) -> dict:
        return dict(R=self.R, ricci=self.ricci, rho=self.rho, P=self.P, Q=self.Q, W=self.W, C=self.C)


def nabla_h(conn: FrameConnection, T: ScalarArray, variance: str) -> ScalarArray:
    """Covariant derivative of an H-tensor, restricted to the contact distribution in
    its tensor slots; the derivative slot keeps the Reeb direction"""
    full = conn.nabla(embed_h(T, conn.K), variance)
    return h_block(full, range(1, full.ndim))


def invariant_tensors(S: ContactProjectiveStructure) -> CurvatureData:
    frame = S.frame
    conn = S.canonical
    K = frame.K
    n = frame.n
    w_h = h_block(frame.w)
    winv_h = h_block(frame.winv)

    R = curvature(conn)
    R4 = lower_index(R, frame.w, 3)
    Ric = ricci(R)
    Ric_h = h_block(Ric)
    rho = h_block(omega_trace(R4, 0, 1, frame.winv))
    skew = antisymmetrize(Ric_h, (0, 1))

    P = (
        Ric_h * K(n - 1) - skew * const(K, 1, 2 * n - 1) + rho * const(K, 1, 4)
    ) * const(K, 1, n * (2 * n - 3))
    Q = (Ric_h * K(2) + rho - skew * const(K, 4, 2 * n - 1)) * const(K, 1, 3 - 2 * n)

    # identically zero in dimension three
    W = weyl(R, P, Q, frame.w, frame.winv)

    C = cotton(conn, R4, P, Q, w_h, winv_h)
    logger.debug("invariant tensors computed for n = %d", n)
    return CurvatureData(R, R4, Ric, rho, P, Q, W, C)


def weyl(R, P, Q, w, winv) -> ObjHxHxHxH:
    """:math:`W_{ijk}^l = R_{ijk}^l + \\delta_i^lP_{jk} - \\delta_j^lP_{ik} +
    \\omega_{kj}P_i^l - \\omega_{ki}P_j^l + 2\\omega_{ij}P_k^l + \\omega_{ij}Q_k^l`"""
    K = P[0, 0].field
    w_h = h_block(w)
    winv_h = h_block(winv)
    delta = identity(K, P.shape[0])
    P_up = raise_index(P, winv_h, 1)
    Q_up = raise_index(Q, winv_h, 1)
    return (
        h_block(R)
        + contract("il,jk->ijkl", delta, P)
        - contract("jl,ik->ijkl", delta, P)
        + contract("kj,il->ijkl", w_h, P_up)
        - contract("ki,jl->ijkl", w_h, P_up)
        + contract("ij,kl->ijkl", w_h, P_up) * K(2)
        + contract("ij,kl->ijkl", w_h, Q_up)
    )


def cotton(conn, R4, P, Q, w_h, winv_h) -> ObjHxHxH:
    """Contact projective Cotton tensor from :math:`R_{0ijk}` and derivatives of P, Q"""
    K = P[0, 0].field
    n = conn.frame.n
    dP = h_block(nabla_h(conn, P, "dd"), (0,))
    dQ = h_block(nabla_h(conn, Q, "dd"), (0,))
    divP = np.tensordot(dP, winv_h, axes=([0, 2], [0, 1]))
    divQ = np.tensordot(dQ, winv_h, axes=([0, 2], [0, 1]))
    trace_part = (
        contract("ik,j->ijk", w_h, divP) * K(2)
        + contract("ik,j->ijk", w_h, divQ)
        + contract("ij,k->ijk", w_h, divP) * K(2)
        + contract("ij,k->ijk", w_h, divQ)
    )
    return (
        R4[0, 1:, 1:, 1:]
        - (dP * K(2) + dQ)
        + trace_part * const(K, 1, 2 * n - 1)
    )


def curvature_invariants(S: ContactProjectiveStructure, data: CurvatureData) -> Report:
    """The algebraic identities satisfied by the curvature of any canonical
    representative"""
    frame = S.frame
    winv_h = h_block(frame.winv)
    w_h = h_block(frame.w)
    W4 = lower_index(data.W, w_h, 3)
    K = frame.K

    symmetries = identity_tag(
        "curvature-symmetries",
        [
            check("curvature-preserves-theta", data.R[:, :, :, 0]),
            check("curvature-kills-reeb", data.R[:, :, 0, :]),
            check("curvature-antisymmetric", data.R + data.R.transpose(1, 0, 2, 3)),
            check("ricci-reeb-row", data.ricci[0]),
            check("ricci-reeb-column", data.ricci[:, 0]),
        ],
    )
    traces = identity_tag(
        "curvature-traces",
        [
            check("p-trace", _entry(omega_trace(data.P, 0, 1, winv_h))),
            check("q-trace", _entry(omega_trace(data.Q, 0, 1, winv_h))),
            check("weyl-trace-first-pair", np.tensordot(W4, winv_h, axes=([0, 1], [0, 1]))),
            check("weyl-trace-last-pair", np.trace(data.W, axis1=2, axis2=3)),
            check(
                "weyl-trace-middle",
                np.trace(data.W, axis1=1, axis2=3) + data.Q * const(K, 1, 2),
            ),
            check("cotton-trace-last", np.tensordot(data.C, winv_h, axes=([1, 2], [0, 1]))),
            check("cotton-trace-first", np.tensordot(data.C, winv_h, axes=([0, 1], [0, 1]))),
            check("cotton-symmetric-last-pair", antisymmetrize(data.C, (1, 2))),
        ],
    )
    return Report("curvature invariants", symmetries + traces)


def bianchi_suite(S: ContactProjectiveStructure, data: CurvatureData | None = None) -> Report:
    """Traces of the Bianchi identities of the canonical representative"""
    data = invariant_tensors(S) if data is None else data
    frame = S.frame
    conn = S.canonical
    K = frame.K
    n = frame.n
    winv = frame.winv
    winv_h = h_block(winv)
    tau = S.torsion
    tau_h = h_block(tau)
    tau_low = lowered(tau, frame)
    tl = h_block(tau_low)
    R, R4, Ric = data.R, data.R4, data.ricci
    Rh, R4h, Ric_h = h_block(R), h_block(R4), data.ricci_h
    rho_full = omega_trace(R4, 0, 1, winv)
    half = const(K, 1, 2)

    d_tau_low = conn.nabla(tau_low, "ddd")
    d_tau = conn.nabla(tau, "ddu")
    dR = conn.nabla(R, "dddu")
    dR4 = conn.nabla(R4, "dddd")
    drho = conn.nabla(rho_full, "dd")
    dRic = conn.nabla(Ric, "dd")

    contracted_first = (
        h_block(omega_trace(d_tau_low, 0, 1, winv)) * K(2)
        - contract("pa,qb,abj,pqi->ij", winv_h, winv_h, tl, tl)
    )
    skew_second = (
        h_block(omega_trace(dR4, 0, 1, winv))
        + h_block(drho) * half
        + contract("pa,qb,iab,pqjk->ijk", winv_h, winv_h, tl, R4h)
    )
    ricci_second = (
        h_trace(dR, 0, 4)[1:, 1:, 1:]
        + h_block(antisymmetrize(dRic, (0, 1))) * K(2)
    )
    ricci_second_rhs = (
        -contract("ijp,pk->ijk", tau_h, Ric_h)
        + antisymmetrize(contract("piq,jqkp->ijk", tau_h, Rh), (0, 1)) * K(2)
        + antisymmetrize(R4[0, 1:, 1:, 1:], (0, 1)) * K(2)
    )
    skew_second_a = (
        np.tensordot(h_block(drho), winv_h, axes=([0, 2], [0, 1]))
        - np.tensordot(h_block(dRic), winv_h, axes=([1, 0], [0, 1])) * K(2)
    )
    zero_second = (
        dR4[0, 1:, 1:, 1:, 1:]
        + dR4[1:, 1:, 0, 1:, 1:]
        - dR4[1:, 1:, 0, 1:, 1:].transpose(1, 0, 2, 3)
    )
    zero_second_trace = (
        drho[0, 1:, 1:]
        - np.tensordot(dR4[1:, 1:, 0, 1:, 1:], winv_h, axes=([1, 0], [0, 1])) * K(2)
    )
    zero_ricci_trace = dRic[0, 1:, 1:] + np.trace(dR[1:, 0, 1:, 1:, 1:], axis1=0, axis2=3)

    first = [
        check(
            "first-bianchi-contracted",
            data.rho + Ric_h * K(2) - contracted_first,
        ),
        check(
            "ricci-skew-part",
            antisymmetrize(Ric_h, (0, 1)) + h_trace(d_tau, 0, 3)[1:, 1:] * half,
        ),
        check("ricci-omega-trace", _entry(omega_trace(Ric_h, 0, 1, winv_h))),
        check(
            "reeb-curvature-skew",
            (R[0, 1:, 1:, 1:] - R[0, 1:, 1:, 1:].transpose(1, 0, 2)) - d_tau[0, 1:, 1:, 1:],
        ),
        check(
            "torsion-norm",
            _entry(contract("pa,qb,rc,abc,pqr->", winv_h, winv_h, winv_h, tl, tl)),
        ),
    ]

    if is_zero_array(tau_h):
        first.append(check("torsion-free-rho", data.rho + Ric_h * K(2)))
    else:
        first.append(skipped("torsion-free-rho", "contact torsion is not zero"))

    second = [
        check(
            "second-bianchi-skew-trace",
            R4[0, 1:, 1:, 1:] * K(2 - n) - skew_second,
        ),
        check("second-bianchi-ricci-trace", ricci_second - ricci_second_rhs),
        check(
            "second-bianchi-skew-trace-divergence",
            skew_second_a - contract("qa,pb,abl,qpil->i", winv_h, winv_h, tl, Rh),
        ),
        check(
            "second-bianchi-reeb",
            zero_second - contract("ijp,pkl->ijkl", tau_h, R4[0, 1:, 1:, 1:]),
        ),
        check("second-bianchi-reeb-trace", zero_second_trace),
        check(
            "second-bianchi-reeb-ricci-trace",
            zero_ricci_trace - contract("iqp,pjq->ij", tau_h, R[0, 1:, 1:, 1:]),
        ),
    ]
    decomposition = [
        check(
            "q-skew-equals-p-skew",
            antisymmetrize(data.Q, (0, 1)) + antisymmetrize(data.P, (0, 1)) * K(2),
        ),
        check("q-from-ricci", data.Q - Ric_h * K(2) + data.P * K(4 * n)),
    ]

    checks = (
        identity_tag("first-bianchi", first)
        + identity_tag("second-bianchi", second)
        + identity_tag("ricci-decomposition", decomposition)
    )
    report = curvature_invariants(S, data)
    return Report("bianchi", checks + report.checks)


def gamma_tensors(S: ContactProjectiveStructure, f: Scalar):
    """γ = d log f, its raised H-part and
    :math:`\\gamma_{ij} = \\nabla_i\\gamma_j - \\gamma_i\\gamma_j + \\frac12\\gamma_0\\omega_{ij}`"""
    frame = S.frame
    K = frame.K
    gamma = log_derivative(frame, f)
    gamma_up = frame.raise_index(gamma, 0)
    g = gamma[1:]
    dg = h_block(S.canonical.nabla(gamma, "d"))
    gij = dg - np.outer(g, g) + h_block(frame.w) * gamma[0] * const(K, 1, 2)
    return gamma, gamma_up[1:], gij


def scale_covariance_check(
    S: ContactProjectiveStructure,
    f: Scalar,
    data: CurvatureData | None = None,
) -> Report:
    """Transformation laws of the curvature tensors under :math:`\\theta \\mapsto f^2\\theta`

    Left sides are computed from the canonical representative of the new scale in
    its own frame, right sides from the tensors of the old scale.
    """
    data = invariant_tensors(S) if data is None else data
    frame = S.frame
    K = frame.K
    n = frame.n
    tilde_S = rescaled(S, f)
    tilde = invariant_tensors(tilde_S)
    gamma, g_up, gij = gamma_tensors(S, f)
    g = gamma[1:]
    tau_h = h_block(S.torsion)
    tl = h_block(lowered(S.torsion, frame))
    W4 = lower_index(data.W, h_block(frame.w), 3)

    g_tau_first = contract("p,pij->ij", g_up, tl)
    g_tau_last = contract("p,ijp->ij", g_up, tl)
    d_cotton = (
        (contract("p,pijk->ijk", g_up, W4)
         + contract("p,pij,k->ijk", g_up, tl, g)
         + contract("p,pik,j->ijk", g_up, tl, g)) * K(2)
        + contract("ij,k->ijk", data.Q, g)
        + contract("ik,j->ijk", data.Q, g)
    )

    laws = identity_tag(
        "curvature-scale-laws",
        (
            check(
                "ricci-scale-law",
                tilde.ricci_h - data.ricci_h - gij * K(2 * n) - g_tau_first,
            ),
            check(
                "rho-scale-law",
                tilde.rho - data.rho + gij * K(4 * n) - g_tau_last * K(2)
                - g_tau_first * K(4 * (1 - n)),
            ),
            check(
                "ricci-skew-scale-law",
                (antisymmetrize(tilde.ricci_h, (0, 1)) - antisymmetrize(data.ricci_h, (0, 1))) * K(2)
                - g_tau_last * K(2 * n - 1),
            ),
            check("p-scale-law", tilde.P - data.P - gij),
            check("q-scale-law", tilde.Q - data.Q - g_tau_first * K(2)),
        ),
    )
    weyl_cotton = identity_tag(
        "weyl-cotton-scale-laws",
        (
            check(
                "weyl-scale-law",
                tilde.W - data.W - contract("k,ijl->ijkl", g, tau_h)
                - contract("l,ijk->ijkl", g_up, tl),
            ),
            check("cotton-scale-law", tilde.C - data.C - d_cotton),
        ),
    )
    difference = curvature_difference_check(
        S.canonical, S.canonical.deformed(scale_difference(S, f))
    )
    return Report("scale covariance", laws + weyl_cotton + (difference,))


def curvature_difference_check(a: FrameConnection, b: FrameConnection):
    """Curvature of ``b`` against that of ``a`` through their difference tensor

    :math:`\\tilde R - R = \\nabla_\\alpha\\Lambda_{\\beta\\gamma}^\\sigma -
    \\nabla_\\beta\\Lambda_{\\alpha\\gamma}^\\sigma + \\Lambda_{\\beta\\gamma}^\\epsilon
    \\Lambda_{\\alpha\\epsilon}^\\sigma - \\Lambda_{\\alpha\\gamma}^\\epsilon
    \\Lambda_{\\beta\\epsilon}^\\sigma + \\tau_{\\alpha\\beta}^\\epsilon
    \\Lambda_{\\epsilon\\gamma}^\\sigma`
    """
    lam = b.gamma - a.gamma
    d_lam = a.nabla(lam, "ddu")
    quad = contract("bge,aes->abgs", lam, lam)
    expected = (
        d_lam
        - d_lam.transpose(1, 0, 2, 3)
        + quad
        - quad.transpose(1, 0, 2, 3)
        + contract("abe,egs->abgs", a.torsion, lam)
    )
    return check(
        "curvature-difference", curvature(b) - curvature(a) - expected, tag="curvature-difference"
    )


def ricci_identity_check(conn: FrameConnection, T: ScalarArray, variance: str):
    """:math:`2\\nabla_{[\\alpha}\\nabla_{\\beta]}T + \\tau_{\\alpha\\beta}^\\delta
    \\nabla_\\delta T` against the curvature action on ``T``"""
    R = curvature(conn)
    T = np.asarray(T, dtype=object)
    first = conn.nabla(T, variance)
    second = conn.nabla(first, "d" + variance)
    lhs = (
        second
        - np.swapaxes(second, 0, 1)
        + np.tensordot(conn.torsion, first, axes=([2], [0]))
    )
    action = zeros(conn.K, lhs.shape)

    for slot, kind in enumerate(variance):
        if kind == "u":
            term = np.tensordot(R, T, axes=([2], [slot]))
        else:
            term = -np.tensordot(R, T, axes=([3], [slot]))

        action = action + np.moveaxis(term, 2, 2 + slot)

    return check(
        f"ricci-identity-{variance or 'density'}", lhs - action, tag="ricci-identity"
    )


class Flatness(eqx.Module):
    flat: bool = eqx.field(static=True)
    obstructions: Tuple[str, ...] = eqx.field(static=True)

    def __str__(self) -> str:
        if self.flat:
            return "flat"
        return "non-flat: " + ", ".join(self.obstructions) + " nonzero"


def flatness(S: ContactProjectiveStructure, data: CurvatureData | None = None) -> Flatness:
    """Flat iff torsion and Weyl tensor vanish, in dimension three iff C vanishes"""
    data = invariant_tensors(S) if data is None else data

    if S.n == 2:
        candidates = {"cotton": data.C}
    else:
        candidates = {"torsion": h_block(S.torsion), "weyl": data.W}

    nonzero = tuple(name for name, T in candidates.items() if not is_zero_array(T))
    return Flatness(flat=not nonzero, obstructions=nonzero)


def flatness_report(S: ContactProjectiveStructure, data: CurvatureData | None = None) -> Report:
    """The flatness verdict goes into the detail, it never fails"""
    result = flatness(S, data)
    flat = verdict("flat", True, detail=str(result), tag="flatness-criterion")
    return Report("flatness", (flat,))


def cotton_weyl_relation(S: ContactProjectiveStructure, data: CurvatureData | None = None) -> Report:
    """Divergences of the Weyl tensor in terms of the Cotton tensor

    Raises:
        PreconditionError: when the contact torsion does not vanish
    """
    if not is_zero_array(h_block(S.torsion)):
        raise PreconditionError("the Cotton-Weyl relation needs vanishing contact torsion")

    data = invariant_tensors(S) if data is None else data
    frame = S.frame
    conn = S.canonical
    K = frame.K
    n = frame.n
    winv_h = h_block(frame.winv)
    W4 = lower_index(data.W, h_block(frame.w), 3)

    dW4 = h_block(nabla_h(conn, W4, "dddd"), (0,))
    dW = h_block(nabla_h(conn, data.W, "dddu"), (0,))
    div_first = np.tensordot(dW4, winv_h, axes=([0, 1], [0, 1]))
    div_last = np.trace(dW, axis1=0, axis2=4)
    div_shifted = np.einsum("kij->ijk", div_last)

    checks = [
        check(
            "cotton-weyl",
            div_first
            + (div_last - div_shifted) * const(K, 1, 2 * n - 1)
            - data.C * K(2 - n),
        ),
        check(
            "weyl-divergence",
            antisymmetrize(data.C, (0, 1)) * K(2 * n - 1) - div_last,
        ),
    ]

    if n == 2:
        checks.append(check("cotton-symmetric", data.C - symmetrize(data.C, (0, 1, 2))))

    return Report("cotton weyl", identity_tag("cotton-weyl-relation", checks))
