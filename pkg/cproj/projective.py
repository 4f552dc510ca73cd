"""Projective structures attached to a contact projective structure

Covers the subordinate projective structure of the ambient connection, the
projective Weyl tensor and Thomas ambient connection of a torsion-free
connection, and the lift of a projective structure on a symplectic base to the
Heisenberg patch over it.
"""

import logging
from typing import Tuple

import numpy as np

from cproj.ambient import (
    AmbientConnection,
    AmbientFrame,
    ambient_coefficients,
    ambient_connection,
)
from cproj.curvature import CurvatureData, curvature, invariant_tensors, ricci
from cproj.errors import PreconditionError
from cproj.geometry import FrameConnection, coordinate_frame, flat_model
from cproj.report import Report, check, identity_tag, skipped
from cproj.scalar import Scalar
from cproj.structure import (
    ContactProjectiveStructure,
    lowered,
    theta_derivative,
    verify_canonical_conditions,
)
from cproj.tensor import (
    antisymmetrize,
    const,
    contract,
    h_block,
    identity,
    inverse,
    is_zero_array,
    lower_index,
    raise_index,
    symmetrize,
    zeros,
)
from cproj.types import ObjM, ObjMxM, ObjMxMxM, ObjMxMxMxM

logger = logging.getLogger(__name__)


def projective_weyl(conn: FrameConnection) -> Tuple[ObjMxMxMxM, ObjMxM]:
    """Projective Weyl tensor and Schouten tensor of a torsion-free connection

    :math:`B_{\\alpha\\beta\\gamma}^\\sigma = R_{\\alpha\\beta\\gamma}^\\sigma +
    2\\delta_{[\\alpha}^\\sigma P_{\\beta]\\gamma} - 2P_{[\\alpha\\beta]}\\delta_\\gamma^\\sigma`
    with :math:`(m-1)P_{\\alpha\\beta} = R_{\\alpha\\beta} - \\frac{2}{m+1}R_{[\\alpha\\beta]}`.
    """
    K = conn.K
    m = conn.dim
    R = curvature(conn)
    Ric = ricci(R)
    P = (Ric - antisymmetrize(Ric, (0, 1)) * const(K, 2, m + 1)) * const(K, 1, m - 1)
    delta = identity(K, m)
    B = (
        R
        + contract("as,bg->abgs", delta, P)
        - contract("bs,ag->abgs", delta, P)
        - contract("ab,gs->abgs", P - P.T, delta)
    )
    return B, P


def volume_residual(conn: FrameConnection, density: Scalar | None = None) -> ObjM:
    """:math:`\\nabla_\\alpha\\mu` for :math:`\\mu = f\\,\\theta^0\\wedge\\dots\\wedge\\theta^{m-1}`
    as a multiple of μ / f"""
    f = conn.K.one if density is None else density
    df = conn.frame.derivative(np.array(f, dtype=object))
    return df - np.trace(conn.gamma, axis1=1, axis2=2) * f


def volume_parallel(conn: FrameConnection, density: Scalar | None = None) -> bool:
    return is_zero_array(volume_residual(conn, density))


def subordinate_projective(S: ContactProjectiveStructure, A: AmbientConnection | None = None):
    """The torsion-free part :math:`\\nabla'` of :math:`\\bar\\nabla_XY =
    \\rho_*(\\hat\\nabla_{\\hat X}\\hat Y)`"""
    A = ambient_connection(S) if A is None else A
    bar = A.projected()
    return bar.deformed(bar.torsion * const(S.K, -1, 2))


def subordinate_report(
    S: ContactProjectiveStructure,
    A: AmbientConnection | None = None,
    data: CurvatureData | None = None,
) -> Report:
    data = invariant_tensors(S) if data is None else data
    A = ambient_connection(S, data) if A is None else A
    frame = S.frame
    K = frame.K
    m = frame.dim
    prime = subordinate_projective(S, A)
    tau_h = h_block(S.torsion)
    tl = h_block(lowered(S.torsion, frame))
    P = A.P
    Ph = P[1:, 1:]
    Q = zeros(K, (m, m))
    Q[1:, 1:] = data.Q

    d_omega = prime.nabla(frame.w, "dd")
    expected_h = contract("ijp,pa->aij", tau_h, frame.w[1:, :]) * const(K, -1, 2)
    expected_h[0] = expected_h[0] + (Ph.T - Ph)

    B, _ = projective_weyl(prime)
    R_prime = curvature(prime)
    quarter = const(K, 1, 4)

    derivatives = (
        check("theta-derivative", theta_derivative(prime) - frame.w * const(K, 1, 2)),
        check("omega-derivative-contact", d_omega[:, 1:, 1:] - expected_h),
        check(
            "omega-derivative-reeb",
            d_omega[:, 1:, 0] - P[:, 1:] * K(2) - Q[:, 1:] * const(K, 1, 2),
        ),
    )
    reeb = (
        check("curvature-reeb-component", R_prime[1:, 1:, 1:, 0] + tl * quarter),
        check("projective-weyl-reeb-component", B[1:, 1:, 1:, 0] + tl * quarter),
    )
    return Report(
        "subordinate projective",
        (check("torsion-free", prime.torsion, tag="subordinate-torsion-free"),)
        + identity_tag("subordinate-derivatives", derivatives)
        + identity_tag("subordinate-weyl-reeb", reeb)
        + (
            check(
                "projective-weyl-trace",
                np.trace(B, axis1=0, axis2=3),
                tag="projective-weyl-traces",
            ),
        ),
    )


def thomas_ambient(conn: FrameConnection) -> FrameConnection:
    """Thomas ambient connection of a torsion-free volume-preserving connection

    :math:`\\hat\\nabla_V\\mathbb{X} = V` and
    :math:`\\hat\\nabla_{\\hat X}\\hat Y = (\\nabla_XY)^\\wedge + P(X, Y)\\mathbb{X}` with
    :math:`P_{\\alpha\\beta} = R_{\\alpha\\beta}/(m-1)`.

    Raises:
        PreconditionError: when the connection has torsion or does not preserve
            the frame volume
    """
    if not is_zero_array(conn.torsion):
        raise PreconditionError("the Thomas ambient connection needs a torsion-free connection")

    if not volume_parallel(conn):
        raise PreconditionError("the connection does not preserve the frame volume")

    K = conn.K
    P = ricci(curvature(conn)) * const(K, 1, conn.dim - 1)
    return FrameConnection(AmbientFrame(conn.frame), ambient_coefficients(conn.gamma, P))


def thomas_report(conn: FrameConnection) -> Report:
    """Ricci flatness of the Thomas ambient connection and its curvature blocks"""
    ambient = thomas_ambient(conn)
    R = curvature(ambient)
    B, P = projective_weyl(conn)
    dP = conn.nabla(P, "dd")
    return Report(
        "thomas ambient",
        identity_tag(
            "thomas-axioms",
            (
                check("torsion-free", ambient.torsion),
                check("ricci-flat", ricci(R)),
            ),
        )
        + identity_tag(
            "thomas-curvature-blocks",
            (
                check("projective-weyl-block", R[1:, 1:, 1:, 1:] - B),
                check(
                    "projective-cotton-block",
                    R[1:, 1:, 1:, 0] - (dP - dP.transpose(1, 0, 2)),
                ),
                check("horizontal-curvature", R[0]),
            ),
        ),
    )


def thomas_comparison(
    S: ContactProjectiveStructure, A: AmbientConnection | None = None
) -> Report:
    """Thomas ambient connection of the subordinate structure against the ambient
    connection; they agree componentwise when the contact torsion vanishes"""
    if not is_zero_array(h_block(S.torsion)):
        return Report(
            "thomas comparison",
            (
                skipped(
                    "thomas-equals-ambient",
                    "contact torsion is not zero",
                    tag="thomas-agreement",
                ),
            ),
        )

    A = ambient_connection(S) if A is None else A
    prime = subordinate_projective(S, A)
    return Report(
        "thomas comparison",
        identity_tag(
            "thomas-agreement",
            [
                check("volume-parallel", volume_residual(prime)),
                check("thomas-equals-ambient", thomas_ambient(prime).gamma - A.gamma),
            ],
        ),
    )


def symplectic_omega(K, k: int) -> ObjMxM:
    """:math:`\\omega_{i,k+i} = 1` on :math:`\\mathbb{R}^{2k}`"""
    w = zeros(K, (2 * k, 2 * k))

    for i in range(k):
        w[i, k + i] = K.one
        w[k + i, i] = -K.one

    return w


def projective_residual(lam: ObjMxMxM) -> ObjMxMxM:
    """Part of :math:`\\Lambda_{(ij)}^k` not of the form
    :math:`\\delta_i^k\\sigma_j + \\delta_j^k\\sigma_i`"""
    K = lam[0, 0, 0].field
    d = lam.shape[0]
    sym = symmetrize(lam, (0, 1))
    sigma = np.trace(sym, axis1=0, axis2=2) * const(K, 1, d + 1)
    delta = identity(K, d)
    return sym - contract("ik,j->ijk", delta, sigma) - contract("jk,i->ijk", delta, sigma)


def adapted_symplectic_representative(conn: FrameConnection) -> FrameConnection:
    """The representative of the projective class of ``conn`` with
    :math:`\\nabla\\omega = 0` and trace-free torsion

    First :math:`\\Lambda_{ijk} = -\\nabla_k\\omega_{ij} - \\frac32\\tau_{[ijk]}` makes ω
    parallel, then :math:`\\Lambda_{ijk} = \\frac{2}{2k+1}(\\omega_{ij}\\gamma_k +
    \\omega_{ik}\\gamma_j)` with :math:`\\gamma_i = \\frac12\\tau_{ip}^p` removes the trace.
    """
    K = conn.K
    d = conn.dim

    if d % 2:
        raise ValueError("Expect a connection on an even dimensional symplectic base")

    w = symplectic_omega(K, d // 2)
    winv = -inverse(w)

    d_omega = conn.nabla(w, "dd")
    cyclic = antisymmetrize(lower_index(conn.torsion, w, 2), (0, 1, 2))
    lam = -np.einsum("cab->abc", d_omega) - cyclic * const(K, 3, 2)
    parallel = conn.deformed(raise_index(lam, winv, 2))

    gamma = np.trace(parallel.torsion, axis1=1, axis2=2) * const(K, 1, 2)
    lam = (contract("ij,k->ijk", w, gamma) + contract("ik,j->ijk", w, gamma)) * const(
        K, 2, d + 1
    )
    return parallel.deformed(raise_index(lam, winv, 2))


def symplectic_lift(conn: FrameConnection) -> ContactProjectiveStructure:
    """Contact projective structure on the Heisenberg patch over a symplectic base

    The contact form and frame are those of :func:`~cproj.geometry.flat_model`,
    :math:`E_0 = 2\\partial_0` and the horizontal lifts
    :math:`E_i = \\partial_i + \\omega_{ip}x^p\\partial_0`. The lifted connection is
    :math:`\\hat\\nabla_{\\hat X}\\hat Y = (\\nabla_XY)^\\wedge` for the adapted
    representative ∇ and makes the Reeb field parallel.

    Args:
        conn (FrameConnection): any representative in the coordinate frame of
            :func:`~cproj.scalar.symplectic_chart`
    """
    k = conn.dim // 2
    adapted = adapted_symplectic_representative(conn)
    _, frame, _ = flat_model(k + 1)
    patch = frame.chart
    K = patch.K
    m = patch.dim

    gamma = zeros(K, (m, m, m))
    gamma[1:, 1:, 1:] = np.vectorize(patch.lift, otypes=[object])(adapted.gamma)
    logger.debug("lifted a projective structure from dimension %d", 2 * k)
    return ContactProjectiveStructure(frame, FrameConnection(frame, gamma))


def symplectic_lift_report(conn: FrameConnection) -> Report:
    adapted = adapted_symplectic_representative(conn)
    w = symplectic_omega(conn.K, conn.dim // 2)
    lifted = symplectic_lift(conn)
    adapted_checks = identity_tag(
        "adapted-representative",
        (
            check("omega-parallel", adapted.nabla(w, "dd")),
            check("torsion-trace-free", np.trace(adapted.torsion, axis1=1, axis2=2)),
            check(
                "same-projective-structure",
                projective_residual(adapted.gamma - conn.gamma),
            ),
        ),
    )
    return Report(
        "symplectic lift",
        adapted_checks + verify_canonical_conditions(lifted.canonical).checks,
    )


def flat_affine(chart) -> FrameConnection:
    frame = coordinate_frame(chart)
    return FrameConnection(frame, zeros(chart.K, (chart.dim,) * 3))
