"""Contact projective structures and their canonical representatives

A structure is stored as an adapted frame together with the unique connection
of that scale which is compatible with θ and dθ, has Reeb-free torsion and
trace-free contact torsion. Difference tensors are componentwise differences of
connection coefficients in one frame.
"""

import logging
from typing import Tuple

import equinox as eqx
import numpy as np

from cproj.errors import PreconditionError, RepresentativeError
from cproj.geometry import (
    AdaptedFrame,
    FrameConnection,
    change_frame,
    flat_model,
    log_derivative,
    rescale,
)
from cproj.report import Report, check, identity_tag
from cproj.scalar import Chart, Scalar, random_polynomial
from cproj.tensor import (
    antisymmetrize,
    const,
    contract,
    embed_h,
    h_block,
    identity,
    is_zero_array,
    omega_trace,
    raise_index,
    symmetric_tensor,
    symmetrize,
    zeros,
)
from cproj.types import ObjHxHxH, ObjM, ObjMxMxM

logger = logging.getLogger(__name__)


class ContactProjectiveStructure(eqx.Module):
    frame: AdaptedFrame
    canonical: FrameConnection

    @property
    def n(self) -> int:
        return self.frame.n

    @property
    def K(self):
        return self.frame.K

    @property
    def torsion(self) -> ObjMxMxM:
        return self.canonical.torsion


def difference_tensor(a: FrameConnection, b: FrameConnection) -> ObjMxMxM:
    """:math:`\\Lambda = \\Gamma_b - \\Gamma_a` after moving ``b`` into the frame of ``a``"""
    if b.frame is not a.frame:
        b = change_frame(b, a.frame)

    return b.gamma - a.gamma


def theta_derivative(conn: FrameConnection) -> ObjMxMxM:
    """:math:`\\nabla_\\alpha\\theta_\\beta`, θ being the constant coframe element 0"""
    return -conn.gamma[:, :, 0]


def admits_contact_geodesics(conn: FrameConnection) -> bool:
    """True iff :math:`\\nabla_{(i}\\theta_{j)} = 0`"""
    return is_zero_array(h_block(symmetrize(theta_derivative(conn), (0, 1))))


def geodesic_residual(lam: ObjMxMxM, n: int) -> Tuple[ObjMxMxM, ObjMxMxM]:
    """Residuals of the test that a difference tensor preserves contact geodesics

    A difference tensor preserves the contact geodesics iff
    :math:`\\Lambda_{(ij)}^0 = 0` and
    :math:`\\Lambda_{(ij)}^k = \\delta_i^k\\sigma_j + \\delta_j^k\\sigma_i` where
    :math:`(2n-1)\\sigma_i = \\Lambda_{(ip)}^p`.
    """
    K = lam[0, 0, 0].field
    sym = h_block(symmetrize(lam, (0, 1)), (0, 1))
    h = sym.shape[0]
    sigma = np.trace(sym[:, :, 1:], axis1=1, axis2=2) * const(K, 1, 2 * n - 1)
    delta = identity(K, h)
    expected = contract("ik,j->ijk", delta, sigma) + contract("jk,i->ijk", delta, sigma)
    return sym[:, :, 0], sym[:, :, 1:] - expected


def same_contact_geodesics(lam: ObjMxMxM, n: int) -> bool:
    return all(is_zero_array(r) for r in geodesic_residual(lam, n))


def _theta_parallel(conn: FrameConnection) -> ObjMxMxM:
    K, m = conn.K, conn.dim
    lam = zeros(K, (m, m, m))
    lam[:, :, 0] = -conn.gamma[:, :, 0]
    return lam


def _reeb_parallel(conn: FrameConnection) -> ObjMxMxM:
    K, m = conn.K, conn.dim
    lam = zeros(K, (m, m, m))
    lam[:, 0, :] = -conn.gamma[:, 0, :]
    return lam


def _reeb_torsion_free(conn: FrameConnection) -> ObjMxMxM:
    K, m = conn.K, conn.dim
    lam = zeros(K, (m, m, m))
    lam[0] = -conn.torsion[0]
    return lam


def _dtheta_parallel(conn: FrameConnection) -> ObjMxMxM:
    frame = conn.frame
    tau = conn.torsion
    nabla_w = conn.nabla(frame.w, "dd")
    skew = antisymmetrize(contract("abp,kp->abk", tau, frame.w), (0, 1, 2))
    lower = skew * const(conn.K, 3, 2) - nabla_w.transpose(1, 2, 0)
    return raise_index(lower, frame.winv, 2)


def _trace_free_torsion(conn: FrameConnection) -> ObjMxMxM:
    frame = conn.frame
    K = conn.K
    g = np.trace(h_block(conn.torsion), axis1=1, axis2=2) * const(K, 1, 2 * frame.n - 1)
    g_up = raise_index(embed_h(g, K), frame.winv, 0)[1:]
    delta = identity(K, conn.dim - 1)
    lam = contract("j,ip->ijp", g, delta) + contract("ij,p->ijp", h_block(frame.w), g_up)
    return embed_h(lam, K)


# each step is computed from the output of the previous one
CLAIMS = (
    ("theta-parallel", _theta_parallel),
    ("reeb-parallel", _reeb_parallel),
    ("reeb-torsion-free", _reeb_torsion_free),
    ("dtheta-parallel", _dtheta_parallel),
    ("torsion-trace-free", _trace_free_torsion),
)


def canonical_stages(conn: FrameConnection, frame: AdaptedFrame | None = None):
    """The representative after each normalisation step, starting from ``conn``

    Raises:
        RepresentativeError: if ``conn`` does not admit contact geodesics
    """
    if frame is not None and conn.frame is not frame:
        conn = change_frame(conn, frame)

    if not admits_contact_geodesics(conn):
        raise RepresentativeError("connection does not admit contact geodesics")

    stages = [("input", conn)]

    for claim, step in CLAIMS:
        logger.debug("canonicalize: %s", claim)
        conn = conn.deformed(step(conn))
        stages.append((claim, conn))

    return tuple(stages)


def canonicalize(conn: FrameConnection, frame: AdaptedFrame | None = None) -> FrameConnection:
    """Canonical representative of the structure of ``conn`` for the scale of ``frame``"""
    return canonical_stages(conn, frame)[-1][1]


def structure_of(conn: FrameConnection, frame: AdaptedFrame | None = None):
    frame = conn.frame if frame is None else frame
    return ContactProjectiveStructure(frame, canonicalize(conn, frame))


def flat_structure(n: int) -> ContactProjectiveStructure:
    _, frame, conn = flat_model(n)
    return ContactProjectiveStructure(frame, conn)


def canonical_residuals(conn: FrameConnection) -> dict:
    frame = conn.frame
    tau = conn.torsion
    trace = np.trace(h_block(tau), axis1=1, axis2=2)
    return {
        "theta-parallel": theta_derivative(conn),
        "dtheta-parallel": conn.nabla(frame.w, "dd"),
        "reeb-torsion-free": tau[0],
        "torsion-trace-free": trace,
    }


def verify_canonical_conditions(conn: FrameConnection) -> Report:
    """The four conditions of the canonical representative and two consequences"""
    checks = [
        check(name, r, tag="canonical-conditions")
        for name, r in canonical_residuals(conn).items()
    ]
    checks += derived_facts(conn)
    return Report("canonical representative", tuple(checks))


def canonical_report(conn: FrameConnection, frame: AdaptedFrame | None = None) -> Report:
    """Canonicalization of ``conn``: the conditions on the result, idempotence and
    preservation of the contact geodesics"""
    stages = canonical_stages(conn, frame)
    start, result = stages[0][1], stages[-1][1]
    along_theta, along_h = geodesic_residual(result.gamma - start.gamma, result.frame.n)
    checks = verify_canonical_conditions(result).checks + (
        check(
            "idempotent",
            canonicalize(result).gamma - result.gamma,
            tag="canonicalization-idempotent",
        ),
        check("same-geodesics-reeb", along_theta, tag="contact-geodesics-preserved"),
        check("same-geodesics", along_h, tag="contact-geodesics-preserved"),
    )
    return Report("canonical representative", checks)


def derived_facts(conn: FrameConnection):
    return list(
        identity_tag(
            "canonical-consequences",
            [
                check("reeb-field-parallel", conn.gamma[:, 0, :]),
                check("torsion-reeb-component", conn.torsion[:, :, 0] - conn.frame.w),
            ],
        )
    )


def contact_torsion(S: ContactProjectiveStructure) -> ObjHxHxH:
    """:math:`\\tau_{ij}^k` of the canonical representative"""
    return h_block(S.torsion)


def lowered(T: ObjMxMxM, frame: AdaptedFrame) -> ObjMxMxM:
    """:math:`T_{ijk} = T_{ij}^p\\omega_{pk}`"""
    return contract("ijp,pk->ijk", T, frame.w)


def torsion_identities(S: ContactProjectiveStructure) -> Report:
    frame = S.frame
    tau = S.torsion
    trace_first = np.trace(h_block(tau), axis1=1, axis2=2)
    trace_mixed = omega_trace(lowered(tau, frame), 0, 2, frame.winv)
    return Report(
        "contact torsion",
        identity_tag(
            "contact-torsion-identities",
            [
                check(
                    "torsion-traces",
                    trace_first * 2 + omega_trace(lowered(tau, frame), 0, 1, frame.winv)[1:],
                    detail="2 tau_ip^p = -tau_p^p_i",
                ),
                check("torsion-lowered-trace", h_block(trace_mixed)),
                check("torsion-cyclic", h_block(antisymmetrize(lowered(tau, frame), (0, 1, 2)))),
            ],
        ),
    )


def scale_difference(S: ContactProjectiveStructure, f: Scalar) -> ObjMxMxM:
    """Difference between the canonical representatives of :math:`f^2\\theta` and θ,
    expressed in the frame of θ"""
    frame = S.frame
    conn = S.canonical
    K = frame.K
    m = frame.dim
    gamma = log_derivative(frame, f)
    gamma_up = frame.raise_index(gamma, 0)
    nabla_up = conn.nabla(gamma_up, "u")
    tau = S.torsion
    two, four = K(2), K(4)

    lam = zeros(K, (m, m, m))
    delta = identity(K, m - 1)
    g = gamma[1:]
    g_up = gamma_up[1:]
    lam[1:, 1:, 1:] = (
        contract("i,jp->ijp", g, delta)
        + contract("j,ip->ijp", g, delta)
        + contract("ij,p->ijp", h_block(frame.w), g_up)
    )
    lam[:, 0, 0] = gamma * two
    lam[1:, 0, 1:] = np.outer(g, g_up) * four - nabla_up[1:, 1:] * two
    lam[0, 1:, 1:] = (
        -contract("q,qij->ij", g_up, tau[1:, 1:, 1:]) * two - nabla_up[1:, 1:] * two
    )
    lam[0, 0, 1:] = (
        -nabla_up[0, 1:] * two
        + g_up * gamma[0] * four
        + contract("q,qi->i", g_up, nabla_up[1:, 1:]) * four
    )
    return lam


def scale_transport(S: ContactProjectiveStructure, f: Scalar) -> FrameConnection:
    """Canonical representative for :math:`f^2\\theta` in the rescaled frame"""
    new_frame = rescale(S.frame, f)
    conn = S.canonical.deformed(scale_difference(S, f))
    return change_frame(conn, new_frame)


def rescaled(S: ContactProjectiveStructure, f: Scalar) -> ContactProjectiveStructure:
    conn = scale_transport(S, f)
    return ContactProjectiveStructure(conn.frame, conn)


def torsion_scale_check(S: ContactProjectiveStructure, f: Scalar) -> Report:
    """Contact torsion of the canonical representatives of θ and :math:`f^2\\theta`
    in the shared contact frame :math:`\\tilde E_i = E_i`"""
    tilde = rescaled(S, f)
    return Report(
        "torsion scale invariance",
        identity_tag(
            "contact-torsion-scale-invariance",
            [
                check("contact-torsion-scale-invariant", contact_torsion(tilde) - contact_torsion(S)),
                check(
                    "rescaled-representative",
                    np.concatenate([
                        np.ravel(r) for r in canonical_residuals(tilde.canonical).values()
                    ]),
                ),
            ],
        ),
    )


def covariant_derivative_scale_check(
    S: ContactProjectiveStructure, f: Scalar, sigma: ObjM
) -> Report:
    """Transformation of :math:`\\nabla_i\\sigma_j` for a one-form on the contact
    distribution"""
    frame = S.frame
    K = frame.K
    sigma = np.concatenate([[K.zero], np.asarray(sigma, dtype=object)[1:]])
    tilde = rescaled(S, f)

    lhs = h_block(tilde.canonical.nabla(sigma, "d"))
    nabla = h_block(S.canonical.nabla(sigma, "d"))
    gamma = log_derivative(frame, f)
    gamma_up = frame.raise_index(gamma, 0)
    s, g = sigma[1:], gamma[1:]
    rhs = (
        nabla
        - np.outer(s, g)
        - np.outer(g, s)
        - h_block(frame.w) * (s * gamma_up[1:]).sum()
    )
    return Report(
        "covariant derivative scale law",
        (check("one-form-scale-law", lhs - rhs, tag="one-form-scale-law"),),
    )


def _difference_preconditions(P: ObjHxHxH, winv_h, symmetric_last_pair: bool):
    residuals = {
        "trace-12": np.tensordot(P, winv_h, axes=([0, 1], [0, 1])),
        "trace-13": np.tensordot(P, winv_h, axes=([0, 2], [0, 1])),
        "trace-23": np.tensordot(P, winv_h, axes=([1, 2], [0, 1])),
        "cyclic": antisymmetrize(P, (0, 1, 2)),
    }

    if symmetric_last_pair:
        residuals["symmetric-last-pair"] = antisymmetrize(P, (1, 2))

    return {name: r for name, r in residuals.items() if not is_zero_array(r)}


def decompose_difference(P: ObjHxHxH, frame: AdaptedFrame):
    """Split the lowered difference :math:`\\Pi_{ijk}` of two structures into its
    completely symmetric part and the remainder

    Raises:
        PreconditionError: if Π is not trace-free or has a cyclic part

    Returns:
        Tuple[ObjHxHxH, ObjHxHxH]: A and B with Π = A + B
    """
    bad = _difference_preconditions(P, h_block(frame.winv), symmetric_last_pair=False)

    if bad:
        raise PreconditionError(f"not a difference of structures: {', '.join(bad)}")

    A = symmetrize(P, (0, 1, 2))
    B = P - A
    report = difference_checks(P, A, B, frame)

    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        raise PreconditionError(f"decomposition failed: {names}")

    return A, B


def difference_checks(P, A, B, frame: AdaptedFrame) -> Report:
    winv_h = h_block(frame.winv)
    return Report(
        "difference decomposition",
        identity_tag(
            "difference-decomposition",
            [
                check("sum", A + B - P),
                check("symmetric-part", A - symmetrize(A, (0, 1, 2))),
                check("skew-part", antisymmetrize(B, (0, 1)) - antisymmetrize(P, (0, 1))),
                check("remainder-symmetrized", symmetrize(B, (0, 1, 2))),
                check(
                    "remainder-trace-free",
                    np.stack([
                        np.tensordot(B, winv_h, axes=([0, 1], [0, 1])),
                        np.tensordot(B, winv_h, axes=([0, 2], [0, 1])),
                        np.tensordot(B, winv_h, axes=([1, 2], [0, 1])),
                    ]),
                ),
            ],
        ),
    )


def deform(S: ContactProjectiveStructure, P: ObjHxHxH) -> ContactProjectiveStructure:
    """Structure whose canonical representative is that of S plus
    :math:`\\Pi_{ij}^k = \\omega^{kq}\\Pi_{ijq}`, extended by zeros

    Raises:
        PreconditionError: unless Π is trace-free, cyclic-free and symmetric in its
        last pair
    """
    frame = S.frame
    bad = _difference_preconditions(P, h_block(frame.winv), symmetric_last_pair=True)

    if bad:
        raise PreconditionError(f"invalid deformation: {', '.join(bad)}")

    lam = raise_index(embed_h(P, frame.K), frame.winv, 2)
    return ContactProjectiveStructure(frame, S.canonical.deformed(lam))


def torsion_prescription(tau: ObjHxHxH, frame: AdaptedFrame) -> ObjHxHxH:
    """Deformation :math:`\\Pi_{ijk} = \\frac13(\\tau_{ijk} + \\tau_{ikj})` with
    :math:`2\\Pi_{[ij]k} = \\tau_{ijk}`

    Raises:
        PreconditionError: unless τ is skew in its first pair, trace-free and has
        no cyclic part
    """
    K = frame.K

    if not is_zero_array(tau + tau.transpose(1, 0, 2)):
        raise PreconditionError("torsion must be skew in its first two indices")

    bad = _difference_preconditions(tau, h_block(frame.winv), symmetric_last_pair=False)

    if bad:
        raise PreconditionError(f"invalid contact torsion: {', '.join(bad)}")

    return (tau + tau.transpose(0, 2, 1)) * const(K, 1, 3)


def random_symmetric_deformation(
    chart: Chart, rng: np.random.Generator, degree: int = 2, entries: int = 2
) -> ObjHxHxH:
    """Completely symmetric trace-free deformation with random polynomial entries

    Only indices from the first Lagrangian half ``1..n-1`` are used, which makes
    every ω-trace vanish.
    """
    k = chart.n - 1
    table = {}

    for _ in range(entries):
        idx = tuple(sorted(int(i) for i in rng.integers(0, k, size=3)))
        table[idx] = random_polynomial(chart, degree, rng)

    return symmetric_tensor(chart.K, (2 * k,) * 3, table)
