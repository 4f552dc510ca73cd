"""Contact forms, adapted frames and connections on a Darboux patch

Frames are stored by their coordinate components: ``vectors[alpha, mu]`` is the
component of :math:`E_\\alpha` along :math:`\\partial/\\partial x^\\mu` and
``covectors[alpha, mu]`` the component of :math:`\\theta^\\alpha` along
:math:`dx^\\mu`. Index 0 of an adapted frame is the Reeb direction.
"""

import logging
from math import factorial

import equinox as eqx
import numpy as np

from cproj.errors import NonContactFormError
from cproj.report import Report, check, identity_tag
from cproj.scalar import Chart, Scalar, chart as darboux_chart, differentiate, is_zero
from cproj.tensor import (
    coerce,
    const,
    contract,
    covariant_derivative,
    embed_h,
    h_block,
    identity,
    inverse,
    lower_index,
    raise_index,
    solve_linear,
    torsion_of,
    zeros,
)
from cproj.types import ObjM, ObjMxM, ObjMxMxM, ScalarArray, Variance

logger = logging.getLogger(__name__)


class Frame(eqx.Module):
    """A frame :math:`E_\\alpha` with its dual coframe and structure functions

    ``c[alpha, beta, gamma]`` are the structure functions
    :math:`[E_\\alpha, E_\\beta] = c_{\\alpha\\beta}^\\gamma E_\\gamma`.
    """

    chart: Chart = eqx.field(static=True)
    vectors: ObjMxM
    covectors: ObjMxM
    c: ObjMxMxM

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def K(self):
        return self.chart.K

    def derivative(self, T: ScalarArray, weight: int = 0) -> ScalarArray:
        """:math:`E_\\alpha(T)` with the frame index as the new leading slot"""
        T = np.asarray(T, dtype=object)
        partials = np.stack([
            np.vectorize(lambda s, mu=mu: differentiate(s, mu), otypes=[object])(T)
            for mu in range(self.dim)
        ])
        return np.tensordot(self.vectors, partials, axes=([1], [0]))


def make_frame(chart: Chart, vectors: ObjMxM, covectors: ObjMxM | None = None) -> Frame:
    """Frame from the components of its vector fields

    Raises:
        NonContactFormError: when the vector fields are not linearly independent
    """
    vectors = coerce(chart.K, vectors)

    if covectors is None:
        covectors = inverse(vectors).T
    else:
        covectors = coerce(chart.K, covectors)

    return Frame(chart, vectors, covectors, structure_functions(chart, vectors, covectors))


def coordinate_frame(chart: Chart) -> Frame:
    K = chart.K
    return Frame(
        chart, identity(K, chart.dim), identity(K, chart.dim), zeros(K, (chart.dim,) * 3)
    )


def structure_functions(chart: Chart, vectors: ObjMxM, covectors: ObjMxM) -> ObjMxMxM:
    """Structure functions of the frame ``vectors`` with dual ``covectors``"""
    m = chart.dim
    partials = np.stack([
        np.vectorize(lambda s, mu=mu: differentiate(s, mu), otypes=[object])(vectors)
        for mu in range(m)
    ])
    # D[a, b, mu] = E_a(E_b^mu)
    D = np.tensordot(vectors, partials, axes=([1], [0]))
    brackets = D - D.transpose(1, 0, 2)
    return contract("abm,gm->abg", brackets, covectors)


class ContactForm(eqx.Module):
    chart: Chart = eqx.field(static=True)
    theta: ObjM

    def __post_init__(self):
        if len(self.theta) != self.chart.dim:
            raise ValueError(f"Expect {self.chart.dim} components of theta")

        self.theta = coerce(self.chart.K, self.theta)

    @property
    def n(self) -> int:
        return self.chart.n

    @property
    def dtheta(self) -> ObjMxM:
        """:math:`d\\theta(\\partial_\\mu, \\partial_\\nu) = \\partial_\\mu\\theta_\\nu -
        \\partial_\\nu\\theta_\\mu`"""
        m = self.chart.dim
        D = np.array(
            [[differentiate(self.theta[nu], mu) for nu in range(m)] for mu in range(m)],
            dtype=object,
        )
        return D - D.T

    def volume_form_factor(self) -> Scalar:
        """:math:`\\theta\\wedge(d\\theta)^{n-1}` as a multiple of the coordinate volume"""
        m = self.chart.dim
        bordered = zeros(self.chart.K, (m + 1, m + 1))
        bordered[0, 1:] = self.theta
        bordered[1:, 0] = -self.theta
        bordered[1:, 1:] = self.dtheta
        return pfaffian(bordered) * const(self.chart.K, factorial(self.n - 1))

    def is_contact(self) -> bool:
        return not is_zero(self.volume_form_factor())

    def scaled(self, f: Scalar) -> "ContactForm":
        return ContactForm(self.chart, self.theta * f * f)


def pfaffian(A: ObjMxM) -> Scalar:
    """Pfaffian of an antisymmetric matrix by expansion along the first row"""
    size = A.shape[0]

    if size == 0:
        return 1
    if size % 2:
        return 0

    total = 0

    for j in range(1, size):
        if not A[0, j]:
            continue

        rest = [k for k in range(1, size) if k != j]
        minor = A[np.ix_(rest, rest)]
        sign = 1 if j % 2 else -1
        total = total + A[0, j] * pfaffian(minor) * sign

    return total


def reeb(form: ContactForm) -> ObjM:
    """Coordinate components of the Reeb field, :math:`\\theta(T) = 1`,
    :math:`i(T)d\\theta = 0`

    Raises:
        NonContactFormError: when ``form`` is degenerate
    """
    if not form.is_contact():
        raise NonContactFormError("theta wedge dtheta^(n-1) vanishes identically")

    K = form.chart.K
    m = form.chart.dim
    # T^mu dtheta[mu, nu] = 0 and theta_mu T^mu = 1
    rows = np.vstack([form.dtheta.T, form.theta[np.newaxis, :]])
    rhs = np.array([K.zero] * m + [K.one], dtype=object)
    T, rank = solve_linear(K, rows, rhs)

    if rank != m:
        raise NonContactFormError("Reeb field is not uniquely determined")

    return T


def standard_omega(K, n: int) -> ObjMxM:
    """:math:`\\omega_{i,n-1+i} = 1` extended by zeros to the Reeb direction"""
    k = n - 1
    w = zeros(K, (2 * k + 1, 2 * k + 1))

    for i in range(1, k + 1):
        w[i, k + i] = K.one
        w[k + i, i] = -K.one

    return w


def inverse_omega(w: ObjMxM) -> ObjMxM:
    """:math:`\\omega^{kl}` with :math:`\\omega^{kl}\\omega_{lj} = -\\delta_j^k`"""
    K = w[0, 0].field
    return embed_h(-inverse(h_block(w)), K)


class AdaptedFrame(eqx.Module):
    """A θ-adapted frame: :math:`\\theta^0 = \\theta`, :math:`E_0 = T`,
    :math:`\\theta^i(T) = 0`

    ``w`` holds :math:`\\omega_{\\alpha\\beta} = d\\theta(E_\\alpha, E_\\beta)` and
    ``winv`` the inverse :math:`\\omega^{ij}` on the contact distribution, both
    padded by zeros in the Reeb direction.
    """

    form: ContactForm
    frame: Frame
    w: ObjMxM
    winv: ObjMxM

    @property
    def chart(self) -> Chart:
        return self.form.chart

    @property
    def K(self):
        return self.form.chart.K

    @property
    def dim(self) -> int:
        return self.form.chart.dim

    @property
    def n(self) -> int:
        return self.form.n

    @property
    def vectors(self) -> ObjMxM:
        return self.frame.vectors

    @property
    def covectors(self) -> ObjMxM:
        return self.frame.covectors

    @property
    def c(self) -> ObjMxMxM:
        return self.frame.c

    @property
    def reeb(self) -> ObjM:
        return self.frame.vectors[0]

    def derivative(self, T: ScalarArray, weight: int = 0) -> ScalarArray:
        return self.frame.derivative(T, weight)

    def raise_index(self, T: ScalarArray, axis: int) -> ScalarArray:
        return raise_index(T, self.winv, axis)

    def lower_index(self, T: ScalarArray, axis: int) -> ScalarArray:
        return lower_index(T, self.w, axis)


def adapted_frame(form: ContactForm, vectors: ObjMxM, covectors=None) -> AdaptedFrame:
    frame = make_frame(form.chart, vectors, covectors)
    w = contract("am,bn,mn->ab", frame.vectors, frame.vectors, form.dtheta)
    return AdaptedFrame(form, frame, w, inverse_omega(w))


def default_adapted_frame(form: ContactForm) -> AdaptedFrame:
    """Coframe :math:`\\theta^0 = \\theta`, :math:`\\theta^i = dx^\\mu - T^\\mu\\theta`

    The coordinate :math:`x^{\\mu_*}` with the first nonvanishing
    :math:`\\theta_{\\mu_*}` is left out; the remaining coordinates label the
    contact directions in increasing order.
    """
    T = reeb(form)
    K = form.chart.K
    m = form.chart.dim
    star = next(mu for mu in range(m) if not is_zero(form.theta[mu]))
    others = [mu for mu in range(m) if mu != star]

    covectors = zeros(K, (m, m))
    covectors[0] = form.theta

    for i, mu in enumerate(others, start=1):
        covectors[i] = -form.theta * T[mu]
        covectors[i, mu] = covectors[i, mu] + K.one

    vectors = inverse(covectors).T
    frame = adapted_frame(form, vectors, covectors)
    logger.debug("default adapted frame for theta = %s", list(form.theta))
    return frame


def flat_model(n: int):
    """Flat model :math:`\\Theta = \\frac12(dx^0 + \\omega_{pq}x^p dx^q)`

    Args:
        n (int): the patch has dimension ``2n - 1``

    Returns:
        Tuple[ContactForm, AdaptedFrame, FrameConnection]: the form, the left
        invariant frame :math:`E_i = \\partial_i + \\omega_{ip}x^p\\partial_0`,
        :math:`E_0 = 2\\partial_0` and the connection making it parallel
    """
    chart = darboux_chart(n)
    K = chart.K
    m = chart.dim
    x = np.array(chart.gens, dtype=object)
    w = standard_omega(K, n)

    theta = zeros(K, (m,))
    theta[0] = const(K, 1, 2)
    theta[1:] = contract("pq,p->q", h_block(w), x[1:]) * const(K, 1, 2)
    form = ContactForm(chart, theta)

    vectors = identity(K, m)
    vectors[0, 0] = K(2)
    vectors[1:, 0] = contract("ip,p->i", h_block(w), x[1:])

    covectors = identity(K, m)
    covectors[0] = theta

    frame = adapted_frame(form, vectors, covectors)
    return form, frame, FrameConnection(frame, zeros(K, (m, m, m)))


def rescale(frame: AdaptedFrame, f: Scalar) -> AdaptedFrame:
    """Adapted frame of :math:`\\tilde\\theta = f^2\\theta`

    :math:`\\tilde E_i = E_i`, :math:`f^2\\tilde T = T + 2\\gamma^pE_p` and
    :math:`\\tilde\\theta^i = \\theta^i - 2\\gamma^i\\theta` with
    :math:`\\gamma = d\\log f`.

    Raises:
        NonContactFormError: when ``f`` vanishes identically
    """
    K = frame.K
    f = coerce(K, [f])[0]

    if is_zero(f):
        raise NonContactFormError("rescaling factor vanishes identically")

    gamma = log_derivative(frame, f)
    gamma_up = frame.raise_index(gamma, 0)
    form = frame.form.scaled(f)

    vectors = frame.vectors.copy()
    vectors[0] = (frame.vectors[0] + contract("p,pm->m", gamma_up, frame.vectors) * K(2)) * (
        K.one / (f * f)
    )

    covectors = frame.covectors.copy()
    covectors[0] = form.theta
    covectors[1:] = frame.covectors[1:] - np.outer(gamma_up[1:], frame.form.theta) * K(2)

    new = adapted_frame(form, vectors, covectors)
    _assert_adapted(new)
    return new


def log_derivative(frame: AdaptedFrame | Frame, f: Scalar) -> ObjM:
    """:math:`\\gamma_\\alpha = E_\\alpha(f)/f`"""
    return frame.derivative(f) * (frame.K.one / f)


def _assert_adapted(frame: AdaptedFrame):
    report = adapted_checks(frame)

    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        raise NonContactFormError(f"adapted frame invariants fail: {names}")


def adapted_checks(frame: AdaptedFrame) -> Report:
    K = frame.K
    m = frame.dim
    theta = frame.form.theta
    T = frame.reeb
    duality = contract("am,bm->ab", frame.covectors, frame.vectors) - identity(K, m)
    winv_w = contract("kl,lj->kj", frame.winv, frame.w) + embed_h(identity(K, m - 1), K)

    return Report(
        "adapted frame",
        identity_tag(
            "adapted-frame",
            [
                check("coframe-zero-is-theta", frame.covectors[0] - theta),
                check("coframe-annihilates-reeb", contract("am,m->a", frame.covectors[1:], T)),
                check("duality", duality),
                check("theta-of-reeb", np.array([(theta * T).sum() - K.one], dtype=object)),
                check("reeb-in-kernel-of-dtheta", contract("m,mn->n", T, frame.form.dtheta)),
                check("omega-vanishes-on-reeb", np.concatenate([frame.w[0], frame.w[:, 0]])),
                check("omega-inverse", winv_w),
            ],
        ),
    )


def bracket(frame: Frame | AdaptedFrame, X: ObjM, Y: ObjM) -> ObjM:
    """Frame components of :math:`[X, Y]` for frame expanded fields ``X``, ``Y``"""
    dY = frame.derivative(Y)
    dX = frame.derivative(X)
    return (
        contract("a,as->s", X, dY)
        - contract("a,as->s", Y, dX)
        + contract("a,b,abs->s", X, Y, frame.c)
    )


def jacobi_residual(frame: Frame | AdaptedFrame) -> ScalarArray:
    """Cyclic sum of :math:`E_\\alpha(c_{\\beta\\gamma}^\\delta) +
    c_{\\beta\\gamma}^\\epsilon c_{\\alpha\\epsilon}^\\delta`"""
    c = frame.c
    term = frame.derivative(c) + contract("bge,aed->abgd", c, c)
    return term + np.einsum("bgad->abgd", term) + np.einsum("gabd->abgd", term)


def frame_invariants(frame: AdaptedFrame) -> Report:
    """All invariants of an adapted frame, each an exact identity"""
    m = frame.dim
    K = frame.K
    coordinate_brackets = np.empty((m, m, m), dtype=object)

    for a in range(m):
        for b in range(m):
            Ea = frame.vectors[a]
            Eb = frame.vectors[b]
            coordinate_brackets[a, b] = np.array([
                sum(
                    (Ea[nu] * differentiate(Eb[mu], nu) - Eb[nu] * differentiate(Ea[mu], nu)
                     for nu in range(m)),
                    K.zero,
                )
                for mu in range(m)
            ], dtype=object)

    expanded = contract("abg,gm->abm", frame.c, frame.vectors)
    report = adapted_checks(frame)
    return report.extend(
        identity_tag(
            "frame-structure-functions",
            [
                check("contact-condition", np.array([K.zero if frame.form.is_contact() else K.one])),
                check("omega-from-structure-functions", frame.w + frame.c[:, :, 0]),
                check("structure-functions", coordinate_brackets - expanded),
                check("structure-functions-antisymmetric", frame.c + frame.c.transpose(1, 0, 2)),
                check("jacobi", jacobi_residual(frame)),
            ],
        )
    )


class FrameConnection(eqx.Module):
    """Connection coefficients in a frame,
    :math:`\\nabla_{E_\\alpha}E_\\beta = \\Gamma_{\\alpha\\beta}^\\gamma E_\\gamma`"""

    frame: AdaptedFrame | Frame
    gamma: ObjMxMxM

    def __post_init__(self):
        m = self.frame.dim

        if self.gamma.shape != (m, m, m):
            raise ValueError(f"Expect connection coefficients of shape {(m, m, m)}")

    @property
    def K(self):
        return self.frame.K

    @property
    def dim(self) -> int:
        return self.frame.dim

    @property
    def torsion(self) -> ObjMxMxM:
        return torsion_of(self.gamma, self.frame.c)

    def nabla(self, T: ScalarArray, variance: Variance, weight: int = 0) -> ScalarArray:
        return covariant_derivative(self.gamma, self.frame.derivative, T, variance, weight)

    def deformed(self, difference: ObjMxMxM) -> "FrameConnection":
        return FrameConnection(self.frame, self.gamma + difference)


def change_frame(conn: FrameConnection, new_frame: AdaptedFrame | Frame) -> FrameConnection:
    """Re-express a connection in another frame of the same chart

    With :math:`\\tilde E_a = A_a^c E_c`,
    :math:`\\tilde\\Gamma_{ab}^f = (\\tilde E_a(A_b^e) +
    A_a^cA_b^d\\Gamma_{cd}^e)(A^{-1})_e^f`.
    """
    old = conn.frame
    A = contract("am,cm->ac", new_frame.vectors, old.covectors)
    A_inv = contract("em,fm->ef", old.vectors, new_frame.covectors)
    inner = new_frame.derivative(A) + contract("ac,bd,cde->abe", A, A, conn.gamma)
    return FrameConnection(new_frame, contract("abe,ef->abf", inner, A_inv))
