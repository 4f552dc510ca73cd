"""Tractor connection, its curvature and the invariant operators built on it

Tractor arrays are indexed ``(inf, 1..h, 0)`` with ``h = 2n - 2``: slot 0 is the
Euler field :math:`\\mathbb{X}`, the middle slots are the horizontal lifts
:math:`\\hat E_p` and the last slot carries :math:`\\frac12\\hat T`. Matrices act
on column vectors, so ``M[A, B]`` is the component :math:`M_B{}^A`.

The Cartan curvature is never built on a principal bundle. Its components
:math:`\\kappa(e_i, e_j)` and :math:`\\kappa(e_0, e_i)` are read off the
curvature of the tractor connection in the splitting of a scale.
"""

import logging
from typing import Tuple

import equinox as eqx
import numpy as np

from cproj.ambient import H, INF, REEB, AmbientConnection, ambient_connection
from cproj.curvature import CurvatureData, invariant_tensors
from cproj.errors import PreconditionError
from cproj.geometry import AdaptedFrame, log_derivative
from cproj.report import (
    Check,
    Report,
    check,
    identity_tag,
    note,
    renamed,
    skipped,
    verdict,
)
from cproj.scalar import Chart, Scalar, is_zero, random_polynomial
from cproj.structure import ContactProjectiveStructure, lowered, rescaled
from cproj.tensor import (
    antisymmetrize,
    coerce,
    const,
    contract,
    curvature_of,
    field_of,
    h_block,
    identity,
    inverse,
    is_zero_array,
    lower_index,
    omega_trace,
    raise_index,
    zeros,
)
from cproj.types import ObjH, ObjHxH, ObjN, ObjNxN, ScalarArray

logger = logging.getLogger(__name__)

TINF, TREEB = 0, -1
TH = slice(1, -1)


def _power(f: Scalar, k: int) -> Scalar:
    return f**k if k >= 0 else (f.field.one / f) ** (-k)


def _entries(x) -> ScalarArray:
    return np.atleast_1d(np.asarray(x, dtype=object)).ravel()


def tractor_form(w_h: ObjHxH) -> ObjNxN:
    """:math:`\\bar\\Omega` with :math:`\\bar\\Omega_{\\infty 0} = 1` and ω on the
    middle block"""
    K = field_of(w_h)
    N = w_h.shape[0] + 2
    out = zeros(K, (N, N))
    out[TINF, TREEB] = K.one
    out[TREEB, TINF] = -K.one
    out[TH, TH] = w_h
    return out


def to_tractor(M: ScalarArray) -> ScalarArray:
    """Ambient endomorphisms ``[..., out, in]`` in the tractor basis

    The ambient order ``(inf, reeb, H)`` becomes ``(inf, H, reeb)`` and the Reeb
    slot is halved.
    """
    K = field_of(M)
    size = M.shape[-1]
    order = [INF] + list(range(2, size)) + [REEB]
    out = M[..., order, :][..., :, order].copy()
    out[..., TREEB, :] = out[..., TREEB, :] * K(2)
    out[..., :, TREEB] = out[..., :, TREEB] * const(K, 1, 2)
    return out


class TractorConnection(eqx.Module):
    """:math:`\\boldsymbol\\nabla_\\alpha z = E_\\alpha z + M_\\alpha z` in the
    splitting of a scale

    ``form[alpha]`` is the matrix :math:`M_\\alpha`, including the canonical
    representative on the middle block.
    """

    frame: AdaptedFrame
    form: ScalarArray

    @property
    def K(self):
        return self.frame.K

    @property
    def rank(self) -> int:
        return self.form.shape[1]

    @property
    def omega(self) -> ObjNxN:
        return tractor_form(h_block(self.frame.w))

    def nabla(self, z: ScalarArray, dual: bool = False) -> ScalarArray:
        """Derivative of a tractor (or a dual tractor when ``dual``) with the frame
        index leading"""
        z = np.asarray(z, dtype=object)

        if dual:
            return self.frame.derivative(z) - contract("aji,j->ai", self.form, z)

        return self.frame.derivative(z) + contract("aij,j->ai", self.form, z)

    def curvature(self) -> ScalarArray:
        """:math:`\\mathcal{R}_{\\alpha\\beta}` with
        :math:`[\\boldsymbol\\nabla_\\alpha, \\boldsymbol\\nabla_\\beta]z +
        \\tau_{\\alpha\\beta}^\\sigma\\boldsymbol\\nabla_\\sigma z =
        \\mathcal{R}_{\\alpha\\beta}z`"""
        return curvature_of(self.form, self.frame.derivative, self.frame.c)

    def omega_residual(self) -> ScalarArray:
        """:math:`\\boldsymbol\\nabla_\\alpha\\bar\\Omega`, zero when the connection
        is symplectic"""
        Omega = self.omega
        return (
            self.frame.derivative(Omega)
            - contract("aki,kj->aij", self.form, Omega)
            - contract("ik,akj->aij", Omega, self.form)
        )


def tractor_connection(
    S: ContactProjectiveStructure,
    A: AmbientConnection | None = None,
    data: CurvatureData | None = None,
) -> TractorConnection:
    """The connection induced by the ambient connection on the tractor bundle

    .. math::

        M_\\alpha = \\begin{pmatrix} 0 & P_{\\alpha q} & \\frac12P_{\\alpha 0} \\\\
        \\delta_\\alpha^p & \\Gamma_{\\alpha q}^p + \\delta_\\alpha^0(2P_q{}^p + Q_q{}^p)
        & P_\\alpha{}^p \\\\ 2\\delta_\\alpha^0 & -\\omega_{\\alpha q} & 0 \\end{pmatrix}
    """
    data = invariant_tensors(S) if data is None else data
    A = ambient_connection(S, data) if A is None else A
    frame = S.frame
    K = frame.K
    m = frame.dim
    N = m + 1
    w = frame.w
    winv_h = h_block(frame.winv)
    P = A.P
    P_up = raise_index(P[:, 1:], winv_h, 1)
    reeb_block = P_up[1:] * K(2) + raise_index(A.Q, winv_h, 1)
    gamma = S.canonical.gamma

    form = zeros(K, (m, N, N))

    for a in range(m):
        form[a, TINF, TH] = P[a, 1:]
        form[a, TINF, TREEB] = P[a, 0] * const(K, 1, 2)
        form[a, TH, TH] = gamma[a, 1:, 1:].T
        form[a, TH, TREEB] = P_up[a]
        form[a, TREEB, TH] = -w[a, 1:]

        if a:
            form[a, a, TINF] = K.one

    form[0, TH, TH] = form[0, TH, TH] + reeb_block.T
    form[0, TREEB, TINF] = K(2)
    logger.debug("tractor connection of rank %d assembled", N)
    return TractorConnection(frame, form)


class KappaBlocks(eqx.Module):
    """Blocks of :math:`\\kappa(e_i, e_j)` and :math:`\\kappa(e_0, e_i)`

    ``a[i, j]``, ``b[i, j, p]`` (p upper), ``c[i, j, q]``, ``d[i, j, q, p]``
    (p upper), ``e[i, j]`` and ``minus2[i, j]`` are the entries of
    :math:`\\kappa(e_i, e_j)`. The fields with the ``_0`` suffix are those of
    :math:`\\kappa(e_0, e_i)` with one index less. ``minus2`` holds the
    :math:`\\mathfrak{g}_{-2}` entry, which the matrices of :math:`\\mathfrak{g}`
    keep in the lower left corner.
    """

    w: ObjHxH
    a: ScalarArray
    b: ScalarArray
    c: ScalarArray
    d: ScalarArray
    e: ScalarArray
    minus2: ScalarArray
    a_0: ScalarArray
    b_0: ScalarArray
    c_0: ScalarArray
    d_0: ScalarArray
    e_0: ScalarArray
    minus2_0: ScalarArray

    @property
    def K(self):
        return field_of(self.w)

    @property
    def h(self) -> int:
        return self.w.shape[0]

    @property
    def winv(self) -> ObjHxH:
        return -inverse(self.w)

    def matrices(self) -> Tuple[ScalarArray, ScalarArray]:
        """``(kij, k0i)`` with shapes ``(h, h, N, N)`` and ``(h, N, N)``"""
        w, winv = self.w, self.winv
        kij = _assemble(self.a, self.b, self.c, self.d, self.e, self.minus2, w, winv)
        k0i = _assemble(
            self.a_0, self.b_0, self.c_0, self.d_0, self.e_0, self.minus2_0, w, winv
        )
        return kij, k0i

    def table(self) -> ScalarArray:
        """:math:`\\kappa(e_\\alpha, e_\\beta)` for ``alpha, beta`` in ``(0, 1..h)``"""
        K = self.K
        h = self.h
        kij, k0i = self.matrices()
        out = zeros(K, (h + 1, h + 1, h + 2, h + 2))
        out[1:, 1:] = kij
        out[0, 1:] = k0i
        out[1:, 0] = -k0i
        return out


def _assemble(a, b, c, d, e, low, w, winv) -> ScalarArray:
    K = field_of(w)
    N = w.shape[0] + 2
    last = b.ndim - 1
    out = zeros(K, a.shape + (N, N))
    out[..., TINF, TINF] = a
    out[..., TINF, TH] = c
    out[..., TINF, TREEB] = e
    out[..., TH, TINF] = b
    out[..., TH, TH] = np.swapaxes(d, -1, -2)
    out[..., TH, TREEB] = raise_index(c, winv, last)
    out[..., TREEB, TINF] = low
    out[..., TREEB, TH] = -lower_index(b, w, last)
    out[..., TREEB, TREEB] = -a
    return out


def _split(M: ScalarArray, suffix: str = "") -> dict:
    blocks = dict(
        a=M[..., TINF, TINF],
        b=M[..., TH, TINF],
        c=M[..., TINF, TH],
        d=np.swapaxes(M[..., TH, TH], -1, -2),
        e=M[..., TINF, TREEB],
        minus2=M[..., TREEB, TINF],
    )
    return {k + suffix: np.array(v, dtype=object) for k, v in blocks.items()}


def from_matrices(kij: ScalarArray, k0i: ScalarArray, w: ObjHxH) -> KappaBlocks:
    """Blocks of matrix valued κ; entries outside the blocks are dropped"""
    return KappaBlocks(w, **_split(kij), **_split(k0i, "_0"))


def kappa_from_curvature(R: ScalarArray, w_h: ObjHxH) -> KappaBlocks:
    """:math:`\\kappa_{ij} = \\mathcal{R}_{ij}` and
    :math:`\\kappa_{0i} = \\frac12\\mathcal{R}_{0i}`"""
    K = field_of(w_h)
    return from_matrices(R[1:, 1:], R[0, 1:] * const(K, 1, 2), w_h)


def tractor_curvature(
    S: ContactProjectiveStructure,
    A: AmbientConnection | None = None,
    data: CurvatureData | None = None,
) -> KappaBlocks:
    T = tractor_connection(S, A, data)
    return kappa_from_curvature(T.curvature(), h_block(S.frame.w))


class AlgebraBasis(eqx.Module):
    """Matrices of the graded basis of :math:`\\mathfrak{g}` in the tractor basis

    ``lower[i]`` is :math:`e_i`, ``reeb`` is :math:`e_0`, ``upper[i]`` is the
    dual :math:`e^i` and ``reeb_dual`` is :math:`e^0`, dual with respect to
    :math:`B(x, y) = \\frac12\\mathrm{tr}(xy)`. ``grading`` is :math:`e_\\infty`.
    """

    lower: ScalarArray
    reeb: ObjNxN
    upper: ScalarArray
    reeb_dual: ObjNxN
    grading: ObjNxN


def algebra_basis(w_h: ObjHxH) -> AlgebraBasis:
    K = field_of(w_h)
    h = w_h.shape[0]
    N = h + 2
    winv = -inverse(w_h)

    lower = zeros(K, (h, N, N))
    upper = zeros(K, (h, N, N))

    for i in range(h):
        lower[i, i + 1, TINF] = K.one
        lower[i, TREEB, TH] = -w_h[i]
        upper[i, TINF, i + 1] = K.one
        upper[i, TH, TREEB] = winv[:, i]

    reeb = zeros(K, (N, N))
    reeb[TREEB, TINF] = K.one
    reeb_dual = zeros(K, (N, N))
    reeb_dual[TINF, TREEB] = K(2)
    grading = zeros(K, (N, N))
    grading[TINF, TINF] = K.one
    grading[TREEB, TREEB] = -K.one
    return AlgebraBasis(lower, reeb, upper, reeb_dual, grading)


def pairing(X: ObjNxN, Y: ObjNxN) -> Scalar:
    """:math:`B(X, Y) = \\frac12\\mathrm{tr}(XY)`"""
    return contract("ij,ji->", X, Y) * const(field_of(X), 1, 2)


def del_star_kappa(kappa: KappaBlocks) -> Tuple[ScalarArray, ObjNxN]:
    """:math:`\\partial^*\\kappa(e_j)` for every ``j`` and :math:`\\partial^*\\kappa(e_0)`

    :math:`\\partial^*\\kappa(e_j) = [e^0, \\kappa_{0j}] + \\sum_i[e^i, \\kappa_{ij}]`
    and :math:`\\partial^*\\kappa(e_0) = -\\sum_i[e^i, \\kappa_{0i}] +
    \\frac12\\omega^{ij}\\kappa_{ij}`.
    """
    K = kappa.K
    basis = algebra_basis(kappa.w)
    kij, k0i = kappa.matrices()
    up, up0 = basis.upper, basis.reeb_dual

    along_h = (
        contract("ab,jbc->jac", up0, k0i)
        - contract("jab,bc->jac", k0i, up0)
        + contract("iab,ijbc->jac", up, kij)
        - contract("ijab,ibc->jac", kij, up)
    )
    along_reeb = (
        contract("iab,ibc->ac", k0i, up)
        - contract("iab,ibc->ac", up, k0i)
        + contract("ij,ijab->ab", kappa.winv, kij) * const(K, 1, 2)
    )
    return along_h, along_reeb


def p_tilde_residual(X: ScalarArray) -> ScalarArray:
    """Entries of ``X`` outside :math:`\\tilde{\\mathfrak{p}}`: the negative part and
    the :math:`e_\\infty` component"""
    parts = (X[..., TINF, TINF], X[..., TH, TINF], X[..., TREEB, TH], X[..., TREEB, TINF])
    return np.concatenate([_entries(p) for p in parts])


def is_normal(S: ContactProjectiveStructure, kappa: KappaBlocks | None = None) -> bool:
    kappa = tractor_curvature(S) if kappa is None else kappa
    along_h, along_reeb = del_star_kappa(kappa)
    return is_zero_array(along_h) and is_zero_array(along_reeb)


def k_membership(kappa: KappaBlocks) -> Report:
    """The conditions cutting out the P-module K of admissible curvatures"""
    K = kappa.K
    w, winv = kappa.w, kappa.winv
    b_low = lower_index(kappa.b, w, 2)
    b0_low = lower_index(kappa.b_0, w, 1)
    skew_b0 = antisymmetrize(b0_low, (0, 1))
    single = is_zero_array(kappa.a + skew_b0)

    return Report(
        "k membership",
        identity_tag(
            "k-membership",
            [
                check(
                    "kappa-minus-two",
                    np.concatenate([_entries(kappa.minus2), _entries(kappa.minus2_0)]),
                ),
                check("a-from-skew-b", kappa.a + skew_b0 * K(2)),
                note(
                    "a-from-skew-b-single-factor",
                    kappa.a + skew_b0,
                    detail="a = -b_[ij] " + ("holds" if single else "does not hold"),
                ),
                check("b-cyclic", antisymmetrize(b_low, (0, 1, 2))),
                check("b-trace-last", np.trace(kappa.b, axis1=0, axis2=2)),
                check("b-trace-first-pair", omega_trace(b_low, 0, 1, winv)),
                check("b-reeb-trace", _entries(np.trace(kappa.b_0))),
                check(
                    "c-trace",
                    np.trace(raise_index(kappa.c, winv, 2), axis1=0, axis2=2) - kappa.a_0,
                ),
                check("d-trace", np.trace(kappa.d, axis1=1, axis2=3) + b0_low),
                check("d-reeb-trace", omega_trace(kappa.d_0, 0, 1, winv)),
                check("d-trace-first-pair", omega_trace(kappa.d, 0, 1, winv)),
                check("c-reeb-trace", _entries(omega_trace(kappa.c_0, 0, 1, winv))),
            ],
        ),
    )


def is_member(kappa: KappaBlocks) -> bool:
    return k_membership(kappa).passed


def p_plus(gamma: ObjH, gamma0: Scalar, w_h: ObjHxH) -> Tuple[ObjNxN, ObjNxN]:
    """:math:`\\exp(\\gamma_qe^q + \\frac12\\gamma_0e^0)` and its inverse"""
    K = field_of(w_h)
    N = w_h.shape[0] + 2
    gamma = coerce(K, gamma)
    X = zeros(K, (N, N))
    X[TINF, TH] = gamma
    X[TINF, TREEB] = coerce(K, [gamma0])[0]
    X[TH, TREEB] = contract("pq,q->p", -inverse(w_h), gamma)
    I = identity(K, N)
    return I + X, I - X


def g_zero(f: Scalar, F: ObjHxH, w_h: ObjHxH) -> Tuple[ObjNxN, ObjNxN]:
    """``diag(1/f, F^T, f)`` and its inverse

    Raises:
        PreconditionError: when ``f`` vanishes or F does not preserve ω
    """
    K = field_of(w_h)
    N = w_h.shape[0] + 2
    f = coerce(K, [f])[0]
    F = coerce(K, F)

    if is_zero(f):
        raise PreconditionError("the dilation factor of a G0 gauge must not vanish")

    if not is_zero_array(contract("ip,jq,pq->ij", F, F, w_h) - w_h):
        raise PreconditionError("the linear part of a G0 gauge must be symplectic")

    g = zeros(K, (N, N))
    g[TINF, TINF] = K.one / f
    g[TH, TH] = F.T
    g[TREEB, TREEB] = f

    g_inv = zeros(K, (N, N))
    g_inv[TINF, TINF] = f
    g_inv[TH, TH] = inverse(F.T)
    g_inv[TREEB, TREEB] = K.one / f
    return g, g_inv


def act(kappa: KappaBlocks, g: ObjNxN, g_inv: ObjNxN) -> KappaBlocks:
    """:math:`(g\\cdot\\kappa)(x, y) = Ad(g^{-1})\\kappa(Ad(g)x, Ad(g)y)` with the
    arguments reduced modulo :math:`\\mathfrak{p}`"""
    K = kappa.K
    basis = algebra_basis(kappa.w)
    lows = np.concatenate([basis.reeb[None], basis.lower])
    duals = np.concatenate([basis.reeb_dual[None], basis.upper])
    moved = contract("ij,ajk,kl->ail", g, lows, g_inv)
    x = contract("bij,aji->ab", duals, moved) * const(K, 1, 2)
    mixed = contract("ag,bd,gdij->abij", x, x, kappa.table())
    new = contract("ij,abjk,kl->abil", g_inv, mixed, g)
    return from_matrices(new[1:, 1:], new[0, 1:], kappa.w)


def gauge_action(
    kappa: KappaBlocks, gamma: ObjH, gamma0: Scalar, f: Scalar, F: ObjHxH
) -> KappaBlocks:
    """The :math:`P^+` change of gauge by ``(gamma, gamma0)`` followed by the
    :math:`G_0` change of gauge by ``(f, F)``"""
    shifted = act(kappa, *p_plus(gamma, gamma0, kappa.w))
    return act(shifted, *g_zero(f, F, kappa.w))


def membership_preserved(
    name: str, kappa: KappaBlocks, new: KappaBlocks, detail: str = ""
) -> Check:
    """Skipped unless ``kappa`` itself lies in K"""
    if not is_member(kappa):
        reason = "the curvature before the gauge is not in K"
        return skipped(name, reason, tag="gauge-membership")

    return verdict(name, is_member(new), detail, tag="gauge-membership")


def p_plus_formulas(kappa: KappaBlocks, gamma: ObjH, gamma0: Scalar) -> Report:
    """Explicit differences :math:`\\tilde\\kappa - \\kappa` under :math:`P^+`"""
    K = kappa.K
    w = kappa.w
    g = coerce(K, gamma)
    g_up = contract("pq,q->p", kappa.winv, g)
    new = act(kappa, *p_plus(g, gamma0, w))
    b_low = lower_index(kappa.b, w, 2)
    b0_low = lower_index(kappa.b_0, w, 1)
    new_b0_low = lower_index(new.b_0, w, 1)

    return Report(
        "p-plus gauge",
        identity_tag(
            "p-plus-gauge",
            [
                check("torsion-block-invariant", new.b - kappa.b),
                check(
                    "reeb-torsion-skew-shift",
                    antisymmetrize(new_b0_low - b0_low, (0, 1))
                    + contract("p,ijp->ij", g_up, b_low) * const(K, 1, 2),
                ),
                check(
                    "reeb-torsion-shift",
                    new_b0_low - b0_low - contract("p,pij->ij", g_up, b_low),
                ),
                check("a-shift", new.a - kappa.a - contract("p,ijp->ij", g_up, b_low)),
                check(
                    "d-shift",
                    new.d
                    - kappa.d
                    - contract("ijl,k->ijkl", kappa.b, g)
                    - contract("l,ijk->ijkl", g_up, b_low),
                ),
                membership_preserved("membership-preserved", kappa, new),
            ],
        ),
    )


# powers of f picked up by the blocks under diag(1/f, 1, f)
G_ZERO_WEIGHTS = dict(a=2, b=1, c=3, d=2, e=4, a_0=3, b_0=2, c_0=4, d_0=3, e_0=5)


def g_zero_scaling(kappa: KappaBlocks, f: Scalar) -> Report:
    K = kappa.K
    f = coerce(K, [f])[0]
    new = act(kappa, *g_zero(f, identity(K, kappa.h), kappa.w))
    return Report(
        "g-zero gauge",
        identity_tag(
            "g-zero-gauge",
            (
                check(f"{name}-scaling", getattr(new, name) - getattr(kappa, name) * _power(f, k))
                for name, k in G_ZERO_WEIGHTS.items()
            ),
        ),
    )


def random_symplectic(w_h: ObjHxH, rng: np.random.Generator, shears: int = 2) -> ObjHxH:
    """Product of random symplectic shears for the standard ω on the contact
    distribution"""
    K = field_of(w_h)
    h = w_h.shape[0]
    k = h // 2
    F = identity(K, h)

    for step in range(shears):
        S = zeros(K, (k, k))

        for i in range(k):
            for j in range(i, k):
                S[i, j] = S[j, i] = const(K, int(rng.integers(-2, 3)), int(rng.integers(1, 3)))

        shear = identity(K, h)

        if step % 2:
            shear[k:, :k] = S
        else:
            shear[:k, k:] = S

        F = contract("ij,jk->ik", F, shear)

    return F


def random_gauge(chart: Chart, w_h: ObjHxH, rng: np.random.Generator, degree: int = 1):
    """Random ``(gamma, gamma0, f, F)`` with polynomial γ and a rational dilation"""
    K = chart.K
    h = w_h.shape[0]
    gamma = coerce(K, [random_polynomial(chart, degree, rng) for _ in range(h)])
    gamma0 = random_polynomial(chart, degree, rng)
    f = const(K, int(rng.integers(1, 4)), int(rng.integers(1, 4)))
    return gamma, gamma0, f, random_symplectic(w_h, rng)


def gauge_report(
    kappa: KappaBlocks, chart: Chart, rng: np.random.Generator, trials: int = 1
) -> Report:
    """Identity gauge, the explicit formulas and K-membership under random gauges"""
    K = kappa.K
    h = kappa.h
    none = gauge_action(kappa, zeros(K, (h,)), K.zero, K.one, identity(K, h))
    identity_residual = np.concatenate(
        [_entries(getattr(none, k)) - _entries(getattr(kappa, k)) for k in G_ZERO_WEIGHTS]
    )
    checks = [check("identity-gauge", identity_residual, tag="identity-gauge")]

    for trial in range(trials):
        gamma, gamma0, f, F = random_gauge(chart, kappa.w, rng)
        suffix = f"@{trial}"
        checks += renamed(p_plus_formulas(kappa, gamma, gamma0).checks, suffix=suffix)
        checks += renamed(g_zero_scaling(kappa, f).checks, suffix=suffix)
        moved = gauge_action(kappa, gamma, gamma0, f, F)
        checks.append(
            membership_preserved(
                f"membership-preserved-under-gauge{suffix}", kappa, moved, f"trial {trial}"
            )
        )

    return Report("gauge action", tuple(checks))


def tractor_report(
    S: ContactProjectiveStructure,
    A: AmbientConnection | None = None,
    data: CurvatureData | None = None,
    R_hat: ScalarArray | None = None,
) -> Report:
    """Tractor connection and curvature against the ambient connection, ∂*κ and
    K-membership"""
    data = invariant_tensors(S) if data is None else data
    A = ambient_connection(S, data) if A is None else A
    R_hat = A.curvature() if R_hat is None else R_hat
    frame = S.frame
    K = frame.K
    w_h = h_block(frame.w)
    T = tractor_connection(S, A, data)
    R = T.curvature()
    kappa = kappa_from_curvature(R, w_h)
    kij, k0i = kappa.matrices()
    half = const(K, 1, 2)

    ambient_form = to_tractor(A.gamma[1:].transpose(0, 2, 1))
    ambient_curv = to_tractor(R_hat[1:, 1:].transpose(0, 1, 3, 2))
    skew = contract("abki,kj->abij", R, T.omega) + contract("ik,abkj->abij", T.omega, R)

    tau_h = h_block(S.torsion)
    torsion_free = is_zero_array(tau_h)
    along_h, along_reeb = del_star_kappa(kappa)
    normal = is_zero_array(along_h) and is_zero_array(along_reeb)
    in_p = is_zero_array(p_tilde_residual(along_h)) and is_zero_array(
        p_tilde_residual(along_reeb)
    )
    b_low = lower_index(kappa.b, w_h, 2)
    traces_vanish = (
        is_zero_array(np.trace(kappa.b, axis1=0, axis2=2))
        and is_zero_array(omega_trace(b_low, 0, 1, kappa.winv))
        and is_zero(np.trace(kappa.b_0))
    )

    connection = (
        check("connection-matches-ambient", T.form - ambient_form),
        check("omega-bar-parallel", T.omega_residual()),
        check("curvature-in-algebra", skew),
    )
    curvature_checks = (
        check(
            "blocks-reassemble",
            np.concatenate([_entries(kij - R[1:, 1:]), _entries(k0i - R[0, 1:] * half)]),
        ),
        check("ambient-curvature-agreement", R - ambient_curv),
    )
    blocks = (
        check("b-is-torsion", b_low - h_block(lowered(S.torsion, frame))),
        check("c-is-u", kappa.c - R_hat[H, H, H, INF]),
        check("d-is-weyl", kappa.d - data.W),
        check("e-is-v", kappa.e - R_hat[H, H, REEB, INF] * half),
        check("reeb-b-is-q", lower_index(kappa.b_0, w_h, 1) * K(2) - data.Q),
        check("reeb-c-is-a", kappa.c_0 * K(2) - R_hat[REEB, H, H, INF]),
        check("reeb-d-is-cotton", lower_index(kappa.d_0, w_h, 2) * K(2) - data.C),
        check("reeb-e-is-b", kappa.e_0 * K(2) - R_hat[REEB, H, REEB, INF] * half),
    )
    normality = (
        note("del-star-h", along_h, detail="entries of del* kappa(e_j)"),
        note("del-star-reeb", along_reeb, detail="entries of del* kappa(e_0)"),
        verdict(
            "normal-iff-torsion-free",
            normal == torsion_free,
            detail=f"normal={normal}, torsion free={torsion_free}",
        ),
        verdict(
            "del-star-subalgebra-iff-traces",
            in_p == traces_vanish,
            detail=f"in p~={in_p}, traces vanish={traces_vanish}",
        ),
    )
    checks = (
        identity_tag("tractor-connection", connection)
        + identity_tag("tractor-curvature", curvature_checks)
        + identity_tag("kappa-blocks", blocks)
        + identity_tag("normality", normality)
        + k_membership(kappa).checks
    )
    return Report("tractor", checks)


class Density(eqx.Module):
    """A section of :math:`\\mathcal{E}[\\lambda]` trivialized by the scale of a frame"""

    h: Scalar
    weight: int = eqx.field(static=True, default=1)


def tractor_D(frame: AdaptedFrame, density: Density) -> ObjN:
    """:math:`D_Ah = (\\lambda h, \\nabla_jh, \\frac12\\nabla_0h)`"""
    K = frame.K
    h = coerce(K, [density.h])[0]
    dh = frame.derivative(np.array(h, dtype=object))
    out = zeros(K, (frame.dim + 1,))
    out[TINF] = h * K(density.weight)
    out[TH] = dh[1:]
    out[TREEB] = dh[0] * const(K, 1, 2)
    return out


def _second_derivative(S: ContactProjectiveStructure, h: Scalar) -> ScalarArray:
    dh = S.frame.derivative(np.array(h, dtype=object))
    return S.canonical.nabla(dh, "d")


def contact_hessian(
    S: ContactProjectiveStructure, density: Density, data: CurvatureData | None = None
) -> ObjHxH:
    """:math:`L_{ij}h = \\nabla_i\\nabla_jh + \\frac12\\omega_{ij}\\nabla_0h - P_{ij}h`

    Raises:
        PreconditionError: when the density does not have weight 1
    """
    if density.weight != 1:
        raise PreconditionError(f"the contact Hessian acts on weight 1, got {density.weight}")

    data = invariant_tensors(S) if data is None else data
    frame = S.frame
    K = frame.K
    h = coerce(K, [density.h])[0]
    dh = frame.derivative(np.array(h, dtype=object))
    second = h_block(S.canonical.nabla(dh, "d"))
    return second + h_block(frame.w) * (dh[0] * const(K, 1, 2)) - data.P * h


def density_transform_check(
    S: ContactProjectiveStructure, density: Density, f: Scalar
) -> Report:
    """Frame derivatives of a density of weight λ in the scale :math:`f^2\\theta`"""
    frame = S.frame
    K = frame.K
    lam = density.weight
    f = coerce(K, [f])[0]
    h = coerce(K, [density.h])[0]
    h_new = h * _power(f, lam)
    new_frame = rescaled(S, f).frame
    gamma = log_derivative(frame, f)
    gamma_up = frame.raise_index(gamma, 0)
    dh = frame.derivative(np.array(h, dtype=object))
    d_new = new_frame.derivative(np.array(h_new, dtype=object))
    scale = _power(f, lam)

    return Report(
        "density transform",
        identity_tag(
            "density-transform",
            [
                check(
                    "density-contact-derivative",
                    d_new[1:] - (dh[1:] + gamma[1:] * (h * K(lam))) * scale,
                ),
                check(
                    "density-reeb-derivative",
                    _entries(
                        d_new[0] * f**2
                        - (
                            dh[0]
                            + gamma[0] * h * K(lam)
                            + contract("p,p->", gamma_up[1:], dh[1:]) * K(2)
                        )
                        * scale
                    ),
                ),
            ],
        ),
    )


def hessian_report(
    S: ContactProjectiveStructure,
    density: Density,
    f: Scalar,
    A: AmbientConnection | None = None,
    data: CurvatureData | None = None,
) -> Report:
    """Invariance of the contact Hessian and its relation to :math:`\\boldsymbol\\nabla D`"""
    data = invariant_tensors(S) if data is None else data
    A = ambient_connection(S, data) if A is None else A
    frame = S.frame
    K = frame.K
    n = frame.n
    half = const(K, 1, 2)
    f = coerce(K, [f])[0]
    h = coerce(K, [density.h])[0]
    winv_h = h_block(frame.winv)

    L = contact_hessian(S, density, data)
    L_new = contact_hessian(rescaled(S, f), Density(h * f, 1))

    dh = frame.derivative(np.array(h, dtype=object))
    second = _second_derivative(S, h)
    P = A.P
    P_up = raise_index(P[:, 1:], winv_h, 1)
    Q_up = raise_index(A.Q, winv_h, 1)

    T = tractor_connection(S, A, data)
    nabla_D = T.nabla(tractor_D(frame, density), dual=True)
    expected = zeros(K, nabla_D.shape)
    expected[:, TH] = (
        second[:, 1:] - P[:, 1:] * h + frame.w[:, 1:] * (dh[0] * half)
    )
    expected[0, TH] = expected[0, TH] - contract(
        "jp,p->j", P_up[1:] * K(2) + Q_up, dh[1:]
    )
    expected[:, TREEB] = (
        second[:, 0] * half - contract("ap,p->a", P_up, dh[1:]) - P[:, 0] * (h * half)
    )

    checks = [
        check("hessian-invariance", L_new - L * f, tag="hessian-invariance"),
        check(
            "hessian-trace",
            _entries(omega_trace(h_block(second), 0, 1, winv_h) - dh[0] * K(1 - n)),
            tag="hessian-traces",
        ),
        check("tractor-d-derivative", nabla_D - expected, tag="tractor-d-operator"),
        check("tractor-d-hessian-rows", nabla_D[1:, TH] - L, tag="tractor-d-operator"),
    ]
    checks += density_transform_check(S, density, f).checks

    if is_zero_array(h_block(S.torsion)):
        checks.append(
            check("hessian-skew-vanishes", antisymmetrize(L, (0, 1)), tag="hessian-traces")
        )

    checks.append(
        note(
            "hessian-omega-trace",
            _entries(omega_trace(L, 0, 1, winv_h)),
            detail="omega trace of L",
            tag="hessian-traces",
        )
    )
    return Report("contact hessian", tuple(checks))
