"""Exact rational functions in chart coordinates.

A :data:`Scalar` is an element of the field of multivariate rational functions
over the rationals, implemented by :mod:`sympy.polys.fields`.  Every coefficient
of every tensor in the package lives in such a field.  The field of a chart is
built once and shared by all Scalars on that chart.
"""

import logging
import re
from functools import lru_cache
from tokenize import TokenError
from typing import Iterable, Sequence, Tuple

import equinox as eqx
import numpy as np
from sympy import Symbol
from sympy.parsing.sympy_parser import parse_expr, standard_transformations
from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.orderings import grlex

from cproj.config import settings
from cproj.errors import ScalarError

logger = logging.getLogger(__name__)

Scalar = FracElement


class Chart(eqx.Module):
    """Coordinates ``names`` together with their rational function field ``K``"""

    names: Tuple[str, ...] = eqx.field(static=True)
    K: FracField = eqx.field(static=True)

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def n(self) -> int:
        # contact patches have dimension 2n - 1
        return (self.dim + 1) // 2

    @property
    def gens(self) -> Tuple[Scalar, ...]:
        return self.K.gens

    @property
    def zero(self) -> Scalar:
        return self.K.zero

    @property
    def one(self) -> Scalar:
        return self.K.one

    def const(self, p: int, q: int = 1) -> Scalar:
        if q == 0:
            raise ScalarError("zero denominator in constant")
        return self.K(p) / self.K(q)

    def parse(self, text: str) -> Scalar:
        return parse_scalar(text, self)

    def lift(self, s: Scalar) -> Scalar:
        """Re-express a Scalar from a chart whose names are a subset of these"""
        if s.field == self.K:
            return s
        return normalize(s.set_field(self.K))


@lru_cache(maxsize=None)
def coordinate_chart(names: Tuple[str, ...]) -> Chart:
    if len(set(names)) != len(names):
        raise ScalarError(f"Expect distinct coordinate names, got {names}")

    K = FracField(",".join(names), QQ, grlex)
    return Chart(names=tuple(names), K=K)


def chart(n: int) -> Chart:
    """Darboux chart with coordinates x0, ..., x(2n-2) of a contact patch

    Args:
        n (int): half of the dimension plus one, at least two.

    Raises:
        ValueError: for ``n < 2``

    Returns:
        Chart: the shared chart of dimension ``2n - 1``
    """
    if n < 2:
        raise ValueError("Expect n >= 2 for a contact patch")

    return coordinate_chart(tuple(f"x{mu}" for mu in range(2 * n - 1)))


def symplectic_chart(k: int) -> Chart:
    """Coordinates x1, ..., x(2k) of the symplectic base of a Heisenberg patch"""
    if k < 1:
        raise ValueError("Expect at least one symplectic pair")

    return coordinate_chart(tuple(f"x{mu}" for mu in range(1, 2 * k + 1)))


def euclidean_chart(dim: int) -> Chart:
    if dim < 1:
        raise ValueError("Expect a positive dimension")

    return coordinate_chart(tuple(f"x{mu}" for mu in range(dim)))


def canonical_pair(s: Scalar):
    """Numerator and denominator with common factors removed and monic denominator

    The denominator is made monic with respect to the graded lexicographic order of
    the chart, which makes the pair unique.
    """
    numer, denom = s.numer.cancel(s.denom)
    lc = denom.LC
    return numer.quo_ground(lc), denom.quo_ground(lc)


def normalize(s: Scalar) -> Scalar:
    if not s.denom:
        raise ScalarError("zero denominator")

    numer, denom = canonical_pair(s)
    return s.raw_new(numer, denom)


def from_pair(numer: Scalar, denom: Scalar) -> Scalar:
    if not denom:
        raise ScalarError("zero denominator")

    return normalize(numer / denom)


def differentiate(s: Scalar, var_index: int) -> Scalar:
    gens = s.field.gens

    if not 0 <= var_index < len(gens):
        raise ScalarError(f"variable index {var_index} out of range 0..{len(gens) - 1}")

    return s.diff(gens[var_index])


def evaluate(s: Scalar, point: Sequence):
    """Exact value of ``s`` at a rational point

    Numerator and denominator are evaluated separately so that no intermediate
    rational function is formed.

    Raises:
        ScalarError: when the denominator vanishes at ``point``
    """
    ring = s.field.ring

    if len(point) != ring.ngens:
        raise ScalarError(f"Expect a point with {ring.ngens} coordinates")

    pairs = list(zip(ring.gens, point))
    denom = s.denom.evaluate(pairs)

    if denom == 0:
        raise ScalarError(f"denominator vanishes at {point}")

    return QQ.convert(s.numer.evaluate(pairs)) / QQ.convert(denom)


def random_point(K: FracField, rng: np.random.Generator, avoid: Iterable[Scalar] = ()):
    """Random rational point at which none of the ``avoid`` denominators vanish"""
    avoid = list(avoid)

    for _ in range(100):
        point = tuple(
            QQ(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for _ in K.gens
        )
        pairs = list(zip(K.ring.gens, point))

        if all(s.denom.evaluate(pairs) != 0 for s in avoid):
            return point

    raise ScalarError("could not find a point avoiding the given denominators")


def is_zero(s: Scalar) -> bool:
    """True iff the numerator is the zero polynomial

    When ``CPROJ_CROSSCHECK`` is enabled a non-zero ``s`` is evaluated at
    ``CPROJ_SANITY_POINTS`` random rational points, once as stored and once through
    its canonical pair.

    Raises:
        ScalarError: when the two evaluations disagree at some point
    """
    exact = not s.numer
    config = settings()

    if exact or not config.crosscheck or config.sanity_points == 0:
        return exact

    rng = np.random.default_rng(config.seed)
    numer, denom = canonical_pair(s)
    values = []

    for _ in range(config.sanity_points):
        point = random_point(s.field, rng, [s])
        pairs = list(zip(s.field.ring.gens, point))
        value = evaluate(s, point)

        expected = QQ.convert(numer.evaluate(pairs))

        if QQ.convert(denom.evaluate(pairs)) * value != expected:
            raise ScalarError(f"canonical form of {s} disagrees with its value at {point}")

        values.append(value)

    if all(v == 0 for v in values):
        logger.debug("non-zero rational function vanishes at all sample points: %s", s)

    return exact


def random_polynomial(
    chart: Chart, degree: int, rng: np.random.Generator, terms: int = 3
) -> Scalar:
    """Sum of ``terms`` random monomials of total degree at most ``degree``"""
    K = chart.K
    s = K.zero

    for _ in range(terms):
        coeff = chart.const(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        monomial = K.one

        for _ in range(int(rng.integers(0, degree + 1))):
            monomial = monomial * K.gens[int(rng.integers(0, chart.dim))]

        s = s + coeff * monomial

    return s


_ALLOWED = re.compile(r"[0-9x+\-*/^()\s]")
_VARIABLE = re.compile(r"x(\d+)")


def parse_scalar(text: str, chart: Chart) -> Scalar:
    """Parse a Scalar literal such as ``"(1 + x1)^2/2 - x0*x2"``

    Raises:
        ScalarError: on unexpected characters, unknown variables or a malformed
        expression. The message carries the 1-based column when known.
    """
    for column, ch in enumerate(text, start=1):
        if not _ALLOWED.match(ch):
            raise ScalarError(f"unexpected character {ch!r} at column {column}")

    for match in _VARIABLE.finditer(text):
        if match.group(0) not in chart.names:
            raise ScalarError(
                f"unknown variable {match.group(0)} at column {match.start() + 1}"
            )

    local = {name: Symbol(name) for name in chart.names}

    try:
        expr = parse_expr(
            text.replace("^", "**"),
            local_dict=local,
            transformations=standard_transformations,
        )
        s = chart.K.from_expr(expr)
    except (SyntaxError, TokenError, TypeError, ValueError, ZeroDivisionError) as e:
        raise ScalarError(f"cannot parse {text!r}: {e}") from e

    return normalize(s)


def format_scalar(s: Scalar) -> str:
    return str(s.as_expr()).replace("**", "^")
