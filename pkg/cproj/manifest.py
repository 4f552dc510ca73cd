"""Manifest files describing a contact patch and the suites to verify on it

A manifest is a JSON object::

    {
      "name": "def5",
      "n": 3,
      "theta": ["1/2", "-x3/2", ...],
      "connection": {"1,2,0": "x1"},
      "deformation": {"1,1,1": "1 + x2^2"},
      "torsion": {"1,2,1": "1"},
      "pseudo_hermitian": {"J": "standard"},
      "rescale": ["1 + x1"],
      "density": ["x1^2"],
      "checks": ["canonical", "bianchi"]
    }

Only ``name`` and ``n`` are required. Without ``theta`` the patch carries the flat
model form and its left invariant frame, otherwise the default adapted frame of θ.
Connection coefficients refer to that frame (index 0 is the Reeb direction), the
deformation and torsion blocks to the contact directions ``1..2n-2``. Sparse
entries are completed by symmetry: the deformation completely symmetrically and
the torsion skew in its first pair.
"""

import json
import logging
from importlib import resources
from typing import Dict, Tuple

import equinox as eqx
import numpy as np

from cproj.errors import ManifestError, NonContactFormError, ScalarError
from cproj.geometry import (
    AdaptedFrame,
    ContactForm,
    FrameConnection,
    default_adapted_frame,
    flat_model,
)
from cproj.pseudohermitian import PseudoHermitian, induced_structure, pseudo_hermitian, standard_j
from cproj.scalar import Chart, Scalar, chart as darboux_chart, format_scalar, parse_scalar
from cproj.structure import (
    ContactProjectiveStructure,
    deform,
    structure_of,
    torsion_prescription,
)
from cproj.tensor import symmetric_tensor, zeros
from cproj.tractor import Density

logger = logging.getLogger(__name__)

# in dependency order, the CLI runs requested suites in this order
SUITES = (
    "canonical",
    "bianchi",
    "scale",
    "ambient",
    "thomas",
    "subordinate",
    "obstruction",
    "tractor",
    "hessian",
    "flatness",
    "beltrami",
)

FIXTURES = (
    "flat3",
    "flat5",
    "def3",
    "def5",
    "tor5",
    "heis3",
    "heis5",
    "sphere3",
    "pert3",
    "pert5",
)

_KEYS = (
    "name",
    "n",
    "theta",
    "connection",
    "deformation",
    "torsion",
    "pseudo_hermitian",
    "rescale",
    "density",
    "checks",
)

Entries = Tuple[Tuple[Tuple[int, ...], str], ...]


class Manifest(eqx.Module):
    name: str = eqx.field(static=True)
    n: int = eqx.field(static=True)
    theta: Tuple[str, ...] = eqx.field(static=True, default=())
    connection: Entries = eqx.field(static=True, default=())
    deformation: Entries = eqx.field(static=True, default=())
    torsion: Entries = eqx.field(static=True, default=())
    J: str | Entries | None = eqx.field(static=True, default=None)
    rescale: Tuple[str, ...] = eqx.field(static=True, default=("1 + x1",))
    density: Tuple[str, ...] = eqx.field(static=True, default=("x1^2",))
    checks: Tuple[str, ...] = eqx.field(static=True, default=SUITES)

    @property
    def chart(self) -> Chart:
        return darboux_chart(self.n)

    @property
    def h(self) -> int:
        return 2 * self.n - 2

    @property
    def has_pseudo_hermitian(self) -> bool:
        return self.J is not None


def _field_error(field: str, message: str) -> ManifestError:
    return ManifestError(f"{field}: {message}")


def _scalar(field: str, text, chart: Chart) -> str:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise _field_error(field, f"expect a Scalar literal, got {text!r}")

    text = str(text)

    try:
        parse_scalar(text, chart)
    except ScalarError as e:
        raise _field_error(field, str(e)) from e

    return text


def _index(field: str, key: str, rank: int, lo: int, hi: int) -> Tuple[int, ...]:
    try:
        idx = tuple(int(part) for part in key.split(","))
    except ValueError as e:
        raise _field_error(field, f"malformed index {key!r}") from e

    if len(idx) != rank:
        raise _field_error(field, f"expect {rank} indices, got {key!r}")

    if any(i < lo or i > hi for i in idx):
        raise _field_error(field, f"index {key!r} outside {lo}..{hi}")

    return idx


def _entries(field: str, value, rank: int, lo: int, hi: int, chart: Chart) -> Entries:
    if not isinstance(value, dict):
        raise _field_error(field, "expect an object of sparse entries")

    out = [
        (_index(field, key, rank, lo, hi), _scalar(f"{field}[{key}]", text, chart))
        for key, text in value.items()
    ]
    return tuple(sorted(out))


def _key(idx: Tuple[int, ...]) -> str:
    return ",".join(str(i) for i in idx)


def _unique_up_to(field: str, entries: Entries, orbit) -> Entries:
    """Rejects two entries whose indices ``orbit`` maps to the same class"""
    seen = {}

    for idx, _ in entries:
        first = seen.setdefault(orbit(idx), idx)

        if first != idx:
            raise _field_error(
                f"{field}[{_key(idx)}]", f"determined by {field}[{_key(first)}] already"
            )

    return entries


def _symmetric_class(idx: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(sorted(idx))


def _skew_class(idx: Tuple[int, ...]) -> Tuple[int, ...]:
    i, j, k = idx
    return (min(i, j), max(i, j), k)


def _torsion_entries(value, h: int, chart: Chart) -> Entries:
    entries = _entries("torsion", value, 3, 1, h, chart)

    for (i, j, k), _ in entries:
        if i == j:
            raise _field_error(
                f"torsion[{_key((i, j, k))}]", "skew in its first pair, the entry must vanish"
            )

    return _unique_up_to("torsion", entries, _skew_class)


def _strings(field: str, value, allowed: Tuple[str, ...] | None = None) -> Tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise _field_error(field, "expect a list of strings")

    if allowed is not None:
        unknown = [v for v in value if v not in allowed]

        if unknown:
            raise _field_error(field, f"unknown entries {unknown}, expect {allowed}")

    return tuple(value)


def parse_manifest(text: str) -> Manifest:
    """Validated manifest from its JSON text

    Raises:
        ManifestError: with line and column for malformed JSON, naming the offending
            field for unknown keys, malformed Scalar literals or bad indices
        NonContactFormError: when θ is degenerate
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestError(e.msg, e.lineno, e.colno) from e

    if not isinstance(raw, dict):
        raise ManifestError("expect a JSON object at the top level", 1, 1)

    unknown = sorted(set(raw) - set(_KEYS))

    if unknown:
        raise _field_error(unknown[0], f"unknown field, expect one of {_KEYS}")

    for key in ("name", "n"):
        if key not in raw:
            raise _field_error(key, "missing required field")

    name, n = raw["name"], raw["n"]

    if not isinstance(name, str):
        raise _field_error("name", "expect a string")

    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise _field_error("n", "expect an integer n >= 2")

    chart = darboux_chart(n)
    m, h = chart.dim, 2 * n - 2
    fields = dict(name=name, n=n)

    if "theta" in raw:
        theta = raw["theta"]

        if not isinstance(theta, list) or len(theta) != m:
            raise _field_error("theta", f"expect a list of {m} Scalar literals")

        fields["theta"] = tuple(
            _scalar(f"theta[{mu}]", s, chart) for mu, s in enumerate(theta)
        )
        form = ContactForm(chart, [parse_scalar(s, chart) for s in fields["theta"]])

        if not form.is_contact():
            raise NonContactFormError("theta: the form is degenerate, not a contact form")

    if "connection" in raw:
        fields["connection"] = _entries("connection", raw["connection"], 3, 0, m - 1, chart)

    if "deformation" in raw:
        deformation = _entries("deformation", raw["deformation"], 3, 1, h, chart)
        fields["deformation"] = _unique_up_to("deformation", deformation, _symmetric_class)

    if "torsion" in raw:
        fields["torsion"] = _torsion_entries(raw["torsion"], h, chart)

    if "pseudo_hermitian" in raw:
        block = raw["pseudo_hermitian"]

        if not isinstance(block, dict) or set(block) != {"J"}:
            raise _field_error("pseudo_hermitian", 'expect an object with the single key "J"')

        J = block["J"]

        if J == "standard":
            fields["J"] = "standard"
        else:
            fields["J"] = _entries("pseudo_hermitian.J", J, 2, 1, h, chart)

        deformed = [k for k in ("connection", "deformation", "torsion") if k in raw]

        if deformed:
            raise _field_error(
                deformed[0], "cannot be combined with a pseudo_hermitian block"
            )

    if "rescale" in raw:
        fields["rescale"] = tuple(
            _scalar(f"rescale[{i}]", s, chart)
            for i, s in enumerate(_strings("rescale", raw["rescale"]))
        )

    if "density" in raw:
        fields["density"] = tuple(
            _scalar(f"density[{i}]", s, chart)
            for i, s in enumerate(_strings("density", raw["density"]))
        )

    if "checks" in raw:
        fields["checks"] = _strings("checks", raw["checks"], SUITES)

    manifest = Manifest(**fields)
    logger.debug("parsed manifest %s with n=%d", manifest.name, manifest.n)
    return manifest


def _dump_entries(entries: Entries) -> Dict[str, str]:
    return {_key(idx): text for idx, text in entries}


def format_manifest(manifest: Manifest) -> str:
    """JSON text of a manifest, parsing it gives back an equal manifest"""
    out = dict(name=manifest.name, n=manifest.n)

    if manifest.theta:
        out["theta"] = list(manifest.theta)

    for key in ("connection", "deformation", "torsion"):
        entries = getattr(manifest, key)

        if entries:
            out[key] = _dump_entries(entries)

    if manifest.J == "standard":
        out["pseudo_hermitian"] = dict(J="standard")
    elif manifest.J is not None:
        out["pseudo_hermitian"] = dict(J=_dump_entries(manifest.J))

    out["rescale"] = list(manifest.rescale)
    out["density"] = list(manifest.density)
    out["checks"] = list(manifest.checks)
    return json.dumps(out, indent=2)


def load(path) -> Manifest:
    with open(path) as f:
        return parse_manifest(f.read())


def fixture(name: str) -> Manifest:
    """Bundled manifest by name, one of :data:`FIXTURES`

    Raises:
        NotImplementedError: for names without a bundled manifest
    """
    name = name.lower()

    if name not in FIXTURES:
        raise NotImplementedError(f"No manifest registered for: {name}")

    text = resources.files("cproj").joinpath("manifests", f"{name}.json").read_text()
    return parse_manifest(text)


def scalars(manifest: Manifest, texts: Tuple[str, ...]) -> Tuple[Scalar, ...]:
    return tuple(parse_scalar(t, manifest.chart) for t in texts)


def adapted(manifest: Manifest) -> Tuple[AdaptedFrame, FrameConnection]:
    """Adapted frame of the manifest and the connection given in it"""
    chart = manifest.chart
    K, m = chart.K, chart.dim

    if manifest.theta:
        form = ContactForm(chart, list(scalars(manifest, manifest.theta)))
        frame = default_adapted_frame(form)
    else:
        _, frame, _ = flat_model(manifest.n)

    gamma = zeros(K, (m, m, m))

    for idx, text in manifest.connection:
        gamma[idx] = parse_scalar(text, chart)

    return frame, FrameConnection(frame, gamma)


def j_tensor(manifest: Manifest) -> np.ndarray:
    chart = manifest.chart

    if manifest.J == "standard":
        return standard_j(chart.K, manifest.n)

    J = zeros(chart.K, (manifest.h, manifest.h))

    for (i, j), text in manifest.J:
        J[i - 1, j - 1] = parse_scalar(text, chart)

    return J


def pseudo_hermitian_of(manifest: Manifest) -> PseudoHermitian:
    """
    Raises:
        ManifestError: without a pseudo_hermitian block
        PreconditionError: when J is not an integrable compatible structure
    """
    if not manifest.has_pseudo_hermitian:
        raise _field_error("pseudo_hermitian", f"missing in manifest {manifest.name}")

    frame, _ = adapted(manifest)
    return pseudo_hermitian(frame, j_tensor(manifest))


def deformation_tensor(manifest: Manifest) -> np.ndarray:
    """Completely symmetric Π on the contact directions"""
    chart = manifest.chart
    table = {
        tuple(sorted(i - 1 for i in idx)): parse_scalar(text, chart)
        for idx, text in manifest.deformation
    }
    return symmetric_tensor(chart.K, (manifest.h,) * 3, table)


def torsion_tensor(manifest: Manifest) -> np.ndarray:
    """τ on the contact directions, skew in its first pair"""
    chart = manifest.chart
    tau = zeros(chart.K, (manifest.h,) * 3)

    for (i, j, k), text in manifest.torsion:
        s = parse_scalar(text, chart)
        tau[i - 1, j - 1, k - 1] = s
        tau[j - 1, i - 1, k - 1] = -s

    return tau


def build_structure(manifest: Manifest) -> ContactProjectiveStructure:
    """The structure of a manifest with its canonical representative

    Raises:
        RepresentativeError: when the connection does not admit contact geodesics
        PreconditionError: for inadmissible deformation or torsion blocks
    """
    if manifest.has_pseudo_hermitian:
        return induced_structure(pseudo_hermitian_of(manifest))

    frame, conn = adapted(manifest)
    S = structure_of(conn, frame)

    if manifest.deformation:
        S = deform(S, deformation_tensor(manifest))

    if manifest.torsion:
        S = deform(S, torsion_prescription(torsion_tensor(manifest), S.frame))

    logger.info("built structure %s in dimension %d", manifest.name, frame.dim)
    return S


def rescale_factors(manifest: Manifest) -> Tuple[Scalar, ...]:
    return scalars(manifest, manifest.rescale)


def densities(manifest: Manifest) -> Tuple[Density, ...]:
    return tuple(Density(h) for h in scalars(manifest, manifest.density))


def describe(manifest: Manifest) -> str:
    parts = [f"{manifest.name}: n={manifest.n}"]

    for key in ("connection", "deformation", "torsion"):
        entries = getattr(manifest, key)

        if entries:
            shown = ", ".join(
                f"{key}{list(idx)}={format_scalar(parse_scalar(t, manifest.chart))}"
                for idx, t in entries
            )
            parts.append(shown)

    if manifest.has_pseudo_hermitian:
        parts.append("pseudo-hermitian")

    return "; ".join(parts)
