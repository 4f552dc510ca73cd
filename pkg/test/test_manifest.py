import pytest

from cproj.errors import ManifestError, NonContactFormError
from cproj.manifest import (
    FIXTURES,
    SUITES,
    build_structure,
    deformation_tensor,
    densities,
    describe,
    fixture,
    format_manifest,
    load,
    parse_manifest,
    rescale_factors,
    torsion_tensor,
)
from cproj.scalar import is_zero
from cproj.tensor import is_zero_array

MALFORMED = """{
  "name": "broken",
  "n": 2,
  "checks": ["canonical",]
}"""


def test_malformed_json():
    with pytest.raises(ManifestError) as e:
        parse_manifest(MALFORMED)

    assert e.value.line == 4
    assert e.value.column is not None
    assert "line 4" in str(e.value)


@pytest.mark.parametrize(
    "text,field",
    [
        ('{"name": "a", "n": 2, "colour": 1}', "colour"),
        ('{"name": "a"}', "n"),
        ('{"name": "a", "n": 1}', "n"),
        ('{"name": "a", "n": true}', "n"),
        ('{"name": "a", "n": 2, "theta": ["1"]}', "theta"),
        ('{"name": "a", "n": 2, "theta": ["1", "x7", "0"]}', "theta[1]"),
        ('{"name": "a", "n": 2, "deformation": {"0,1,1": "1"}}', "deformation"),
        ('{"name": "a", "n": 2, "deformation": {"1,1": "1"}}', "deformation"),
        ('{"name": "a", "n": 2, "connection": {"1,a,0": "1"}}', "connection"),
        ('{"name": "a", "n": 2, "checks": ["canonical", "nope"]}', "checks"),
        ('{"name": "a", "n": 2, "pseudo_hermitian": {"K": 1}}', "pseudo_hermitian"),
        (
            '{"name": "a", "n": 2, "torsion": {"1,2,1": "1"}, "pseudo_hermitian": {"J": "standard"}}',
            "torsion",
        ),
    ],
)
def test_invalid_fields(text, field):
    with pytest.raises(ManifestError) as e:
        parse_manifest(text)

    assert str(e.value).startswith(f"{field}:")


def test_degenerate_theta():
    text = '{"name": "a", "n": 2, "theta": ["1", "0", "0"]}'

    with pytest.raises(NonContactFormError) as e:
        parse_manifest(text)

    assert "theta" in str(e.value)


def test_defaults():
    m = parse_manifest('{"name": "a", "n": 2}')
    assert m.checks == SUITES
    assert m.rescale == ("1 + x1",)
    assert not m.has_pseudo_hermitian
    assert m.h == 2


def test_deformation_block():
    m = fixture("def5")
    P = deformation_tensor(m)
    x = m.chart.gens
    assert is_zero(P[0, 0, 0] - (m.chart.one + x[2] ** 2))
    assert is_zero(P[0, 0, 1])


def test_torsion_block_is_skew():
    m = fixture("tor5")
    tau = torsion_tensor(m)
    assert tau[0, 1, 0] == m.chart.one
    assert tau[1, 0, 0] == -m.chart.one


@pytest.mark.parametrize(
    "block,field",
    [
        ('"torsion": {"1,1,2": "1"}', "torsion[1,1,2]"),
        ('"torsion": {"1,2,1": "1", "2,1,1": "1"}', "torsion[2,1,1]"),
        ('"deformation": {"1,1,2": "1", "2,1,1": "x1"}', "deformation[2,1,1]"),
        ('"deformation": {"1,2,3": "1", "3,2,1": "1"}', "deformation[3,2,1]"),
    ],
)
def test_ambiguous_entries(block, field):
    with pytest.raises(ManifestError) as e:
        parse_manifest(f'{{"name": "a", "n": 3, {block}}}')

    assert str(e.value).startswith(f"{field}:")


def test_torsion_block_other_order():
    m = parse_manifest('{"name": "t", "n": 3, "torsion": {"2,1,1": "1"}}')
    tau = torsion_tensor(m)
    assert tau[1, 0, 0] == m.chart.one
    assert tau[0, 1, 0] == -m.chart.one


@pytest.mark.parametrize("name", FIXTURES)
def test_format_round_trip(name):
    text = format_manifest(fixture(name))
    assert format_manifest(parse_manifest(text)) == text


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_loads(name):
    m = fixture(name)
    assert m.name == name
    assert set(m.checks) <= set(SUITES)
    assert rescale_factors(m)
    assert densities(m)
    assert describe(m).startswith(name)


def test_unknown_fixture():
    with pytest.raises(NotImplementedError):
        fixture("sphere7")


def test_load(tmp_path):
    path = tmp_path / "mine.json"
    path.write_text(format_manifest(fixture("def3")))
    assert format_manifest(load(path)) == format_manifest(fixture("def3"))


def test_connection_block():
    m = parse_manifest('{"name": "c", "n": 2, "connection": {"1,2,2": "x1"}}')
    S = build_structure(m)
    assert m.connection == (((1, 2, 2), "x1"),)
    # contact torsion vanishes in dimension three
    assert is_zero_array(S.torsion[1:, 1:, 1:])
