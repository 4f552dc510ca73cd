import pytest

from cproj.config import configure, from_environ, parse_bool, settings


def restore(previous):
    configure(
        seed=previous.seed,
        sanity_points=previous.sanity_points,
        crosscheck=previous.crosscheck,
        log_level=previous.log_level,
    )


@pytest.mark.parametrize("value", ["y", "Yes", "TRUE", "on", "1"])
def test_parse_true(value):
    assert parse_bool(value)


@pytest.mark.parametrize("value", ["n", "No", "false", "OFF", "0"])
def test_parse_false(value):
    assert not parse_bool(value)


def test_parse_invalid():
    with pytest.raises(ValueError):
        parse_bool("maybe")


def test_configure_returns_previous():
    previous = configure(seed=7)

    try:
        assert settings().seed == 7
        assert settings().log_level == previous.log_level
    finally:
        restore(previous)


def test_from_environ(monkeypatch):
    previous = settings()
    monkeypatch.setenv("CPROJ_SEED", "11")
    monkeypatch.setenv("CPROJ_CROSSCHECK", "off")

    try:
        current = from_environ()
        assert current.seed == 11
        assert not current.crosscheck
    finally:
        restore(previous)


def test_negative_sanity_points(monkeypatch):
    monkeypatch.setenv("CPROJ_SANITY_POINTS", "-1")

    with pytest.raises(ValueError):
        from_environ()
