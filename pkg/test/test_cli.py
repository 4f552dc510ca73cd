import json

import pytest

from cproj.cli import RUNNERS, SUITE_TAGS, main, requested, run
from cproj.errors import ManifestError
from cproj.manifest import SUITES, fixture, format_manifest
from cproj.report import Report, verdict


def test_list_suites(capsys):
    assert main(["--list-suites"]) == 0
    out = capsys.readouterr().out
    assert "canonical" in out
    assert "sphere3" in out


def test_no_command():
    assert main([]) == 2


def test_verify_writes_report(tmp_path):
    out = tmp_path / "report.txt"
    assert main(["verify", "flat3", "--suite", "canonical,flatness", "--out", str(out)]) == 0
    text = out.read_text()
    body = json.loads(text[text.index("\n{\n") + 1 :])
    assert body["passed"]
    assert all(c["name"].split("/")[0] in ("canonical", "flatness") for c in body["checks"])


def test_deterministic_output(tmp_path):
    first, second = tmp_path / "a.txt", tmp_path / "b.txt"

    for path in (first, second):
        assert main(["verify", "def3", "--suite", "canonical,tractor", "--out", str(path)]) == 0

    assert first.read_text() == second.read_text()


def test_verify_manifest_path(tmp_path):
    path = tmp_path / "mine.json"
    path.write_text(format_manifest(fixture("def3")))
    out = tmp_path / "report.txt"
    assert main(["verify", str(path), "--suite", "bianchi", "--out", str(out)]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["beltrami", "flat3"],
        ["verify", "flat3", "--suite", "nope"],
        ["verify", "nowhere7"],
    ],
)
def test_invalid_input(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_invalid_manifest_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"name": "bad", "n": 2, "theta": ["1", "0", "0"]}')
    assert main(["verify", str(path)]) == 2


def test_failing_check(tmp_path, monkeypatch):
    broken = Report("broken", (verdict("always-fails", False),))
    monkeypatch.setitem(RUNNERS, "canonical", lambda session: broken)
    out = tmp_path / "report.txt"
    argv = ["verify", "flat3", "--suite", "canonical,flatness", "--fail-fast", "--out", str(out)]
    assert main(argv) == 1
    text = out.read_text()
    assert "canonical/always-fails" in text
    assert "flatness/flatness-criterion" in text
    body = json.loads(text[text.index("\n{\n") + 1 :])
    assert {c["name"]: c["status"] for c in body["checks"]}["flatness/flatness-criterion"] == "skipped"


def test_beltrami_command(tmp_path):
    out = tmp_path / "report.txt"
    assert main(["beltrami", "sphere3", "--out", str(out)]) == 0
    assert "beltrami/flat-iff-constant-curvature" in out.read_text()


def test_requested_order():
    assert requested(fixture("def3"), ["flatness", "canonical"]) == ("canonical", "flatness")

    with pytest.raises(ManifestError):
        requested(fixture("flat3"), ["beltrami"])


def test_fail_fast():
    manifest = fixture("def3")
    report = run(manifest, ["canonical", "flatness"], fail_fast=True)
    assert report.passed
    assert set(SUITES) >= {name.split("/")[0] for name in report.names}


TORSION_FREE_SUITES = [s for s in SUITES if s != "beltrami"]


@pytest.mark.parametrize(
    "name,suites",
    [
        pytest.param("def3", TORSION_FREE_SUITES, marks=pytest.mark.slow),
        ("flat3", ["canonical", "bianchi", "thomas", "obstruction", "flatness"]),
        ("sphere3", ["beltrami"]),
    ],
)
def test_every_identity_tagged(name, suites):
    report = run(fixture(name), suites)
    text = report.render()
    body = json.loads(text[text.index("\n{\n") + 1 :])
    assert all("tag" in c for c in body["checks"])
    tags = {c["tag"] for c in body["checks"]}

    for suite in suites:
        for tag in SUITE_TAGS[suite]:
            assert tag in tags
            assert tag in text

    assert report.passed


def test_untagged_suite_fails(monkeypatch):
    untagged = Report("flatness", (verdict("flat", True),))
    monkeypatch.setitem(RUNNERS, "flatness", lambda session: untagged)
    report = run(fixture("flat3"), ["flatness"])
    assert not report.passed
    assert report["flatness/flatness-criterion"].residual == "missing"


@pytest.mark.slow
def test_obstruction_skipped_with_torsion():
    report = run(fixture("tor5"), ["obstruction"])
    assert report.passed
    assert {c.tag for c in report.checks} == set(SUITE_TAGS["obstruction"])
    assert all(c.status == "skipped" for c in report.checks)
