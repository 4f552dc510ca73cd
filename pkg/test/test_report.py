import json

from cproj.report import Report, identity_tag, merge, renamed, skipped, verdict


def test_identity_tag_keeps_existing():
    checks = identity_tag(
        "outer",
        [verdict("a", True), verdict("b", True, tag="inner"), skipped("c", "why")],
    )
    assert [c.tag for c in checks] == ["outer", "inner", "outer"]


def test_tags_in_order():
    report = merge(
        "merged",
        [
            Report("x", identity_tag("first", [verdict("a", True), verdict("b", True)])),
            Report("y", (verdict("c", True), verdict("d", False, tag="second"))),
        ],
    )
    assert report.tags == ("first", "second")
    assert not report.passed


def test_renamed_keeps_tag():
    (c,) = renamed((verdict("a", True, tag="t"),), prefix="suite/", suffix="@0")
    assert c.name == "suite/a@0"
    assert c.tag == "t"


def test_tag_rendered():
    report = Report("r", (verdict("a", True, tag="some-identity"),))
    text = report.render()
    assert "some-identity" in repr(report)
    body = json.loads(text[text.index("\n{\n") + 1 :])
    assert body["checks"][0]["tag"] == "some-identity"
