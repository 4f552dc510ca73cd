"""Check records and reports of exact identity verifications"""

import json
from typing import Iterable, Tuple

import equinox as eqx
import numpy as np
import pandas as pd
from tabulate import tabulate

from cproj.tensor import degree, nonzero_entries
from cproj.types import ScalarArray, Status


class Check(eqx.Module):
    """One verified identity

    ``tag`` names the identity the check belongs to; several checks verifying
    parts of one identity share it.
    """

    name: str = eqx.field(static=True)
    status: Status = eqx.field(static=True)
    residual: str = eqx.field(static=True, default="0")
    detail: str = eqx.field(static=True, default="")
    tag: str = eqx.field(static=True, default="")

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    def to_dict(self) -> dict:
        return dict(
            name=self.name,
            tag=self.tag,
            status=self.status,
            residual=self.residual,
            detail=self.detail,
        )


def check(name: str, residual: ScalarArray, detail: str = "", tag: str = "") -> Check:
    """Passes iff every entry of ``residual`` is identically zero

    The residual summary of a failing check counts the nonzero entries and records
    the first offending index and the largest total degree.
    """
    bad = nonzero_entries(np.asarray(residual, dtype=object))

    if not bad:
        return Check(name, "pass", "0", detail, tag)

    first, _ = bad[0]
    max_degree = max(degree(s) for _, s in bad)
    summary = f"{len(bad)} nonzero, first at {first}, max degree {max_degree}"
    return Check(name, "fail", summary, detail, tag)


def verdict(name: str, ok: bool, detail: str = "", tag: str = "") -> Check:
    return Check(name, "pass" if ok else "fail", "0" if ok else "false", detail, tag)


def skipped(name: str, reason: str, tag: str = "") -> Check:
    return Check(name, "skipped", "-", reason, tag)


def note(name: str, residual: ScalarArray, detail: str = "", tag: str = "") -> Check:
    """Records the residual summary of ``residual`` without a verdict"""
    summary = check(name, residual).residual
    return Check(name, "info", summary, detail, tag)


def identity_tag(tag: str, checks: Iterable[Check]) -> Tuple[Check, ...]:
    """``checks`` with ``tag`` filled in where they carry none"""
    return tuple(
        c if c.tag else Check(c.name, c.status, c.residual, c.detail, tag) for c in checks
    )


class Report(eqx.Module):
    title: str = eqx.field(static=True)
    checks: Tuple[Check, ...] = eqx.field(static=True, default=())

    def __post_init__(self):
        self.checks = tuple(self.checks)

    @property
    def passed(self) -> bool:
        return not any(c.failed for c in self.checks)

    @property
    def failures(self) -> Tuple[Check, ...]:
        return tuple(c for c in self.checks if c.failed)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.checks)

    @property
    def tags(self) -> Tuple[str, ...]:
        """Distinct identity tags in order of first appearance"""
        return tuple(dict.fromkeys(c.tag for c in self.checks if c.tag))

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c

        raise KeyError(f"No check named {name} in report {self.title}")

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def extend(self, checks: Iterable[Check]) -> "Report":
        return Report(self.title, self.checks + tuple(checks))

    def to_dataframe(self) -> pd.DataFrame:
        df = pd.DataFrame([c.to_dict() for c in self.checks])
        df.index.name = "check"
        return df

    def to_json(self) -> str:
        body = dict(
            title=self.title,
            passed=self.passed,
            checks=[c.to_dict() for c in self.checks],
        )
        return json.dumps(body, indent=2, sort_keys=True)

    def render(self) -> str:
        """Human readable table followed by the machine readable JSON block"""
        return "\n".join([self.title, repr(self), "", self.to_json(), ""])

    def __repr__(self) -> str:
        df = self.to_dataframe()
        headers = ["check"] + df.columns.to_list()
        return tabulate(df, headers)

    def _repr_html_(self) -> str:
        return self.to_dataframe().to_html()


def merge(title: str, reports: Iterable[Report]) -> Report:
    checks = []

    for report in reports:
        checks.extend(report.checks)

    return Report(title, tuple(checks))


def renamed(checks: Iterable[Check], prefix: str = "", suffix: str = "") -> Tuple[Check, ...]:
    """Copies of ``checks`` with names ``prefix + name + suffix``"""
    return tuple(
        Check(f"{prefix}{c.name}{suffix}", c.status, c.residual, c.detail, c.tag)
        for c in checks
    )
