from functools import lru_cache

from cproj.config import from_environ
from cproj.manifest import build_structure, fixture


def pytest_sessionstart(session):
    settings = from_environ()
    print(f"Exact verification settings: {settings}")


@lru_cache(maxsize=None)
def structure(name: str):
    # structures are immutable, share them between tests
    return build_structure(fixture(name))


def assert_passed(report):
    failures = [f"{c.name}: {c.residual}" for c in report.failures]
    assert report.passed, f"{report.title} failed: {failures}"
