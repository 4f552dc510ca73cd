"""Command line entry point: ``cproj verify <manifest> --suite bianchi,tractor``

The manifest argument is a path to a JSON manifest or the name of a bundled
fixture. Suites run in dependency order and share the structure, its curvature
and its ambient connection. The exit status is 0 when every check passes, 1 when a
check fails and 2 for invalid input.
"""

import argparse
import logging
import os
import sys
import time
from functools import cached_property
from typing import Callable, Dict, Iterable, Sequence, Tuple

import numpy as np

from cproj.ambient import (
    ambient_connection,
    ambient_curvature_blocks,
    vanishing_torsion_identities,
    verify_ambient_axioms,
)
from cproj.config import configure, from_environ, settings
from cproj.curvature import (
    bianchi_suite,
    cotton_weyl_relation,
    flatness_report,
    invariant_tensors,
    scale_covariance_check,
)
from cproj.errors import ManifestError
from cproj.manifest import (
    FIXTURES,
    SUITES,
    Manifest,
    adapted,
    build_structure,
    densities,
    describe,
    fixture,
    load,
    pseudo_hermitian_of,
    rescale_factors,
)
from cproj.projective import subordinate_report, thomas_comparison
from cproj.pseudohermitian import beltrami_report
from cproj.report import Check, Report, merge, renamed, skipped
from cproj.scalar import format_scalar
from cproj.structure import (
    canonical_report,
    covariant_derivative_scale_check,
    torsion_identities,
    torsion_scale_check,
)
from cproj.tensor import h_block, is_zero_array
from cproj.tractor import gauge_report, hessian_report, tractor_curvature, tractor_report

logger = logging.getLogger(__name__)

GAUGE_TRIALS = 5

# suites that cannot run without an optional manifest block
PREREQUISITES = {"beltrami": "pseudo_hermitian"}

# identities each suite verifies, every one carried by at least one check
SUITE_TAGS: Dict[str, Tuple[str, ...]] = dict(
    canonical=(
        "canonical-conditions",
        "canonical-consequences",
        "canonicalization-idempotent",
        "contact-geodesics-preserved",
        "contact-torsion-identities",
    ),
    bianchi=(
        "first-bianchi",
        "second-bianchi",
        "ricci-decomposition",
        "curvature-symmetries",
        "curvature-traces",
    ),
    scale=(
        "curvature-scale-laws",
        "weyl-cotton-scale-laws",
        "curvature-difference",
        "contact-torsion-scale-invariance",
        "one-form-scale-law",
    ),
    ambient=(
        "ambient-euler-field",
        "ambient-omega-parallel",
        "ambient-ricci-flat",
        "ambient-trace-condition",
        "ambient-induces-structure",
        "ambient-tautological-form",
        "ambient-curvature-blocks",
        "ambient-torsion-blocks",
        "ambient-block-traces",
        "ambient-s-tensor",
        "ambient-bianchi",
        "ambient-torsion-free",
    ),
    thomas=("thomas-agreement",),
    subordinate=(
        "subordinate-torsion-free",
        "subordinate-derivatives",
        "subordinate-weyl-reeb",
        "projective-weyl-traces",
    ),
    obstruction=(
        "a-block-identity",
        "u-block-identity",
        "b-block-identity",
        "v-block-identity",
        "cotton-weyl-relation",
    ),
    tractor=(
        "tractor-connection",
        "tractor-curvature",
        "kappa-blocks",
        "normality",
        "k-membership",
        "identity-gauge",
        "p-plus-gauge",
        "g-zero-gauge",
        "gauge-membership",
    ),
    hessian=(
        "hessian-invariance",
        "hessian-traces",
        "tractor-d-operator",
        "density-transform",
    ),
    flatness=("flatness-criterion",),
    beltrami=(
        "pseudo-hermitian-structure",
        "tanaka-conditions",
        "tanaka-uniqueness",
        "canonical-conditions",
        "canonical-consequences",
        "induced-structure",
        "webster-curvature",
        "beltrami-equivalence",
    ),
)


def skipped_suite(suite: str, reason: str) -> Report:
    """One skipped check per identity of ``suite``"""
    return Report(suite, tuple(skipped(tag, reason, tag=tag) for tag in SUITE_TAGS[suite]))


def missing(suite: str, report: Report) -> Tuple[Check, ...]:
    """A failing check for every identity of ``suite`` that ``report`` leaves out"""
    present = set(report.tags)
    return tuple(
        Check(tag, "fail", "missing", f"no check verifies {tag}", tag)
        for tag in SUITE_TAGS[suite]
        if tag not in present
    )


class Session:
    """Lazily built objects shared by the suites of one run"""

    def __init__(self, manifest: Manifest):
        self.manifest = manifest

    @cached_property
    def structure(self):
        return build_structure(self.manifest)

    @cached_property
    def data(self):
        return invariant_tensors(self.structure)

    @cached_property
    def ambient(self):
        return ambient_connection(self.structure, self.data)

    @cached_property
    def ambient_curvature(self):
        return self.ambient.curvature()

    @property
    def torsion_free(self) -> bool:
        return is_zero_array(h_block(self.structure.torsion))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(settings().seed)


def canonical_suite(s: Session) -> Report:
    S = s.structure
    checks = canonical_report(S.canonical, S.frame).checks

    if s.manifest.connection:
        frame, conn = adapted(s.manifest)
        checks += renamed(canonical_report(conn, frame).checks, suffix="@input")

    return Report("canonical", checks + torsion_identities(S).checks)


def bianchi(s: Session) -> Report:
    return bianchi_suite(s.structure, s.data)


def scale(s: Session) -> Report:
    S = s.structure
    sigma = np.array(S.frame.chart.gens, dtype=object)
    factors = rescale_factors(s.manifest)

    if not factors:
        return skipped_suite("scale", "no rescale factors in the manifest")

    checks = ()

    for f in factors:
        suffix = f"@f={format_scalar(f)}"
        reports = [
            scale_covariance_check(S, f, s.data),
            torsion_scale_check(S, f),
            covariant_derivative_scale_check(S, f, sigma),
        ]
        checks += renamed(merge("scale", reports).checks, suffix=suffix)

    return Report("scale", checks)


def ambient(s: Session) -> Report:
    A, R = s.ambient, s.ambient_curvature
    return merge(
        "ambient",
        [verify_ambient_axioms(A, R), ambient_curvature_blocks(s.structure, A, s.data, R)],
    )


def thomas(s: Session) -> Report:
    return thomas_comparison(s.structure, s.ambient)


def subordinate(s: Session) -> Report:
    return subordinate_report(s.structure, s.ambient, s.data)


def obstruction(s: Session) -> Report:
    if not s.torsion_free:
        return skipped_suite("obstruction", "contact torsion is not zero")

    S = s.structure
    return merge(
        "obstruction",
        [
            vanishing_torsion_identities(S, s.ambient, s.data, s.ambient_curvature),
            cotton_weyl_relation(S, s.data),
        ],
    )


def tractor(s: Session) -> Report:
    S = s.structure
    report = tractor_report(S, s.ambient, s.data, s.ambient_curvature)
    kappa = tractor_curvature(S, s.ambient, s.data)
    gauge = gauge_report(kappa, S.frame.chart, s.rng(), trials=GAUGE_TRIALS)
    return merge("tractor", [report, gauge])


def hessian(s: Session) -> Report:
    S = s.structure
    factors = rescale_factors(s.manifest)
    hs = densities(s.manifest)

    if not factors or not hs:
        return skipped_suite("hessian", "the manifest needs a rescale factor and a density")

    f = factors[0]
    checks = ()

    for density in hs:
        report = hessian_report(S, density, f, s.ambient, s.data)
        checks += renamed(report.checks, suffix=f"@h={format_scalar(density.h)}")

    return Report("hessian", checks)


def flatness(s: Session) -> Report:
    return flatness_report(s.structure, s.data)


def beltrami(s: Session) -> Report:
    return beltrami_report(pseudo_hermitian_of(s.manifest))


RUNNERS: Dict[str, Callable[[Session], Report]] = dict(
    canonical=canonical_suite,
    bianchi=bianchi,
    scale=scale,
    ambient=ambient,
    thomas=thomas,
    subordinate=subordinate,
    obstruction=obstruction,
    tractor=tractor,
    hessian=hessian,
    flatness=flatness,
    beltrami=beltrami,
)


def requested(manifest: Manifest, checks: Iterable[str] | None = None) -> tuple:
    """Requested suites in dependency order

    Raises:
        ManifestError: for unknown suites or a suite whose prerequisite block is
            missing from the manifest
    """
    names = set(manifest.checks if checks is None else checks)
    unknown = sorted(names - set(SUITES))

    if unknown:
        raise ManifestError(f"checks: unknown suites {unknown}, expect {SUITES}")

    for suite, block in PREREQUISITES.items():
        if suite in names and not manifest.has_pseudo_hermitian:
            raise ManifestError(
                f"{block}: required by suite {suite} but missing in {manifest.name}"
            )

    return tuple(name for name in SUITES if name in names)


def run(manifest: Manifest, checks: Iterable[str] | None = None, fail_fast: bool = False) -> Report:
    """Run the requested suites on ``manifest``, every check prefixed by its suite"""
    suites = requested(manifest, checks)
    session = Session(manifest)
    out = ()
    failed = False

    for suite in suites:
        if failed and fail_fast:
            skip = skipped_suite(suite, "an earlier suite failed")
            out += renamed(skip.checks, prefix=f"{suite}/")
            continue

        logger.info("suite %s on %s", suite, manifest.name)
        start = time.perf_counter()
        report = RUNNERS[suite](session)
        logger.debug("suite %s took %.2fs", suite, time.perf_counter() - start)
        report = report.extend(missing(suite, report))
        out += renamed(report.checks, prefix=f"{suite}/")
        failed = failed or not report.passed

    return Report(describe(manifest), out)


def resolve(target: str) -> Manifest:
    """Manifest from a path, or from a bundled fixture name"""
    if os.path.exists(target):
        return load(target)

    return fixture(target)


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="cproj", description="Exact verification of contact projective structures"
    )
    parser.add_argument(
        "--log-level",
        default=None,
        help="level of the cproj logger, defaults to CPROJ_LOG_LEVEL",
    )
    parser.add_argument(
        "--list-suites", action="store_true", help="print the suites and fixtures"
    )
    sub = parser.add_subparsers(dest="command")

    verify = sub.add_parser("verify", help="run verification suites on a manifest")
    verify.add_argument("manifest", help=f"path or fixture name, one of {FIXTURES}")
    verify.add_argument(
        "--suite",
        default=None,
        help="comma separated suites, defaults to the checks listed in the manifest",
    )
    verify.add_argument("--out", default=None, help="write the report to this file")
    verify.add_argument(
        "--fail-fast", action="store_true", help="skip the remaining suites after a failure"
    )

    bel = sub.add_parser("beltrami", help="the beltrami suite on a pseudo-hermitian manifest")
    bel.add_argument("manifest", help="path or fixture name")
    bel.add_argument("--out", default=None, help="write the report to this file")
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    from_environ()

    if args.log_level is not None:
        configure(log_level=args.log_level)

    logging.basicConfig(
        level=settings().log_level.upper(),
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )

    if args.list_suites:
        print("suites:   " + " ".join(SUITES))
        print("fixtures: " + " ".join(FIXTURES))
        return 0

    if args.command is None:
        print("expect a command, see cproj --help", file=sys.stderr)
        return 2

    if args.command == "beltrami":
        checks, fail_fast = ["beltrami"], False
    else:
        checks = None if args.suite is None else [s.strip() for s in args.suite.split(",")]
        fail_fast = args.fail_fast

    try:
        manifest = resolve(args.manifest)
        report = run(manifest, checks, fail_fast=fail_fast)
    except (NotImplementedError, ValueError, OSError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return 2

    text = report.render()

    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)

    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
