"""CPROJ: exact computations for contact projective structures

Every identity is verified as an exact zero of rational functions in Darboux
coordinates. The environment can be customised with the following variables:
  * ``CPROJ_SEED``: seed of random evaluation points and random gauges. Defaults to ``0``.
  * ``CPROJ_SANITY_POINTS``: number of points for the zero cross-check. Defaults to ``3``.
  * ``CPROJ_CROSSCHECK``: evaluate at random points when testing for zero. Defaults to
    ``True``.
  * ``CPROJ_LOG_LEVEL``: level of the ``cproj`` logger. Defaults to ``WARNING``.
"""

import importlib.metadata

__version__ = importlib.metadata.version("cproj")

from cproj.config import from_environ, parse_bool, settings
from cproj.curvature import flatness, invariant_tensors
from cproj.manifest import build_structure, fixture, parse_manifest
from cproj.structure import canonicalize, flat_structure

__all__ = [
    "build_structure",
    "canonicalize",
    "fixture",
    "flat_structure",
    "flatness",
    "invariant_tensors",
    "parse_bool",
    "parse_manifest",
    "settings",
]

from_environ()
