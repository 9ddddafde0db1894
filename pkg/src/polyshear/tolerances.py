"""Global numeric tolerances for the double-precision kernel.

All comparisons in the package go through this module so that a single
override (programmatic or via the POLYSHEAR_TOL environment variable)
changes behavior everywhere.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance block shared by all geometric modules.

    len_rel: relative tolerance on lengths.
    ang: absolute tolerance on angles (radians).
    bar: tolerance on barycentric-coordinate sums.
    hit: snapping distance for vertex hits and arrangement crossings.
    area_rel: relative tolerance on areas.
    flat: curvature (radians) below which a vertex counts as flat; helper
        nodes left by retriangulation accumulate roundoff of this order.
    """

    len_rel: float = 1e-9
    ang: float = 1e-9
    bar: float = 1e-12
    hit: float = 1e-9
    area_rel: float = 1e-8
    flat: float = 1e-5


_current = Tolerances()


def _from_env() -> Tolerances:
    raw = os.environ.get("POLYSHEAR_TOL")
    if not raw:
        return Tolerances()
    data = json.loads(raw)
    return replace(Tolerances(), **data)


_current = _from_env()


def tol() -> Tolerances:
    """Return the active tolerance block."""
    return _current


def set_tol(t: Tolerances) -> None:
    """Replace the active tolerance block (used by the CLI and tests)."""
    global _current
    _current = t
