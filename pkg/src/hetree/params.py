"""Automatic construction-parameter estimation.

When the user gives no preferences, the leaf count and degree are derived
from the dataset size and the visualization's per-leaf object bounds.
Only perfect m-ary shapes with degree >= 3 and height >= 2 are candidates;
the tallest tree wins, then the leaf count closest to the centre of the
admissible range, then the smallest degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoCandidateError, ParameterError
from .tree import TreeParams

DEFAULT_BOUNDS = (10, 50)
DEFAULT_MAX_DEGREE = 6


@dataclass(frozen=True)
class VisBounds:
    """Min and max objects that render well at the most detailed level."""

    lambda_min: int
    lambda_max: int

    def __post_init__(self):
        if self.lambda_min < 1 or self.lambda_max < self.lambda_min:
            raise ParameterError("need 1 <= lambda_min <= lambda_max")


@dataclass(frozen=True)
class CandidateSetting:
    leaves: int
    degree: int
    height: int
    centre_distance: float


def leaf_bounds(size: int, bounds: VisBounds) -> tuple[int, int]:
    """Admissible leaf-count range: ceil(n/max) <= leaves <= ceil(n/min)."""
    if size < 1:
        raise ParameterError("dataset size must be positive")
    return math.ceil(size / bounds.lambda_max), math.ceil(size / bounds.lambda_min)


def enumerate_candidates(lmin: int, lmax: int, max_degree: int = DEFAULT_MAX_DEGREE) -> list[CandidateSetting]:
    """All perfect-tree settings (degree^height leaves) within [lmin, lmax]."""
    if lmin > lmax:
        raise ParameterError("lmin must not exceed lmax")
    centre = (lmin + lmax) / 2
    found = []
    for degree in range(3, max_degree + 1):
        height = 2
        while True:
            leaves = degree ** height
            if leaves > lmax:
                break
            if leaves >= lmin:
                found.append(CandidateSetting(leaves, degree, height, abs(leaves - centre)))
            height += 1
    return found


def select_setting(candidates: list[CandidateSetting], prefer_tallest: bool = True) -> CandidateSetting:
    """Tallest tree first, then smallest centre distance, then smallest degree."""
    if not candidates:
        raise NoCandidateError("no perfect-tree setting satisfies the bounds")
    sign = -1 if prefer_tallest else 1
    return min(candidates, key=lambda c: (sign * c.height, c.centre_distance, c.degree))


def _fallback(size: int, lmin: int, lmax: int, bounds: VisBounds) -> TreeParams:
    # No perfect d>=3, h>=2 shape fits: take the in-range power of 3
    # nearest the centre, else a non-perfect tree at the lower bound.
    centre = (lmin + lmax) / 2
    powers = []
    leaves = 3
    while leaves <= lmax:
        if leaves >= lmin:
            powers.append(leaves)
        leaves *= 3
    if powers:
        best = min(powers, key=lambda l: (abs(l - centre), l))
        return TreeParams("C", best, 3)
    clamped = min(max(math.ceil(size / bounds.lambda_max), 1), size)
    return TreeParams("C", clamped, 3)


def estimate_params(size: int, bounds: VisBounds | tuple[int, int], variant: str = "C",
                    max_degree: int = DEFAULT_MAX_DEGREE,
                    prefer_tallest: bool = True) -> TreeParams:
    """Compose the bound, enumeration and selection steps.

    The same leaf count and degree are used for both variants: the
    criteria constrain the number of groups, not the fill rule.
    """
    if isinstance(bounds, tuple):
        bounds = VisBounds(*bounds)
    lmin, lmax = leaf_bounds(size, bounds)
    candidates = enumerate_candidates(lmin, lmax, max_degree)
    if not candidates:
        fallback = _fallback(size, lmin, lmax, bounds)
        return TreeParams(variant, fallback.leaves, fallback.degree)
    chosen = select_setting(candidates, prefer_tallest)
    return TreeParams(variant, chosen.leaves, chosen.degree)
