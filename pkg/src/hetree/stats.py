"""Per-group statistics and exact merging of partial aggregates.

Variance is the population variance (divide by N): that is the definition
under which merging child aggregates reproduces a direct computation over
the union exactly, up to floating round-off.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Optional, Sequence


class NodeStats(NamedTuple):
    """Count, mean, population variance and extremes of a value group."""

    count: int
    mean: Optional[float] = None
    variance: Optional[float] = None
    vmin: Optional[float] = None
    vmax: Optional[float] = None

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    def to_json(self) -> dict:
        if self.is_empty:
            return {"count": 0}
        return {
            "count": self.count,
            "mean": self.mean,
            "variance": self.variance,
            "min": self.vmin,
            "max": self.vmax,
        }


EMPTY_STATS = NodeStats(count=0)


def stats_from_values(values: Sequence[float]) -> NodeStats:
    """Single scan over raw values; shifted two-pass sum keeps the variance
    stable for tightly clustered data."""
    if not values:
        return EMPTY_STATS
    count = len(values)
    mean = math.fsum(values) / count
    m2 = math.fsum((x - mean) ** 2 for x in values)
    return NodeStats(count, mean, m2 / count, min(values), max(values))


def merge_stats(parts: Iterable[NodeStats]) -> NodeStats:
    """Combine partial aggregates; empty parts are skipped.

    N = sum of counts, the mean is the count-weighted mean, and the
    variance adds each part's spread around the combined mean:
    sigma^2 = (sum Ni*si^2 + sum Ni*(mi - m)^2) / N.
    """
    kept = [p for p in parts if p.count]
    if not kept:
        return EMPTY_STATS
    count = 0
    weighted = 0.0
    vmin = vmax = None
    for p in kept:
        count += p.count
        weighted += p.count * p.mean
        if vmin is None or p.vmin < vmin:
            vmin = p.vmin
        if vmax is None or p.vmax > vmax:
            vmax = p.vmax
    mean = weighted / count
    spread = 0.0
    for p in kept:
        delta = p.mean - mean
        spread += p.count * p.variance + p.count * delta * delta
    return NodeStats(count, mean, spread / count, vmin, vmax)


def merge_stats_with_values(parts: Sequence[NodeStats], values: Sequence[float]) -> NodeStats:
    """Combine existing aggregates with loose raw values in one step."""
    singletons = [NodeStats(1, v, 0.0, v, v) for v in values]
    return merge_stats(list(parts) + singletons)


def bulk_stats(values, bounds: Sequence[tuple[int, int]]) -> list[NodeStats]:
    """Statistics per index range over one value array, vectorized.

    Equivalent to stats_from_values applied to each slice. The non-empty
    ranges must tile the whole array in ascending order (empty ranges may
    be interleaved and yield the empty marker).
    """
    import numpy as np

    array = np.asarray(values, dtype=np.float64)
    filled = [(s, e) for s, e in bounds if e > s]
    if not filled:
        return [EMPTY_STATS for _ in bounds]
    assert filled[0][0] == 0 and filled[-1][1] == len(array)
    starts = np.array([s for s, _ in filled], dtype=np.intp)
    counts = np.array([e - s for s, e in filled], dtype=np.intp)
    sums = np.add.reduceat(array, starts)
    means = sums / counts
    centered = array - np.repeat(means, counts)
    m2 = np.add.reduceat(centered * centered, starts)
    mins = np.minimum.reduceat(array, starts)
    maxs = np.maximum.reduceat(array, starts)
    out: list[NodeStats] = []
    cursor = 0
    for s, e in bounds:
        if e > s:
            out.append(NodeStats(int(counts[cursor]), float(means[cursor]),
                                 float(m2[cursor] / counts[cursor]),
                                 float(mins[cursor]), float(maxs[cursor])))
            cursor += 1
        else:
            out.append(EMPTY_STATS)
    return out
