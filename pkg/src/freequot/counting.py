"""Ball growth and cogrowth counts on quotient graphs.

Loop counts use the covering T_n -> T_n/N: reduced words of length r that lie
in N are exactly the non-backtracking closed walks of length r at the
basepoint.  Those are counted by transfer iteration on directed edges, which
is exact in the presence of loops and multi-edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .schreier import SchreierGraph

# counts are exact integers up to this length; longer walks are float64
EXACT_LOOP_RADIUS = 64
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class BallCounts:
    counts: tuple
    exact_up_to: int

    @property
    def radius(self) -> int:
        return len(self.counts) - 1


@dataclass(frozen=True)
class LoopCounts:
    """``counts[r]`` = number of elements of N of word length <= r."""

    counts: tuple
    exact_up_to: int

    @property
    def radius(self) -> int:
        return len(self.counts) - 1

    def sphere(self, r: int):
        return self.counts[r] - (self.counts[r - 1] if r > 0 else 0)


@dataclass(frozen=True)
class RateSequence:
    """Per-radius values of a growth rate; ``point`` is the value at the largest radius."""

    radii: tuple
    values: tuple

    @property
    def point(self) -> Optional[float]:
        return self.values[-1] if self.values else None

    def at(self, r: int) -> float:
        return self.values[self.radii.index(r)]


@dataclass(frozen=True)
class DeltaEstimate(RateSequence):
    rank: int = 2

    @property
    def estimate(self) -> Optional[float]:
        return self.point

    @property
    def eta(self) -> Optional[float]:
        if not self.values:
            return None
        return self.point / math.log(2 * self.rank - 1)


def ball_counts(g: SchreierGraph, R: int) -> BallCounts:
    g.require_radius(R)
    d = g.distances()
    hist = np.bincount(d[d >= 0], minlength=R + 1)[: R + 1]
    return BallCounts(tuple(int(c) for c in np.cumsum(hist)), R)


def growth_estimate(b: BallCounts) -> RateSequence:
    radii = tuple(range(1, len(b.counts)))
    return RateSequence(radii, tuple(b.counts[r] ** (1.0 / r) for r in radii))


def _nb_step_object(table: np.ndarray, cur: np.ndarray) -> np.ndarray:
    k = table.shape[1]
    out = np.zeros_like(cur)
    s = cur.sum(axis=1)
    for y in range(k):
        src = np.nonzero(table[:, y] >= 0)[0]
        np.add.at(out[:, y], table[src, y], s[src] - cur[src, y ^ 1])
    return out


def loop_counts(g: SchreierGraph, R: int) -> LoopCounts:
    """Cumulative counts of N-elements by word length, for lengths 0..R."""
    if R < 0:
        raise ValueError("R must be >= 0")
    g.require_radius(R // 2, "half loop length")
    table = g.table
    V, k = table.shape
    counts = [1]
    total = 1
    cur = np.zeros((V, k), dtype=np.int64)
    for y in range(k):
        if table[0, y] >= 0:
            cur[table[0, y], y] += 1
    nxt = np.empty_like(cur)
    for r in range(1, R + 1):
        if r > 1:
            if cur.dtype == np.int64 and 2 * k * (k - 1) ** r >= _INT64_SAFE:
                cur = cur.astype(object)
            if cur.dtype == object and r > EXACT_LOOP_RADIUS:
                cur = cur.astype(np.float64)
            if cur.dtype == object:
                cur = _nb_step_object(table, cur)
            else:
                if nxt.dtype != cur.dtype:
                    nxt = np.empty_like(cur)
                kernels.nb_step(table, cur, nxt)
                cur, nxt = nxt, cur
        closed = cur[0].sum()
        total = total + (int(closed) if cur.dtype != np.float64 else float(closed))
        counts.append(total)
    return LoopCounts(tuple(counts), min(R, EXACT_LOOP_RADIUS))


def delta_estimate(l: LoopCounts, n: int) -> DeltaEstimate:
    """(1/r) log N(r) from the first radius with a nontrivial element onward."""
    radii, values = [], []
    for r in range(1, len(l.counts)):
        if l.counts[r] > 1:
            radii.append(r)
            values.append(math.log(l.counts[r]) / r)
    return DeltaEstimate(tuple(radii), tuple(values), rank=n)


def poincare_partial(l: LoopCounts, s: float) -> float:
    if s <= 0:
        raise ValueError("s must be > 0")
    return float(sum(l.sphere(r) * math.exp(-s * r) for r in range(len(l.counts))))
