"""Left / stationary / right islands induced by matching imaginary to available servers."""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .core import SizeMismatch


class IslandKind(str, Enum):
    LEFT = "left"
    STATIONARY = "stationary"
    RIGHT = "right"


@dataclass(frozen=True)
class Island:
    lo: float
    hi: float
    kind: IslandKind


@dataclass(frozen=True)
class IslandPartition:
    """Maximal intervals covering the line, ordered left to right.

    Left and right islands are open intervals; a point shared by two adjacent
    non-stationary islands belongs to the left one.  Stationary intervals take
    their endpoints.
    """

    intervals: tuple

    def moving(self) -> list:
        return [iv for iv in self.intervals if iv.kind is not IslandKind.STATIONARY]

    def boundaries(self) -> list:
        pts = set()
        for iv in self.intervals:
            for p in (iv.lo, iv.hi):
                if math.isfinite(p):
                    pts.add(p)
        return sorted(pts)


def _merge(spans: Iterable[tuple]) -> list:
    merged: list = []
    for lo, hi in sorted(spans):
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return [tuple(s) for s in merged]


def islands_from_pairs(pairs: Iterable[tuple]) -> IslandPartition:
    """Partition from an arbitrary matching given as (imaginary, available) positions."""
    right, left = [], []
    for imag, avail in pairs:
        if imag < avail:
            right.append((imag, avail))
        elif avail < imag:
            left.append((avail, imag))
    moving = [(lo, hi, IslandKind.RIGHT) for lo, hi in _merge(right)]
    moving += [(lo, hi, IslandKind.LEFT) for lo, hi in _merge(left)]
    moving.sort(key=lambda s: s[0])
    intervals = []
    cursor = -math.inf
    for lo, hi, kind in moving:
        if lo > cursor:
            intervals.append(Island(cursor, lo, IslandKind.STATIONARY))
        intervals.append(Island(lo, hi, kind))
        cursor = hi
    intervals.append(Island(cursor, math.inf, IslandKind.STATIONARY))
    return IslandPartition(tuple(intervals))


def decompose_islands(S_iota: Sequence, S_rho: Sequence) -> IslandPartition:
    """Islands for the sorted-order matching (k-th imaginary to k-th available)."""
    if len(S_iota) != len(S_rho):
        raise SizeMismatch(f"{len(S_iota)} imaginary vs {len(S_rho)} available servers")
    return islands_from_pairs(zip(sorted(S_iota), sorted(S_rho)))


def classify_point(part: IslandPartition, x) -> IslandKind:
    moving = part.moving()
    los = [iv.lo for iv in moving]
    k = bisect_left(los, x) - 1
    if k >= 0:
        iv = moving[k]
        if x < iv.hi:
            return iv.kind
        if x == iv.hi and k + 1 < len(moving) and moving[k + 1].lo == x:
            return iv.kind
    return IslandKind.STATIONARY


def imbalance(S_iota: Sequence, S_rho: Sequence, x) -> int:
    """(# imaginary at or left of x) - (# available at or left of x)."""
    return bisect_right(sorted(S_iota), x) - bisect_right(sorted(S_rho), x)
