"""Trigger points, the y_left / y_right boundaries, and the normalised cost helpers."""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .core import extended_cost, removal_costs


class NotATrigger(ValueError):
    pass


class DomainError(ValueError):
    pass


class DegenerateInterval(ValueError):
    pass


@dataclass
class TriggerContext:
    """What is needed to decide whether one more request at ``x`` would trigger.

    The optimum after adding a request at ``y`` is ``min_j c_j + |y - s_j|``, so
    the non-trigger set is a union of open intervals around the servers.
    """

    prior: tuple
    servers: tuple
    Z: float
    left: float | None = None
    right: float | None = None
    costs: list = field(default=None, repr=False)
    spans: list = field(default=None, repr=False)

    def __post_init__(self):
        self.prior = tuple(self.prior)
        self.servers = tuple(self.servers)
        if self.costs is None:
            self.costs = removal_costs(self.prior, self.servers)
        if self.spans is None:
            self.spans = _nontrigger_spans(self.costs, self.servers, self.Z)
        self._los = [lo for lo, _ in self.spans]
        self._his = [hi for _, hi in self.spans]

    @property
    def midpoint(self):
        return _half(self.left + self.right)

    def opt_with(self, x):
        return extended_cost(self.costs, self.servers, x)

    def is_trigger(self, x) -> bool:
        if self.Z == math.inf:
            return False
        k = bisect_left(self._los, x) - 1
        return not (k >= 0 and x < self._his[k])


def _half(v):
    return Fraction(v) / 2 if isinstance(v, Rational) else v / 2


def _nontrigger_spans(costs, servers, Z) -> list:
    if Z == math.inf:
        return [(-math.inf, math.inf)]
    raw = sorted((s - (Z - c), s + (Z - c)) for c, s in zip(costs, servers) if c < Z)
    merged: list = []
    for lo, hi in raw:
        # open intervals: touching endpoints stay separate
        if merged and lo < merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return [tuple(m) for m in merged]


def is_trigger_point(ctx: TriggerContext, x) -> bool:
    """True iff the optimum including a request at ``x`` reaches the estimate."""
    return ctx.is_trigger(x)


def trigger_boundaries(ctx: TriggerContext, x):
    """Nearest non-trigger closure points on each side of ``x``, clamped to the
    enclosing available servers."""
    if not ctx.is_trigger(x):
        raise NotATrigger(f"{x} is not a trigger point")
    k = bisect_right(ctx._his, x) - 1
    y_left = ctx.left
    if k >= 0 and ctx._his[k] > y_left:
        y_left = ctx._his[k]
    k = bisect_left(ctx._los, x)
    y_right = ctx.right
    if k < len(ctx._los) and ctx._los[k] < y_right:
        y_right = ctx._los[k]
    return y_left, y_right


def normalized_cost(alpha, gamma):
    """Expected cost on the unit interval of a request at ``alpha`` sent right w.p. ``gamma``."""
    if not (0 <= alpha <= 1 and 0 <= gamma <= 1):
        raise DomainError(f"alpha={alpha}, gamma={gamma} outside [0, 1]")
    return alpha * (1 - gamma) + (1 - alpha) * gamma


def linear_map(s_left, s_right, x):
    if not s_left < s_right:
        raise DegenerateInterval(f"[{s_left}, {s_right}]")
    num, den = x - s_left, s_right - s_left
    if isinstance(num, Rational) and isinstance(den, Rational):
        return Fraction(num) / den
    return num / den
