"""Pseudo-distances on the server line and the harmonic-style neighbour rule."""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

INF = math.inf


class BadIndices(IndexError):
    pass


class BothInfinite(ArithmeticError):
    """Both neighbours are an infinite pseudo-distance away."""


def z_value(exponent: int, exact: bool = False):
    if exact:
        return 10 ** exponent if exponent >= 0 else Fraction(1, 10 ** -exponent)
    return 10.0 ** exponent


def next_exponent(opt) -> int:
    """Smallest j with ``10**(j-1) <= opt < 10**j``."""
    if not opt > 0 or opt == INF:
        raise ValueError(f"estimate undefined for optimal cost {opt!r}")
    j = math.floor(math.log10(opt)) + 1
    exact = isinstance(opt, Rational)
    while z_value(j, exact) <= opt:
        j += 1
    while z_value(j - 1, exact) > opt:
        j -= 1
    return j


def _ratio(a, b):
    if type(a) is float or type(b) is float:
        return a / b
    if isinstance(a, Rational) and isinstance(b, Rational):
        return Fraction(a) / b
    return a / b


def gap_pd(gap, Z, n: int, clamp=None):
    if clamp is None:
        clamp = _ratio(Z, n * n)
    if gap >= Z:
        return INF
    if gap <= clamp:
        return clamp
    return gap


def pseudo_distance(servers: Sequence, i: int, j: int, Z, n: int):
    """Pseudo-distance between servers ``i <= j`` (0-based)."""
    if not (0 <= i <= j < len(servers)):
        raise BadIndices(f"need 0 <= i <= j < {len(servers)}, got i={i}, j={j}")
    clamp = _ratio(Z, n * n)
    total = 0
    for h in range(i, j):
        total = total + gap_pd(servers[h + 1] - servers[h], Z, n, clamp)
        if total == INF:
            return INF
    return total


def neighbor_probs(pd_left, pd_right):
    """``(L, R)``: move left with probability inversely proportional to ``pd_left``."""
    if pd_left == INF and pd_right == INF:
        raise BothInfinite("both neighbours at infinite pseudo-distance")
    if pd_left == INF:
        return 0, 1
    if pd_right == INF:
        return 1, 0
    s = pd_left + pd_right
    if s == 0:
        raise ValueError("neighbours at zero total pseudo-distance")
    return _ratio(pd_right, s), _ratio(pd_left, s)


class PseudoMetric:
    """Pseudo-distance extended to arbitrary points.

    A point strictly inside a gap takes the proportional share of that gap's
    pseudo-distance; any positive share of an infinite gap is infinite.
    """

    def __init__(self, servers: Sequence, exponent: int, n: int | None = None, exact: bool = False):
        self.servers = tuple(servers)
        self.n = len(self.servers) if n is None else n
        self.exact = exact
        self.Z = z_value(exponent, exact)
        clamp = _ratio(self.Z, self.n * self.n)
        self.gaps = [gap_pd(b - a, self.Z, self.n, clamp)
                     for a, b in zip(self.servers, self.servers[1:])]
        fin, inf_count = [0], [0]
        for g in self.gaps:
            if g == INF:
                fin.append(fin[-1])
                inf_count.append(inf_count[-1] + 1)
            else:
                fin.append(fin[-1] + g)
                inf_count.append(inf_count[-1])
        self._fin = fin
        self._inf = inf_count

    def coord(self, x):
        s = self.servers
        k = bisect_right(s, x) - 1
        if k < 0:
            return 0, x - s[0]
        if k >= len(s) - 1:
            return self._inf[-1], self._fin[-1] + (x - s[-1])
        if x == s[k]:
            return self._inf[k], self._fin[k]
        lam = _ratio(x - s[k], s[k + 1] - s[k])
        g = self.gaps[k]
        if g == INF:
            return self._inf[k] + lam, self._fin[k]
        return self._inf[k], self._fin[k] + lam * g

    def between(self, x, y):
        """Pseudo-distance between two points; a point at a shared location
        stands for the rightmost server there."""
        if y < x:
            x, y = y, x
        if x == y:
            return 0
        ix, fx = self.coord(x)
        iy, fy = self.coord(y)
        if iy > ix:
            return INF
        return fy - fx

    def around(self, i: int, x, j: int):
        """Pseudo-distances from server ``i`` to ``x`` and from ``x`` to server ``j``."""
        ix, fx = self.coord(x)
        left = INF if ix > self._inf[i] else fx - self._fin[i]
        right = INF if self._inf[j] > ix else self._fin[j] - fx
        return left, right

    def index_between(self, i: int, j: int):
        if j < i:
            i, j = j, i
        if self._inf[j] > self._inf[i]:
            return INF
        return self._fin[j] - self._fin[i]


@lru_cache(maxsize=256)
def metric_for(servers: tuple, exponent: int, exact: bool) -> PseudoMetric:
    return PseudoMetric(servers, exponent, len(servers), exact)


def harmonic_probs(d_left, d_right):
    """Left/right probabilities inversely proportional to true distance."""
    s = d_left + d_right
    if s == 0:
        return 1, 0
    return _ratio(d_right, s), _ratio(d_left, s)


def direction_probs(pd_left, pd_right, d_left, d_right):
    """Pseudo-distance rule, falling back to true distances when both sides are infinite."""
    try:
        return neighbor_probs(pd_left, pd_right)
    except BothInfinite:
        return harmonic_probs(d_left, d_right)
