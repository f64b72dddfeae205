"""Instances on the real line and offline optimal matching.

Positions may be ``int``, ``float`` or :class:`fractions.Fraction`.  When every
position is an int or a Fraction the instance is *exact* and all derived
quantities (costs, probabilities) stay rational, which the branch enumerator
relies on.  Float instances take numpy fast paths.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from pathlib import Path
from typing import Sequence

import numpy as np

COST_TOL = 1e-9
BRUTE_FORCE_LIMIT = 9


class InstanceError(ValueError):
    pass


class MinGapViolation(InstanceError):
    pass


class RequestOffServer(InstanceError):
    pass


class TooManyRequests(InstanceError):
    pass


class SizeMismatch(ValueError):
    pass


class TooLarge(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class UnsortedServersWarning(UserWarning):
    pass


def is_exact(values) -> bool:
    return all(isinstance(v, Rational) for v in values)


@dataclass(frozen=True)
class Instance:
    """Server positions plus requests in arrival order."""

    servers: tuple
    requests: tuple

    def __post_init__(self):
        object.__setattr__(self, "servers", tuple(self.servers))
        object.__setattr__(self, "requests", tuple(self.requests))

    @property
    def n(self) -> int:
        return len(self.servers)

    @property
    def exact(self) -> bool:
        return is_exact(self.servers) and is_exact(self.requests)

    def to_dict(self) -> dict:
        return {"servers": [_num(v) for v in self.servers],
                "requests": [_num(v) for v in self.requests]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        return cls(sorted(data["servers"]), list(data["requests"]))

    @classmethod
    def load(cls, path) -> "Instance":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dump(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def _num(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else float(v)
    return v


def validate_instance(inst: Instance, strict: bool = False) -> Instance:
    """Return a copy of ``inst`` with sorted servers.

    In strict mode the normalisation assumptions are enforced: distinct server
    locations at least 1 apart and every request on a server location.
    """
    servers = list(inst.servers)
    if any(b < a for a, b in zip(servers, servers[1:])):
        warnings.warn("server positions were not sorted; sorting", UnsortedServersWarning,
                      stacklevel=2)
        servers.sort()
    if len(inst.requests) > len(servers):
        raise TooManyRequests(f"{len(inst.requests)} requests for {len(servers)} servers")
    if strict:
        for a, b in zip(servers, servers[1:]):
            if a != b and b - a < 1:
                raise MinGapViolation(f"servers {a} and {b} are closer than 1")
        locations = set(servers)
        for r in inst.requests:
            if r not in locations:
                raise RequestOffServer(f"request at {r} is not at a server location")
    return Instance(servers, inst.requests)


@dataclass(frozen=True)
class MatchingResult:
    pairs: tuple
    cost: float


def _check_sizes(P, Q):
    if len(P) != len(Q):
        raise SizeMismatch(f"|P|={len(P)} but |Q|={len(Q)}")


def matching_cost(P: Sequence, Q: Sequence):
    """Cost of the sorted-order pairing; no pair bookkeeping."""
    _check_sizes(P, Q)
    return sum((abs(p - q) for p, q in zip(sorted(P), sorted(Q))), 0)


def optimal_matching_cost(P: Sequence, Q: Sequence) -> MatchingResult:
    """Min-cost perfect matching of two equal-size point sets on the line.

    Pairing the k-th smallest of ``P`` with the k-th smallest of ``Q`` is optimal.
    ``pairs`` refers to indices of the inputs as given.
    """
    _check_sizes(P, Q)
    ip = sorted(range(len(P)), key=lambda i: P[i])
    iq = sorted(range(len(Q)), key=lambda i: Q[i])
    pairs = tuple(zip(ip, iq))
    cost = sum((abs(P[a] - Q[b]) for a, b in pairs), 0)
    return MatchingResult(pairs, cost)


@lru_cache(maxsize=None)
def _permutations(n: int, k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n), k)), dtype=np.intp).reshape(-1, k)


def brute_force_matching(P: Sequence, Q: Sequence) -> MatchingResult:
    """Exhaustive minimum over all bijections (test oracle)."""
    _check_sizes(P, Q)
    m = len(P)
    if m > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_LIMIT} points, got {m}")
    if m == 0:
        return MatchingResult((), 0)
    cost = np.abs(np.asarray(P, float)[:, None] - np.asarray(Q, float)[None, :])
    perms = _permutations(m, m)
    totals = cost[np.arange(m), perms].sum(axis=1)
    best = int(np.argmin(totals))
    return MatchingResult(tuple((i, int(j)) for i, j in enumerate(perms[best])),
                          float(totals[best]))


def brute_force_partial_cost(requests: Sequence, servers: Sequence) -> float:
    """Exhaustive minimum over injections of requests into servers (test oracle)."""
    t, n = len(requests), len(servers)
    if t > n:
        raise TooManyRequests(f"{t} requests for {n} servers")
    if t == 0:
        return 0.0
    if n > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_LIMIT} servers, got {n}")
    cost = np.abs(np.asarray(requests, float)[:, None] - np.asarray(servers, float)[None, :])
    perms = _permutations(n, t)
    return float(cost[np.arange(t), perms].sum(axis=1).min())


@dataclass(frozen=True)
class PartialOptTable:
    """``dp[i][j]``: cheapest way to match the i leftmost requests into the j leftmost servers."""

    dp: tuple

    @property
    def cost(self):
        return self.dp[-1][-1]


def partial_opt_table(requests: Sequence, servers: Sequence) -> PartialOptTable:
    """Exact DP table on sorted inputs; works for any ordered numeric type."""
    req = sorted(requests)
    srv = sorted(servers)
    t, n = len(req), len(srv)
    inf = math.inf
    prev = [0] * (n + 1)
    rows = [tuple(prev)]
    for i in range(1, t + 1):
        row = [inf] * (n + 1)
        r = req[i - 1]
        for j in range(1, n + 1):
            take = prev[j - 1] + abs(r - srv[j - 1])
            skip = row[j - 1]
            # equal costs keep the smaller server index (the skip branch came first)
            row[j] = skip if skip <= take else take
        rows.append(tuple(row))
        prev = row
    return PartialOptTable(tuple(rows))


def optimal_partial_cost(requests: Sequence, servers: Sequence):
    """Cheapest injection of ``requests`` into ``servers``."""
    if len(requests) > len(servers):
        raise TooManyRequests(f"{len(requests)} requests for {len(servers)} servers")
    if not requests:
        return 0
    if is_exact(requests) and is_exact(servers):
        return partial_opt_table(requests, servers).cost
    return float(_dp_np(np.sort(np.asarray(requests, float)), np.sort(np.asarray(servers, float)))[-1, -1])


def _dp_np(req_sorted: np.ndarray, srv_sorted: np.ndarray) -> np.ndarray:
    t, n = len(req_sorted), len(srv_sorted)
    dp = np.full((t + 1, n + 1), np.inf)
    dp[0, :] = 0.0
    for i in range(1, t + 1):
        cand = dp[i - 1, :-1] + np.abs(req_sorted[i - 1] - srv_sorted)
        dp[i, 1:] = np.minimum.accumulate(cand)
    return dp


def _dp_exact(req_sorted, srv_sorted):
    return [list(row) for row in partial_opt_table(req_sorted, srv_sorted).dp]


def removal_costs(requests: Sequence, servers: Sequence) -> list:
    """``c[j]`` = optimal cost of matching ``requests`` into ``servers`` minus server j.

    With these, the optimum after one more request at ``y`` is
    ``min_j c[j] + |y - servers[j]|`` (servers must be sorted).
    """
    t, n = len(requests), len(servers)
    if t >= n:
        return [math.inf] * n
    if is_exact(requests) and is_exact(servers):
        req = sorted(requests)
        fwd = _dp_exact(req, list(servers))
        bwd = _dp_exact([-r for r in reversed(req)], [-s for s in reversed(servers)])
        out = []
        for j in range(n):
            best = math.inf
            for i in range(t + 1):
                # first i requests into servers[:j], the rest into servers[j+1:]
                v = fwd[i][j] + bwd[t - i][n - 1 - j]
                if v < best:
                    best = v
            out.append(best)
        return out
    req = np.sort(np.asarray(requests, float))
    srv = np.asarray(servers, float)
    fwd = _dp_np(req, srv)
    bwd = _dp_np(-req[::-1], -srv[::-1])
    # bwd[t - i, n - 1 - j] matches the last t - i requests into servers[j+1:]
    total = fwd[:, :-1] + bwd[::-1, ::-1][:, 1:]
    return total.min(axis=0).tolist()


def extended_cost(costs: Sequence, servers: Sequence, y):
    """Optimum after appending a request at ``y``, given :func:`removal_costs`."""
    return min(c + abs(y - s) for c, s in zip(costs, servers))


def dpq_bound_check(P: Sequence, Q: Sequence, g: int, h: int, tol: float = COST_TOL):
    """Compare the change in optimal cost after deleting ``p_g`` and ``q_h``
    with the bound used for the potential argument (1-based indices).

    Returns ``(delta, bound, holds)``.
    """
    _check_sizes(P, Q)
    m = len(P)
    if not (1 <= g <= m and 1 <= h <= m):
        raise IndexOutOfRange(f"g={g}, h={h} outside 1..{m}")
    P, Q = sorted(P), sorted(Q)
    base = matching_cost(P, Q)
    reduced = matching_cost(P[:g - 1] + P[g:], Q[:h - 1] + Q[h:])
    delta = reduced - base
    pg, ph, qg, qh = P[g - 1], P[h - 1], Q[g - 1], Q[h - 1]
    if g <= h:
        bound = (ph - pg) - abs(ph - qh)
    else:
        bound = (qg - qh) - abs(qg - pg)
    return delta, bound, delta <= bound + tol


def nearest_index(sorted_positions: Sequence, x) -> int:
    """Index of the position nearest ``x``; ties go left."""
    k = bisect_left(sorted_positions, x)
    if k == 0:
        return 0
    if k == len(sorted_positions):
        return k - 1
    return k - 1 if x - sorted_positions[k - 1] <= sorted_positions[k] - x else k
