"""Slow reference implementations used only by the tests.

Nothing here imports the package; each oracle follows the definitions
directly so that agreement with the fast code means something.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def brute_opt(requests, servers):
    """Minimum over all injections of requests into servers."""
    requests, servers = list(requests), list(servers)
    if not requests:
        return 0
    best = math.inf
    for chosen in itertools.permutations(range(len(servers)), len(requests)):
        c = sum(abs(r - servers[j]) for r, j in zip(requests, chosen))
        best = min(best, c)
    return best


def all_optimal_bijections(P, Q, tol=1e-9):
    costs = {}
    for perm in itertools.permutations(range(len(Q))):
        costs[perm] = sum(abs(P[i] - Q[j]) for i, j in enumerate(perm))
    best = min(costs.values())
    return [perm for perm, c in costs.items() if c <= best + tol]


def naive_pd(servers, i, j, Z, n):
    total = 0
    for h in range(i, j):
        gap = servers[h + 1] - servers[h]
        if gap >= Z:
            return math.inf
        total += Fraction(Z, n * n) if gap <= Fraction(Z, n * n) else gap
    return total


def scan_trigger_boundaries(prior, servers, Z, x, left, right, step):
    """Walk from x in steps of ``step`` until a non-trigger point or the
    enclosing server; returns the last position reached on each side."""

    def trig(y):
        return brute_opt(list(prior) + [y], servers) >= Z

    y = x
    while y - step > left and trig(y - step):
        y -= step
    y_left = left if (y - step <= left and trig(left + step / 2)) else y - step
    y = x
    while y + step < right and trig(y + step):
        y += step
    y_right = right if (y + step >= right and trig(right - step / 2)) else y + step
    return y_left, y_right


# -- exact doubled-harmonic reference ------------------------------------------------

def _next_z(opt):
    j = 0
    while Fraction(10) ** j <= opt:
        j += 1
    while j > -50 and Fraction(10) ** (j - 1) > opt:
        j -= 1
    return Fraction(10) ** j


def dh_branches(servers, requests):
    """Every random branch of DH on a tiny instance.

    Returns a list of ``(prob, assigned, imaginary_moves, adjust_log)`` where
    ``assigned`` and ``imaginary_moves`` are server indices per request and
    ``adjust_log`` maps each triggering step to the free set of its simulation.
    Probabilities are exact Fractions.  Requests must sit on server locations.
    """
    servers = list(servers)
    n = len(servers)
    branches = [(Fraction(1), dict(free=frozenset(range(n)), imag=None, match=None, Z=None,
                                   assigned=(), moves=(), adj={}))]
    for t, x in enumerate(requests, start=1):
        opt_t = brute_opt(requests[:t], servers)
        nxt = []
        for p, st in branches:
            here = [k for k in sorted(st["free"]) if servers[k] == x]
            if st["Z"] is None and here:
                k = here[0]
                nxt.append((p, dict(st, free=st["free"] - {k}, assigned=st["assigned"] + (k,),
                                    moves=st["moves"] + (k,))))
                continue
            options = [(Fraction(1), st)]
            if st["Z"] is None or opt_t >= st["Z"]:
                Z = _next_z(opt_t)
                options = []
                for q, sim in _final_free_sets(servers, requests[: t - 1]):
                    imag = sorted(sim)
                    match = dict(zip(imag, sorted(st["free"])))
                    options.append((q, dict(st, imag=frozenset(imag), match=match, Z=Z,
                                            adj={**st["adj"], t: frozenset(sim)})))
            for q, s2 in options:
                for r, gamma in _imaginary_move(servers, s2["imag"], x, s2["Z"], n):
                    sigma = s2["match"][gamma]
                    match = dict(s2["match"])
                    del match[gamma]
                    nxt.append((p * q * r, dict(s2, free=s2["free"] - {sigma},
                                                imag=s2["imag"] - {gamma}, match=match,
                                                assigned=s2["assigned"] + (sigma,),
                                                moves=s2["moves"] + (gamma,))))
        branches = nxt
    return [(p, st["assigned"], st["moves"], st["adj"]) for p, st in branches]


def _final_free_sets(servers, prefix):
    out: dict = {}
    for p, assigned, _, _ in dh_branches(servers, prefix):
        key = frozenset(range(len(servers))) - set(assigned)
        out[key] = out.get(key, 0) + p
    return [(q, k) for k, q in out.items()]


def _imaginary_move(servers, imag, x, Z, n):
    imag = sorted(imag)
    at = [k for k in imag if servers[k] == x]
    if at:
        return [(Fraction(1), at[0])]
    left = [k for k in imag if servers[k] < x]
    right = [k for k in imag if servers[k] > x]
    if not left:
        return [(Fraction(1), right[0])]
    if not right:
        return [(Fraction(1), left[-1])]
    a, b = left[-1], right[0]
    xi = servers.index(x)
    pl, pr = naive_pd(servers, a, xi, Z, n), naive_pd(servers, xi, b, Z, n)
    if pl == math.inf and pr == math.inf:
        dl, dr = Fraction(x - servers[a]), Fraction(servers[b] - x)
        return [(dr / (dl + dr), a), (dl / (dl + dr), b)]
    if pl == math.inf:
        return [(Fraction(1), b)]
    if pr == math.inf:
        return [(Fraction(1), a)]
    return [(Fraction(pr) / (pl + pr), a), (Fraction(pl) / (pl + pr), b)]
