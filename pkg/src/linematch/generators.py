"""Seeded instance generators.  Every generated instance has distinct server
locations at least 1 apart and requests at server locations."""

from __future__ import annotations

import numpy as np

from .core import Instance

KINDS = ("uniform", "clustered", "geometric", "harmonic_adversary")


class BadParams(ValueError):
    pass


def _positions(gaps) -> list:
    return [float(v) for v in np.concatenate([[0.0], np.cumsum(np.asarray(gaps, float))])]


def uniform(n: int, rng: np.random.Generator) -> Instance:
    servers = _positions(rng.integers(1, 11, size=n - 1))
    requests = [servers[i] for i in rng.integers(0, n, size=n)]
    return Instance(tuple(servers), tuple(requests))


def clustered(n: int, rng: np.random.Generator) -> Instance:
    k = max(2, n // 4)
    sizes = np.bincount(rng.integers(0, k, size=n - k), minlength=k) + 1
    gaps = []
    for c, size in enumerate(sizes):
        if c:
            gaps.append(int(rng.integers(20, 201)))
        gaps.extend(int(g) for g in rng.integers(1, 3, size=size - 1))
    servers = _positions(gaps)
    owner = np.repeat(np.arange(k), sizes)
    weights = rng.dirichlet(np.full(k, 0.5))
    picks = rng.choice(k, size=n, p=weights)
    requests = []
    for c in picks:
        members = np.flatnonzero(owner == c)
        requests.append(servers[int(rng.choice(members))])
    return Instance(tuple(servers), tuple(requests))


def geometric(n: int, rng: np.random.Generator) -> Instance:
    servers = _positions([2.0 ** k for k in range(n - 1)])
    requests = [servers[i] for i in rng.integers(0, n, size=n)]
    return Instance(tuple(servers), tuple(requests))


def harmonic_adversary(n: int, rng: np.random.Generator | None = None) -> Instance:
    """Two requests at the second server, then one at each server greedy just
    took.  Nearest-server rules pay about 2**n; the optimum pays 2."""
    servers = [-2.0, 0.0] + [2.0 ** k - 1 for k in range(1, n - 1)]
    requests = [0.0, 0.0] + servers[2:]
    return Instance(tuple(servers), tuple(requests))


_GENERATORS = {
    "uniform": uniform,
    "clustered": clustered,
    "geometric": geometric,
    "harmonic_adversary": harmonic_adversary,
}


def generate_instance(kind: str, n: int, seed: int = 0) -> Instance:
    if kind not in _GENERATORS:
        raise BadParams(f"unknown generator {kind!r}; choose from {KINDS}")
    if n < 2:
        raise BadParams(f"need n >= 2, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(n,)))
    return _GENERATORS[kind](int(n), rng)
