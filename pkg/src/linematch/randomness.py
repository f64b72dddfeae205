"""Random sources shared by the online algorithms.

Every algorithm draws through ``choose(probs)``.  A choice with a single
positive-probability option consumes nothing, so replaying a run and
enumerating its branch tree see the same decision points.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Hashable, Sequence

import numpy as np


class RandomSource:
    """Seeded stream with deterministic children keyed by integers."""

    def __init__(self, seed: int = 0, key: Sequence[int] = ()):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def child(self, *key: int) -> "RandomSource":
        return RandomSource(self.seed, self.key + tuple(key))

    def choose(self, probs: Sequence) -> int:
        positive = [i for i, p in enumerate(probs) if p > 0]
        if len(positive) == 1:
            return positive[0]
        u = self._gen.random()
        acc = 0.0
        for i in positive:
            acc += float(probs[i])
            if u < acc:
                return i
        return positive[-1]


class ScriptedSource:
    """Replays a fixed decision script; used to walk the full branch tree."""

    def __init__(self, script: Sequence[int]):
        self.script = tuple(script)
        self.pos = 0
        self.prob = 1
        self.frontier: list = []
        self._taken: list = []

    def child(self, *key: int) -> "ScriptedSource":
        return self

    def choose(self, probs: Sequence) -> int:
        positive = [i for i, p in enumerate(probs) if p > 0]
        if len(positive) == 1:
            return positive[0]
        if self.pos < len(self.script):
            i = self.script[self.pos]
        else:
            i = positive[0]
            for alt in positive[1:]:
                self.frontier.append(tuple(self._taken) + (alt,))
        self._taken.append(i)
        self.pos += 1
        self.prob = self.prob * probs[i]
        return i


def enumerate_branches(fn: Callable[[ScriptedSource], Hashable]) -> dict:
    """Run ``fn`` once per leaf of its decision tree.

    Returns ``{outcome: probability}``.  Probabilities are exact when the
    choice probabilities are Fractions.
    """
    out: dict = defaultdict(int)
    stack: list = [()]
    while stack:
        script = stack.pop()
        src = ScriptedSource(script)
        outcome = fn(src)
        out[outcome] += src.prob
        stack.extend(src.frontier)
    return dict(out)
