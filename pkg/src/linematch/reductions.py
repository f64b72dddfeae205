"""Wrappers that lift the two input restrictions of the core algorithms:
distinct server locations (perturbation) and requests at server locations
(snapping).  Each wrapped run records the inequalities that connect its cost
to the inner algorithm's cost."""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction

from .algorithms import OnlineMatcher
from .core import COST_TOL, Instance, MinGapViolation, nearest_index, optimal_partial_cost

MODES = ("none", "perturb", "snap", "both")


@dataclass(frozen=True)
class ReductionConfig:
    mode: str = "both"
    epsilon: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown reduction mode {self.mode!r}; choose from {MODES}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    def eps_for(self, n: int):
        cap = Fraction(1, 5 * n)
        if self.epsilon is None:
            return float(cap)
        if self.epsilon > cap:
            raise ValueError(f"epsilon {self.epsilon} exceeds 1/(5n) = {float(cap)}")
        return self.epsilon

    def to_dict(self) -> dict:
        return {"mode": self.mode, "epsilon": self.epsilon}

    @classmethod
    def from_dict(cls, data: dict | None) -> "ReductionConfig":
        data = data or {}
        return cls(data.get("mode", "both"), data.get("epsilon"))


def min_distinct_gap(servers) -> float:
    s = sorted(set(servers))
    return min((b - a for a, b in zip(s, s[1:])), default=float("inf"))


def rescale(inst: Instance):
    """Scale positions so distinct server locations are at least 1 apart.

    Returns ``(instance, factor)``; costs in the new instance are ``factor``
    times the original ones.
    """
    gap = min_distinct_gap(inst.servers)
    if gap >= 1 or gap == float("inf"):
        return inst, 1
    factor = 1 / gap
    return Instance(tuple(s * factor for s in inst.servers),
                    tuple(r * factor for r in inst.requests)), factor


@dataclass(frozen=True)
class PositionMap:
    original: tuple
    perturbed: tuple
    epsilon: float

    @property
    def max_shift(self):
        return max((p - o for o, p in zip(self.original, self.perturbed)), default=0)

    def group(self, x) -> range:
        """Server indices whose original location is ``x``."""
        lo = bisect_left(self.original, x)
        hi = lo
        while hi < len(self.original) and self.original[hi] == x:
            hi += 1
        return range(lo, hi)


def _shift(eps, j: int, k: int):
    if isinstance(eps, Fraction) or (isinstance(eps, int)):
        return Fraction(eps) * j / k
    return eps * j / k


def lift_servers(servers, epsilon) -> PositionMap:
    original = tuple(sorted(servers))
    if min_distinct_gap(original) < 1:
        raise MinGapViolation("distinct server locations closer than 1; rescale first")
    out = list(original)
    i = 0
    while i < len(original):
        j = i
        while j + 1 < len(original) and original[j + 1] == original[i]:
            j += 1
        k = j - i
        # k extra copies go right at spacing epsilon/k, the last one exactly epsilon away
        for c in range(1, k + 1):
            out[i + c] = original[i] + _shift(epsilon, c, k)
        i = j + 1
    return PositionMap(original, tuple(out), epsilon)


def lift_colocated(inst: Instance, epsilon=None):
    """Instance with co-located servers spread apart, plus the position map."""
    eps = ReductionConfig("perturb", epsilon).eps_for(len(inst.servers))
    pmap = lift_servers(inst.servers, eps)
    return Instance(pmap.perturbed, tuple(inst.requests)), pmap


class PerturbedMatcher:
    """Serves requests on possibly co-located servers through an inner algorithm
    that sees distinct, slightly shifted copies."""

    def __init__(self, servers, algorithm: str = "mdh", seed: int = 0, epsilon=None, rng=None):
        n = len(servers)
        self.epsilon = ReductionConfig("perturb", epsilon).eps_for(n)
        self.pmap = lift_servers(servers, self.epsilon)
        self.inner = OnlineMatcher(self.pmap.perturbed, algorithm, seed, rng=rng)
        self.inner_requests: list = []

    @property
    def servers(self) -> tuple:
        return self.pmap.original

    def is_available(self, index: int) -> bool:
        return self.inner.is_available(index)

    def redirect(self, x):
        """Leftmost available copy of a co-located group at ``x``, else ``x``."""
        group = self.pmap.group(x)
        if len(group) > 1:
            for k in group:
                if self.inner.is_available(k):
                    return self.pmap.perturbed[k]
        return x

    def serve(self, x) -> int:
        x_in = self.redirect(x)
        self.inner_requests.append(x_in)
        return self.inner.serve(x_in)


class SnappedMatcher:
    """Moves every request to its nearest server location (ties left) before
    handing it to the inner matcher."""

    def __init__(self, inner):
        self.inner = inner
        self.locations = tuple(sorted(set(inner.servers)))
        self.inner_requests: list = []

    @property
    def servers(self) -> tuple:
        return self.inner.servers

    def is_available(self, index: int) -> bool:
        return self.inner.is_available(index)

    def snap(self, x):
        return self.locations[nearest_index(self.locations, x)]

    def serve(self, x) -> int:
        t = self.snap(x)
        self.inner_requests.append(t)
        return self.inner.serve(t)


def snap_requests(inner) -> SnappedMatcher:
    return SnappedMatcher(inner)


@dataclass
class ReductionRun:
    mode: str
    scale: float
    epsilon: float | None
    assignments: list
    costs: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"mode": self.mode, "scale": float(self.scale),
                "epsilon": None if self.epsilon is None else float(self.epsilon),
                "costs": {k: float(v) for k, v in self.costs.items()},
                "checks": dict(self.checks),
                "margins": {k: float(v) for k, v in self.margins.items()}}


def _cost(requests, positions, assigned):
    return sum((abs(r - positions[k]) for r, k in zip(requests, assigned)), 0)


def _holds(rep: ReductionRun, name: str, lhs, rhs) -> None:
    """Record ``lhs <= rhs`` up to rounding."""
    margin = rhs - lhs
    rep.margins[name] = margin
    rep.checks[name] = margin >= -COST_TOL * max(1.0, abs(float(rhs)))


def run_reduction(inst: Instance, algorithm: str = "mdh", seed: int = 0,
                  config: ReductionConfig | None = None) -> ReductionRun:
    """Run ``algorithm`` behind the configured wrappers and account for the
    per-run inequalities between the wrapped and inner costs."""
    config = config or ReductionConfig()
    scaled, factor = rescale(inst)
    servers, requests = tuple(sorted(scaled.servers)), tuple(scaled.requests)
    n = len(servers)
    perturb = config.mode in ("perturb", "both")
    snap = config.mode in ("snap", "both")
    if perturb:
        base = PerturbedMatcher(servers, algorithm, seed, config.epsilon)
        eps = base.epsilon
    else:
        base = OnlineMatcher(servers, algorithm, seed)
        eps = None
    outer = SnappedMatcher(base) if snap else base
    assigned = [outer.serve(x) for x in requests]
    rep = ReductionRun(config.mode, factor, eps, assigned)
    # requests as the perturbation layer saw them
    mid_requests = outer.inner_requests if snap else list(requests)
    on_outer = _cost(requests, servers, assigned)
    rep.costs["online"] = on_outer
    rep.costs["opt"] = optimal_partial_cost(requests, servers)
    if snap:
        on_snapped = _cost(mid_requests, servers, assigned)
        opt_snapped = optimal_partial_cost(mid_requests, servers)
        rep.costs.update(online_snapped=on_snapped, opt_snapped=opt_snapped)
        _holds(rep, "snap_online", on_outer, on_snapped + rep.costs["opt"])
        _holds(rep, "snap_opt", opt_snapped / 2, rep.costs["opt"])
    if perturb:
        on_b = _cost(mid_requests, servers, assigned)
        on_a = _cost(base.inner_requests, base.pmap.perturbed, assigned)
        opt_b = optimal_partial_cost(mid_requests, servers)
        opt_a = optimal_partial_cost(base.inner_requests, base.pmap.perturbed)
        rep.costs.update(online_perturbed=on_a, opt_perturbed=opt_a)
        _holds(rep, "perturb_online", on_b, on_a + n * eps)
        _holds(rep, "perturb_opt", opt_a - n * eps, opt_b)
    return rep
