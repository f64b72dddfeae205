"""Executable checks: MDH monotonicity, the within-phase potential, the
normalised-cost facts, matching oracles, sampled vs exact MDH assignment
laws, the reduction inequalities and the DH non-monotonicity example."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algorithms import (ALGORITHMS, AlgoState, Line, RunTranscript, dh_step, mdh_decide,
                         mdh_next_distribution, mdh_step, run)
from .core import (COST_TOL, Instance, brute_force_matching, brute_force_partial_cost,
                   dpq_bound_check, matching_cost, optimal_partial_cost)
from .generators import generate_instance
from .islands import decompose_islands
from .randomness import RandomSource, enumerate_branches
from .reductions import ReductionConfig, run_reduction
from .serialize import dumps, jsonable as _jsonable
from .trigger import normalized_cost

MONO_SLACK = 1e-10
POTENTIAL_SLACK = 1e-9
FACT_TOL = 1e-12
COUNTEREXAMPLE_SERVERS = (0, 4, 11, 31)


@dataclass
class CheckReport:
    name: str
    trials: int = 0
    violations: int = 0
    worst_margin: float = math.inf
    details: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def fail(self, detail) -> None:
        self.violations += 1
        self.details.append(detail)

    def margin(self, value) -> None:
        value = float(value)
        if value < self.worst_margin:
            self.worst_margin = value

    def merge(self, other: "CheckReport") -> None:
        self.trials += other.trials
        self.violations += other.violations
        self.details.extend(other.details)
        self.margin(other.worst_margin)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "violations": self.violations,
            "worst_margin": _jsonable(self.worst_margin),
            "passed": self.passed,
            "details": [_jsonable(d) for d in self.details],
            **({"extra": _jsonable(self.extra)} if self.extra else {}),
        }


# -- monotonicity ----------------------------------------------------------------

def breakpoints(state: AlgoState, lo, hi) -> list:
    """Points inside ``[lo, hi]`` where the assignment rule can change form."""
    pts = {lo, hi, (lo + hi) / 2}
    if state.imaginary is not None:
        imag = state.positions(state.imaginary)
        pts.update(p for p in imag if lo < p < hi)
        part = decompose_islands(imag, state.positions(state.available))
        pts.update(p for p in part.boundaries() if lo < p < hi)
    if state.z_exp is not None:
        ctx = state.trigger_context(lo, hi)
        for a, b in ctx.spans:
            pts.update(p for p in (a, b) if lo < p < hi)
    return sorted(pts)


def check_monotonicity(state: AlgoState, interval=None, grid: int = 1000) -> CheckReport:
    """Pr[assignment to the right server] must not decrease across each gap
    between consecutive available servers, and must be constant on each run
    of trigger points lying on one side of the gap's midpoint."""
    rep = CheckReport("monotonicity")
    avail = state.positions(state.available)
    if interval is None:
        gaps = [(a, b) for a, b in zip(avail, avail[1:]) if a < b]
    else:
        gaps = [tuple(interval)]
    for lo, hi in gaps:
        _check_gap(state, lo, hi, grid, rep)
    return rep


def _check_gap(state: AlgoState, lo, hi, grid: int, rep: CheckReport) -> None:
    right = state.available[bisect_right(state.available, lo, key=state.line.servers.__getitem__)]
    flo, fhi = float(lo), float(hi)
    pts = sorted(set(breakpoints(state, lo, hi)) |
                 {float(v) for v in np.linspace(flo, fhi, grid + 2)[1:-1]})
    probs = [mdh_next_distribution(state, x).prob(right) for x in pts]
    rep.trials += len(pts)
    for k in range(1, len(pts)):
        step = probs[k] - probs[k - 1]
        rep.margin(step + MONO_SLACK)
        if step < -MONO_SLACK:
            rep.fail({"kind": "decrease", "x0": pts[k - 1], "x1": pts[k],
                      "p0": probs[k - 1], "p1": probs[k]})
    if state.z_exp is None:
        return
    ctx = state.trigger_context(lo, hi)
    mid = ctx.midpoint
    groups: dict = {}
    for x, p in zip(pts, probs):
        if lo < x < hi and ctx.is_trigger(x):
            key = (bisect_right(ctx._his, x), x < mid)
            groups.setdefault(key, []).append((x, p))
    for members in groups.values():
        values = [p for _, p in members]
        spread = max(values) - min(values)
        rep.margin(MONO_SLACK - spread)
        if spread > MONO_SLACK:
            rep.fail({"kind": "not-constant", "points": [x for x, _ in members[:5]],
                      "spread": spread})


def reachable_state(seed: int, n_max: int = 32):
    """A random MDH state reached by serving a random prefix of a random instance."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(7,)))
    n = int(rng.integers(3, n_max + 1))
    kind = ("uniform", "clustered")[int(rng.integers(0, 2))]
    inst = generate_instance(kind, n, int(rng.integers(0, 2 ** 31)))
    requests = list(inst.requests)
    if rng.random() < 0.5:
        # jitter some requests off the server locations
        lo, hi = inst.servers[0], inst.servers[-1]
        for k in range(n):
            if rng.random() < 0.4:
                requests[k] = float(rng.uniform(lo - 2, hi + 2))
    t = int(rng.integers(1, n))
    state = AlgoState.fresh_mdh(Line(inst.servers))
    src = RandomSource(seed, (1,))
    for x in requests[:t]:
        mdh_step(state, x, src)
    return inst, state


def monotonicity_suite(states: int = 500, grid: int = 1000, seed: int = 0,
                       n_max: int = 32) -> CheckReport:
    rep = CheckReport("monotonicity")
    gaps = 0
    for k in range(states):
        _, state = reachable_state(seed * 1_000_003 + k, n_max)
        sub = check_monotonicity(state, grid=grid)
        gaps += len(state.available) - 1
        for d in sub.details:
            d["state"] = k
        rep.merge(sub)
    rep.extra = {"states": states, "gaps": gaps, "grid": grid}
    return rep


# -- potential -------------------------------------------------------------------

def check_potential(tr: RunTranscript) -> CheckReport:
    """g must not increase between consecutive steps of a phase."""
    rep = CheckReport("potential")
    for ph in tr.phases:
        g = ph.potentials
        for k in range(1, len(g)):
            rep.trials += 1
            diff = g[k - 1] - g[k]
            rep.margin(diff + POTENTIAL_SLACK)
            if diff < -POTENTIAL_SLACK:
                rep.fail({"phase": ph.index, "k": k, "g_prev": g[k - 1], "g_next": g[k]})
    return rep


def potential_suite(runs: int = 10_000, seed: int = 0, n_max: int = 32) -> CheckReport:
    rep = CheckReport("potential")
    kinds = ("uniform", "clustered", "geometric")
    for k in range(runs):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(11, k)))
        n = int(rng.integers(2, n_max + 1))
        inst = generate_instance(kinds[k % 3], n, int(rng.integers(0, 2 ** 31)))
        sub = check_potential(run(inst, "mdh", seed=k))
        for d in sub.details:
            d["run"] = k
        rep.merge(sub)
    rep.extra = {"runs": runs}
    return rep


# -- normalised-cost facts -------------------------------------------------------

def _fact_samples(rng: np.random.Generator, m: int):
    a, b, c = rng.random((3, m))
    # include the closed boundary values
    edges = np.array([0.0, 0.5, 1.0])
    for arr in (a, b, c):
        arr[: 3 * len(edges)] = np.tile(edges, 3)
    return a, b, c


def _N(alpha, gamma):
    return alpha * (1 - gamma) + (1 - alpha) * gamma


def check_n_facts(samples: int = 100_000, seed: int = 0) -> CheckReport:
    """Facts (a)-(d) about N on constrained random triples, vectorised."""
    rep = CheckReport("n_facts")
    rng = np.random.default_rng(seed)
    for name in "abcd":
        a, b, g = _fact_samples(rng, samples)
        if name == "a":
            alpha, beta, gamma = np.minimum(a, b), np.maximum(a, b), g / 2
            lhs, rhs = _N(alpha, gamma), _N(beta, gamma)
        elif name == "b":
            alpha, beta, gamma = np.maximum(a, b), np.minimum(a, b), 0.5 + g / 2
            lhs, rhs = _N(alpha, gamma), _N(beta, gamma)
        elif name == "c":
            alpha, beta, gamma = np.maximum(a, b) / 2, np.minimum(a, b) / 2, g / 2
            lhs, rhs = _N(alpha, gamma), 2 * np.maximum(alpha, _N(beta, gamma))
        else:
            alpha, beta, gamma = 0.5 + np.minimum(a, b) / 2, 0.5 + np.maximum(a, b) / 2, 0.5 + g / 2
            lhs, rhs = _N(alpha, gamma), 2 * np.maximum(1 - alpha, _N(beta, gamma))
        margin = rhs - lhs
        bad = np.flatnonzero(margin < -FACT_TOL)
        rep.trials += samples
        rep.margin(margin.min() + FACT_TOL)
        for i in bad[:20]:
            rep.fail({"fact": name, "alpha": alpha[i], "beta": beta[i], "gamma": gamma[i]})
        rep.violations += max(0, len(bad) - 20)
    # the scalar helper must agree with the vectorised form
    for alpha, gamma in ((0.2, 0.3), (0.5, 0.3), (0.5, 0.5), (1.0, 0.0)):
        if abs(normalized_cost(alpha, gamma) - _N(alpha, gamma)) > FACT_TOL:
            rep.fail({"helper": (alpha, gamma)})
    return rep


# -- DH counterexample -----------------------------------------------------------

def _dh_branches(servers, requests, metric_kind: str):
    """Exact joint law of (imaginary move of r_2, server of r_3, adjustment
    move of the simulated r_2, if any) over every random branch."""

    def play(src):
        state = AlgoState.fresh(Line(servers), metric_kind)
        traces = [dh_step(state, x, src)[1] for x in requests]
        r2_move = traces[1].imaginary
        adj = traces[2].adjustment
        sim_r2 = adj.assignments[1][1] if adj is not None else None
        return r2_move, traces[2].server, sim_r2

    return enumerate_branches(play)


def reproduce_dh_counterexample() -> CheckReport:
    """Moving r_3 from s_1 to s_2 lowers DH's chance of using s_3 below 1."""
    rep = CheckReport("dh_counterexample")
    S = COUNTEREXAMPLE_SERVERS
    s1, s2 = S[0], S[1]
    readings = {}
    for kind in ("pseudo", "raw"):
        at_s1 = _dh_branches(S, (s2, s2, s1), kind)
        at_s2 = _dh_branches(S, (s2, s2, s2), kind)

        def conditional(table, target):
            given = sum(p for (move, _, _), p in table.items() if move == 0)
            hit = sum(p for (move, srv, _), p in table.items() if move == 0 and srv == target)
            return hit / given

        def sim_r2_right(table):
            given = sum(p for (move, _, _), p in table.items() if move == 0)
            return sum(p for (move, _, sim), p in table.items()
                       if move == 0 and sim == 2) / given

        readings[kind] = {
            "p_s3_given_r3_at_s1": conditional(at_s1, 2),
            "p_s3_given_r3_at_s2": conditional(at_s2, 2),
            "p_s4_given_r3_at_s2": conditional(at_s2, 3),
            "p_sim_r2_to_s3": sim_r2_right(at_s2),
        }
        rep.trials += len(at_s1) + len(at_s2)
    main = readings["pseudo"]
    checks = {
        "r3_at_s1_always_s3": main["p_s3_given_r3_at_s1"] == 1,
        "r3_at_s2_sometimes_not_s3": main["p_s3_given_r3_at_s2"] < 1,
        "sim_r2_right_is_4_11": main["p_sim_r2_to_s3"] == Fraction(4, 11),
    }
    for name, ok in checks.items():
        if not ok:
            rep.fail(name)
    rep.worst_margin = float(1 - main["p_s3_given_r3_at_s2"])
    rep.extra = {"pseudo_distance": readings["pseudo"], "raw_distance": readings["raw"],
                 "checks": checks}
    return rep


# -- matching oracles ------------------------------------------------------------

def check_matching_oracles(trials: int = 200, seed: int = 0) -> CheckReport:
    rep = CheckReport("matching_oracles")
    rng = np.random.default_rng(seed)

    def pts(k, integer):
        if integer:
            return [int(v) for v in rng.integers(-20, 21, size=k)]
        return [float(v) for v in rng.uniform(-50, 50, size=k)]

    for k in range(trials):
        m = int(rng.integers(1, 9))
        integer = k % 2 == 0
        P, Q = pts(m, integer), pts(m, integer)
        got, ref = matching_cost(P, Q), brute_force_matching(P, Q).cost
        rep.trials += 1
        rep.margin(1e-12 - abs(got - ref))
        if abs(got - ref) > 1e-12 * max(1.0, abs(ref)):
            rep.fail({"battery": "sorted_pairing", "P": P, "Q": Q, "got": got, "ref": ref})
    for k in range(trials):
        ns = int(rng.integers(1, 9))
        nr = int(rng.integers(0, min(6, ns) + 1))
        integer = k % 2 == 0
        R, S = pts(nr, integer), pts(ns, integer)
        got, ref = optimal_partial_cost(R, S), brute_force_partial_cost(R, S)
        rep.trials += 1
        rep.margin(1e-12 - abs(got - ref))
        if abs(got - ref) > 1e-12 * max(1.0, abs(ref)):
            rep.fail({"battery": "partial_dp", "R": R, "S": S, "got": got, "ref": ref})
    for k in range(trials):
        m = int(rng.integers(1, 9))
        P, Q = pts(m, k % 2 == 0), pts(m, k % 2 == 0)
        g, h = int(rng.integers(1, m + 1)), int(rng.integers(1, m + 1))
        delta, bound, holds = dpq_bound_check(P, Q, g, h, COST_TOL)
        rep.trials += 1
        rep.margin(bound - delta + COST_TOL)
        if not holds:
            rep.fail({"battery": "deletion_bound", "P": P, "Q": Q, "g": g, "h": h})
    return rep


# -- exact distribution vs sampling ----------------------------------------------

def _sample_point(seed: int):
    """A reachable state with two or more available servers and a request
    position strictly inside one of its available gaps."""
    k = 0
    while True:
        _, state = reachable_state(seed * 7919 + k)
        if len(state.available) >= 2:
            break
        k += 1
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(13,)))
    s = state.line.servers
    g = int(rng.integers(0, len(state.available) - 1))
    lo, hi = s[state.available[g]], s[state.available[g + 1]]
    return state, float(lo + (hi - lo) * rng.uniform(0.01, 0.99))


def check_distribution(pairs: int = 100, trials: int = 100_000, seed: int = 0,
                       sigmas: float = 3.0) -> CheckReport:
    """Sampled MDH assignments against mdh_next_distribution.

    Draws go through mdh_decide, the sampling half of mdh_step; for every
    pair one full mdh_step on a copy confirms it picks the same server as
    mdh_decide under the same stream.
    """
    rep = CheckReport("distribution")
    for k in range(pairs):
        state, x = _sample_point(seed * 1_000_003 + k)
        dist = mdh_next_distribution(state, x)
        a, b = RandomSource(seed, (17, k)), RandomSource(seed, (17, k))
        if mdh_step(state.copy(), x, a)[0] != mdh_decide(state, x, b).sigma:
            rep.fail({"pair": k, "kind": "step-decide-mismatch"})
        src = RandomSource(seed, (19, k))
        counts: dict = {}
        for _ in range(trials):
            sigma = mdh_decide(state, x, src).sigma
            counts[sigma] = counts.get(sigma, 0) + 1
        for idx in set(counts) | set(dist.support):
            p = float(dist.prob(idx))
            freq = counts.get(idx, 0) / trials
            sd = math.sqrt(p * (1 - p) / trials)
            rep.trials += 1
            rep.margin(sigmas * sd - abs(freq - p))
            if abs(freq - p) > sigmas * sd:
                rep.fail({"pair": k, "x": x, "server": idx, "p": p, "freq": freq, "sd": sd})
    rep.extra = {"pairs": pairs, "trials": trials, "sigmas": sigmas}
    return rep


# -- reductions ------------------------------------------------------------------

def reduction_instance(seed: int, colocated: bool, off_server: bool) -> Instance:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(23,)))
    k = int(rng.integers(2, 13))
    locs = np.concatenate([[0], np.cumsum(rng.integers(1, 11, size=k - 1))]).astype(float)
    mult = rng.integers(1, 4, size=k) if colocated else np.ones(k, int)
    servers = [float(v) for v in np.repeat(locs, mult)]
    m = int(rng.integers(1, len(servers) + 1))
    if off_server:
        requests = [float(v) for v in rng.uniform(locs[0] - 5, locs[-1] + 5, size=m)]
    else:
        requests = [servers[i] for i in rng.integers(0, len(servers), size=m)]
    return Instance(tuple(servers), tuple(requests))


def reduction_suite(instances: int = 200, seed: int = 0) -> CheckReport:
    """Per-run wrapper inequalities: co-located servers through the
    perturbation, off-server requests through snapping, and both at once."""
    rep = CheckReport("reductions")
    setups = (("perturb", True, False), ("snap", False, True), ("both", True, True))
    for mode, colocated, off in setups:
        for k in range(instances):
            inst = reduction_instance(seed * 1_000_003 + k, colocated, off)
            algo = ALGORITHMS[k % len(ALGORITHMS)]
            rr = run_reduction(inst, algo, k, ReductionConfig(mode))
            for name, ok in rr.checks.items():
                rep.trials += 1
                rep.margin(rr.margins[name])
                if not ok:
                    rep.fail({"mode": mode, "instance": k, "check": name,
                              "margin": rr.margins[name]})
    rep.extra = {"instances_per_mode": instances}
    return rep


# -- battery ---------------------------------------------------------------------

def run_battery(seed: int = 1, quick: bool = False) -> list:
    """All checks; ``quick`` shrinks the sample sizes for smoke runs."""
    if quick:
        return [
            reproduce_dh_counterexample(),
            check_matching_oracles(50, seed),
            check_n_facts(10_000, seed),
            monotonicity_suite(20, 200, seed, 16),
            potential_suite(200, seed, 16),
            check_distribution(10, 5_000, seed),
            reduction_suite(30, seed),
        ]
    return [
        reproduce_dh_counterexample(),
        check_matching_oracles(200, seed),
        check_n_facts(100_000, seed),
        monotonicity_suite(500, 1000, seed),
        potential_suite(10_000, seed),
        check_distribution(100, 100_000, seed),
        reduction_suite(200, seed),
    ]


def battery_json(reports: list) -> str:
    return dumps([r.to_dict() for r in reports])
