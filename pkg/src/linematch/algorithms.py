"""Online matching on the line: greedy, Harmonic, Doubled Harmonic (DH) and
Modified Doubled Harmonic (MDH).

Servers are referred to by their index in the sorted server tuple, so
co-located servers stay distinguishable.  Every step function mutates the
state it is given and returns ``(server_index, StepTrace)``.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .core import Instance, _dp_np, is_exact, partial_opt_table
from .pseudo import (INF, PseudoMetric, direction_probs, harmonic_probs, next_exponent,
                     z_value)
from .randomness import RandomSource
from .trigger import TriggerContext, trigger_boundaries

ALGORITHMS = ("greedy", "harmonic", "dh", "mdh")


class NoAvailableServer(RuntimeError):
    pass


class Line:
    """Per-instance caches shared by a run and all of its simulations."""

    def __init__(self, servers):
        self.servers = tuple(servers)
        self.n = len(self.servers)
        self.exact = is_exact(self.servers)
        self._srv = np.asarray(self.servers, float)
        self._metrics: dict = {}
        self._opt: dict = {(): 0}

    def metric(self, exponent: int) -> PseudoMetric:
        m = self._metrics.get(exponent)
        if m is None:
            m = self._metrics[exponent] = PseudoMetric(self.servers, exponent, self.n, self.exact)
        return m

    def Z(self, exponent: int):
        return z_value(exponent, self.exact)

    def opt(self, prefix: tuple):
        """Optimal cost of matching the request prefix (memoised by prefix)."""
        v = self._opt.get(prefix)
        if v is None:
            if len(prefix) > self.n:
                v = INF
            elif self.exact and is_exact(prefix):
                v = partial_opt_table(prefix, self.servers).cost
            else:
                v = float(_dp_np(np.sort(np.asarray(prefix, float)), self._srv)[-1, -1])
            self._opt[prefix] = v
        return v


@dataclass(eq=False)
class AlgoState:
    line: Line
    available: list
    imaginary: list | None = None
    z_exp: int | None = None
    requests: tuple = ()
    assigned: list = field(default_factory=list)
    matching: dict | None = None
    metric_kind: str = "pseudo"
    phase_index: int = 0
    _tcache: tuple | None = field(default=None, repr=False)
    _rcache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def fresh(cls, line: Line, metric_kind: str = "pseudo") -> "AlgoState":
        return cls(line, list(range(line.n)), metric_kind=metric_kind)

    @classmethod
    def fresh_mdh(cls, line: Line, metric_kind: str = "pseudo") -> "AlgoState":
        """MDH start: estimate 1, every server both available and imaginary."""
        return cls(line, list(range(line.n)), list(range(line.n)), 0, metric_kind=metric_kind)

    @property
    def estimate_set(self) -> bool:
        return self.phase_index > 0

    @property
    def servers(self):
        return self.line.servers

    @property
    def Z(self):
        return None if self.z_exp is None else self.line.Z(self.z_exp)

    @property
    def opt_to_date(self):
        return self.line.opt(self.requests)

    def copy(self) -> "AlgoState":
        return replace(self, available=list(self.available),
                       imaginary=None if self.imaginary is None else list(self.imaginary),
                       assigned=list(self.assigned),
                       matching=None if self.matching is None else dict(self.matching),
                       _rcache={})

    def positions(self, indices) -> list:
        s = self.line.servers
        return [s[i] for i in indices]

    def trigger_context(self, left=None, right=None) -> TriggerContext:
        key = (self.requests, self.z_exp)
        if self._tcache is None or self._tcache[0] != key:
            self._tcache = (key, TriggerContext(self.requests, self.line.servers, self.Z))
        ctx = self._tcache[1]
        if left is None and right is None:
            return ctx
        return TriggerContext(self.requests, self.line.servers, self.Z, left, right,
                              costs=ctx.costs, spans=ctx.spans)


@dataclass
class StepTrace:
    t: int
    request: float
    server: int = -1
    server_pos: float = None
    cost: float = 0
    case: str = ""
    imaginary: int | None = None
    imaginary_pos: float | None = None
    corrective: int | None = None
    was_trigger: bool = False
    init: bool = False
    p_right: float | None = None
    y_left: float | None = None
    y_right: float | None = None
    z_before: int | None = None
    z_after: int | None = None
    opt: float = 0
    potential: float | None = None
    draws: int = 0
    adjustment: "Adjustment | None" = None


@dataclass
class Adjustment:
    """Result of re-simulating DH from scratch on a request prefix."""

    through: int
    imaginary: tuple
    assignments: tuple
    imaginary_moves: tuple
    z_exp: int | None


@dataclass
class AssignmentDistribution:
    support: dict
    servers: tuple = ()

    def by_position(self) -> dict:
        out: dict = {}
        for i, p in self.support.items():
            out[self.servers[i]] = out.get(self.servers[i], 0) + p
        return out

    def prob(self, index: int):
        return self.support.get(index, 0)


# -- lookups on sorted index lists -------------------------------------------------

def _at(state: AlgoState, idx_list, x):
    pos = state.line.servers.__getitem__
    k = bisect_left(idx_list, x, key=pos)
    if k < len(idx_list) and pos(idx_list[k]) == x:
        return idx_list[k]
    return None


def _around(state: AlgoState, idx_list, x):
    """Nearest entries strictly left and strictly right of ``x``."""
    pos = state.line.servers.__getitem__
    k = bisect_left(idx_list, x, key=pos)
    left = idx_list[k - 1] if k > 0 else None
    k2 = bisect_right(idx_list, x, key=pos)
    right = idx_list[k2] if k2 < len(idx_list) else None
    return left, right


def _count_below(state: AlgoState, idx_list, x) -> int:
    return bisect_left(idx_list, x, key=state.line.servers.__getitem__)


def _direction(state: AlgoState, x, left: int, right: int):
    """(L, R) for choosing between imaginary servers ``left < x < right``."""
    s = state.line.servers
    d_left, d_right = x - s[left], s[right] - x
    if state.metric_kind == "raw":
        return harmonic_probs(d_left, d_right)
    pd_left, pd_right = state.line.metric(state.z_exp).around(left, x, right)
    return direction_probs(pd_left, pd_right, d_left, d_right)


def _draws(rng) -> int:
    return getattr(rng, "draws", getattr(rng, "pos", 0))


def _record(state: AlgoState, tr: StepTrace, x, sigma: int) -> None:
    s = state.line.servers
    tr.server = sigma
    tr.server_pos = s[sigma]
    tr.cost = abs(x - s[sigma])
    if tr.imaginary is not None:
        tr.imaginary_pos = s[tr.imaginary]
    tr.z_after = state.z_exp


# -- baselines -------------------------------------------------------------------

def greedy_step(state: AlgoState, x, rng=None):
    """Nearest available server; exact midpoints go left."""
    if not state.available:
        raise NoAvailableServer("no available server")
    s = state.line.servers
    tr = StepTrace(len(state.requests) + 1, x, case="greedy")
    left, right = _around(state, state.available, x)
    here = _at(state, state.available, x)
    if here is not None:
        sigma = here
    elif left is None:
        sigma = right
    elif right is None:
        sigma = left
    else:
        sigma = left if x - s[left] <= s[right] - x else right
    state.available.remove(sigma)
    state.requests = state.requests + (x,)
    state.assigned.append(sigma)
    _record(state, tr, x, sigma)
    return sigma, tr


def harmonic_step(state: AlgoState, x, rng):
    """First available on either side, chosen inversely to true distance."""
    if not state.available:
        raise NoAvailableServer("no available server")
    s = state.line.servers
    tr = StepTrace(len(state.requests) + 1, x, case="harmonic")
    before = _draws(rng)
    here = _at(state, state.available, x)
    left, right = _around(state, state.available, x)
    if here is not None:
        sigma = here
    elif left is None:
        sigma = right
    elif right is None:
        sigma = left
    else:
        L, R = harmonic_probs(x - s[left], s[right] - x)
        tr.p_right = R
        sigma = (left, right)[rng.choose((L, R))]
    state.available.remove(sigma)
    state.requests = state.requests + (x,)
    state.assigned.append(sigma)
    tr.draws = _draws(rng) - before
    _record(state, tr, x, sigma)
    return sigma, tr


# -- Doubled Harmonic ------------------------------------------------------------

def dh_step(state: AlgoState, x, rng):
    if not state.available:
        raise NoAvailableServer("no available server")
    line = state.line
    t = len(state.requests) + 1
    prefix = state.requests + (x,)
    opt_t = line.opt(prefix)
    tr = StepTrace(t, x, z_before=state.z_exp, opt=opt_t)
    before = _draws(rng)
    here = _at(state, state.available, x)
    if state.z_exp is None and here is not None:
        sigma = here
        tr.case = "pre"
    else:
        if state.z_exp is None or opt_t >= state.Z:
            tr.was_trigger = True
            tr.init = state.z_exp is None
            state.z_exp = next_exponent(opt_t)
            adj = _simulate_dh(line, state.requests, rng.child(t), state.metric_kind)
            tr.adjustment = adj
            state.imaginary = list(adj.imaginary)
            state.matching = dict(zip(state.imaginary, state.available))
            state.phase_index += 1
        k = _at(state, state.imaginary, x)
        if k is not None:
            gamma, tr.case = k, "zero"
        else:
            left, right = _around(state, state.imaginary, x)
            if left is None:
                gamma, tr.case = right, "right-only"
            elif right is None:
                gamma, tr.case = left, "left-only"
            else:
                L, R = _direction(state, x, left, right)
                tr.p_right = R
                gamma = (left, right)[rng.choose((L, R))]
                tr.case = "random"
        sigma = state.matching.pop(gamma)
        state.imaginary.remove(gamma)
        tr.imaginary = gamma
        tr.corrective = sigma
    state.available.remove(sigma)
    state.requests = prefix
    state.assigned.append(sigma)
    state._tcache = None
    tr.draws = _draws(rng) - before
    _record(state, tr, x, sigma)
    return sigma, tr


def _simulate_dh(line: Line, requests: tuple, rng, metric_kind: str = "pseudo") -> Adjustment:
    sim = AlgoState.fresh(line, metric_kind)
    assignments, moves = [], []
    for x in requests:
        sigma, tr = dh_step(sim, x, rng)
        assignments.append((x, sigma))
        moves.append((x, sigma if tr.imaginary is None else tr.imaginary))
    return Adjustment(len(requests), tuple(sim.available), tuple(assignments), tuple(moves),
                      sim.z_exp)


def adjustment_operation(instance, t: int, rng, metric_kind: str = "pseudo") -> Adjustment:
    """Fresh DH simulation on the first ``t`` requests of ``instance``.

    ``imaginary`` holds the servers left free by the simulation; the matching
    to the real available servers is the sorted-order pairing.
    """
    line = instance if isinstance(instance, Line) else Line(instance.servers)
    requests = tuple(instance.requests[:t]) if isinstance(instance, Instance) else ()
    return _simulate_dh(line, requests, rng, metric_kind)


# -- Modified Doubled Harmonic ---------------------------------------------------

@dataclass
class _Rule:
    case: str
    left: int | None = None
    right: int | None = None
    p_right: object = None
    y_left: object = None
    y_right: object = None


def _nontrigger_right(state: AlgoState, x):
    """Probability that a non-triggering request at ``x`` (strictly between two
    available servers, not on one) goes to the right one."""
    s = state.line.servers
    imag = state.imaginary
    pos = s.__getitem__
    k = bisect_left(imag, x, key=pos)
    if k < len(imag) and s[imag[k]] == x:
        # zero-length imaginary move, then head toward its matched partner
        partner = state.available[k]
        return (1 if s[partner] > x else 0), "4i"
    na = bisect_left(state.available, x, key=pos)
    if k < na:
        return 0, "4a"
    if k > na:
        return 1, "4b"
    if k == 0 or k == len(imag):
        raise AssertionError(f"stationary point {x} without imaginary servers on both sides")
    left, right = imag[k - 1], imag[k]
    return _direction(state, x, left, right)[1], "4c"


def _right_prob_at(state: AlgoState, y, left: int, right: int):
    s = state.line.servers
    if y == s[left]:
        return 0
    if y == s[right]:
        return 1
    return _nontrigger_right(state, y)[0]


def _rule(state: AlgoState, x, triggering: bool) -> _Rule:
    s = state.line.servers
    here = _at(state, state.available, x)
    if here is not None:
        return _Rule("1", here, here)
    avail = state.available
    if x < s[avail[0]]:
        return _Rule("2", avail[0], avail[0])
    if x > s[avail[-1]]:
        return _Rule("3", avail[-1], avail[-1])
    left, right = _around(state, avail, x)
    if not triggering:
        p, case = _nontrigger_right(state, x)
        return _Rule(case, left, right, p)
    ctx = state.trigger_context(s[left], s[right])
    y_left, y_right = trigger_boundaries(ctx, x)
    p_left = _right_prob_at(state, y_left, left, right)
    p_right = _right_prob_at(state, y_right, left, right)
    if 2 * p_right < 1:
        case, p = "5a", p_right
    elif 2 * p_left > 1:
        case, p = "5b", p_left
    elif x < ctx.midpoint:
        case, p = "5c", p_left
    else:
        case, p = "5d", p_right
    return _Rule(case, left, right, p, y_left, y_right)


def _draw_imaginary(state: AlgoState, x, rng):
    """Neighbouring imaginary server picked inversely to pseudo-distance."""
    k = _at(state, state.imaginary, x)
    if k is not None:
        return k
    left, right = _around(state, state.imaginary, x)
    if left is None:
        return right
    if right is None:
        return left
    return (left, right)[rng.choose(_direction(state, x, left, right))]


@dataclass
class MDHDecision:
    sigma: int
    gamma: int | None
    rule: _Rule
    triggering: bool
    opt: object
    new_exp: int | None


def _mdh_view(state: AlgoState) -> AlgoState:
    """Before any trigger the estimate defaults to 1 and every available
    server is also imaginary."""
    if state.imaginary is not None:
        return state
    return replace(state, imaginary=list(state.available),
                   z_exp=0 if state.z_exp is None else state.z_exp, _tcache=None, _rcache={})


def mdh_decide(state: AlgoState, x, rng) -> MDHDecision:
    """The random part of one MDH step, without touching ``state``."""
    if not state.available:
        raise NoAvailableServer("no available server")
    view = _mdh_view(state)
    # the rule is deterministic given the state, so repeated draws reuse it
    key = (view.requests, view.z_exp, len(view.available), x)
    hit = view._rcache.get(key)
    if hit is None:
        opt_t = view.line.opt(view.requests + (x,))
        triggering = opt_t >= view.Z
        hit = view._rcache[key] = (opt_t, triggering, _rule(view, x, triggering))
    opt_t, triggering, rule = hit
    sigma, gamma = _resolve(view, x, rule, rng, track_gamma=not triggering)
    new_exp = next_exponent(opt_t) if triggering else None
    return MDHDecision(sigma, gamma, rule, triggering, opt_t, new_exp)


def _resolve(state: AlgoState, x, rule: _Rule, rng, track_gamma: bool):
    if rule.left == rule.right:
        sigma = rule.left
        go_right = None
    else:
        go_right = rng.choose((1 - rule.p_right, rule.p_right)) == 1
        sigma = rule.right if go_right else rule.left
    gamma = None
    if track_gamma:
        if rule.case == "4c":
            left, right = _around(state, state.imaginary, x)
            gamma = right if go_right else left
        else:
            gamma = _draw_imaginary(state, x, rng)
    return sigma, gamma


def mdh_step(state: AlgoState, x, rng):
    if state.imaginary is None:
        state.imaginary = list(state.available)
        state.z_exp = 0 if state.z_exp is None else state.z_exp
    before = _draws(rng)
    dec = mdh_decide(state, x, rng)
    t = len(state.requests) + 1
    tr = StepTrace(t, x, z_before=state.z_exp, opt=dec.opt, case=dec.rule.case,
                   was_trigger=dec.triggering, init=dec.triggering and state.phase_index == 0,
                   p_right=dec.rule.p_right, y_left=dec.rule.y_left, y_right=dec.rule.y_right,
                   imaginary=dec.gamma)
    state.available.remove(dec.sigma)
    if dec.gamma is not None:
        state.imaginary.remove(dec.gamma)
    state.requests = state.requests + (x,)
    state.assigned.append(dec.sigma)
    state._tcache = None
    state._rcache.clear()
    if dec.triggering:
        state.phase_index += 1
        state.z_exp = dec.new_exp
        adj = _simulate_dh(state.line, state.requests, rng.child(t), state.metric_kind)
        tr.adjustment = adj
        state.imaginary = list(adj.imaginary)
    tr.draws = _draws(rng) - before
    _record(state, tr, x, dec.sigma)
    return dec.sigma, tr


def mdh_next_distribution(state: AlgoState, x) -> AssignmentDistribution:
    """Exact assignment probabilities for a request at ``x``; consumes no randomness."""
    if not state.available:
        raise NoAvailableServer("no available server")
    view = _mdh_view(state)
    here = _at(view, view.available, x)
    if here is not None:
        rule = _Rule("1", here, here)
    else:
        rule = _rule(view, x, view.trigger_context().is_trigger(x))
    if rule.left == rule.right:
        support = {rule.left: 1}
    else:
        p = rule.p_right
        support = {k: v for k, v in ((rule.left, 1 - p), (rule.right, p)) if v > 0}
    return AssignmentDistribution(support, view.line.servers)


STEPS: dict[str, Callable] = {
    "greedy": greedy_step,
    "harmonic": harmonic_step,
    "dh": dh_step,
    "mdh": mdh_step,
}


# -- runs and the phase ledger ---------------------------------------------------

@dataclass
class Phase:
    index: int
    z_exp: int
    Z: float
    tau: int = 0
    opening_step: int | None = None
    closing_step: int | None = None
    steps: list = field(default_factory=list)
    W: list = field(default_factory=list)
    X: list = field(default_factory=list)
    Y: list = field(default_factory=list)
    e: tuple | None = None
    f: tuple | None = None
    potentials: list = field(default_factory=list)

    @property
    def w_cost(self):
        return sum(abs(r - s) for r, s in self.W)

    @property
    def e_cost(self):
        return 0 if self.e is None else abs(self.e[0] - self.e[1])


@dataclass
class RunTranscript:
    algorithm: str
    seed: int
    servers: tuple
    requests: tuple
    steps: list
    phases: list
    total_cost: float
    opt: float

    @property
    def ratio(self) -> float:
        return ratio(self.total_cost, self.opt)

    def to_dict(self) -> dict:
        s = self.servers
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "servers": list(s),
            "requests": list(self.requests),
            "online_cost": self.total_cost,
            "opt": self.opt,
            "ratio": self.ratio,
            "steps": [_step_dict(tr) for tr in self.steps],
            "phases": [_phase_dict(ph) for ph in self.phases],
        }


def _step_dict(tr: StepTrace) -> dict:
    out = {
        "t": tr.t, "request": tr.request, "case": tr.case, "server": tr.server,
        "server_pos": tr.server_pos, "cost": tr.cost, "trigger": tr.was_trigger,
        "opt": tr.opt, "draws": tr.draws,
    }
    optional = {
        "imaginary": tr.imaginary, "imaginary_pos": tr.imaginary_pos,
        "corrective": tr.corrective, "p_right": tr.p_right, "y_left": tr.y_left,
        "y_right": tr.y_right, "z_before": tr.z_before, "z_after": tr.z_after,
        "potential": tr.potential,
    }
    out.update({k: v for k, v in optional.items() if v is not None})
    if tr.adjustment is not None:
        adj = tr.adjustment
        out["adjustment"] = {"through": adj.through, "imaginary": list(adj.imaginary),
                             "assignments": [list(a) for a in adj.assignments],
                             "z_exp": adj.z_exp}
    return out


def _phase_dict(ph: "Phase") -> dict:
    return {
        "index": ph.index, "z_exp": ph.z_exp, "Z": ph.Z, "tau": ph.tau,
        "opening_step": ph.opening_step, "closing_step": ph.closing_step,
        "steps": list(ph.steps), "W": [list(e) for e in ph.W], "X": [list(e) for e in ph.X],
        "Y": [list(e) for e in ph.Y], "e": None if ph.e is None else list(ph.e),
        "f": None if ph.f is None else list(ph.f), "w_cost": ph.w_cost,
        "potentials": list(ph.potentials),
    }


def ratio(online, opt) -> float:
    if opt == 0:
        return 1.0
    return float(online) / float(opt)


def _pairing_cost(state: AlgoState):
    s = state.line.servers
    return sum((abs(s[a] - s[b]) for a, b in zip(state.available, state.imaginary)), 0)


def run(instance: Instance, algorithm: str = "mdh", seed: int = 0, *, rng=None,
        metric_kind: str = "pseudo", line: Line | None = None) -> RunTranscript:
    """Serve every request of ``instance`` online; deterministic in ``seed``."""
    try:
        step = STEPS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}") from None
    line = line or Line(instance.servers)
    rng = rng if rng is not None else RandomSource(seed)
    if algorithm == "mdh":
        state = AlgoState.fresh_mdh(line, metric_kind)
    else:
        state = AlgoState.fresh(line, metric_kind)
    steps = []
    ledger = algorithm in ("dh", "mdh")
    track_g = algorithm == "mdh"
    phases = [Phase(0, 0, line.Z(0))] if ledger else []
    acc = 0
    for x in instance.requests:
        if track_g and state.imaginary is not None:
            g_before = _pairing_cost(state) + acc
        else:
            g_before = None
        _, tr = step(state, x, rng)
        tr.potential = g_before
        steps.append(tr)
        if not ledger:
            continue
        ph = phases[-1]
        if g_before is not None:
            ph.potentials.append(g_before)
        if tr.was_trigger:
            ph.closing_step = tr.t
            new = Phase(len(phases), state.z_exp, line.Z(state.z_exp), opening_step=tr.t)
            new.e = (x, tr.server_pos)
            if algorithm == "dh":
                new.f = (x, tr.imaginary_pos if tr.imaginary is not None else tr.server_pos)
            elif tr.adjustment is not None and tr.adjustment.imaginary_moves:
                new.f = (x, line.servers[tr.adjustment.imaginary_moves[-1][1]])
            if tr.adjustment is not None:
                moves = tr.adjustment.assignments
                if algorithm == "mdh":
                    moves = moves[:-1]
                new.Y = [(r, line.servers[k]) for r, k in moves]
            phases.append(new)
            acc = 0
        else:
            ph.steps.append(tr.t)
            ph.W.append((x, tr.server_pos))
            if tr.imaginary_pos is not None:
                ph.X.append((x, tr.imaginary_pos))
                acc += tr.cost - abs(x - tr.imaginary_pos)
    if track_g and phases and state.imaginary is not None and phases[-1].closing_step is None:
        phases[-1].potentials.append(_pairing_cost(state) + acc)
    if ledger:
        opts = [line.opt(tuple(instance.requests[:t])) for t in range(len(instance.requests) + 1)]
        for ph in phases:
            ph.tau = max(t for t, v in enumerate(opts) if v < ph.Z)
    total = sum((tr.cost for tr in steps), 0)
    return RunTranscript(algorithm, seed, tuple(instance.servers), tuple(instance.requests),
                         steps, phases, total, line.opt(tuple(instance.requests)))


class OnlineMatcher:
    """One algorithm serving requests one at a time on a fixed server set."""

    def __init__(self, servers, algorithm: str = "mdh", seed: int = 0, *, rng=None,
                 metric_kind: str = "pseudo"):
        if algorithm not in STEPS:
            raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
        self.algorithm = algorithm
        self.line = Line(servers)
        if algorithm == "mdh":
            self.state = AlgoState.fresh_mdh(self.line, metric_kind)
        else:
            self.state = AlgoState.fresh(self.line, metric_kind)
        self.rng = rng if rng is not None else RandomSource(seed)
        self._step = STEPS[algorithm]
        self.traces: list = []

    @property
    def servers(self) -> tuple:
        return self.line.servers

    def is_available(self, index: int) -> bool:
        k = bisect_left(self.state.available, index)
        return k < len(self.state.available) and self.state.available[k] == index

    def serve(self, x) -> int:
        index, tr = self._step(self.state, x, self.rng)
        self.traces.append(tr)
        return index
