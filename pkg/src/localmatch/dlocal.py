"""Synchronous-round simulation of the stateless local oracles.

Every vertex starts with its own id, degree, port map (neighbor id and
reverse port per port) and incident edge weights; each round it sends its
accumulated knowledge to all neighbors and merges what it receives.
After r rounds a vertex knows the full record of every vertex within
distance r, which is exactly enough to answer any probe whose probed
vertex lies in that ball.  Running the stateless oracle against the
collected knowledge therefore reproduces the centralized answer; a probe
that leaves the ball raises SimulationSoundnessError, which means the
claimed radius bound was wrong.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .coloring import reduction_schedule
from .errors import ResourceCapError, SimulationSoundnessError
from .graph_core import LabeledGraph, edge_key
from .mcm import apx_levels, level_delta_bound, level_id_bound
from .mwm import (
    DEFAULT_C_L,
    enumerate_gains,
    gk_delta_bound,
    gk_id_bound,
    pass_count,
    weighted_levels,
)


class RoundEngine:
    """Barrier-synchronized rounds: all messages from round t arrive at t+1."""

    def __init__(self, graph: LabeledGraph, init_state: Callable):
        self.graph = graph
        self.round = 0
        self.state = {v: init_state(v) for v in graph.vertices}

    def step(self, make_message: Callable, merge: Callable) -> bool:
        """One round; returns True if any vertex's state changed."""
        outbox = {v: make_message(v, self.state[v]) for v in self.graph.vertices}
        changed = False
        new_state = {}
        for v in self.graph.vertices:
            inbox = [outbox[u] for u in self.graph.neighbors(v)]
            merged, delta = merge(self.state[v], inbox)
            new_state[v] = merged
            changed = changed or delta
        self.state = new_state
        self.round += 1
        return changed


@dataclass(frozen=True)
class CollectedBall:
    """Everything one vertex knows after the collection rounds."""

    center: int
    radius: int
    records: dict  # vertex -> (port map tuple, incident weight dict)
    rounds_requested: int
    rounds_executed: int

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.records)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        found = set()
        for u, (plist, _) in self.records.items():
            for w, _port in plist:
                if w in self.records:
                    found.add(edge_key(u, w))
        return frozenset(found)


def run_ball_collection(g: LabeledGraph, r: int) -> dict[int, CollectedBall]:
    """r rounds of knowledge flooding; saturates early once nothing changes."""
    if r < 0:
        raise ValueError("rounds must be nonnegative")

    def init(v):
        weights = {}
        if g.weighted:
            for u in g.neighbors(v):
                weights[edge_key(v, u)] = g.edge_weight(v, u)
        return {v: (g.adjacency(v), weights)}

    engine = RoundEngine(g, init)

    def make_message(_v, state):
        return state

    def merge(state, inbox):
        merged = state
        delta = False
        for msg in inbox:
            missing = [u for u in msg if u not in merged]
            if missing:
                if not delta:
                    merged = dict(merged)
                    delta = True
                for u in missing:
                    merged[u] = msg[u]
        return merged, delta

    executed = 0
    for _ in range(min(r, g.n)):
        changed = engine.step(make_message, merge)
        executed += 1
        if not changed:
            break
    return {
        v: CollectedBall(v, r, engine.state[v], rounds_requested=r, rounds_executed=executed)
        for v in g.vertices
    }


class CollectedGraph:
    """Probe target backed by one vertex's collected knowledge."""

    probe_miss_error = SimulationSoundnessError

    def __init__(self, g: LabeledGraph, records: dict):
        self._records = records
        self.n = g.n
        self.delta_bound = g.delta_bound
        self.id_bound = g.id_bound
        self.weighted = g.weighted

    def has_vertex(self, v: int) -> bool:
        return v in self._records

    def adjacency(self, v: int):
        rec = self._records.get(v)
        if rec is None:
            raise SimulationSoundnessError(
                f"probe of {v} outside the collected ball: radius bound too small"
            )
        return rec[0]

    def neighbors(self, v: int):
        return tuple(u for u, _ in self.adjacency(v))

    def edge_weight(self, u: int, v: int) -> Optional[Fraction]:
        if not self.weighted:
            return None
        k = edge_key(u, v)
        for end in (u, v):
            rec = self._records.get(end)
            if rec is not None and k in rec[1]:
                return rec[1][k]
        raise SimulationSoundnessError(f"weight of {k} outside the collected ball")


@dataclass(frozen=True)
class SimulationResult:
    outputs: dict
    rounds_requested: int
    rounds_executed: int


def simulate_clocal(g: LabeledGraph, query_kind: str, answer_fn: Callable,
                    r: int) -> SimulationResult:
    """Run a stateless local algorithm distributedly: collect balls, then
    answer locally.  Vertex queries run at the vertex with radius r; edge
    queries run at the smaller endpoint with radius r+1 (the probe radius
    of an edge query is measured from the nearer endpoint).
    """
    if query_kind == "vertex":
        collected = run_ball_collection(g, r)
        outputs = {
            v: answer_fn(CollectedGraph(g, collected[v].records), v) for v in g.vertices
        }
        rounds = r
    elif query_kind == "edge":
        rounds = r + 1
        collected = run_ball_collection(g, rounds)
        outputs = {}
        for e in g.edges:
            host = min(e)
            outputs[e] = answer_fn(CollectedGraph(g, collected[host].records), e)
    else:
        raise ValueError(f"unknown query kind {query_kind!r}")
    executed = collected[next(iter(collected))].rounds_executed if collected else 0
    return SimulationResult(outputs, rounds, executed)


# -- concrete round bounds -----------------------------------------------------


def _guard_size(delta: int, exponent: int):
    import math

    if delta > 1 and exponent * math.log2(delta) > 20_000:
        raise ResourceCapError("round bound parameters out of desk-scale range")


def _mis_hops(delta_view: int, id_view: int) -> int:
    sched = reduction_schedule(delta_view, id_view)
    return sched.radius + max(sched.palette - 1, 0)


def round_bound_mcm(eps, delta: int, n: int, id_bound: Optional[int] = None) -> int:
    """Exact probe-radius bound of the level-(k+1) oracle, by the level
    recurrence: each level pays its listing depth plus its MIS walk, with
    every H_i hop costing 2i-1 graph hops."""
    k = apx_levels(eps)
    idb = id_bound if id_bound is not None else max(n * n, 1)
    _guard_size(delta, 2 * k + 1)
    r = 0
    for i in range(1, k + 2):
        hops = _mis_hops(level_delta_bound(delta, i), level_id_bound(idb, i))
        r = (2 * i - 2) + (hops + 1) * (2 * i - 1) + r
    return r


def round_bound_mwm(eps, delta: int, n: int, wmin, id_bound: Optional[int] = None,
                    c_l: int = DEFAULT_C_L) -> int:
    """Probe-radius bound of the final weighted oracle: stage count times
    the per-stage cost (listing depth plus MIS walk over structures)."""
    k = weighted_levels(eps)
    idb = id_bound if id_bound is not None else max(n * n, 1)
    _guard_size(delta, 2 * k + 1)
    ladder = enumerate_gains(Fraction(eps), Fraction(wmin), k)
    stages = pass_count(eps, c_l) * len(ladder)
    hops = _mis_hops(gk_delta_bound(delta, k), gk_id_bound(idb, k))
    per_stage = 2 * k + (hops + 1) * (2 * k + 1)
    return stages * per_stage
