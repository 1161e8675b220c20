"""Weighted (1-eps)-approximate matching via doubly-indexed oracles.

Preprocessing normalizes weights to (0,1], drops lightweight edges
(w < eps/n) and rounds the rest down to integer powers of (1 - eps/3).
The global algorithm then sweeps L passes over the descending ladder of
achievable gains; stage (i, j) augments along a maximal vertex-disjoint
set of augmenting structures (simple alternating paths or cycles with at
most k = ceil(3/eps) non-matching edges) whose gain is exactly g_j.  The
local oracle answers "is e in M_{i,j}" by replaying that stage chain
around the query edge, with MIS queries on the per-stage intersection
graphs; structures are colored through the gain-agnostic intersection
view of the current state so every stage shares one orientation source.

Stage values per edge are stored as changepoint lists, and once a query
has discovered the whole vertex set the sweep fast-forwards over stages
whose gain no structure can realize (their MIS is empty for every edge).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, gcd, log

from .coloring import reduction_schedule
from .errors import ResourceCapError
from .graph_core import LabeledGraph, ProbeSession, edge_key
from .mis import MisCache, in_mis
from .views import StructNode

DEFAULT_C_L = 2
DEFAULT_LADDER_CAP = 50_000


def weighted_levels(eps) -> int:
    """k = ceil(3/eps): cap on non-matching edges per structure."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0,1), got {eps}")
    return ceil(Fraction(3) / eps)


def pass_count(eps, c_l: int = DEFAULT_C_L) -> int:
    """L = ceil(c_l * (1/eps) * ln(1/eps)), at least 1."""
    eps = Fraction(eps)
    return max(1, ceil(c_l * (1 / float(eps)) * log(1 / float(eps))))


def gk_delta_bound(delta: int, k: int) -> int:
    """Degree bound of the all-structures intersection graph."""
    return max(1, (2 * k + 1) ** 2 * delta ** (2 * k + 1))


def gk_id_bound(graph_id_bound: int, k: int) -> int:
    base = graph_id_bound + 1
    return 2 * base ** (2 * k + 2)


@dataclass(frozen=True)
class DiscretizedGraph:
    base: LabeledGraph
    eps: Fraction
    rounding_base: Fraction  # 1 - eps/3
    exponents: dict[tuple[int, int], int]  # kept edges only
    disc_weights: dict[tuple[int, int], Fraction]
    wmin: Fraction
    num_classes: int  # W

    def kept(self, e) -> bool:
        return edge_key(*e) in self.disc_weights


def discretize_exponent(w: Fraction, base: Fraction) -> int:
    """Largest t with base**t <= w, by exact integer search."""
    t, p = 0, Fraction(1)
    while p > w:
        p *= base
        t += 1
    return t


def preprocess(g: LabeledGraph, eps) -> DiscretizedGraph:
    """Normalize, drop lightweight edges, round down to powers of 1-eps/3."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0,1), got {eps}")
    if not g.weighted:
        raise ValueError("preprocess needs a weighted graph")
    x = 1 - eps / 3
    if not g.weights:
        return DiscretizedGraph(g, eps, x, {}, {}, Fraction(0), 0)
    wmax = max(g.weights.values())
    threshold = eps / g.n
    exponents: dict[tuple[int, int], int] = {}
    disc: dict[tuple[int, int], Fraction] = {}
    for e, w in g.weights.items():
        w = w / wmax
        if w < threshold:
            continue
        t = discretize_exponent(w, x)
        exponents[e] = t
        disc[e] = x**t
    if not disc:
        return DiscretizedGraph(g, eps, x, {}, {}, Fraction(0), 0)
    wmin = max(threshold, min(disc.values()))
    # ladder classes: every exponent with x**t >= wmin, plus any present
    t_hi = max(exponents.values())
    while x ** (t_hi + 1) >= wmin:  # pragma: no cover - wmin >= min disc
        t_hi += 1
    return DiscretizedGraph(g, eps, x, exponents, disc, wmin, t_hi + 1)


def gain(matched_fn, weights: dict, p: StructNode) -> Fraction:
    """g_M(p): weight of p's non-matching edges minus its matching edges."""
    total = Fraction(0)
    for e in p.edges:
        total += -weights[e] if matched_fn(e) else weights[e]
    return total


@lru_cache(maxsize=64)
def _gains_cached(eps: Fraction, wmin: Fraction, k: int, cap: int) -> tuple[Fraction, ...]:
    x = 1 - eps / 3
    if wmin <= 0:
        return ()
    values: list[Fraction] = []
    t, p = 0, Fraction(1)
    while p >= wmin:
        values.append(p)
        t += 1
        p *= x
    # integer-scaled class values for fast multiset sums
    den = values[-1].denominator
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in values]
    a_max = k + 1
    b_max = k + 1
    sums: list[set[int]] = [set() for _ in range(max(a_max, b_max) + 1)]
    sums[0].add(0)
    for v in ints:
        for s in range(1, len(sums)):
            sums[s] |= {base + v for base in sums[s - 1]}
    gains: set[int] = set()
    for sa in range(1, a_max + 1):
        for sb in range(0, min(sa + 1, b_max, 2 * k + 1 - sa) + 1):
            for a in sums[sa]:
                for b in sums[sb]:
                    if a > b:
                        gains.add(a - b)
                        if len(gains) > cap:
                            raise ResourceCapError(
                                f"gain ladder exceeds cap {cap}; eps too small for desk scale"
                            )
    return tuple(sorted((Fraction(gv, den) for gv in gains), reverse=True))


def enumerate_gains(eps, wmin, k: int, cap: int = DEFAULT_LADDER_CAP) -> tuple[Fraction, ...]:
    """Descending ladder of achievable gain values for the weight classes.

    A ranges over 1..k+1 non-matching weights and B over matched weights
    with |B| <= |A|+1 and |A|+|B| <= 2k+1; the result is a superset of
    the gains realizable by actual structures (which also obey
    |E(p) \\ M| <= k), so unrealizable stages are harmless no-ops.
    """
    return _gains_cached(Fraction(eps), Fraction(wmin), k, cap)


def ladder_bound(num_classes: int, k: int) -> int:
    """Crude upper bound on the ladder size: (W+1)^(2k+3) pairs."""
    return (num_classes + 1) ** (2 * k + 3)


# -- stage bookkeeping -------------------------------------------------------


def stage_schedule(L: int, T: int) -> list[tuple[int, int]]:
    """(1,0) then (i,j) for i in 1..L, j in 1..T, lexicographic."""
    return [(1, 0)] + [(i, j) for i in range(1, L + 1) for j in range(1, T + 1)]


def prev_stage(idx: tuple[int, int], T: int) -> tuple[int, int]:
    i, j = idx
    if idx == (1, 0):
        raise ValueError("(1,0) has no predecessor")
    if j == 1 and i == 1:
        return (1, 0)
    if j <= 1:
        return (i - 1, T)
    return (i, j - 1)


class _ChangeList:
    """Boolean stage history as (position, value) changepoints."""

    __slots__ = ("pos", "val")

    def __init__(self):
        self.pos = [0]
        self.val = [False]

    def at(self, position: int) -> bool:
        return self.val[bisect_right(self.pos, position) - 1]

    def set(self, position: int, value: bool):
        if self.val[-1] != value:
            self.pos.append(position)
            self.val.append(value)


class WeightedStateView:
    """Gain-agnostic intersection view of one matching state (colors live here)."""

    def __init__(self, query: "WmQuery", state_key):
        self.query = query
        self.state_key = state_key
        g = query.graph
        self.delta_bound = gk_delta_bound(g.delta_bound, query.k)
        self.id_bound = gk_id_bound(g.id_bound, query.k)
        self.schedule = reduction_schedule(self.delta_bound, self.id_bound)
        self._base = g.id_bound + 1

    def neighbors(self, p: StructNode) -> tuple[StructNode, ...]:
        return self.query.state_neighbors(self.state_key, p)

    def node_id(self, p: StructNode) -> int:
        return p.encoded_id(self._base)

    def initial_color(self, p: StructNode) -> int:
        return self.node_id(p)


class WeightedGainView:
    """H_{i,j}: the state view restricted to structures of one gain."""

    def __init__(self, state_view: WeightedStateView, gain_value: Fraction):
        self.color_view = state_view
        self.gain_value = gain_value
        self.query = state_view.query
        self.state_key = state_view.state_key
        self.schedule = state_view.schedule
        self.delta_bound = state_view.delta_bound
        self.id_bound = state_view.id_bound

    def neighbors(self, p: StructNode) -> tuple[StructNode, ...]:
        return self.query.gain_neighbors(self.state_key, self.gain_value, p)

    def node_id(self, p: StructNode) -> int:
        return self.color_view.node_id(p)

    def initial_color(self, p: StructNode) -> int:
        return self.color_view.node_id(p)


class WmQuery:
    """State for one stateless weighted query (or one batch of them)."""

    def __init__(self, graph: LabeledGraph, eps, anchor, c_l: int = DEFAULT_C_L,
                 ladder_cap: int = DEFAULT_LADDER_CAP, radius_budget=None):
        self.graph = graph
        self.eps = Fraction(eps)
        self.k = weighted_levels(eps)
        self.c_l = c_l
        self.disc = preprocess(graph, eps)
        if self.disc.disc_weights:
            self.ladder = enumerate_gains(self.eps, self.disc.wmin, self.k, ladder_cap)
        else:
            self.ladder = ()
        self._ladder_set = set(self.ladder)
        self.L = pass_count(eps, c_l)
        self.T = len(self.ladder)
        self.final_pos = self.L * self.T
        self.session = ProbeSession(graph, anchor, radius_budget)
        self._reach = 2 * self.k + 1  # listing depth for all structure anchors
        # knowledge about the graph (grows monotonically within the query)
        self._balls: dict[tuple[int, int], object] = {}
        self._adj: dict[int, tuple[int, ...]] = {}
        self._full = False
        # per-edge stage histories as changepoint lists
        self._hist: dict[tuple[int, int], _ChangeList] = {}
        self._filled: dict[tuple[int, int], int] = {}
        # state-keyed caches; a state key is (#registered edges, matched set)
        self._sig_cache: dict[tuple[int, int], tuple] = {}
        self._vstructs: dict[tuple, tuple] = {}
        self._gain_of: dict[tuple, dict[StructNode, Fraction]] = {}
        self._edge_structs: dict[tuple, dict] = {}
        self._state_nbrs: dict[tuple, tuple] = {}
        self._gain_nbrs: dict[tuple, tuple] = {}
        self._state_views: dict[tuple, WeightedStateView] = {}
        self._colors: dict[tuple, dict] = {}
        self._ranks: dict[tuple, dict] = {}
        self._mis: dict[tuple, dict] = {}
        self._present: dict[tuple, set] = {}

    # -- graph knowledge -----------------------------------------------------

    def ball(self, v: int, r: int):
        from .graph_core import collect_ball

        key = (v, r)
        b = self._balls.get(key)
        if b is None:
            b = collect_ball(self.session, v, r)
            self._balls[key] = b
            for u, plist in b.adj.items():
                if u not in self._adj:
                    self._adj[u] = tuple(w for w, _ in plist)
            if len(self._adj) == self.graph.n:
                self._full = True
        return b

    def kept_neighbors(self, v: int) -> tuple[int, ...]:
        disc = self.disc.disc_weights
        return tuple(w for w in self._adj[v] if edge_key(v, w) in disc)

    # -- stage positions -------------------------------------------------------

    def stage_at(self, pos: int) -> tuple[int, int]:
        if pos == 0:
            return (1, 0)
        return ((pos - 1) // self.T + 1, (pos - 1) % self.T + 1)

    def position_of(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if idx == (1, 0):
            return 0
        if not (1 <= i <= self.L and 1 <= j <= self.T):
            raise ValueError(f"stage {idx} outside [1,{self.L}] x [1,{self.T}]")
        return (i - 1) * self.T + j

    def _stage_gain(self, pos: int) -> Fraction:
        return self.ladder[(pos - 1) % self.T]

    # -- stage values ----------------------------------------------------------

    def value(self, pos: int, e: tuple[int, int]) -> bool:
        """Is e in the matching after the stage at position pos?"""
        e = edge_key(*e)
        if e not in self.disc.disc_weights:
            return False
        if e not in self._hist:
            self._hist[e] = _ChangeList()
            self._filled[e] = 0
        if self._filled[e] < pos:
            self._fill_edge_to(e, pos)
        return self._hist[e].at(pos)

    def _fill_edge_to(self, e: tuple[int, int], pos: int):
        """Extend e's stage history through pos, skipping provably idle stages."""
        hist = self._hist[e]
        while self._filled[e] < pos:
            nxt = self._next_active(self._filled[e])
            if nxt is None or nxt > pos:
                self._filled[e] = pos
                return
            if self._filled[e] < nxt - 1:
                self._filled[e] = nxt - 1  # values are constant over the gap
            if self.rho_at(nxt, e):
                hist.set(nxt, not hist.at(nxt - 1))
            self._filled[e] = nxt

    def _next_active(self, after: int):
        """Next stage position > after that could flip any edge, or None.

        The skip is sound only once the whole vertex set is known (no
        structure can hide in unexplored territory); with partial
        knowledge every stage is treated as potentially active.
        """
        if after >= self.final_pos:
            return None
        if not self._full:
            return after + 1
        sig = self._sig(after)
        present = self._present_gains(sig, after)
        if not present:
            return None
        indices = sorted(self.ladder.index(g) for g in present)
        pos = after + 1
        while pos <= self.final_pos:
            j_idx = (pos - 1) % self.T
            nxt_j = next((j for j in indices if j >= j_idx), None)
            if nxt_j is not None:
                return pos + (nxt_j - j_idx)
            pos += self.T - j_idx  # roll to the next pass
        return None

    # -- state signatures and enumeration caches -------------------------------

    def _sig(self, pos: int) -> tuple:
        """Signature of the stage-pos matching over registered edges.

        Forces every registered edge's history through pos first; the
        registered-edge count in the key makes entries stale (never
        wrongly reused) when later discoveries register new edges.
        """
        while True:
            count = len(self._hist)
            for e in list(self._hist):
                if self._filled[e] < pos:
                    self._fill_edge_to(e, pos)
            if len(self._hist) == count:
                break
        key = (pos, len(self._hist))
        sig = self._sig_cache.get(key)
        if sig is None:
            matched = frozenset(e for e, h in self._hist.items() if h.at(pos))
            sig = self._sig_cache[key] = (len(self._hist), matched)
        return sig

    def _structs_at_vertex(self, sig: tuple, prev_pos: int, v: int):
        key = (sig, v)
        known = self._vstructs.get(key)
        if known is None:
            structs = _enumerate_structures(self, prev_pos, v)
            gain_map = self._gain_of.setdefault(sig, {})
            for s, gv in structs:
                if gv not in self._ladder_set:
                    raise AssertionError(f"structure gain {gv} missing from ladder")
                gain_map[s] = gv
            known = self._vstructs[key] = tuple(s for s, _ in structs)
        return known

    def _structs_at_edge(self, sig: tuple, prev_pos: int, e: tuple[int, int]):
        key = (sig, e)
        known = self._edge_structs.get(key)
        if known is None:
            by_gain: dict[Fraction, list[StructNode]] = {}
            gain_map = self._gain_of.setdefault(sig, {})
            seen: set[StructNode] = set()
            for v in e:
                for s in self._structs_at_vertex(sig, prev_pos, v):
                    if s in seen or e not in s.edges:
                        continue
                    seen.add(s)
                    by_gain.setdefault(gain_map[s], []).append(s)
            known = self._edge_structs[key] = {
                g: tuple(sorted(lst, key=StructNode.sort_key)) for g, lst in by_gain.items()
            }
        return known

    def _present_gains(self, sig: tuple, pos: int) -> set:
        present = self._present.get(sig)
        if present is None:
            present = set()
            gain_map = self._gain_of.setdefault(sig, {})
            for v in sorted(self._adj):
                for s in self._structs_at_vertex(sig, pos, v):
                    present.add(gain_map[s])
            self._present[sig] = present
        return present

    def state_neighbors(self, state_key, p: StructNode) -> tuple[StructNode, ...]:
        sig, prev_pos = state_key
        key = (sig, p)
        known = self._state_nbrs.get(key)
        if known is None:
            found: set[StructNode] = set()
            for v in p.verts:
                found.update(self._structs_at_vertex(sig, prev_pos, v))
            found.discard(p)
            known = self._state_nbrs[key] = tuple(sorted(found, key=StructNode.sort_key))
        return known

    def gain_neighbors(self, state_key, g: Fraction, p: StructNode) -> tuple[StructNode, ...]:
        sig, _ = state_key
        key = (sig, g, p)
        known = self._gain_nbrs.get(key)
        if known is None:
            gain_map = self._gain_of[sig]
            known = self._gain_nbrs[key] = tuple(
                q for q in self.state_neighbors(state_key, p) if gain_map[q] == g
            )
        return known

    def _state_view(self, sig: tuple, prev_pos: int) -> WeightedStateView:
        view = self._state_views.get(sig)
        if view is None:
            view = self._state_views[sig] = WeightedStateView(self, (sig, prev_pos))
        return view

    def _mis_cache(self, sig: tuple, g: Fraction) -> MisCache:
        cache = MisCache()
        cache.colors = self._colors.setdefault(sig, {})
        cache.ranks = self._ranks.setdefault(sig, {})
        cache.mis = self._mis.setdefault((sig, g), {})
        return cache

    # -- the per-stage oracle --------------------------------------------------

    def rho_at(self, pos: int, e: tuple[int, int]) -> bool:
        """Does e lie on a structure of the maximal disjoint set at stage pos?"""
        e = edge_key(*e)
        if e not in self.disc.disc_weights:
            return False
        prev_pos = pos - 1
        g = self._stage_gain(pos)
        sig = self._sig(prev_pos)
        cands = self._structs_at_edge(sig, prev_pos, e).get(g)
        if not cands:
            return False
        view = WeightedGainView(self._state_view(sig, prev_pos), g)
        cache = self._mis_cache(sig, g)
        return any(in_mis(view, p, cache) for p in cands)


def _enumerate_structures(query: WmQuery, prev_pos: int, v: int):
    """All augmenting structures through v w.r.t. the stage-prev_pos matching.

    Returns (StructNode, gain) pairs, canonically deduplicated: simple
    alternating paths with free unmatched ends, and even alternating
    cycles, each with at most k non-matching edges and positive gain.
    """
    query.ball(v, query._reach)
    disc = query.disc.disc_weights
    k = query.k
    max_edges = 2 * k + 1

    def is_matched(a: int, b: int) -> bool:
        return query.value(prev_pos, edge_key(a, b))

    def is_free(w: int) -> bool:
        return all(not is_matched(w, u) for u in query.kept_neighbors(w))

    # prefixes of alternating walks from v, grouped by their first edge's
    # status; each entry is (verts, unmatched count, gain, last edge status)
    walks: dict[bool, list[tuple[tuple[int, ...], int, Fraction, bool]]] = {}
    found: dict[StructNode, Fraction] = {}
    for first_matched in (False, True):
        out: list[tuple[tuple[int, ...], int, Fraction, bool]] = []
        stack: list[tuple[tuple[int, ...], int, Fraction, object]] = [
            ((v,), 0, Fraction(0), None)
        ]
        while stack:
            verts, um, gv, last = stack.pop()
            depth = len(verts) - 1
            if depth >= max_edges:
                continue
            status = first_matched if last is None else not last
            cur = verts[-1]
            for w in query.kept_neighbors(cur):
                if is_matched(cur, w) != status:
                    continue
                if w == v:
                    # even alternating cycle closing on a matched edge
                    if not first_matched and status and depth >= 3:
                        cyc_gain = gv - disc[edge_key(cur, w)]
                        if cyc_gain > 0:
                            found.setdefault(StructNode.cycle(verts), cyc_gain)
                    continue
                if w in verts:
                    continue
                wgt = disc[edge_key(cur, w)]
                num = um + (0 if status else 1)
                if num > k:
                    continue
                rec = (verts + (w,), num, gv + (-wgt if status else wgt), status)
                out.append(rec)
                stack.append(rec)
        walks[first_matched] = out

    def end_ok(verts, last_status) -> bool:
        # an unmatched end edge requires a free end vertex
        return last_status or is_free(verts[-1])

    empty = ((v,), 0, Fraction(0), None)
    for lverts, lum, lgain, lstat in [empty] + walks[False] + walks[True]:
        llen = len(lverts) - 1
        if llen and not end_ok(lverts, lstat):
            continue
        lfirst = None if llen == 0 else is_matched(lverts[0], lverts[1])
        lset = set(lverts)
        for rfirst in (False, True):
            if lfirst is not None and rfirst == lfirst:
                continue  # the two sides must alternate across v
            if lfirst is None and not rfirst and not is_free(v):
                continue  # v is a path end on an unmatched edge
            for rverts, rum, rgain, rstat in walks[rfirst]:
                if llen + len(rverts) - 1 > max_edges:
                    continue
                if lum + rum > k:
                    continue
                total_gain = lgain + rgain
                if total_gain <= 0:
                    continue
                if not end_ok(rverts, rstat):
                    continue
                if len(lset.intersection(rverts)) > 1:
                    continue
                node = StructNode.path(lverts[::-1] + rverts[1:])
                found.setdefault(node, total_gain)
    return tuple(sorted(found.items(), key=lambda kv: kv[0].sort_key()))


# -- spec-facing operations ---------------------------------------------------


def oracle_mwm(query: WmQuery, idx: tuple[int, int], e) -> bool:
    """Is e in M_{i,j}?  Stage (1,0) is the empty matching."""
    return query.value(query.position_of(idx), edge_key(*e))


def a_ij(query: WmQuery, idx: tuple[int, int], e) -> bool:
    """Does e lie on a structure of the maximal disjoint set at stage idx?"""
    pos = query.position_of(idx)
    if pos == 0:
        return False
    return query.rho_at(pos, edge_key(*e))


def h_probe_w(query: WmQuery, idx: tuple[int, int], p: StructNode) -> tuple[StructNode, ...]:
    """All stage-idx augmenting structures intersecting p, canonically ordered."""
    pos = query.position_of(idx)
    if pos == 0:
        return ()
    prev_pos = pos - 1
    sig = query._sig(prev_pos)
    state_key = (sig, prev_pos)
    query._state_view(sig, prev_pos)
    return query.gain_neighbors(state_key, query._stage_gain(pos), p)


def apx_mwm_query(graph, eps, e, c_l: int = DEFAULT_C_L, radius_budget=None) -> bool:
    """Fresh stateless query: is e in the (1-eps)-approximate weighted matching?"""
    k = edge_key(*e)
    query = WmQuery(graph, eps, anchor=k, c_l=c_l, radius_budget=radius_budget)
    return query.value(query.final_pos, k)


def apx_mwm_query_stats(graph, eps, e, c_l: int = DEFAULT_C_L, radius_budget=None):
    """Like apx_mwm_query but also reports (probe_count, probe_radius)."""
    k = edge_key(*e)
    query = WmQuery(graph, eps, anchor=k, c_l=c_l, radius_budget=radius_budget)
    ans = query.value(query.final_pos, k)
    return ans, query.session.probe_count, query.session.probe_radius


class WeightedMatchingOracle:
    """Batch evaluator over one weighted graph and eps.

    Shares the pure per-query caches across edges (answers provably equal
    the fresh per-edge oracle); probe statistics are only meaningful on
    fresh single queries.
    """

    def __init__(self, graph, eps, c_l: int = DEFAULT_C_L):
        self.graph = graph
        self.eps = Fraction(eps)
        self._query = WmQuery(graph, eps, anchor=None, c_l=c_l)

    @property
    def query_state(self) -> WmQuery:
        return self._query

    def query(self, e) -> bool:
        q = self._query
        return q.value(q.final_pos, edge_key(*e))

    def matching(self) -> set[tuple[int, int]]:
        return {e for e in self.graph.edges if self.query(e)}

    def matching_weight(self) -> Fraction:
        """Total original weight of the answer set."""
        return sum((self.graph.weights[e] for e in self.matching()), Fraction(0))
