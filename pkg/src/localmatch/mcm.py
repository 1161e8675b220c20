"""Recursive (1-eps)-approximate maximum-cardinality-matching oracle.

Level i of the recursion answers "is e in M_i?" where M_0 is empty and
M_i = M_{i-1} xor (a maximal vertex-disjoint set of shortest augmenting
paths).  Membership in that maximal set is an MIS query on the
intersection graph H_i over length-(2i-1) augmenting paths, realized on
the fly: probing H_i means BFS balls in the input graph, recursive oracle
calls one level down, and exhaustive alternating-path listing inside the
ball.  The final answer is level k+1 with k = ceil(1/eps).

All caches live on the query object and die with it: repeating a query in
a fresh McmQuery reproduces both the answer and the probe accounting.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil

from .coloring import reduction_schedule
from .graph_core import ProbeSession, collect_ball, edge_key
from .mis import MisCache, in_mis
from .views import StructNode


def apx_levels(eps) -> int:
    """k = ceil(1/eps); the final oracle index is k+1."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0,1], got {eps}")
    return ceil(Fraction(1) / eps)


def level_delta_bound(delta: int, i: int) -> int:
    """Published degree bound of H_i: (2i)^2 * delta^(2i-1)."""
    return max(1, (2 * i) ** 2 * delta ** (2 * i - 1))


def level_id_bound(graph_id_bound: int, i: int) -> int:
    """Id bound of canonical path encodings for level-i nodes."""
    base = graph_id_bound + 1
    return 2 * base ** (2 * i)


class LevelView:
    """H_i as a colorable / MIS-able view, probed through the query."""

    def __init__(self, query: "McmQuery", i: int):
        self.query = query
        self.level = i
        g = query.target
        self._base = g.id_bound + 1
        self.delta_bound = level_delta_bound(g.delta_bound, i)
        self.id_bound = level_id_bound(g.id_bound, i)
        self.schedule = reduction_schedule(self.delta_bound, self.id_bound)

    def neighbors(self, p: StructNode) -> tuple[StructNode, ...]:
        return self.query.h_probe(self.level, p)

    def node_id(self, p: StructNode) -> int:
        return p.encoded_id(self._base)

    def initial_color(self, p: StructNode) -> int:
        return self.node_id(p)


class McmQuery:
    """State for one stateless query (or one batch sharing pure results)."""

    def __init__(self, target, eps, anchor, radius_budget=None):
        self.target = target
        self.k = apx_levels(eps)
        self.session = ProbeSession(target, anchor, radius_budget)
        self._balls: dict[tuple[int, int], object] = {}
        self._adj: dict[int, tuple[int, ...]] = {}
        self._matched: dict[tuple[int, tuple[int, int]], bool] = {}
        self._paths_v: dict[tuple[int, int], tuple[StructNode, ...]] = {}
        self._paths_e: dict[tuple[int, tuple[int, int]], tuple[StructNode, ...]] = {}
        self._hprobe: dict[tuple[int, StructNode], tuple[StructNode, ...]] = {}
        self._views: dict[int, LevelView] = {}
        self._mis: dict[int, MisCache] = {}

    # -- knowledge gathering ------------------------------------------------

    def ball(self, v: int, r: int):
        key = (v, r)
        b = self._balls.get(key)
        if b is None:
            b = collect_ball(self.session, v, r)
            self._balls[key] = b
            for u, plist in b.adj.items():
                if u not in self._adj:
                    self._adj[u] = tuple(w for w, _ in plist)
        return b

    def known_neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def view(self, i: int) -> LevelView:
        view = self._views.get(i)
        if view is None:
            view = self._views[i] = LevelView(self, i)
            self._mis[i] = MisCache()
        return view

    # -- the recursive oracle -------------------------------------------------

    def matched(self, i: int, e: tuple[int, int]) -> bool:
        if i == 0:
            return False
        key = (i, e)
        known = self._matched.get(key)
        if known is None:
            tau = self.matched(i - 1, e)
            rho = self.in_p_star(i, e)
            known = self._matched[key] = tau ^ rho
        return known

    def in_p_star(self, i: int, e: tuple[int, int]) -> bool:
        view = self.view(i)
        cache = self._mis[i]
        return any(in_mis(view, p, cache) for p in self.paths_through_edge(i, e))

    def h_probe(self, i: int, p: StructNode) -> tuple[StructNode, ...]:
        key = (i, p)
        known = self._hprobe.get(key)
        if known is None:
            found: set[StructNode] = set()
            for v in p.verts:
                found.update(self.paths_through_vertex(i, v))
            found.discard(p)
            known = self._hprobe[key] = tuple(sorted(found, key=StructNode.sort_key))
        return known

    # -- listing of augmenting paths -------------------------------------------

    def _is_free(self, i: int, v: int) -> bool:
        prev = i - 1
        return all(not self.matched(prev, edge_key(v, w)) for w in self.known_neighbors(v))

    def _walks(self, i: int, start: int, edge_indices: tuple[int, ...], banned: frozenset[int]):
        """Alternating walks from start consuming the given edge numbers.

        Edge number j of an augmenting path is matched iff j is even; a
        matched step is forced (at most one matched edge per vertex), so
        branching happens only on unmatched steps.
        """
        prev = i - 1
        results: list[tuple[int, ...]] = []
        stack = [((start,), banned, 0)]
        while stack:
            path, used, pos = stack.pop()
            if pos == len(edge_indices):
                results.append(path)
                continue
            need = edge_indices[pos] % 2 == 0
            cur = path[-1]
            for w in self.known_neighbors(cur):
                if w in used:
                    continue
                if self.matched(prev, edge_key(cur, w)) == need:
                    stack.append((path + (w,), used | {w}, pos + 1))
        return results

    def paths_through_vertex(self, i: int, v: int) -> tuple[StructNode, ...]:
        key = (i, v)
        known = self._paths_v.get(key)
        if known is not None:
            return known
        length = 2 * i - 1
        self.ball(v, length)
        found: set[StructNode] = set()
        for t in range(length + 1):
            left_idx = tuple(range(t, 0, -1))
            right_idx = tuple(range(t + 1, length + 1))
            for left in self._walks(i, v, left_idx, frozenset((v,))):
                lset = frozenset(left)
                for right in self._walks(i, v, right_idx, lset):
                    verts = left[::-1] + right[1:]
                    if self._is_free(i, verts[0]) and self._is_free(i, verts[-1]):
                        found.add(StructNode.path(verts))
        known = self._paths_v[key] = tuple(sorted(found, key=StructNode.sort_key))
        return known

    def paths_through_edge(self, i: int, e: tuple[int, int]) -> tuple[StructNode, ...]:
        key = (i, e)
        known = self._paths_e.get(key)
        if known is not None:
            return known
        length = 2 * i - 1
        a, b = e
        self.ball(a, length)
        self.ball(b, length)
        e_matched = self.matched(i - 1, e)
        found: set[StructNode] = set()
        for j0 in range(1, length + 1):
            if (j0 % 2 == 0) != e_matched:
                continue
            for x, y in ((a, b), (b, a)):
                left_idx = tuple(range(j0 - 1, 0, -1))
                right_idx = tuple(range(j0 + 1, length + 1))
                for left in self._walks(i, x, left_idx, frozenset((x, y))):
                    banned = frozenset(left) | {y}
                    for right in self._walks(i, y, right_idx, banned):
                        verts = left[::-1] + right
                        if self._is_free(i, verts[0]) and self._is_free(i, verts[-1]):
                            found.add(StructNode.path(verts))
        known = self._paths_e[key] = tuple(sorted(found, key=StructNode.sort_key))
        return known


# -- spec-facing operations ---------------------------------------------------


def oracle_m(query: McmQuery, i: int, e: tuple[int, int]) -> bool:
    """Is e in M_i?  Level 0 is the empty matching."""
    return query.matched(i, edge_key(*e))


def in_p_star(query: McmQuery, i: int, e: tuple[int, int]) -> bool:
    """Does e lie on a path of the maximal disjoint path set at level i?"""
    return query.in_p_star(i, edge_key(*e))


def h_probe(query: McmQuery, i: int, p: StructNode) -> tuple[StructNode, ...]:
    """All level-i augmenting paths intersecting p, canonically ordered."""
    return query.h_probe(i, p)


def apx_mcm_query(graph, eps, e, radius_budget=None) -> bool:
    """Fresh stateless query: is e in the (1-eps)-approximate matching?"""
    k = edge_key(*e)
    query = McmQuery(graph, eps, anchor=k, radius_budget=radius_budget)
    return query.matched(query.k + 1, k)


def apx_mcm_query_stats(graph, eps, e, radius_budget=None):
    """Like apx_mcm_query but also reports (probe_count, probe_radius)."""
    k = edge_key(*e)
    query = McmQuery(graph, eps, anchor=k, radius_budget=radius_budget)
    ans = query.matched(query.k + 1, k)
    return ans, query.session.probe_count, query.session.probe_radius


class MatchingOracle:
    """Batch evaluator over one graph and eps.

    Shares the pure per-query caches across edges, which cannot change any
    answer (every cached value is a pure function of the graph); the
    consistency acceptance suite checks batch-vs-fresh equality explicitly.
    Probe statistics are only meaningful on fresh single queries.
    """

    def __init__(self, graph, eps):
        self.graph = graph
        self.eps = Fraction(eps)
        self._query = McmQuery(graph, eps, anchor=None)

    def query(self, e) -> bool:
        q = self._query
        return q.matched(q.k + 1, edge_key(*e))

    def matching(self) -> set[tuple[int, int]]:
        return {e for e in self.graph.edges if self.query(e)}
