"""Labeled port-numbered graphs and the probe interface.

A probe (v, i) asks for the i-th neighbor of v and is answered with the
neighbor's id and the reverse port, or None when deg(v) < i.  Every
algorithm in this package touches the graph only through ProbeSession, so
probe counts and probe radii are measured uniformly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import BudgetExceededError, GraphFormatError, UnknownVertexError


def edge_key(u: int, v: int) -> tuple[int, int]:
    """Canonical (min, max) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


class LabeledGraph:
    """Immutable port-numbered graph with unique positive vertex ids.

    Ports are assigned in edge insertion order and fixed thereafter: the
    edges incident to v occupy ports 1, 2, ... in the order they were added.
    Weights, when present, are exact rationals in (0, 1].
    """

    def __init__(
        self,
        vertex_ids: Iterable[int],
        edges: Iterable[tuple[int, int]],
        weights: Optional[dict[tuple[int, int], Fraction]] = None,
        id_bound: Optional[int] = None,
    ):
        vs = list(vertex_ids)
        if len(set(vs)) != len(vs):
            raise GraphFormatError("duplicate vertex id")
        for v in vs:
            if not isinstance(v, int) or v <= 0:
                raise GraphFormatError(f"vertex id must be a positive integer, got {v!r}")
        self.vertices: tuple[int, ...] = tuple(sorted(vs))
        self._vset = frozenset(self.vertices)

        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in self.vertices}
        elist: list[tuple[int, int]] = []
        eset: set[tuple[int, int]] = set()
        wmap: dict[tuple[int, int], Fraction] = {}
        for e in edges:
            u, v = e
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if u not in self._vset or v not in self._vset:
                raise GraphFormatError(f"edge ({u},{v}) names an unknown vertex")
            k = edge_key(u, v)
            if k in eset:
                raise GraphFormatError(f"parallel edge ({u},{v})")
            eset.add(k)
            # reverse ports: u will sit at v's next free port and vice versa
            pu = len(adj[u]) + 1
            pv = len(adj[v]) + 1
            adj[u].append((v, pv))
            adj[v].append((u, pu))
            elist.append(k)
            if weights is not None:
                w = weights[k]
                if not (0 < w <= 1):
                    raise GraphFormatError(f"weight {w} of edge ({u},{v}) outside (0,1]")
                wmap[k] = Fraction(w)
        self._adj = {v: tuple(lst) for v, lst in adj.items()}
        self.edges: tuple[tuple[int, int], ...] = tuple(elist)
        self._eset = eset
        self.weights: Optional[dict[tuple[int, int], Fraction]] = (
            dict(wmap) if weights is not None else None
        )
        self.n = len(self.vertices)
        self.delta_bound = max((len(a) for a in self._adj.values()), default=0)
        max_id = max(self.vertices, default=0)
        self.id_bound = id_bound if id_bound is not None else max(self.n * self.n, max_id, 1)
        if max_id > self.id_bound:
            raise GraphFormatError(f"vertex id {max_id} exceeds id bound {self.id_bound}")

    # -- probe-target protocol -------------------------------------------

    def has_vertex(self, v: int) -> bool:
        return v in self._vset

    def adjacency(self, v: int) -> tuple[tuple[int, int], ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(u for u, _ in self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self._eset

    def edge_weight(self, u: int, v: int) -> Optional[Fraction]:
        if self.weights is None:
            return None
        return self.weights[edge_key(u, v)]

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self._adj == other._adj
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        tag = "weighted, " if self.weighted else ""
        return f"LabeledGraph({tag}n={self.n}, m={len(self.edges)})"


class ProbeSession:
    """Per-query probe accounting relative to one anchor.

    The anchor is either a vertex id or an edge (u, v); for an edge the
    distance to a probed vertex is the minimum over the two endpoints.
    Distances are computed on the side for accounting only and cost no
    probes.  Sessions are cheap, single-query objects: statelessness of the
    algorithms means a fresh session per query reproduces counts exactly.
    An anchorless session (anchor=None) skips radius accounting; batch
    evaluators use it, since their probe statistics are not meaningful.
    """

    def __init__(self, target, anchor, radius_budget: Optional[int] = None):
        self.target = target
        self.anchor = anchor
        self.radius_budget = radius_budget
        self.probe_count = 0
        self.probe_radius = 0
        self._dist: dict[int, int] = {}
        self._frontier: deque[int] = deque()
        if anchor is not None:
            sources = anchor if isinstance(anchor, tuple) else (anchor,)
            for s in sources:
                if not target.has_vertex(s):
                    raise UnknownVertexError(f"anchor vertex {s} not in graph")
                self._dist[s] = 0
                self._frontier.append(s)

    def _distance(self, v: int) -> int:
        # lazy multi-source BFS, grown only as far as accounting needs
        while v not in self._dist and self._frontier:
            u = self._frontier.popleft()
            du = self._dist[u]
            for w, _ in self.target.adjacency(u):
                if w not in self._dist:
                    self._dist[w] = du + 1
                    self._frontier.append(w)
        if v not in self._dist:
            raise UnknownVertexError(f"vertex {v} unreachable from anchor {self.anchor}")
        return self._dist[v]

    def probe(self, v: int, i: int) -> Optional[tuple[int, int]]:
        if not self.target.has_vertex(v):
            miss = getattr(self.target, "probe_miss_error", UnknownVertexError)
            raise miss(f"probe of unknown vertex {v}")
        if self.anchor is not None:
            d = self._distance(v)
            if self.radius_budget is not None and d > self.radius_budget:
                raise BudgetExceededError(
                    f"probe of {v} at distance {d} exceeds radius budget {self.radius_budget}"
                )
            if d > self.probe_radius:
                self.probe_radius = d
        self.probe_count += 1
        adj = self.target.adjacency(v)
        if i < 1 or i > len(adj):
            return None
        return adj[i - 1]


@dataclass(frozen=True)
class Ball:
    """All information gathered by probing every vertex within distance r.

    `adj` holds the full port map of every ball vertex, so the ball can
    answer any probe whose probed vertex lies inside it (answers may name
    vertices one hop outside).  `edges` is the induced edge set.
    """

    center: int
    radius: int
    vertices: frozenset[int]
    adj: dict[int, tuple[tuple[int, int], ...]]
    dist: dict[int, int]
    weights: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            edge_key(u, w) for u in self.adj for w, _ in self.adj[u] if w in self.vertices
        )

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def as_graph(self) -> LabeledGraph:
        """Induced subgraph as a standalone graph (ports compacted)."""
        induced = []
        for u in sorted(self.adj):
            for w, _ in self.adj[u]:
                if w in self.vertices and u < w:
                    induced.append((u, w))
        weights = None
        if self.weights:
            weights = {edge_key(u, w): self.weights[edge_key(u, w)] for u, w in induced}
        return LabeledGraph(sorted(self.vertices), induced, weights)


def probe(session: ProbeSession, v: int, i: int) -> Optional[tuple[int, int]]:
    """Single probe through a session (thin functional alias)."""
    return session.probe(v, i)


def collect_ball(session: ProbeSession, v: int, r: int) -> Ball:
    """BFS by probes; returns the ball of radius r around v.

    Every vertex at distance <= r gets all its ports probed (at most
    delta_bound probes each, so the total is <= delta_bound * |B_r(v)|).
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    target = session.target
    cap = max(target.delta_bound, 0)
    dist = {v: 0}
    adj: dict[int, tuple[tuple[int, int], ...]] = {}
    weights: dict[tuple[int, int], Fraction] = {}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        plist = []
        for port in range(1, cap + 1):
            ans = session.probe(u, port)
            if ans is None:
                break
            plist.append(ans)
        adj[u] = tuple(plist)
        if target.weighted:
            for w, _ in plist:
                k = edge_key(u, w)
                if k not in weights:
                    weights[k] = target.edge_weight(u, w)
        du = dist[u]
        if du < r:
            for w, _ in plist:
                if w not in dist:
                    dist[w] = du + 1
                    queue.append(w)
    return Ball(
        center=v,
        radius=r,
        vertices=frozenset(adj),
        adj=adj,
        dist=dist,
        weights=weights,
    )


# -- text format -----------------------------------------------------------
#
#   graph <n> <m> [weighted]
#   v <id>                      (n lines)
#   e <id1> <id2> [<weight>]    (m lines, weight as decimal or p/q fraction)
#
# Ports are implied by file order: each vertex's incident edges occupy its
# ports 1, 2, ... in the order the edge lines appear.


def _parse_weight(text: str, line: int) -> Fraction:
    try:
        w = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise GraphFormatError(f"bad weight {text!r}", line) from None
    if not (0 < w <= 1):
        raise GraphFormatError(f"weight {w} outside (0,1]", line)
    return w


def parse_graph(text: str) -> LabeledGraph:
    lines = text.splitlines()
    header = None
    header_line = 0
    for idx, raw in enumerate(lines, start=1):
        s = raw.strip()
        if s and not s.startswith("#"):
            header = s.split()
            header_line = idx
            break
    if header is None:
        return LabeledGraph([], [])
    if header[0] != "graph" or len(header) not in (3, 4):
        raise GraphFormatError("expected header 'graph <n> <m> [weighted]'", header_line)
    try:
        n, m = int(header[1]), int(header[2])
    except ValueError:
        raise GraphFormatError("non-integer vertex/edge count", header_line) from None
    weighted = False
    if len(header) == 4:
        if header[3] != "weighted":
            raise GraphFormatError(f"unknown header flag {header[3]!r}", header_line)
        weighted = True

    vertex_ids: list[int] = []
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    weights: dict[tuple[int, int], Fraction] = {}
    for idx in range(header_line, len(lines)):
        lineno = idx + 1
        s = lines[idx].strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if parts[0] == "v":
            if len(parts) != 2:
                raise GraphFormatError("vertex line must be 'v <id>'", lineno)
            try:
                vertex_ids.append(int(parts[1]))
            except ValueError:
                raise GraphFormatError(f"bad vertex id {parts[1]!r}", lineno) from None
        elif parts[0] == "e":
            want = 4 if weighted else 3
            if len(parts) != want:
                raise GraphFormatError(
                    "edge line must be 'e <id1> <id2>" + (" <weight>'" if weighted else "'"),
                    lineno,
                )
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError("bad edge endpoint", lineno) from None
            k = edge_key(u, v)
            if k in seen:
                raise GraphFormatError(f"duplicate edge ({u},{v})", lineno)
            seen.add(k)
            edges.append((u, v))
            if weighted:
                weights[k] = _parse_weight(parts[3], lineno)
        else:
            raise GraphFormatError(f"unknown record {parts[0]!r}", lineno)
    if len(vertex_ids) != n:
        raise GraphFormatError(f"header announced {n} vertices, file has {len(vertex_ids)}")
    if len(edges) != m:
        raise GraphFormatError(f"header announced {m} edges, file has {len(edges)}")
    try:
        return LabeledGraph(vertex_ids, edges, weights if weighted else None)
    except GraphFormatError:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        raise GraphFormatError(str(exc)) from exc


def serialize_graph(g: LabeledGraph) -> str:
    """Inverse of parse_graph; edge order reproduces the port assignment."""
    out = [f"graph {g.n} {len(g.edges)}" + (" weighted" if g.weighted else "")]
    for v in g.vertices:
        out.append(f"v {v}")
    for u, v in g.edges:
        if g.weighted:
            out.append(f"e {u} {v} {g.weights[(u, v)]}")
        else:
            out.append(f"e {u} {v}")
    return "\n".join(out) + "\n"
