"""View adapters and node encodings shared by the oracle layers.

A "view" is anything the coloring and MIS machinery can walk: it exposes
`schedule`, `initial_color`, `node_id` and ordered `neighbors`.  The graph
itself is a view (coloring.GraphView); the intersection graphs over
augmenting structures are views realized on the fly (mcm/mwm); and
ExplicitView wraps a materialized adjacency for the direct global
algorithms, so both sides provably color and orient identically.
"""

from __future__ import annotations

from .coloring import reduction_schedule


def encode_vertex_seq(verts, base: int) -> int:
    """Injective integer encoding of a nonempty id sequence (ids in [1, base))."""
    acc = 0
    for v in reversed(verts):
        acc = acc * base + v
    return acc


def canonical_path(verts) -> tuple[int, ...]:
    """Path identity: lexicographically smaller endpoint first."""
    t = tuple(verts)
    r = t[::-1]
    return t if t <= r else r


def canonical_cycle(verts) -> tuple[int, ...]:
    """Cycle identity: rotated and reflected to the least vertex sequence.

    `verts` lists the cycle once without repeating the start vertex.
    """
    t = tuple(verts)
    k = len(t)
    best = None
    for seq in (t, t[::-1]):
        for s in range(k):
            rot = seq[s:] + seq[:s]
            if best is None or rot < best:
                best = rot
    return best


class StructNode:
    """An augmenting structure as an intersection-graph node.

    kind "P" is a simple path (verts in canonical path order), kind "C" a
    simple cycle (canonical rotation).  Ordering and ids follow the
    canonical form, giving stable identities across queries.
    """

    __slots__ = ("kind", "verts", "_edges", "_hash")

    def __init__(self, kind: str, verts: tuple[int, ...]):
        self.kind = kind
        self.verts = verts
        if kind == "P":
            es = tuple(
                (verts[i], verts[i + 1]) if verts[i] < verts[i + 1] else (verts[i + 1], verts[i])
                for i in range(len(verts) - 1)
            )
        else:
            closed = verts + (verts[0],)
            es = tuple(
                (closed[i], closed[i + 1]) if closed[i] < closed[i + 1] else (closed[i + 1], closed[i])
                for i in range(len(verts))
            )
        self._edges = es
        self._hash = hash((kind, verts))

    @classmethod
    def path(cls, verts) -> "StructNode":
        return cls("P", canonical_path(verts))

    @classmethod
    def cycle(cls, verts) -> "StructNode":
        return cls("C", canonical_cycle(verts))

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    def encoded_id(self, base: int) -> int:
        return 2 * encode_vertex_seq(self.verts, base) + (1 if self.kind == "C" else 0)

    def sort_key(self):
        return (self.kind, self.verts)

    def __eq__(self, other):
        return (
            isinstance(other, StructNode)
            and self.kind == other.kind
            and self.verts == other.verts
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return f"StructNode({self.kind}, {self.verts})"


class ExplicitView:
    """A fully materialized view over given nodes and adjacency.

    Used by the direct global algorithms; shares schedule parameters with
    the on-the-fly views so colors agree node for node.
    """

    def __init__(self, adjacency: dict, node_id_fn, delta_bound: int, id_bound: int):
        self._adj = adjacency
        self._node_id = node_id_fn
        self.delta_bound = delta_bound
        self.id_bound = id_bound
        self.schedule = reduction_schedule(delta_bound, id_bound)

    def neighbors(self, node):
        return self._adj[node]

    def node_id(self, node) -> int:
        return self._node_id(node)

    def initial_color(self, node) -> int:
        return self._node_id(node)
