"""Stateless maximal-independent-set oracle over any probe-able view.

An acyclic orientation (induced by coloring: edges point from higher to
lower rank) fixes one MIS: walking the orientation, a node is in the MIS
iff none of its out-neighbors is.  That rule equals the greedy algorithm
run over any linear extension of the partial order, so the answer does not
depend on query order.  The DFS is iterative; answers are memoized per
query so each reachable node is decided once.
"""

from __future__ import annotations

from .coloring import color_node, orientation_rank
from .errors import CorruptedOrientationError


class MisCache:
    """Query-private memo bundle shared by in_mis calls within one query."""

    def __init__(self):
        self.mis: dict = {}
        self.colors: dict = {}
        self.ranks: dict = {}


def _rank(view, node, cache: MisCache):
    r = cache.ranks.get(node)
    if r is None:
        r = orientation_rank(color_node(view, node, cache.colors), view.node_id(node))
        cache.ranks[node] = r
    return r


def out_neighbors(view, node, cache: MisCache) -> list:
    """Neighbors the orientation points to, in ascending node-id order."""
    mine = _rank(view, node, cache)
    outs = []
    for u in view.neighbors(node):
        r = _rank(view, u, cache)
        if r == mine:
            raise CorruptedOrientationError(f"equal rank on adjacent nodes {node} and {u}")
        if r < mine:
            outs.append(u)
    outs.sort(key=view.node_id)
    return outs


def in_mis(view, node, cache: MisCache | None = None) -> bool:
    """True iff `node` belongs to the orientation-induced MIS of the view."""
    if cache is None:
        cache = MisCache()
    mis = cache.mis
    known = mis.get(node)
    if known is not None:
        return known
    # frames: [node, out-list or None, next index]
    frames = [[node, None, 0]]
    active = {node}
    while frames:
        frame = frames[-1]
        x, outs, i = frame
        if outs is None:
            outs = out_neighbors(view, x, cache)
            frame[1] = outs
            continue
        descended = False
        while i < len(outs):
            u = outs[i]
            i += 1
            if u in mis:
                continue
            if u in active:
                raise CorruptedOrientationError(f"directed cycle through {u}")
            frame[2] = i
            frames.append([u, None, 0])
            active.add(u)
            descended = True
            break
        if descended:
            continue
        mis[x] = all(not mis[u] for u in outs)
        active.discard(x)
        frames.pop()
    return mis[node]


def mis_probe_radius_bound(orientation_radius: int, orientation_rad: int) -> int:
    """Radius bound for the MIS oracle: orientation cost plus walk length."""
    return orientation_radius + orientation_rad


def view_mis_radius_bound(view) -> int:
    """The bound instantiated with the view's own schedule constants."""
    sched = view.schedule
    return mis_probe_radius_bound(sched.radius, max(sched.palette - 1, 0))


def greedy_mis(view, nodes, cache: MisCache | None = None) -> set:
    """Reference: greedy over the ascending-rank linear extension.

    Provably equal to in_mis on every node; used by equivalence tests.
    """
    if cache is None:
        cache = MisCache()
    order = sorted(nodes, key=lambda x: _rank(view, x, cache))
    chosen: set = set()
    for x in order:
        if all(u not in chosen for u in view.neighbors(x)):
            chosen.add(x)
    return chosen
