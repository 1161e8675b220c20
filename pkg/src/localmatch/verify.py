"""Independent ground truth and structural validators.

The exact matching searches are deliberately naive branch-and-bound over
edge inclusion/exclusion: they share no code with the oracle stack, which
is what makes them usable as acceptance oracles at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ResourceCapError
from .graph_core import LabeledGraph, edge_key

MCM_SIZE_CAP = 20
MWM_SIZE_CAP = 14


@dataclass(frozen=True)
class ExactResult:
    value: object  # int for cardinality, Fraction for weight
    witness: tuple[tuple[int, int], ...]


def exact_mcm(g: LabeledGraph, cap: int = MCM_SIZE_CAP) -> ExactResult:
    """Maximum cardinality matching by branch and bound."""
    if g.n > cap:
        raise ResourceCapError(f"exact_mcm capped at n={cap}, graph has n={g.n}")
    order = list(g.vertices)
    n = len(order)
    best_size = 0
    best_witness: tuple = ()
    chosen: list[tuple[int, int]] = []
    covered: set[int] = set()

    def recurse(idx: int):
        nonlocal best_size, best_witness
        while idx < n and order[idx] in covered:
            idx += 1
        if len(chosen) > best_size:
            best_size = len(chosen)
            best_witness = tuple(chosen)
        if idx >= n:
            return
        # every further matched edge consumes two free vertices
        free = sum(1 for v in order[idx:] if v not in covered)
        if len(chosen) + free // 2 <= best_size:
            return
        v = order[idx]
        covered.add(v)
        for u in sorted(g.neighbors(v)):
            if u in covered:
                continue
            covered.add(u)
            chosen.append(edge_key(v, u))
            recurse(idx + 1)
            chosen.pop()
            covered.discard(u)
        recurse(idx + 1)  # v left unmatched
        covered.discard(v)

    recurse(0)
    return ExactResult(best_size, tuple(sorted(best_witness)))


def exact_mwm(g: LabeledGraph, cap: int = MWM_SIZE_CAP) -> ExactResult:
    """Maximum weight matching by branch and bound, exact rationals."""
    if g.n > cap:
        raise ResourceCapError(f"exact_mwm capped at n={cap}, graph has n={g.n}")
    if not g.weighted:
        raise ValueError("exact_mwm needs a weighted graph")
    order = list(g.vertices)
    weights_desc = sorted(g.weights.values(), reverse=True)
    prefix = [Fraction(0)]
    for w in weights_desc:
        prefix.append(prefix[-1] + w)

    best_value = Fraction(0)
    best_witness: tuple = ()
    chosen: list[tuple[int, int]] = []
    covered: set[int] = set()
    current = Fraction(0)

    def recurse(idx: int):
        nonlocal best_value, best_witness, current
        while idx < len(order) and order[idx] in covered:
            idx += 1
        if current > best_value:
            best_value = current
            best_witness = tuple(chosen)
        if idx >= len(order):
            return
        free = sum(1 for v in order[idx:] if v not in covered)
        headroom = prefix[min(free // 2, len(weights_desc))]
        if current + headroom <= best_value:
            return
        v = order[idx]
        covered.add(v)
        for u in sorted(g.neighbors(v)):
            if u in covered:
                continue
            w = g.edge_weight(v, u)
            covered.add(u)
            chosen.append(edge_key(v, u))
            current += w
            recurse(idx + 1)
            current -= w
            chosen.pop()
            covered.discard(u)
        recurse(idx + 1)  # v left unmatched
        covered.discard(v)

    recurse(0)
    return ExactResult(best_value, tuple(sorted(best_witness)))


def maximal_matching_greedy(g: LabeledGraph) -> set[tuple[int, int]]:
    """Any maximal matching; used for sandwich bounds in tests."""
    covered: set[int] = set()
    out: set[tuple[int, int]] = set()
    for u, v in sorted(g.edges):
        if u not in covered and v not in covered:
            out.add((u, v))
            covered.add(u)
            covered.add(v)
    return out


def validate_matching(g: LabeledGraph, edge_set) -> Optional[str]:
    """None when edge_set is a matching in g, else a violation message."""
    seen: dict[int, tuple[int, int]] = {}
    for e in edge_set:
        k = edge_key(*e)
        if not g.has_edge(*k):
            return f"edge {k} not in graph"
        for v in k:
            if v in seen:
                return f"vertex {v} shared by {seen[v]} and {k}"
            seen[v] = k
    return None


def validate_mis(nodes, neighbors_fn, answer_set) -> Optional[str]:
    """Independence plus maximality of answer_set over the given node universe."""
    answers = set(answer_set)
    for x in nodes:
        if x in answers:
            for u in neighbors_fn(x):
                if u in answers:
                    return f"adjacent nodes {x} and {u} both selected"
        else:
            if all(u not in answers for u in neighbors_fn(x)):
                return f"node {x} could be added: no selected neighbor"
    return None


def validate_coloring(g: LabeledGraph, colors: dict[int, int], palette: int) -> Optional[str]:
    for v in g.vertices:
        if v not in colors:
            return f"vertex {v} has no color"
        if not (0 <= colors[v] < palette):
            return f"color {colors[v]} of vertex {v} outside palette [0,{palette})"
    for u, v in g.edges:
        if colors[u] == colors[v]:
            return f"edge ({u},{v}) is monochromatic with color {colors[u]}"
    return None


def validate_orientation(g: LabeledGraph, decisions, palette: int) -> Optional[str]:
    """Acyclicity plus longest directed path <= palette - 1."""
    directed: dict[tuple[int, int], tuple[int, int]] = {}
    for d in decisions:
        k = edge_key(d.src, d.dst)
        if not g.has_edge(*k):
            return f"decision on non-edge {k}"
        if k in directed:
            return f"two decisions for edge {k}"
        directed[k] = (d.src, d.dst)
    for e in g.edges:
        if e not in directed:
            return f"edge {e} has no decision"
    out_adj: dict[int, list[int]] = {v: [] for v in g.vertices}
    indeg: dict[int, int] = {v: 0 for v in g.vertices}
    for src, dst in directed.values():
        out_adj[src].append(dst)
        indeg[dst] += 1
    # Kahn topological order, then longest-path DP along it
    queue = [v for v in g.vertices if indeg[v] == 0]
    topo: list[int] = []
    indeg = dict(indeg)
    while queue:
        v = queue.pop()
        topo.append(v)
        for w in out_adj[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if len(topo) != g.n:
        return "orientation contains a directed cycle"
    longest: dict[int, int] = {v: 0 for v in g.vertices}
    for v in reversed(topo):
        for w in out_adj[v]:
            if longest[w] + 1 > longest[v]:
                longest[v] = longest[w] + 1
    worst = max(longest.values(), default=0)
    if worst > palette - 1:
        return f"directed path of length {worst} exceeds palette-1 = {palette - 1}"
    return None
