"""Deterministic corpus generation for tests and experiments.

Every graph is a pure function of its CorpusSpec: the RNG is seeded per
spec and consumed in a fixed order, and ports follow the (sorted) edge
construction order, so serialization is hash-stable across runs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import SpecError
from .graph_core import LabeledGraph, edge_key

WEIGHT_MODELS = ("none", "unit", "discrete-powers", "uniform-rational")

# menu for the uniform-rational model; values stay well above typical
# lightweight thresholds so discretized weight classes remain few
_RATIONAL_MENU = (
    Fraction(7, 10),
    Fraction(3, 4),
    Fraction(4, 5),
    Fraction(5, 6),
    Fraction(9, 10),
    Fraction(1),
)
_POWER_BASE = Fraction(5, 6)


@dataclass(frozen=True)
class CorpusSpec:
    family: str  # ring | path | grid | random_regular | disjoint_edges | prism
    n: int
    degree: int = 3  # random_regular only
    weight_model: str = "none"
    seed: int = 0

    def label(self) -> str:
        parts = [self.family, str(self.n)]
        if self.family == "random_regular":
            parts.append(f"d{self.degree}")
        if self.weight_model != "none":
            parts.append(self.weight_model)
        parts.append(f"s{self.seed}")
        return "-".join(parts)


def _ring_edges(n: int) -> list[tuple[int, int]]:
    if n < 3:
        raise SpecError("ring needs n >= 3")
    return [(i, i + 1) for i in range(1, n)] + [(1, n)]


def _path_edges(n: int) -> list[tuple[int, int]]:
    if n < 1:
        raise SpecError("path needs n >= 1")
    return [(i, i + 1) for i in range(1, n)]


def _grid_edges(n: int) -> list[tuple[int, int]]:
    rows = max(r for r in range(1, int(n**0.5) + 1) if n % r == 0)
    cols = n // rows
    if rows == 1 and n > 3:
        raise SpecError(f"grid needs a composite n, got {n}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c + 1
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return edges


def _disjoint_edges(n: int) -> list[tuple[int, int]]:
    if n % 2:
        raise SpecError("disjoint_edges needs even n")
    return [(2 * i - 1, 2 * i) for i in range(1, n // 2 + 1)]


def _prism_edges(n: int) -> list[tuple[int, int]]:
    # circular ladder: two rings of n/2 joined by rungs; 3-regular
    if n % 2 or n < 6:
        raise SpecError("prism needs even n >= 6")
    half = n // 2
    edges = []
    for i in range(1, half + 1):
        j = i % half + 1
        edges.append((i, j))
        edges.append((half + i, half + j))
        edges.append((i, half + i))
    return [edge_key(u, v) for u, v in edges]


def _random_regular_edges(n: int, d: int, rng: random.Random) -> list[tuple[int, int]]:
    if n * d % 2:
        raise SpecError(f"random_regular infeasible: n*d = {n * d} is odd")
    if not 0 <= d < n:
        raise SpecError(f"random_regular needs 0 <= d < n, got d={d}, n={n}")
    while True:  # seeded pairing with full restart on collision
        stubs = [v for v in range(1, n + 1) for _ in range(d)]
        rng.shuffle(stubs)
        edges: set[tuple[int, int]] = set()
        ok = True
        for a, b in zip(stubs[::2], stubs[1::2]):
            if a == b or edge_key(a, b) in edges:
                ok = False
                break
            edges.add(edge_key(a, b))
        if ok:
            return sorted(edges)


def _assign_weights(edges, model: str, rng: random.Random) -> dict[tuple[int, int], Fraction]:
    weights: dict[tuple[int, int], Fraction] = {}
    if model == "unit":
        return {edge_key(u, v): Fraction(1) for u, v in edges}
    if model == "discrete-powers":
        for u, v in edges:
            weights[edge_key(u, v)] = _POWER_BASE ** rng.choice((0, 1, 2))
    elif model == "uniform-rational":
        for u, v in edges:
            weights[edge_key(u, v)] = rng.choice(_RATIONAL_MENU)
    else:
        raise SpecError(f"unknown weight model {model!r}")
    if edges and max(weights.values()) < 1:
        weights[edge_key(*edges[0])] = Fraction(1)  # weights are normalized to max 1
    return weights


def generate(spec: CorpusSpec) -> LabeledGraph:
    rng = random.Random(spec.seed)
    if spec.family == "ring":
        edges = _ring_edges(spec.n)
    elif spec.family == "path":
        edges = _path_edges(spec.n)
    elif spec.family == "grid":
        edges = _grid_edges(spec.n)
    elif spec.family == "disjoint_edges":
        edges = _disjoint_edges(spec.n)
    elif spec.family == "prism":
        edges = _prism_edges(spec.n)
    elif spec.family == "random_regular":
        edges = _random_regular_edges(spec.n, spec.degree, rng)
    else:
        raise SpecError(f"unknown family {spec.family!r}")
    weights = None
    if spec.weight_model != "none":
        weights = _assign_weights(edges, spec.weight_model, rng)
    return LabeledGraph(range(1, spec.n + 1), edges, weights)
