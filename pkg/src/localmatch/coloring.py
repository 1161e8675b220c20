"""Deterministic stateless vertex coloring by iterated palette reduction.

Colors start out as vertex ids.  One reduction step maps the current
palette [m] into [q*q] for a prime q > d*delta: each color becomes a
polynomial of degree <= d over F_q (its base-q digits), and a vertex picks
the smallest evaluation point x on which its polynomial differs from every
neighbor's, taking (x, p(x)) as its new color.  Distinct adjacent colors
map to distinct polynomials, which agree on at most d points each, so
q > d*delta guarantees a good x exists and the coloring stays proper.

The step schedule is a pure function of (delta, id_bound), so every vertex
runs the same number of steps; the color after step t depends only on the
radius-t ball.  The palette stabilizes at (next prime above 2*delta)^2 =
O(delta^2) after an iterated-log number of steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .graph_core import ProbeSession, edge_key

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    c = n + 1
    while not _is_prime(c):
        c += 1
    return c


@dataclass(frozen=True)
class ReductionSchedule:
    delta: int
    id_bound: int
    steps: tuple[tuple[int, int], ...]  # (polynomial degree d, field size q)
    palette: int

    @property
    def radius(self) -> int:
        return len(self.steps)


@lru_cache(maxsize=None)
def reduction_schedule(delta: int, id_bound: int) -> ReductionSchedule:
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return ReductionSchedule(0, id_bound, (), 1)
    m = id_bound + 1
    steps: list[tuple[int, int]] = []
    while True:
        d = 1
        while True:
            q = next_prime(d * delta)
            if q ** (d + 1) >= m:
                break
            d += 1
        if q * q >= m:
            break
        steps.append((d, q))
        m = q * q
    return ReductionSchedule(delta, id_bound, tuple(steps), m)


def palette_size(delta: int, id_bound: int) -> int:
    """Exact palette bound guaranteed by the reduction schedule."""
    return reduction_schedule(delta, id_bound).palette


def coloring_radius(delta: int, id_bound: int) -> int:
    """Probe radius of the coloring: one hop per reduction step."""
    return reduction_schedule(delta, id_bound).radius


def _poly_eval(color: int, x: int, q: int) -> int:
    # digits of `color` in base q are the coefficients, low to high
    acc, power = 0, 1
    c = color
    while c:
        acc = (acc + (c % q) * power) % q
        power = power * x % q
        c //= q
    return acc


def _reduce_color(my: int, neighbor_colors, d: int, q: int) -> int:
    for x in range(q):
        mine = _poly_eval(my, x, q)
        if all(_poly_eval(c, x, q) != mine for c in neighbor_colors):
            return x * q + mine
    raise AssertionError("no evaluation point found; coloring input was improper")


def color_node(view, node, memo: dict) -> int:
    """Color of a node in any probe-able view, under the view's schedule.

    The view supplies `schedule`, `initial_color(node)` and
    `neighbors(node)`; `memo` is a query-private cache keyed (node, step).
    """
    sched = view.schedule
    if sched.delta == 0:
        return 0
    return _color_at(view, node, len(sched.steps), memo)


def _color_at(view, node, t: int, memo: dict) -> int:
    key = (node, t)
    cached = memo.get(key)
    if cached is not None:
        return cached
    if t == 0:
        c = view.initial_color(node)
    else:
        d, q = view.schedule.steps[t - 1]
        my = _color_at(view, node, t - 1, memo)
        nbs = [_color_at(view, u, t - 1, memo) for u in view.neighbors(node)]
        for c in nbs:
            if c == my:
                raise AssertionError("adjacent nodes share a color; improper input")
        c = _reduce_color(my, nbs, d, q)
    memo[key] = c
    return c


class GraphView:
    """The input graph itself as a colorable / MIS-able view.

    Node identity is the vertex id; adjacency is discovered through the
    session's probes and cached for the lifetime of the view (one query).
    """

    def __init__(self, session: ProbeSession):
        self.session = session
        target = session.target
        self.delta_bound = target.delta_bound
        self.id_bound = target.id_bound
        self.schedule = reduction_schedule(self.delta_bound, self.id_bound)
        self._nbrs: dict[int, tuple[int, ...]] = {}

    def initial_color(self, v: int) -> int:
        return v

    def node_id(self, v: int) -> int:
        return v

    def neighbors(self, v: int) -> tuple[int, ...]:
        cached = self._nbrs.get(v)
        if cached is None:
            out = []
            for port in range(1, self.delta_bound + 1):
                ans = self.session.probe(v, port)
                if ans is None:
                    break
                out.append(ans[0])
            cached = self._nbrs[v] = tuple(out)
        return cached


@dataclass(frozen=True)
class OrientationDecision:
    """Direction of one edge under the color-induced acyclic orientation."""

    edge: tuple[int, int]
    src: int
    dst: int


def orientation_rank(color: int, node_id: int) -> tuple[int, int]:
    """Edges point from higher rank to lower rank.

    Properness makes color ties unreachable between neighbors; the id
    component is defensive determinism only.
    """
    return (color, node_id)


def color_vertex(session: ProbeSession, v: int, view: GraphView | None = None,
                 memo: dict | None = None) -> int:
    if view is None:
        view = GraphView(session)
    return color_node(view, v, {} if memo is None else memo)


def orient_edge(session: ProbeSession, e: tuple[int, int], view: GraphView | None = None,
                memo: dict | None = None) -> OrientationDecision:
    u, v = edge_key(*e)
    if view is None:
        view = GraphView(session)
    if memo is None:
        memo = {}
    cu = color_node(view, u, memo)
    cv = color_node(view, v, memo)
    if orientation_rank(cu, u) > orientation_rank(cv, v):
        return OrientationDecision(edge=(u, v), src=u, dst=v)
    return OrientationDecision(edge=(u, v), src=v, dst=u)
