"""Command-line driver: corpus generation, oracle runs, simulation, checks.

Exit codes: 0 success, 2 validation violation or malformed input,
3 budget/resource error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import coloring, corpus, dlocal, mcm, mis, mwm, verify
from .errors import (
    BudgetExceededError,
    GraphFormatError,
    ResourceCapError,
    SpecError,
    UnknownVertexError,
)
from .graph_core import LabeledGraph, ProbeSession, edge_key, parse_graph, serialize_graph

STATS_EDGE_CAP = 24  # fresh per-edge probe statistics above this sample down


def _load_graph(path: str) -> LabeledGraph:
    return parse_graph(Path(path).read_text())


def _emit(args, payload: dict, human: str):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n" if args.json else human
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"bad rational {s!r}") from None


def _cmd_generate(args) -> int:
    spec = corpus.CorpusSpec(
        family=args.family,
        n=args.n,
        degree=args.degree,
        weight_model=args.weights,
        seed=args.seed,
    )
    g = corpus.generate(spec)
    text = serialize_graph(g)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _color_all(g: LabeledGraph) -> dict[int, int]:
    out = {}
    for v in g.vertices:
        session = ProbeSession(g, v)
        out[v] = coloring.color_vertex(session, v)
    return out


def _cmd_color(args) -> int:
    g = _load_graph(args.graph)
    colors = _color_all(g)
    sched = coloring.reduction_schedule(g.delta_bound, g.id_bound)
    payload = {
        "kind": "coloring",
        "palette": sched.palette,
        "coloring_radius": sched.radius,
        "colors": {str(v): c for v, c in colors.items()},
    }
    human = "\n".join(f"{v} {c}" for v, c in sorted(colors.items())) + "\n"
    _emit(args, payload, human)
    return 0


def _cmd_orient(args) -> int:
    g = _load_graph(args.graph)
    sched = coloring.reduction_schedule(g.delta_bound, g.id_bound)
    decisions = []
    for e in g.edges:
        session = ProbeSession(g, e)
        d = coloring.orient_edge(session, e)
        decisions.append(d)
    payload = {
        "kind": "orientation",
        "palette": sched.palette,
        "edges": [{"edge": list(d.edge), "src": d.src, "dst": d.dst} for d in decisions],
    }
    human = "\n".join(f"{d.src} -> {d.dst}" for d in decisions) + "\n"
    _emit(args, payload, human)
    return 0


def _cmd_mis(args) -> int:
    g = _load_graph(args.graph)
    members = []
    counts, radii = [], []
    for v in g.vertices:
        session = ProbeSession(g, v)
        view = coloring.GraphView(session)
        if mis.in_mis(view, v):
            members.append(v)
        counts.append(session.probe_count)
        radii.append(session.probe_radius)
    payload = {
        "kind": "mis",
        "members": members,
        "probe_count_max": max(counts, default=0),
        "probe_radius_max": max(radii, default=0),
        "radius_bound": mis.view_mis_radius_bound(
            coloring.GraphView(ProbeSession(g, g.vertices[0]))
        )
        if g.vertices
        else 0,
    }
    human = " ".join(map(str, members)) + "\n"
    _emit(args, payload, human)
    return 0


def _probe_stats(g: LabeledGraph, fresh_query) -> dict:
    edges = list(g.edges)
    if len(edges) > STATS_EDGE_CAP:
        edges = sorted(edges)[:STATS_EDGE_CAP]
    counts, radii = [], []
    for e in edges:
        _, pc, pr = fresh_query(e)
        counts.append(pc)
        radii.append(pr)
    return {
        "probe_count_max": max(counts, default=0),
        "probe_count_mean": round(sum(counts) / len(counts), 2) if counts else 0,
        "probe_radius_max": max(radii, default=0),
        "probe_stat_edges": len(edges),
    }


def _cmd_mcm(args) -> int:
    g = _load_graph(args.graph)
    eps = _frac(args.eps)
    oracle = mcm.MatchingOracle(g, eps)
    matching = sorted(oracle.matching())
    payload = {
        "kind": "matching",
        "algorithm": "mcm",
        "eps": str(eps),
        "edges": [list(e) for e in matching],
        "matching_size": len(matching),
        "round_bound": dlocal.round_bound_mcm(eps, g.delta_bound, g.n, g.id_bound),
    }
    if g.n <= verify.MCM_SIZE_CAP:
        opt = verify.exact_mcm(g).value
        payload["optimum"] = opt
        payload["ratio"] = round(len(matching) / opt, 4) if opt else 1.0
    payload.update(_probe_stats(g, lambda e: mcm.apx_mcm_query_stats(g, eps, e)))
    human = "\n".join(f"{u} {v}" for u, v in matching) + "\n"
    _emit(args, payload, human)
    return 0


def _cmd_mwm(args) -> int:
    g = _load_graph(args.graph)
    if not g.weighted:
        raise GraphFormatError("mwm needs a weighted graph")
    eps = _frac(args.eps)
    oracle = mwm.WeightedMatchingOracle(g, eps)
    matching = sorted(oracle.matching())
    weight = sum((g.weights[e] for e in matching), Fraction(0))
    state = oracle.query_state
    payload = {
        "kind": "matching",
        "algorithm": "mwm",
        "eps": str(eps),
        "edges": [list(e) for e in matching],
        "matching_size": len(matching),
        "matching_weight": str(weight),
        "ladder_size": state.T,
        "stage_count": state.final_pos,
        "round_bound": dlocal.round_bound_mwm(
            eps, g.delta_bound, g.n, state.disc.wmin, g.id_bound
        )
        if state.disc.disc_weights
        else 0,
    }
    if g.n <= verify.MWM_SIZE_CAP:
        opt = verify.exact_mwm(g).value
        payload["optimum"] = str(opt)
        payload["ratio"] = round(float(weight / opt), 4) if opt else 1.0
    payload.update(_probe_stats(g, lambda e: mwm.apx_mwm_query_stats(g, eps, e)))
    human = "\n".join(f"{u} {v}" for u, v in matching) + "\n"
    _emit(args, payload, human)
    return 0


def _cmd_simulate(args) -> int:
    g = _load_graph(args.graph)
    alg = args.alg
    if alg == "mis":
        session = ProbeSession(g, g.vertices[0]) if g.vertices else None
        bound = mis.view_mis_radius_bound(coloring.GraphView(session)) if session else 0

        def answer(target, v):
            s = ProbeSession(target, v)
            return mis.in_mis(coloring.GraphView(s), v)

        result = dlocal.simulate_clocal(g, "vertex", answer, bound)
        central = {}
        for v in g.vertices:
            s = ProbeSession(g, v)
            central[v] = mis.in_mis(coloring.GraphView(s), v)
        outputs = {str(v): val for v, val in result.outputs.items()}
    elif alg in ("mcm", "mwm"):
        eps = _frac(args.eps)
        if alg == "mcm":
            bound = dlocal.round_bound_mcm(eps, g.delta_bound, g.n, g.id_bound)
            answer = lambda target, e: mcm.apx_mcm_query(target, eps, e)
            central = {e: mcm.apx_mcm_query(g, eps, e) for e in g.edges}
        else:
            disc = mwm.preprocess(g, eps)
            bound = (
                dlocal.round_bound_mwm(eps, g.delta_bound, g.n, disc.wmin, g.id_bound)
                if disc.disc_weights
                else 0
            )
            answer = lambda target, e: mwm.apx_mwm_query(target, eps, e)
            central = {e: mwm.apx_mwm_query(g, eps, e) for e in g.edges}
        result = dlocal.simulate_clocal(g, "edge", answer, bound)
        outputs = {f"{u},{v}": val for (u, v), val in result.outputs.items()}
    else:  # pragma: no cover - argparse restricts choices
        raise SpecError(f"unknown algorithm {alg}")
    agree = list(result.outputs.values()) == [central[k] for k in result.outputs]
    payload = {
        "kind": "simulation",
        "algorithm": alg,
        "outputs": outputs,
        "rounds_requested": result.rounds_requested,
        "rounds_executed": result.rounds_executed,
        "radius_bound": bound,
        "matches_centralized": agree,
    }
    human = f"simulated {alg}: rounds={result.rounds_executed} agree={agree}\n"
    _emit(args, payload, human)
    return 0 if agree else 2


def _cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    answers = json.loads(Path(args.answers).read_text())
    kind = answers.get("kind")
    if kind == "matching":
        edges = [tuple(e) for e in answers["edges"]]
        violation = verify.validate_matching(g, edges)
    elif kind == "mis":
        violation = verify.validate_mis(g.vertices, g.neighbors, set(answers["members"]))
    elif kind == "coloring":
        colors = {int(v): c for v, c in answers["colors"].items()}
        violation = verify.validate_coloring(g, colors, answers["palette"])
    elif kind == "orientation":
        decisions = [
            coloring.OrientationDecision(tuple(d["edge"]), d["src"], d["dst"])
            for d in answers["edges"]
        ]
        violation = verify.validate_orientation(g, decisions, answers["palette"])
    else:
        raise SpecError(f"answers file has unknown kind {kind!r}")
    payload = {"kind": "verification", "target": kind, "ok": violation is None}
    if violation:
        payload["violation"] = violation
    _emit(args, payload, ("ok" if violation is None else f"VIOLATION: {violation}") + "\n")
    return 0 if violation is None else 2


BENCH_CELLS = [
    (corpus.CorpusSpec("ring", 8), "mcm", "1/2"),
    (corpus.CorpusSpec("ring", 9), "mcm", "17/50"),
    (corpus.CorpusSpec("path", 10), "mcm", "1/4"),
    (corpus.CorpusSpec("disjoint_edges", 8), "mcm", "1"),
    (corpus.CorpusSpec("grid", 9), "mcm", "1/2"),
    (corpus.CorpusSpec("random_regular", 10, degree=3, seed=7), "mcm", "1/2"),
    (corpus.CorpusSpec("ring", 8, weight_model="discrete-powers", seed=3), "mwm", "1/2"),
    (corpus.CorpusSpec("path", 9, weight_model="uniform-rational", seed=5), "mwm", "1/2"),
]


def run_experiment(spec: corpus.CorpusSpec, algorithm: str, eps, timing: bool = False) -> dict:
    """One metrics record; bit-reproducible given (spec, algorithm, eps)."""
    g = corpus.generate(spec)
    eps = Fraction(eps)
    start = time.perf_counter()
    record = {
        "family": spec.family,
        "n": spec.n,
        "seed": spec.seed,
        "weight_model": spec.weight_model,
        "algorithm": algorithm,
        "eps": str(eps),
    }
    if algorithm == "mcm":
        matching = mcm.MatchingOracle(g, eps).matching()
        record["matching_size"] = len(matching)
        if g.n <= verify.MCM_SIZE_CAP:
            opt = verify.exact_mcm(g).value
            record["optimum"] = opt
            record["ratio"] = round(len(matching) / opt, 4) if opt else 1.0
        record["round_bound"] = dlocal.round_bound_mcm(eps, g.delta_bound, g.n, g.id_bound)
        stats = _probe_stats(g, lambda e: mcm.apx_mcm_query_stats(g, eps, e))
    elif algorithm == "mwm":
        oracle = mwm.WeightedMatchingOracle(g, eps)
        matching = oracle.matching()
        weight = sum((g.weights[e] for e in matching), Fraction(0))
        record["matching_size"] = len(matching)
        record["matching_weight"] = str(weight)
        if g.n <= verify.MWM_SIZE_CAP:
            opt = verify.exact_mwm(g).value
            record["optimum"] = str(opt)
            record["ratio"] = round(float(weight / opt), 4) if opt else 1.0
        state = oracle.query_state
        record["ladder_size"] = state.T
        record["round_bound"] = (
            dlocal.round_bound_mwm(eps, g.delta_bound, g.n, state.disc.wmin, g.id_bound)
            if state.disc.disc_weights
            else 0
        )
        stats = _probe_stats(g, lambda e: mwm.apx_mwm_query_stats(g, eps, e))
    else:
        raise SpecError(f"unknown algorithm {algorithm!r}")
    record.update(stats)
    if timing:
        record["wall_time_s"] = round(time.perf_counter() - start, 3)
    return record


def _cmd_bench(args) -> int:
    lines = []
    for spec, algorithm, eps in BENCH_CELLS:
        record = run_experiment(spec, algorithm, eps, timing=args.timing)
        lines.append(json.dumps(record, sort_keys=True))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="local-match",
        description="Stateless local matching oracles and their distributed simulation",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p, graph=True, eps=False):
        if graph:
            p.add_argument("--graph", required=True, help="graph file")
        if eps:
            p.add_argument("--eps", required=True, help="approximation parameter (rational)")
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.add_argument("--out", help="write output to file")

    p = sub.add_parser("generate", help="emit a corpus graph")
    p.add_argument("--family", required=True,
                   choices=["ring", "path", "grid", "random_regular", "disjoint_edges", "prism"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--weights", default="none", choices=list(corpus.WEIGHT_MODELS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write output to file")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("color", help="stateless vertex coloring")
    common(p)
    p.set_defaults(fn=_cmd_color)

    p = sub.add_parser("orient", help="color-induced acyclic orientation")
    common(p)
    p.set_defaults(fn=_cmd_orient)

    p = sub.add_parser("mis", help="maximal independent set oracle over the graph")
    common(p)
    p.set_defaults(fn=_cmd_mis)

    p = sub.add_parser("mcm", help="approximate maximum cardinality matching")
    common(p, eps=True)
    p.set_defaults(fn=_cmd_mcm)

    p = sub.add_parser("mwm", help="approximate maximum weight matching")
    common(p, eps=True)
    p.set_defaults(fn=_cmd_mwm)

    p = sub.add_parser("simulate", help="synchronous-round simulation")
    common(p)
    p.add_argument("--alg", required=True, choices=["mis", "mcm", "mwm"])
    p.add_argument("--eps", help="approximation parameter (mcm/mwm)")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("verify", help="validate an answers file against a graph")
    common(p)
    p.add_argument("--answers", required=True, help="answers JSON file")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("bench", help="run the experiment battery (JSON lines)")
    p.add_argument("--out", help="write output to file")
    p.add_argument("--timing", action="store_true", help="include wall time")
    p.add_argument("--seed", type=int, default=0, help="accepted for symmetry; unused")
    p.set_defaults(fn=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (GraphFormatError, SpecError, UnknownVertexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BudgetExceededError, ResourceCapError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
