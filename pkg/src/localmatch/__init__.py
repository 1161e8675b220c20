"""Deterministic stateless local oracles for approximate maximum matching,
with coloring-driven MIS, a weighted gain-ladder variant, and a
synchronous-round distributed simulation of all of them."""

from .graph_core import Ball, LabeledGraph, ProbeSession, collect_ball, edge_key, parse_graph, probe, serialize_graph

__all__ = [
    "Ball",
    "LabeledGraph",
    "ProbeSession",
    "collect_ball",
    "edge_key",
    "parse_graph",
    "probe",
    "serialize_graph",
]
