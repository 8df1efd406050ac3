"""Necessary-condition checks for weakly norming graphs on step graphons."""

from .analyzer import (
    NOT_WN,
    PASSES,
    SearchBudget,
    falsify_holder,
    falsify_lemma,
    holder_check,
    necessary_conditions_pipeline,
    theorem_trace,
)
from .density import EdgeAssignment, brute_force_density, density, edge_deleted_densities, multilinear_density
from .graphon import StepGraphon, constant_graphon, parse_graphon
from .graphs import Graph, parse_edge_list, parse_graph6, to_graph6

__version__ = "0.1.0"

__all__ = [
    "EdgeAssignment",
    "Graph",
    "NOT_WN",
    "PASSES",
    "SearchBudget",
    "StepGraphon",
    "brute_force_density",
    "constant_graphon",
    "density",
    "edge_deleted_densities",
    "falsify_holder",
    "falsify_lemma",
    "holder_check",
    "multilinear_density",
    "necessary_conditions_pipeline",
    "parse_edge_list",
    "parse_graph6",
    "parse_graphon",
    "theorem_trace",
    "to_graph6",
]
