"""Exact solvers for the diversifying stable-assignment problem."""

from .bipartite import SolverTrace, solve_bipartite
from .choice import apply_choice, choose, classify, cut_height, join, prefers
from .general import double_instance, solve_general
from .hypergraph import pivot, solve_hypergraph
from .model import (
    Assignment,
    AssignmentError,
    Instance,
    InstanceError,
    InvariantViolation,
    LocalView,
    load_instance,
    loads_instance,
    local_view,
    parse_assignment,
    validate_instance,
)
from .stability import blocking_edges, check_stability, is_stable


def solve(inst: Instance) -> Assignment:
    """Solve any instance kind with its primary exact solver."""
    if inst.kind == "bipartite":
        return solve_bipartite(inst)[0]
    if inst.kind == "graph":
        return solve_general(inst)
    return solve_hypergraph(inst)


__all__ = [
    "Assignment", "AssignmentError", "Instance", "InstanceError", "InvariantViolation",
    "LocalView", "SolverTrace", "apply_choice", "blocking_edges", "check_stability",
    "choose", "classify", "cut_height", "double_instance", "is_stable", "join",
    "load_instance", "loads_instance", "local_view", "parse_assignment", "pivot",
    "prefers", "solve", "solve_bipartite", "solve_general", "solve_hypergraph",
    "validate_instance",
]
__version__ = "0.1.0"
