"""Weight-constrained shortest paths by a frontier label-correcting engine."""

from .engine import (
    BudgetExceeded,
    Infeasible,
    Reached,
    SolverConfig,
    check_invariants,
    run,
    solve,
)
from .graph import (
    Graph,
    ProblemInstance,
    build_graph,
    infinite_budget,
    instance_from_edges,
    parse_instance,
    read_instance,
    write_instance,
)
from .oracle import dp_constrained_shortest, enumerate_paths
from .reconstruct import PathWitness, reconstruct_path, validate_path

__all__ = [
    "BudgetExceeded",
    "Infeasible",
    "Reached",
    "SolverConfig",
    "check_invariants",
    "run",
    "solve",
    "Graph",
    "ProblemInstance",
    "build_graph",
    "infinite_budget",
    "instance_from_edges",
    "parse_instance",
    "read_instance",
    "write_instance",
    "dp_constrained_shortest",
    "enumerate_paths",
    "PathWitness",
    "reconstruct_path",
    "validate_path",
]
