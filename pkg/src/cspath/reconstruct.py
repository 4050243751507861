"""Recover a minimizing path from repeated solves.

The engine only reports the optimum time, the terminal vertex, the edge the
winning water arrived on, and its weight.  The vertex before the terminal
is the start of that edge.  Re-solving with that vertex as the only target
(all earlier targets removed, budget cut down to the remaining weight)
yields the vertex before it, and so on back to a source.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .engine import Reached, SolverConfig, solve
from .graph import ProblemInstance

__all__ = [
    "NotReached",
    "ReconstructionMismatch",
    "PathWitness",
    "extract_terminal",
    "reconstruct_path",
    "validate_path",
]


class NotReached(ValueError):
    pass


class ReconstructionMismatch(RuntimeError):
    pass


@dataclass(frozen=True)
class PathWitness:
    vertices: tuple[int, ...]
    F1: int
    F2: int

    def to_json(self) -> str:
        return json.dumps(
            {"format": 1, "vertices": list(self.vertices), "F1": self.F1, "F2": self.F2},
            sort_keys=True,
        )


def extract_terminal(outcome) -> tuple[int, int, int]:
    """``(terminal, arrival half-edge, F2)``; phantom arrivals resolve to the
    regular edge the phantom shadows, whose start is the copy's origin."""
    if not isinstance(outcome, Reached):
        raise NotReached(f"no path to extract from {outcome!r}")
    return outcome.terminal, outcome.arrival_edge, outcome.F2


def reconstruct_path(inst: ProblemInstance, cfg: SolverConfig | None = None) -> PathWitness:
    g = cur = inst.graph
    outcome = solve(inst, cfg)
    terminal, edge, F2 = extract_terminal(outcome)
    total = outcome.F1
    sources = set(inst.sources)
    removed = set(inst.targets)
    path = [terminal]
    suffix_time = 0
    while True:
        # edge ids refer to the graph of the latest solve
        prev = int(cur.start[edge])
        if int(cur.end[edge]) != path[-1]:
            raise ReconstructionMismatch(f"arrival edge {edge} does not end at {path[-1]}")
        suffix_time += int(cur.f1[edge])
        path.append(prev)
        if prev in sources:
            break
        # the prefix to `prev` may weigh exactly F2 - f2(edge), hence the +1
        budget = F2 - int(cur.weight[edge]) + 1
        cur = g.induced_without(removed)
        sub = ProblemInstance(cur, inst.sources, (prev,), budget, coords=inst.coords)
        outcome = solve(sub, cfg)
        if not isinstance(outcome, Reached) or outcome.F1 + suffix_time != total:
            raise ReconstructionMismatch(
                f"re-solve toward {prev} with budget {budget} gave {outcome!r}; "
                f"expected time {total - suffix_time}"
            )
        terminal, edge, F2 = extract_terminal(outcome)
        removed.add(prev)
    path.reverse()
    f1 = f2 = 0
    for u, v in zip(path, path[1:]):
        h = g.find_half_edge(u, v)
        f1 += int(g.f1[h])
        f2 += int(g.weight[h])
    return PathWitness(tuple(path), f1, f2)


def validate_path(inst: ProblemInstance, witness: PathWitness) -> list[str]:
    """Empty list when the witness is a genuine feasible A->B path with the claimed sums."""
    g = inst.graph
    vs = list(witness.vertices)
    if len(vs) < 2:
        return ["path has fewer than two vertices"]
    problems = []
    if vs[0] not in inst.sources:
        problems.append(f"path starts at {vs[0]}, not in A")
    if vs[-1] not in inst.targets:
        problems.append(f"path ends at {vs[-1]}, not in B")
    if len(set(vs)) != len(vs):
        problems.append("path repeats a vertex")
    f1 = f2 = 0
    for u, v in zip(vs, vs[1:]):
        if not (0 <= u < g.n_vertices and 0 <= v < g.n_vertices):
            problems.append(f"vertex out of range in ({u}, {v})")
            continue
        h = g.find_half_edge(u, v)
        if h is None:
            problems.append(f"{u} and {v} not adjacent")
            continue
        f1 += int(g.f1[h])
        f2 += int(g.weight[h])
    if f1 != witness.F1:
        problems.append(f"F1 mismatch: path sums to {f1}, witness says {witness.F1}")
    if f2 != witness.F2:
        problems.append(f"F2 mismatch: path sums to {f2}, witness says {witness.F2}")
    if f2 >= inst.budget:
        problems.append(f"constraint violated: F2={f2} >= M={inst.budget}")
    return problems
