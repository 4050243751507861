"""Reference solvers for the weight-constrained shortest path problem.

Both are deliberately plain: a Dijkstra sweep over (vertex, spent weight)
states, and exhaustive enumeration of simple paths.  They share nothing
with the engine beyond the graph arrays.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

from .engine import Reached
from .graph import ProblemInstance, format_instance

__all__ = [
    "InstanceTooLarge",
    "SearchSpaceTooLarge",
    "OracleResult",
    "Comparison",
    "dp_constrained_shortest",
    "enumerate_paths",
    "compare",
]

MAX_STATES = 10**8


class InstanceTooLarge(ValueError):
    pass


class SearchSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    F1: int | None
    path: tuple[int, ...] = ()
    F2: int | None = None

    @property
    def feasible(self) -> bool:
        return self.F1 is not None


def _adjacency(inst: ProblemInstance) -> list[list[tuple[int, int, int]]]:
    g = inst.graph
    adj: list[list[tuple[int, int, int]]] = [[] for _ in range(g.n_vertices)]
    for s, e, a, w in zip(g.start.tolist(), g.end.tolist(), g.f1.tolist(), g.weight.tolist()):
        adj[s].append((e, a, w))
    return adj


def dp_constrained_shortest(inst: ProblemInstance) -> OracleResult:
    """min F1 subject to F2 <= M - 1, by Dijkstra on the product graph.

    Heap entries are ``(time, vertex, weight)`` so equal times pop in
    (vertex, weight) order and the witness is deterministic.
    """
    g = inst.graph
    M = inst.budget
    if g.n_vertices * M > MAX_STATES:
        raise InstanceTooLarge(f"{g.n_vertices} vertices x budget {M} exceeds {MAX_STATES} states")
    adj = _adjacency(inst)
    targets = set(inst.targets)
    dist: dict[tuple[int, int], int] = {}
    prev: dict[tuple[int, int], tuple[int, int] | None] = {}
    heap = []
    for a in inst.sources:
        dist[(a, 0)] = 0
        prev[(a, 0)] = None
        heap.append((0, a, 0))
    heapq.heapify(heap)
    done = set()
    while heap:
        t, v, w = heapq.heappop(heap)
        if (v, w) in done:
            continue
        done.add((v, w))
        if v in targets:
            path = []
            state: tuple[int, int] | None = (v, w)
            while state is not None:
                path.append(state[0])
                state = prev[state]
            return OracleResult(t, tuple(reversed(path)), w)
        for u, a, c in adj[v]:
            nw = w + c
            if nw >= M:
                continue
            key = (u, nw)
            nt = t + a
            if key not in dist or nt < dist[key]:
                dist[key] = nt
                prev[key] = (v, w)
                heapq.heappush(heap, (nt, u, nw))
    return OracleResult(None)


def enumerate_paths(inst: ProblemInstance, max_edges: int | None = None) -> OracleResult:
    """Brute force over all simple A->B paths with at most ``max_edges`` edges."""
    g = inst.graph
    if max_edges is None:
        max_edges = g.n_vertices - 1
    if g.n_vertices > 12 and max_edges > 12:
        raise SearchSpaceTooLarge(
            f"{g.n_vertices} vertices with paths up to {max_edges} edges is too many to enumerate"
        )
    adj = _adjacency(inst)
    targets = set(inst.targets)
    M = inst.budget
    best: tuple[int, int, tuple[int, ...]] | None = None

    def walk(path: list[int], on_path: set[int], t: int, w: int) -> None:
        nonlocal best
        v = path[-1]
        if v in targets and len(path) > 1:
            cand = (t, w, tuple(path))
            if best is None or cand < best:
                best = cand
        if len(path) - 1 >= max_edges:
            return
        for u, a, c in adj[v]:
            if u in on_path or w + c >= M:
                continue
            path.append(u)
            on_path.add(u)
            walk(path, on_path, t + a, w + c)
            on_path.discard(u)
            path.pop()

    for a in inst.sources:
        walk([a], {a}, 0, 0)
    if best is None:
        return OracleResult(None)
    return OracleResult(best[0], best[2], best[1])


@dataclass(frozen=True)
class Comparison:
    agree: bool
    engine_F1: int | None
    oracle_F1: int | None
    dump: str | None = None

    def to_json(self) -> str:
        return json.dumps(
            {"format": 1, "agree": self.agree, "engine_F1": self.engine_F1, "oracle_F1": self.oracle_F1},
            sort_keys=True,
        )


def compare(inst: ProblemInstance, engine_outcome, oracle: OracleResult | None = None) -> Comparison:
    if oracle is None:
        oracle = dp_constrained_shortest(inst)
    engine_F1 = engine_outcome.F1 if isinstance(engine_outcome, Reached) else None
    agree = engine_F1 == oracle.F1
    dump = None if agree else format_instance(inst)
    return Comparison(agree, engine_F1, oracle.F1, dump)
