"""Flat graph storage and problem instances.

Every undirected edge is stored as two half-edges.  Half-edges are grouped
by start vertex into contiguous adjacency ranges (``adj_ptr``), sorted by
end vertex inside each range, and each half-edge knows the location of its
reverse copy (``twin``).  The graph is immutable; everything that changes
while solving lives in :class:`cspath.engine.SolverState`.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "DuplicateEdge",
    "SelfLoop",
    "NonPositiveValue",
    "InstanceFormatError",
    "Graph",
    "ProblemInstance",
    "build_graph",
    "validate_instance",
    "infinite_budget",
    "read_instance",
    "write_instance",
    "format_instance",
    "parse_instance",
    "instance_from_edges",
]

INDEX_DTYPE = np.int64


class GraphError(ValueError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class NonPositiveValue(GraphError):
    pass


class InstanceFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    n_vertices: int
    start: np.ndarray
    end: np.ndarray
    f1: np.ndarray
    weight: np.ndarray
    twin: np.ndarray
    adj_ptr: np.ndarray

    @property
    def n_half_edges(self) -> int:
        return int(self.start.shape[0])

    @property
    def n_edges(self) -> int:
        return self.n_half_edges // 2

    @property
    def degree(self) -> np.ndarray:
        return np.diff(self.adj_ptr)

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n_vertices else 0

    def first_edge(self, v: int) -> int | None:
        lo, hi = self.adj_ptr[v], self.adj_ptr[v + 1]
        return int(lo) if hi > lo else None

    def out_edges(self, v: int) -> range:
        return range(int(self.adj_ptr[v]), int(self.adj_ptr[v + 1]))

    def neighbors(self, v: int) -> np.ndarray:
        return self.end[self.adj_ptr[v] : self.adj_ptr[v + 1]]

    def find_half_edge(self, u: int, v: int) -> int | None:
        lo, hi = int(self.adj_ptr[u]), int(self.adj_ptr[u + 1])
        i = lo + int(np.searchsorted(self.end[lo:hi], v))
        if i < hi and self.end[i] == v:
            return i
        return None

    def edges(self) -> np.ndarray:
        """Undirected edge list as an ``(m, 4)`` array of ``(u, v, f1, f2)``, ``u < v``."""
        fwd = self.start < self.end
        return np.column_stack(
            [self.start[fwd], self.end[fwd], self.f1[fwd], self.weight[fwd]]
        )

    def expand(self, vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Half-edge ids of all out-edges of ``vertices`` and, for each, the
        position of its owner inside ``vertices``."""
        vertices = np.asarray(vertices, dtype=INDEX_DTYPE)
        lo = self.adj_ptr[vertices]
        counts = self.adj_ptr[vertices + 1] - lo
        total = int(counts.sum())
        owner = np.repeat(np.arange(vertices.shape[0], dtype=INDEX_DTYPE), counts)
        if total == 0:
            return np.empty(0, dtype=INDEX_DTYPE), owner
        offsets = np.cumsum(counts) - counts
        eids = np.arange(total, dtype=INDEX_DTYPE) - np.repeat(offsets - lo, counts)
        return eids, owner

    def induced_without(self, removed: Iterable[int]) -> "Graph":
        """Same vertex ids, with every edge touching ``removed`` dropped."""
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[list(removed)] = True
        e = self.edges()
        keep = ~(mask[e[:, 0]] | mask[e[:, 1]])
        return build_graph(self.n_vertices, e[keep])


def build_graph(n_vertices: int, edges) -> Graph:
    """Build the twin half-edge store from ``(u, v, f1, f2)`` tuples."""
    arr = np.asarray(edges, dtype=INDEX_DTYPE)
    if arr.size == 0:
        arr = arr.reshape(0, 4)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise GraphError(f"edges must be (u, v, f1, f2) rows, got shape {arr.shape}")
    u, v, f1, f2 = arr.T
    bad = np.flatnonzero((u < 0) | (u >= n_vertices) | (v < 0) | (v >= n_vertices))
    if bad.size:
        i = int(bad[0])
        raise GraphError(f"edge #{i} {tuple(arr[i].tolist())} has endpoint outside [0, {n_vertices})")
    bad = np.flatnonzero(u == v)
    if bad.size:
        i = int(bad[0])
        raise SelfLoop(f"edge #{i} {tuple(arr[i].tolist())} is a self-loop at vertex {int(u[i])}")
    bad = np.flatnonzero((f1 < 1) | (f2 < 1))
    if bad.size:
        i = int(bad[0])
        raise NonPositiveValue(
            f"edge #{i} {tuple(arr[i].tolist())} needs f1 >= 1 and f2 >= 1"
        )
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    key = lo * n_vertices + hi
    order = np.argsort(key, kind="stable")
    dup = np.flatnonzero(key[order][1:] == key[order][:-1])
    if dup.size:
        i, j = int(order[dup[0]]), int(order[dup[0] + 1])
        raise DuplicateEdge(
            f"edges #{i} and #{j} both join {int(lo[j])} and {int(hi[j])}"
        )

    m = arr.shape[0]
    start = np.concatenate([u, v])
    end = np.concatenate([v, u])
    # half-edge k < m is edge k forward, k + m its reverse
    order = np.lexsort((end, start))
    pos = np.empty(2 * m, dtype=INDEX_DTYPE)
    pos[order] = np.arange(2 * m, dtype=INDEX_DTYPE)
    pair = np.concatenate([np.arange(m, 2 * m), np.arange(m)]).astype(INDEX_DTYPE)
    twin = pos[pair[order]]
    counts = np.bincount(start, minlength=n_vertices)
    adj_ptr = np.zeros(n_vertices + 1, dtype=INDEX_DTYPE)
    np.cumsum(counts, out=adj_ptr[1:])
    graph = Graph(
        n_vertices=int(n_vertices),
        start=start[order],
        end=end[order],
        f1=np.concatenate([f1, f1])[order],
        weight=np.concatenate([f2, f2])[order],
        twin=twin,
        adj_ptr=adj_ptr,
    )
    for a in (graph.start, graph.end, graph.f1, graph.weight, graph.twin, graph.adj_ptr):
        a.setflags(write=False)
    return graph


def infinite_budget(g: Graph) -> int:
    """A budget no simple path can reach: 1 + total edge weight."""
    return 1 + int(g.weight.sum()) // 2


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    graph: Graph
    sources: tuple[int, ...]
    targets: tuple[int, ...]
    budget: int
    coords: np.ndarray | None = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(sorted({int(a) for a in self.sources})))
        object.__setattr__(self, "targets", tuple(sorted({int(b) for b in self.targets})))
        object.__setattr__(self, "budget", int(self.budget))

    @property
    def unconstrained(self) -> bool:
        return self.budget >= infinite_budget(self.graph)

    def vertex_at(self, *point: int) -> int:
        """Vertex id at lattice coordinates (generator-built instances only)."""
        if self.coords is None:
            raise ValueError("instance has no coordinates")
        hit = np.flatnonzero((self.coords == np.asarray(point)).all(axis=1))
        if hit.size != 1:
            raise KeyError(point)
        return int(hit[0])


def validate_instance(inst: ProblemInstance) -> list[str]:
    g = inst.graph
    out = []
    A, B = set(inst.sources), set(inst.targets)
    if not A:
        out.append("A empty")
    if not B:
        out.append("B empty")
    common = sorted(A & B)
    if common:
        out.append(f"A∩B nonempty: {common}")
    for name, s in (("A", A), ("B", B)):
        bad = sorted(x for x in s if not 0 <= x < g.n_vertices)
        if bad:
            out.append(f"{name} has vertices outside [0, {g.n_vertices}): {bad}")
    if inst.budget < 1:
        out.append(f"budget below 1: M={inst.budget}")
    e = g.edges()
    for col, label in ((2, "f1"), (3, "f2")):
        bad = np.flatnonzero(e[:, col] < 1)
        if bad.size:
            i = int(bad[0])
            out.append(f"{label} < 1 on edge ({int(e[i, 0])}, {int(e[i, 1])})")
    return out


# -- text format -----------------------------------------------------------

HEADER = "cspath v1"


def format_instance(inst: ProblemInstance) -> str:
    g = inst.graph
    e = g.edges()
    buf = io.StringIO()
    buf.write(f"{HEADER}\n")
    if inst.name:
        buf.write(f"# {inst.name}\n")
    buf.write(f"n {g.n_vertices} m {g.n_edges} M {inst.budget}\n")
    buf.write("A " + " ".join(map(str, inst.sources)) + "\n")
    buf.write("B " + " ".join(map(str, inst.targets)) + "\n")
    for u, v, a, b in e.tolist():
        buf.write(f"e {u} {v} {a} {b}\n")
    return buf.getvalue()


def parse_instance(text: str, name: str = "") -> ProblemInstance:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or lines[0] != HEADER:
        raise InstanceFormatError(f"missing '{HEADER}' header")
    try:
        head = lines[1].split()
        if len(head) != 6 or head[0::2] != ["n", "m", "M"]:
            raise InstanceFormatError(f"bad size line: {lines[1]!r}")
        n, m, budget = (int(x) for x in head[1::2])
        a_line, b_line = lines[2].split(), lines[3].split()
        if a_line[0] != "A" or b_line[0] != "B":
            raise InstanceFormatError("expected 'A ...' then 'B ...' lines")
        sources = [int(x) for x in a_line[1:]]
        targets = [int(x) for x in b_line[1:]]
        rows = []
        for line in lines[4:]:
            parts = line.split()
            if parts[0] != "e" or len(parts) != 5:
                raise InstanceFormatError(f"bad edge line: {line!r}")
            rows.append([int(x) for x in parts[1:]])
    except (IndexError, ValueError) as exc:
        if isinstance(exc, InstanceFormatError):
            raise
        raise InstanceFormatError(str(exc)) from exc
    if len(rows) != m:
        raise InstanceFormatError(f"header says m={m} but {len(rows)} edge lines follow")
    graph = build_graph(n, rows)
    return ProblemInstance(graph, sources, targets, budget, name=name)


def write_instance(inst: ProblemInstance, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_instance(inst))


def read_instance(path: str | os.PathLike) -> ProblemInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read(), name=os.path.basename(str(path)))


def instance_from_edges(
    n: int,
    edges: Sequence[Sequence[int]],
    sources: Iterable[int],
    targets: Iterable[int],
    budget: int,
    name: str = "",
) -> ProblemInstance:
    return ProblemInstance(build_graph(n, edges), tuple(sources), tuple(targets), budget, name=name)
