"""Frontier label-correcting engine.

Water of quality ``M`` starts at every source vertex.  Crossing an edge
takes ``f1`` time units and costs ``f2`` quality; water whose quality hits
zero is discarded.  The first clock value at which a target receives water
of positive quality is the minimum travel time over paths of weight < M.

Each cycle runs nine bulk steps over flat arrays.  A step is a map over an
index range (active edges, triggered vertices, ...) split into ``workers``
contiguous slots; a slot writes only to elements it owns or to its own
output buffer, and buffers are concatenated in slot order and then sorted
and deduplicated.  Outcomes and traces therefore do not depend on the
worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .graph import Graph, ProblemInstance, validate_instance

__all__ = [
    "PASSIVE",
    "ACTIVE",
    "USED",
    "JUST_USED",
    "INACTIVE",
    "EMPTY",
    "InvalidInstance",
    "SolverConfig",
    "PhantomRecord",
    "VertexRecord",
    "HalfEdgeRecord",
    "Reached",
    "Infeasible",
    "BudgetExceeded",
    "SolverState",
    "init_state",
    "step1_advance_time",
    "step2_analyze_triggered",
    "step3_advance_phantoms",
    "step4_trigger_edges",
    "step5_process_triggered_edges",
    "step6_check_termination",
    "step7_finalize_phantoms",
    "step8_finalize_vertices",
    "step9_finalize_edges",
    "run_cycle",
    "solve",
    "active_counts",
    "check_invariants",
]

# half-edge status
PASSIVE, ACTIVE, USED, JUST_USED = 0, 1, 2, 3
# vertex status
INACTIVE = 0
# empty temporary label
EMPTY = -1

_I = np.int64
_NONE = np.empty(0, dtype=_I)


class InvalidInstance(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """``time_mode='unit'`` advances the clock by one per cycle; ``'jump'``
    advances it to the next arrival.  ``reach_only=None`` switches to pure
    first-passage labels when the budget can never bind."""

    time_mode: str = "jump"
    cycle_budget: int | None = None
    trace: bool = False
    workers: int = 1
    reach_only: bool | None = None

    def __post_init__(self):
        if self.time_mode not in ("unit", "jump"):
            raise ValueError(f"time_mode must be 'unit' or 'jump', got {self.time_mode!r}")
        if self.cycle_budget is not None and self.cycle_budget < 1:
            raise ValueError("cycle_budget must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class PhantomRecord:
    source: int
    destination: int
    label: int
    remaining_time: int
    underlying: int


@dataclass(frozen=True)
class VertexRecord:
    name: int
    label: int
    status: int
    first_edge: int | None
    temp_label: int


@dataclass(frozen=True)
class HalfEdgeRecord:
    start: int
    end: int
    remaining_time: int
    weight: int
    initial_time: int
    flow_label: int
    status: int
    twin: int


@dataclass(frozen=True)
class Reached:
    F1: int
    F2: int
    terminal: int
    arrival_origin: int
    arrival_edge: int
    via_phantom: bool = False

    status = "reached"


@dataclass(frozen=True)
class Infeasible:
    t: int

    status = "infeasible"


@dataclass(frozen=True)
class BudgetExceeded:
    t: int
    cycles: int

    status = "budget_exceeded"


SolveOutcome = Reached | Infeasible | BudgetExceeded


def _slots(n: int, workers: int) -> Iterator[tuple[int, int]]:
    q, r = divmod(n, workers)
    lo = 0
    for w in range(workers):
        hi = lo + q + (1 if w < r else 0)
        if hi > lo:
            yield lo, hi
        lo = hi


def _cat(parts: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate(parts) if parts else _NONE


def _desc(a: np.ndarray) -> np.ndarray:
    return np.unique(a)[::-1].copy()


@dataclass(eq=False)
class SolverState:
    inst: ProblemInstance
    cfg: SolverConfig
    reach_only: bool
    t: int
    label: np.ndarray
    vstatus: np.ndarray
    temp: np.ndarray
    temp_origin: np.ndarray
    temp_edge: np.ndarray
    temp_phantom: np.ndarray
    estatus: np.ndarray
    remaining: np.ndarray
    flow_label: np.ndarray
    active_vertices: np.ndarray
    active_edges: np.ndarray
    is_target: np.ndarray
    triggered_vertices: np.ndarray = field(default_factory=lambda: _NONE)
    triggered_edges: np.ndarray = field(default_factory=lambda: _NONE)
    accepted: np.ndarray = field(default_factory=lambda: _NONE)
    just_used: np.ndarray = field(default_factory=lambda: _NONE)
    p_source: np.ndarray = field(default_factory=lambda: _NONE)
    p_dest: np.ndarray = field(default_factory=lambda: _NONE)
    p_label: np.ndarray = field(default_factory=lambda: _NONE)
    p_remaining: np.ndarray = field(default_factory=lambda: _NONE)
    p_edge: np.ndarray = field(default_factory=lambda: _NONE)
    cycles: int = 0
    last_delta: int = 0
    n_triggered: int = 0
    trace: list = field(default_factory=list)

    @property
    def graph(self) -> Graph:
        return self.inst.graph

    @property
    def workers(self) -> int:
        return self.cfg.workers

    @property
    def n_phantoms(self) -> int:
        return int(self.p_remaining.shape[0])

    def bulk(self, items: np.ndarray, fn: Callable[[np.ndarray], tuple]) -> list:
        """Run ``fn`` on each worker slot of ``items``; return per-slot outputs in slot order."""
        return [fn(items[lo:hi]) for lo, hi in _slots(items.shape[0], self.workers)]

    def improves(self, cand: np.ndarray, current: np.ndarray) -> np.ndarray:
        """Whether water of quality ``cand`` is worth delivering where ``current`` is held."""
        if self.reach_only:
            return (current <= 0) & (cand > 0)
        return (cand > current) & (cand > 0)

    def phantoms(self) -> list[PhantomRecord]:
        return [
            PhantomRecord(*map(int, row))
            for row in zip(self.p_source, self.p_dest, self.p_label, self.p_remaining, self.p_edge)
        ]

    def vertex_record(self, v: int) -> VertexRecord:
        return VertexRecord(
            name=v,
            label=int(self.label[v]),
            status=int(self.vstatus[v]),
            first_edge=self.graph.first_edge(v),
            temp_label=int(self.temp[v]),
        )

    def half_edge_record(self, h: int) -> HalfEdgeRecord:
        g = self.graph
        return HalfEdgeRecord(
            start=int(g.start[h]),
            end=int(g.end[h]),
            remaining_time=int(self.remaining[h]),
            weight=int(g.weight[h]),
            initial_time=int(g.f1[h]),
            flow_label=int(self.flow_label[h]),
            status=int(self.estatus[h]),
            twin=int(g.twin[h]),
        )

    def active_vertex_set(self) -> set[int]:
        return set(self.active_vertices.tolist())

    def _add_phantoms(self, src, dst, lab, rem, edge) -> None:
        self.p_source = np.concatenate([self.p_source, src])
        self.p_dest = np.concatenate([self.p_dest, dst])
        self.p_label = np.concatenate([self.p_label, lab])
        self.p_remaining = np.concatenate([self.p_remaining, rem])
        self.p_edge = np.concatenate([self.p_edge, edge])

    def _keep_phantoms(self, mask: np.ndarray) -> None:
        self.p_source = self.p_source[mask]
        self.p_dest = self.p_dest[mask]
        self.p_label = self.p_label[mask]
        self.p_remaining = self.p_remaining[mask]
        self.p_edge = self.p_edge[mask]


def init_state(inst: ProblemInstance, cfg: SolverConfig | None = None) -> SolverState:
    cfg = cfg or SolverConfig()
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstance("; ".join(problems))
    g = inst.graph
    n, m2 = g.n_vertices, g.n_half_edges
    M = inst.budget
    sources = np.asarray(inst.sources, dtype=_I)

    label = np.zeros(n, dtype=_I)
    vstatus = np.zeros(n, dtype=np.int8)
    label[sources] = M
    vstatus[sources] = ACTIVE
    is_source = np.zeros(n, dtype=bool)
    is_source[sources] = True
    is_target = np.zeros(n, dtype=bool)
    is_target[list(inst.targets)] = True

    estatus = np.zeros(m2, dtype=np.int8)
    remaining = np.zeros(m2, dtype=_I)
    flow_label = np.zeros(m2, dtype=_I)
    out, _ = g.expand(sources)
    # source-source edges: only the copy leaving the smaller id carries water
    keep = ~is_source[g.end[out]] | (g.start[out] < g.end[out])
    out = out[keep]
    estatus[out] = ACTIVE
    remaining[out] = g.f1[out]
    flow_label[out] = M

    reach_only = inst.unconstrained if cfg.reach_only is None else cfg.reach_only
    return SolverState(
        inst=inst,
        cfg=cfg,
        reach_only=bool(reach_only),
        t=0,
        label=label,
        vstatus=vstatus,
        temp=np.full(n, EMPTY, dtype=_I),
        temp_origin=np.full(n, -1, dtype=_I),
        temp_edge=np.full(n, -1, dtype=_I),
        temp_phantom=np.zeros(n, dtype=bool),
        estatus=estatus,
        remaining=remaining,
        flow_label=flow_label,
        active_vertices=sources[::-1].copy(),
        active_edges=_desc(out),
        is_target=is_target,
    )


def step1_advance_time(state: SolverState) -> int:
    """Advance the clock and mark arrivals on regular edges."""
    g = state.graph
    ae = state.active_edges
    if state.cfg.time_mode == "unit":
        delta = 1
    else:
        mins = []
        if ae.size:
            mins.append(int(state.remaining[ae].min()))
        if state.p_remaining.size:
            mins.append(int(state.p_remaining.min()))
        delta = min(mins) if mins else 1

    def advance(chunk):
        rem = state.remaining[chunk] - delta
        state.remaining[chunk] = rem
        done = chunk[rem == 0]
        state.estatus[done] = JUST_USED
        return done

    arrived = _cat(state.bulk(ae, advance))
    state.just_used = np.sort(arrived)
    state.triggered_vertices = np.unique(g.end[arrived])
    if state.p_remaining.size:
        state.p_remaining = state.p_remaining - delta
    state.t += delta
    state.last_delta = delta
    return delta


def step2_analyze_triggered(state: SolverState) -> None:
    """Best candidate label over just-used edges entering each triggered vertex."""
    g = state.graph

    def analyze(chunk):
        out, owner = g.expand(chunk)
        inn = g.twin[out]
        hit = state.estatus[inn] == JUST_USED
        inn, owner = inn[hit], owner[hit]
        cand = state.flow_label[inn] - g.weight[inn]
        order = np.lexsort((inn, -cand, owner))
        inn, owner, cand = inn[order], owner[order], cand[order]
        first = np.ones(owner.shape[0], dtype=bool)
        first[1:] = owner[1:] != owner[:-1]
        q = chunk[owner[first]]
        state.temp[q] = cand[first]
        state.temp_origin[q] = g.start[inn[first]]
        state.temp_edge[q] = inn[first]
        state.temp_phantom[q] = False

    state.bulk(state.triggered_vertices, analyze)


def step3_advance_phantoms(state: SolverState) -> None:
    """Deliver phantom arrivals into the triggered-vertex pipeline."""
    if not state.p_remaining.size:
        return
    g = state.graph
    idx = np.flatnonzero(state.p_remaining == 0)

    def arrive(chunk):
        dst = state.p_dest[chunk]
        cand = state.p_label[chunk] - g.weight[state.p_edge[chunk]]
        ok = state.improves(cand, state.label[dst])
        return chunk[ok], dst[ok], cand[ok]

    parts = state.bulk(idx, arrive)
    if not parts:
        return
    pid, dst, cand = (_cat(p) for p in zip(*parts))
    if not pid.size:
        return
    # several phantoms may land on one vertex in the same cycle: keep the best
    order = np.lexsort((pid, -cand, dst))
    pid, dst, cand = pid[order], dst[order], cand[order]
    first = np.ones(dst.shape[0], dtype=bool)
    first[1:] = dst[1:] != dst[:-1]
    pid, dst, cand = pid[first], dst[first], cand[first]
    better = cand > state.temp[dst]
    pid, dst, cand = pid[better], dst[better], cand[better]
    state.temp[dst] = cand
    state.temp_origin[dst] = state.p_source[pid]
    state.temp_edge[dst] = state.p_edge[pid]
    state.temp_phantom[dst] = True
    state.triggered_vertices = np.union1d(state.triggered_vertices, dst)


def _accepted(state: SolverState) -> np.ndarray:
    tv = state.triggered_vertices
    return tv[state.improves(state.temp[tv], state.label[tv])]


def step4_trigger_edges(state: SolverState) -> None:
    """Select edges along which an improved vertex can improve a neighbour.

    In-flight flows into an improved vertex that can no longer improve it
    are dropped here as well.
    """
    g = state.graph
    state.accepted = acc = _accepted(state)
    state.n_triggered = int(acc.shape[0])

    def trigger(chunk):
        out, owner = g.expand(chunk)
        best = state.temp[chunk][owner]
        far = g.end[out]
        cand = best - g.weight[out]
        current = np.maximum(state.label[far], state.temp[far])
        fired = out[state.improves(cand, current)]
        back = g.twin[out]
        live = state.estatus[back] == ACTIVE
        arriving = state.flow_label[back] - g.weight[back]
        stale = back[live & ~state.improves(arriving, best)]
        state.estatus[stale] = PASSIVE
        state.remaining[stale] = 0
        state.flow_label[stale] = 0
        return fired

    state.triggered_edges = np.sort(_cat(state.bulk(acc, trigger)))


def step5_process_triggered_edges(state: SolverState) -> None:
    """Start the flow on each triggered edge, or add a phantom if its source
    was already sourcing water."""
    g = state.graph

    def treat(chunk):
        src = g.start[chunk]
        was_active = state.vstatus[src] != INACTIVE
        fresh = chunk[~was_active]
        state.estatus[fresh] = ACTIVE
        state.remaining[fresh] = g.f1[fresh]
        state.flow_label[fresh] = state.temp[g.start[fresh]]
        back = g.twin[fresh]
        back = back[state.estatus[back] == ACTIVE]
        state.estatus[back] = PASSIVE
        state.remaining[back] = 0
        state.flow_label[back] = 0
        ph = chunk[was_active]
        s = g.start[ph]
        lab = np.maximum(state.label[s], state.temp[s])
        return s, g.end[ph], lab, g.f1[ph], ph

    parts = state.bulk(state.triggered_edges, treat)
    if parts:
        cols = [_cat(c) for c in zip(*parts)]
        if cols[0].size:
            state._add_phantoms(*cols)


def step6_check_termination(state: SolverState) -> Reached | Infeasible | None:
    acc = state.accepted
    hits = acc[state.is_target[acc]]
    if hits.size:
        q = state.temp[hits]
        b = int(hits[np.lexsort((hits, -q))[0]])
        return Reached(
            F1=state.t,
            F2=state.inst.budget - int(state.temp[b]),
            terminal=b,
            arrival_origin=int(state.temp_origin[b]),
            arrival_edge=int(state.temp_edge[b]),
            via_phantom=bool(state.temp_phantom[b]),
        )
    live = (
        bool((state.estatus[state.active_edges] == ACTIVE).any())
        or bool((state.estatus[state.triggered_edges] == ACTIVE).any())
        or bool((state.p_remaining > 0).any())
    )
    return None if live else Infeasible(state.t)


def step7_finalize_phantoms(state: SolverState) -> None:
    if state.p_remaining.size:
        state._keep_phantoms(state.p_remaining > 0)


def step8_finalize_vertices(state: SolverState) -> None:
    g = state.graph
    acc = state.accepted
    fresh = acc[state.vstatus[acc] == INACTIVE]
    state.label[fresh] = state.temp[fresh]
    state.vstatus[fresh] = ACTIVE
    tv = state.triggered_vertices
    state.temp[tv] = EMPTY
    state.temp_origin[tv] = -1
    state.temp_edge[tv] = -1
    state.temp_phantom[tv] = False
    merged = np.union1d(state.active_vertices, fresh)

    def still_active(chunk):
        out, owner = g.expand(chunk)
        busy = np.bincount(
            owner, weights=state.estatus[out] == ACTIVE, minlength=chunk.shape[0]
        )
        idle = chunk[busy == 0]
        state.vstatus[idle] = INACTIVE
        return chunk[busy > 0]

    state.active_vertices = _cat(state.bulk(merged, still_active))[::-1].copy()


def step9_finalize_edges(state: SolverState) -> None:
    merged = np.union1d(state.active_edges, state.triggered_edges)
    ju = state.just_used
    ju = ju[state.estatus[ju] == JUST_USED]
    state.estatus[ju] = USED
    state.flow_label[ju] = 0

    def keep(chunk):
        return chunk[state.estatus[chunk] == ACTIVE]

    state.active_edges = _cat(state.bulk(merged, keep))[::-1].copy()
    state.triggered_vertices = _NONE
    state.triggered_edges = _NONE
    state.accepted = _NONE
    state.just_used = _NONE


def active_counts(state: SolverState) -> tuple[int, int, int]:
    return (
        int(state.active_vertices.shape[0]),
        int(state.active_edges.shape[0]),
        state.n_phantoms,
    )


def run_cycle(state: SolverState) -> Reached | Infeasible | None:
    """One full cycle; ``None`` means keep going."""
    delta = step1_advance_time(state)
    step2_analyze_triggered(state)
    step3_advance_phantoms(state)
    step4_trigger_edges(state)
    step5_process_triggered_edges(state)
    verdict = step6_check_termination(state)
    step7_finalize_phantoms(state)
    step8_finalize_vertices(state)
    step9_finalize_edges(state)
    state.cycles += 1
    if state.cfg.trace:
        state.trace.append((state.t, delta, *active_counts(state), state.n_triggered))
    return verdict


def run(inst: ProblemInstance, cfg: SolverConfig | None = None) -> tuple[SolveOutcome, SolverState]:
    cfg = cfg or SolverConfig()
    state = init_state(inst, cfg)
    while True:
        if cfg.cycle_budget is not None and state.cycles >= cfg.cycle_budget:
            return BudgetExceeded(state.t, state.cycles), state
        verdict = run_cycle(state)
        if verdict is not None:
            return verdict, state


def solve(inst: ProblemInstance, cfg: SolverConfig | None = None) -> SolveOutcome:
    return run(inst, cfg)[0]


def check_invariants(state: SolverState) -> list[str]:
    """Between-cycle hygiene checks; returns a list of violated rules."""
    g = state.graph
    out = []
    av, ae = state.active_vertices, state.active_edges
    for name, seq in (("active_vertices", av), ("active_edges", ae)):
        if seq.size > 1 and not (np.diff(seq) < 0).all():
            out.append(f"{name} not strictly descending")
    if set(av.tolist()) != set(np.flatnonzero(state.vstatus == ACTIVE).tolist()):
        out.append("active_vertices does not mirror vertex status")
    if set(ae.tolist()) != set(np.flatnonzero(state.estatus == ACTIVE).tolist()):
        out.append("active_edges does not mirror edge status")
    if (state.temp != EMPTY).any():
        out.append("temp labels not empty")
    if state.triggered_vertices.size or state.triggered_edges.size:
        out.append("triggered buffers not empty")
    if (state.label < 0).any() or (state.label > state.inst.budget).any():
        out.append("label outside [0, M]")
    act = state.estatus == ACTIVE
    if (act & act[g.twin]).any():
        out.append("edge active in both directions")
    if ((state.remaining[act] <= 0) | (state.remaining[act] > g.f1[act])).any():
        out.append("active remaining time outside (0, f1]")
    if (state.remaining[state.estatus == USED] != 0).any():
        out.append("used edge with remaining time")
    if (state.p_label <= 0).any():
        out.append("phantom with non-positive label")
    if state.p_remaining.size and (state.p_remaining > g.f1[state.p_edge]).any():
        out.append("phantom remaining time above f1")
    return out
