"""Active-set instrumentation, frontier measurements and the cube benchmark."""

from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import asdict, dataclass
from typing import Iterable, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .engine import Reached, SolverConfig, SolverState, active_counts, init_state, run_cycle
from .generators import FractalSpec, GridSpec, fractal_expected_count, gen_fractal, gen_grid
from .graph import ProblemInstance

__all__ = [
    "CycleStats",
    "trace_run",
    "write_trace_csv",
    "simulate_to",
    "active_points",
    "window_count",
    "first_passage_times",
    "ball_boundary",
    "FractalRow",
    "fractal_level_counts",
    "measure_fractal",
    "BenchRow",
    "bench",
    "format_bench_table",
    "write_bench_csv",
    "bench_json",
]

TRACE_COLUMNS = ("t", "delta", "active_vertices", "active_edges", "phantoms", "triggered")


@dataclass(frozen=True)
class CycleStats:
    t: int
    delta: int
    active_vertices: int
    active_edges: int
    phantoms: int
    triggered: int
    N_t: int | None = None


def window_count(state: SolverState, t: int | None = None) -> int:
    """Active vertices with |x| <= t (x = first coordinate)."""
    t = state.t if t is None else t
    xy = state.inst.coords
    if xy is None:
        raise ValueError("instance has no coordinates")
    return int((np.abs(xy[state.active_vertices, 0]) <= t).sum())


def trace_run(inst: ProblemInstance, cfg: SolverConfig | None = None, window: bool = False) -> list[CycleStats]:
    """One row per cycle until the solve terminates."""
    cfg = cfg or SolverConfig()
    state = init_state(inst, cfg)
    rows = []
    while True:
        if cfg.cycle_budget is not None and state.cycles >= cfg.cycle_budget:
            break
        verdict = run_cycle(state)
        nv, ne, nph = active_counts(state)
        rows.append(
            CycleStats(
                state.t, state.last_delta, nv, ne, nph, state.n_triggered,
                window_count(state) if window else None,
            )
        )
        if verdict is not None:
            break
    return rows


def write_trace_csv(rows: Iterable[CycleStats], fh: TextIO) -> None:
    fh.write("# cspath trace format 1\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for r in rows:
        w.writerow([getattr(r, c) for c in TRACE_COLUMNS])


def simulate_to(inst: ProblemInstance, T: int, cfg: SolverConfig | None = None) -> SolverState:
    """State after the cycle ending at clock ``T`` (unit time steps)."""
    cfg = cfg or SolverConfig(time_mode="unit")
    if cfg.time_mode != "unit":
        raise ValueError("simulate_to needs unit time steps to stop exactly at T")
    state = init_state(inst, cfg)
    while state.t < T:
        if run_cycle(state) is not None and state.t < T:
            raise RuntimeError(f"solve terminated at t={state.t} before T={T}")
    return state


def active_points(state: SolverState) -> set[tuple[int, ...]]:
    xy = state.inst.coords
    return {tuple(p) for p in xy[state.active_vertices].tolist()}


def first_passage_times(inst: ProblemInstance) -> np.ndarray:
    """Earliest arrival time at every vertex from the sources, ignoring weights."""
    g = inst.graph
    mat = csr_matrix((g.f1.astype(float), (g.start, g.end)), shape=(g.n_vertices,) * 2)
    return dijkstra(mat, directed=True, indices=list(inst.sources), min_only=True)


def ball_boundary(inst: ProblemInstance, T: int, tau: np.ndarray | None = None) -> set[tuple[int, ...]]:
    """Vertices reached by time T that still have an unreached neighbour."""
    g = inst.graph
    tau = first_passage_times(inst) if tau is None else tau
    inside = tau <= T
    edge_out = inside[g.start] & ~inside[g.end]
    ids = np.unique(g.start[edge_out])
    return {tuple(p) for p in inst.coords[ids].tolist()}


@dataclass(frozen=True)
class FractalRow:
    k: int
    t: int
    N_t: int
    expected: float
    ratio: float


def fractal_level_counts(k: int) -> list[int]:
    """N_t(omega_j) for j = 1..k at t = 2**k."""
    spec = FractalSpec(k)
    _, levels = gen_fractal(spec)
    return [window_count(simulate_to(inst, spec.t)) for inst in levels]


def measure_fractal(k_range: Iterable[int]) -> list[FractalRow]:
    rows = []
    for k in k_range:
        if k > 7:
            raise ValueError("k above 7 is not supported (t <= 128)")
        spec = FractalSpec(k)
        inst, _ = gen_fractal(spec)
        n_t = window_count(simulate_to(inst, spec.t))
        expected = float(fractal_expected_count(k))
        rows.append(FractalRow(k, spec.t, n_t, expected, n_t / expected))
    return rows


@dataclass(frozen=True)
class BenchRow:
    graph: str
    vertices: int
    edges: int
    wall_time: float
    cycles: int
    F1: int | None
    peak_active_vertices: int
    peak_active_edges: int
    peak_phantoms: int


def _timed_solve(inst: ProblemInstance, cfg: SolverConfig):
    state = init_state(inst, cfg)
    t0 = time.perf_counter()
    while True:
        verdict = run_cycle(state)
        if verdict is not None:
            break
    return time.perf_counter() - t0, verdict, state


def bench(
    cube_sides: Iterable[int],
    cfg: SolverConfig | None = None,
    repeats: int = 3,
    warmup: bool = True,
    seed: int = 0,
    p: float = 0.5,
) -> list[BenchRow]:
    """Boundary-to-centre solves on s^3 cubes with passage times in {1, 2}.

    Reports the median wall time of ``repeats`` timed solves; the optional
    warm-up solve is not timed.
    """
    cfg = cfg or SolverConfig()
    cfg = SolverConfig(cfg.time_mode, None, True, cfg.workers, cfg.reach_only)
    rows = []
    for side in cube_sides:
        if side < 8:
            raise ValueError(f"cube side {side} below 8")
        spec = GridSpec((side,) * 3, f1_rule=f"bernoulli:{p}", f2_rule="const:1",
                        A_rule="boundary", B_rule="center_floor", seed=seed)
        inst = gen_grid(spec)
        if warmup:
            _timed_solve(inst, cfg)
        times = []
        for _ in range(repeats):
            dt, verdict, state = _timed_solve(inst, cfg)
            times.append(dt)
        peaks = np.asarray(state.trace)[:, 2:5].max(axis=0) if state.trace else np.zeros(3, int)
        rows.append(
            BenchRow(
                graph=f"{side}x{side}x{side}",
                vertices=inst.graph.n_vertices,
                edges=inst.graph.n_edges,
                wall_time=statistics.median(times),
                cycles=state.cycles,
                F1=verdict.F1 if isinstance(verdict, Reached) else None,
                peak_active_vertices=int(peaks[0]),
                peak_active_edges=int(peaks[1]),
                peak_phantoms=int(peaks[2]),
            )
        )
    return rows


def format_bench_table(rows: Iterable[BenchRow]) -> str:
    lines = [
        "| Graph | CPU time (s) | cycles | F1 | peak active vertices | vertices |",
        "|---|---|---|---|---|---|",
    ]
    for r in rows:
        lines.append(
            f"| {r.graph} | {r.wall_time:.3f} | {r.cycles} | {r.F1} | {r.peak_active_vertices} | {r.vertices} |"
        )
    return "\n".join(lines)


def write_bench_csv(rows: Iterable[BenchRow], fh: TextIO) -> None:
    fh.write("# cspath bench format 1\n")
    w = csv.writer(fh, lineterminator="\n")
    cols = list(BenchRow.__dataclass_fields__)
    w.writerow(cols)
    for r in rows:
        w.writerow([getattr(r, c) for c in cols])


def bench_json(rows: Iterable[BenchRow]) -> str:
    return json.dumps({"format": 1, "rows": [asdict(r) for r in rows]}, sort_keys=True)
