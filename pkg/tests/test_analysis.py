import io
import json

import pytest

from cspath.analysis import (
    active_points,
    ball_boundary,
    bench,
    bench_json,
    first_passage_times,
    format_bench_table,
    simulate_to,
    trace_run,
    window_count,
    write_bench_csv,
    write_trace_csv,
)
from cspath.engine import SolverConfig, init_state, run, run_cycle
from cspath.generators import GridSpec, gen_grid, gen_speedway, speedway_active_set, worked_example


def test_trace_rows_sum_to_clock():
    inst = worked_example()
    rows = trace_run(inst)
    outcome, state = run(inst)
    assert len(rows) == state.cycles
    assert sum(r.delta for r in rows) == rows[-1].t == outcome.F1


def test_trace_csv_format():
    buf = io.StringIO()
    rows = trace_run(worked_example(), SolverConfig(time_mode="unit"))
    write_trace_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# cspath trace format 1"
    assert lines[1] == "t,delta,active_vertices,active_edges,phantoms,triggered"
    assert len(lines) == 2 + len(rows)
    assert all(line.split(",")[1] == "1" for line in lines[2:])


def test_simulate_to_requires_unit_mode():
    with pytest.raises(ValueError):
        simulate_to(gen_speedway(8), 3, SolverConfig(time_mode="jump"))


def test_speedway_active_set_is_ball_boundary():
    # the frontier is exactly the set of reached vertices with an unreached
    # neighbour, checked against an independent Dijkstra at every clock; from
    # T = 2 on, since source-to-source edges (time 2 on y = 0) carry water until then
    n = 80
    inst = gen_speedway(n)
    tau = first_passage_times(inst)
    state = init_state(inst, SolverConfig(time_mode="unit"))
    for T in range(1, 41):
        assert run_cycle(state) is None
        if T >= 2:
            assert active_points(state) == ball_boundary(inst, T, tau), T


def test_speedway_closed_form_misses_late_frontier_points():
    # (1, 5) is reached at 7 via (0, 5); its neighbour (2, 5) only at 9
    inst = gen_speedway(20)
    tau = first_passage_times(inst)
    assert tau[inst.vertex_at(1, 5)] == 7 and tau[inst.vertex_at(2, 5)] == 9
    assert (1, 5) in active_points(simulate_to(inst, 8))
    assert (1, 5) not in speedway_active_set(8, 20)


def test_first_passage_times_on_speedway():
    inst = gen_speedway(10)
    tau = first_passage_times(inst)
    assert tau[inst.vertex_at(0, 7)] == 7
    assert tau[inst.vertex_at(3, 4)] == 8
    assert tau[inst.vertex_at(-9, 4)] == 8


def test_window_count():
    state = simulate_to(gen_speedway(12), 4)
    assert window_count(state) == sum(1 for x, _ in active_points(state) if abs(x) <= 4)
    assert window_count(state, 12) == len(active_points(state))


def test_bench_small():
    rows = bench([8, 10], repeats=1, warmup=False)
    assert [r.graph for r in rows] == ["8x8x8", "10x10x10"]
    assert rows[0].vertices == 512 and rows[0].edges == 3 * 64 * 7
    assert all(r.F1 is not None and r.cycles >= 1 and r.peak_active_vertices > 0 for r in rows)
    table = format_bench_table(rows).splitlines()
    assert table[0].startswith("| Graph | CPU time (s) |") and len(table) == 4
    buf = io.StringIO()
    write_bench_csv(rows, buf)
    assert buf.getvalue().startswith("# cspath bench format 1\ngraph,vertices,edges,wall_time")
    assert json.loads(bench_json(rows))["format"] == 1


def test_bench_matches_plain_first_passage():
    spec = GridSpec((9, 9, 9), "bernoulli:0.5", "const:1", "boundary", "center_floor", seed=0)
    inst = gen_grid(spec)
    (row,) = bench([9], repeats=1, warmup=False)
    assert row.F1 == int(first_passage_times(inst)[inst.targets[0]])


def test_bench_rejects_tiny_cube():
    with pytest.raises(ValueError):
        bench([4])
