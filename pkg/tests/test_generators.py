import numpy as np
import pytest
from fractions import Fraction

from cspath.generators import (
    FRACTAL_ALPHA,
    BadSpec,
    FractalSpec,
    GridSpec,
    fractal_expected_count,
    fractal_fast_edges,
    gen_fractal,
    gen_grid,
    gen_speedway,
    lattice,
    mechanism_fixtures,
    parse_rule,
    speedway_active_set,
    worked_example,
)
from cspath.graph import format_instance, infinite_budget


def test_parse_rule():
    assert parse_rule("const:3") == ("const", 3)
    assert parse_rule("uniform:1:5") == ("uniform", 1, 5)
    assert parse_rule("bernoulli:0.25")[0] == "bernoulli"
    for bad in ["const:0", "uniform:5:1", "bernoulli:1.5", "gauss:1", "const"]:
        with pytest.raises(BadSpec):
            parse_rule(bad)


@pytest.mark.parametrize("side, n, m", [(3, 27, 54), (20, 8000, 22800), (100, 1_000_000, 2_970_000)])
def test_cube_counts(side, n, m):
    coords, pairs = lattice((side,) * 3)
    assert coords.shape[0] == n and pairs.shape[0] == m == 3 * side * side * (side - 1)


def test_grid_is_seeded():
    spec = GridSpec((6, 7), "uniform:1:5", "uniform:1:5", "boundary", "center_floor", seed=4, M=20)
    assert format_instance(gen_grid(spec)) == format_instance(gen_grid(spec))
    other = GridSpec((6, 7), "uniform:1:5", "uniform:1:5", "boundary", "center_floor", seed=5, M=20)
    assert format_instance(gen_grid(other)) != format_instance(gen_grid(spec))


def test_grid_roles():
    inst = gen_grid(GridSpec((5, 5), B_rule="center"))
    assert inst.targets == (12,)
    assert len(inst.sources) == 16
    assert inst.budget == infinite_budget(inst.graph)
    with pytest.raises(BadSpec, match="center_floor"):
        gen_grid(GridSpec((4, 4), B_rule="center"))
    assert gen_grid(GridSpec((4, 4, 4), B_rule="center_floor")).targets == (2 * 16 + 2 * 4 + 2,)


def test_grid_bernoulli_values():
    inst = gen_grid(GridSpec((10, 10), f1_rule="bernoulli:0.5", B_rule="center_floor", seed=1))
    assert set(np.unique(inst.graph.f1).tolist()) == {1, 2}


def test_speedway_layout():
    inst = gen_speedway(6)
    xy = inst.coords
    assert xy[:, 0].min() == -6 and xy[:, 1].max() == 6
    fast = inst.graph.f1 == 1
    s, e = inst.graph.start[fast], inst.graph.end[fast]
    assert (xy[s, 0] == 0).all() and (xy[e, 0] == 0).all()
    assert set(inst.graph.f1.tolist()) == {1, 2}
    assert all(xy[a, 1] == 0 for a in inst.sources)


def test_speedway_formula_small():
    pts = speedway_active_set(5, n=10)
    assert {(0, 5), (0, 4), (1, 3), (-1, 3), (2, 2), (-2, 2)} <= pts
    assert (3, 2) in pts and (1, 2) not in pts


def test_fractal_levels_nested():
    levels = fractal_fast_edges(4)
    assert len(levels) == 4
    for a, b in zip(levels, levels[1:]):
        assert a < b
    inst, insts = gen_fractal(FractalSpec(3))
    assert len(insts) == 3 and insts[-1] is inst
    assert (inst.graph.f1 == 1).sum() > (insts[0].graph.f1 == 1).sum()


def test_fractal_level_one_shape():
    t = 8
    lvl1 = fractal_fast_edges(3)[0]
    pts = set().union(*lvl1)
    assert (0, t) in pts and (-t // 2, 0) in pts and (t // 2, 0) in pts
    assert all(abs(x) <= t // 2 for x, _ in pts)


def test_fractal_expected():
    assert fractal_expected_count(3) == Fraction(32, 5)
    with pytest.raises(ValueError):
        fractal_expected_count(3, 10)
    assert FRACTAL_ALPHA == pytest.approx(0.3847, abs=1e-4)


def test_fixtures_are_valid():
    fx = mechanism_fixtures()
    assert [f.name for f in fx] == ["first-arrival", "re-source", "release", "phantom"]
    for f in fx:
        assert f.instance.budget == 19 and f.checkpoints
    assert worked_example().graph.n_vertices == 12
