import json

import pytest
from hypothesis import given

from cspath.engine import Infeasible, solve
from cspath.graph import build_graph, ProblemInstance, instance_from_edges
from cspath.oracle import (
    InstanceTooLarge,
    SearchSpaceTooLarge,
    compare,
    dp_constrained_shortest,
    enumerate_paths,
)
from strategies import small_instances


def test_dp_tiny():
    edges = [(0, 1, 1, 9), (1, 3, 1, 9), (0, 2, 5, 1), (2, 3, 5, 1)]
    res = dp_constrained_shortest(instance_from_edges(4, edges, [0], [3], 18))
    assert (res.F1, res.F2, res.path) == (10, 2, (0, 2, 3))
    assert res.feasible


def test_dp_infeasible():
    res = dp_constrained_shortest(instance_from_edges(2, [(0, 1, 1, 4)], [0], [1], 4))
    assert not res.feasible and res.path == ()


@given(small_instances())
def test_dp_equals_enumeration(inst):
    a, b = dp_constrained_shortest(inst), enumerate_paths(inst)
    assert a.F1 == b.F1


def test_guards():
    g = build_graph(2, [(0, 1, 1, 1)])
    with pytest.raises(InstanceTooLarge):
        dp_constrained_shortest(ProblemInstance(g, [0], [1], 10**8))
    pairs = [(i, i + 1, 1, 1) for i in range(19)]
    big = instance_from_edges(20, pairs, [0], [19], 30)
    with pytest.raises(SearchSpaceTooLarge):
        enumerate_paths(big)
    assert enumerate_paths(big, max_edges=12).F1 is None


def test_compare_dumps_on_disagreement():
    inst = instance_from_edges(2, [(0, 1, 3, 1)], [0], [1], 5)
    bad = compare(inst, Infeasible(3))
    assert not bad.agree and bad.dump.startswith("cspath v1")
    good = compare(inst, solve(inst))
    assert good.agree and good.dump is None
    assert json.loads(good.to_json()) == {"format": 1, "agree": True, "engine_F1": 3, "oracle_F1": 3}
