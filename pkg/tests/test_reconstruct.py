import json

import pytest
from hypothesis import given

from cspath.engine import Reached, solve
from cspath.generators import worked_example
from cspath.graph import instance_from_edges
from cspath.oracle import dp_constrained_shortest
from cspath.reconstruct import NotReached, PathWitness, reconstruct_path, validate_path
from strategies import small_instances


def test_worked_example_path():
    inst = worked_example()
    w = reconstruct_path(inst)
    assert validate_path(inst, w) == []
    assert w.F1 == 15 and w.F2 < inst.budget
    assert w.vertices[-1] == 11 and w.vertices[-2] == 10


def test_not_reached():
    inst = instance_from_edges(2, [(0, 1, 1, 9)], [0], [1], 5)
    with pytest.raises(NotReached):
        reconstruct_path(inst)


@given(small_instances())
def test_reconstruction_sound(inst):
    out = solve(inst)
    if not isinstance(out, Reached):
        return
    w = reconstruct_path(inst)
    assert validate_path(inst, w) == []
    assert w.F1 == out.F1 == dp_constrained_shortest(inst).F1


def test_validate_path_catches_problems():
    inst = instance_from_edges(3, [(0, 1, 1, 3), (1, 2, 1, 3)], [0], [2], 6)
    assert any("constraint violated" in p for p in validate_path(inst, PathWitness((0, 1, 2), 2, 6)))
    assert any("not adjacent" in p for p in validate_path(inst, PathWitness((0, 2), 1, 1)))
    assert any("F1 mismatch" in p for p in validate_path(inst, PathWitness((0, 1, 2), 5, 6)))
    assert any("repeats" in p for p in validate_path(inst, PathWitness((0, 1, 0, 1, 2), 4, 12)))
    assert validate_path(inst, PathWitness((0,), 0, 0)) == ["path has fewer than two vertices"]


def test_witness_json():
    w = PathWitness((0, 1), 3, 2)
    assert json.loads(w.to_json()) == {"format": 1, "vertices": [0, 1], "F1": 3, "F2": 2}
