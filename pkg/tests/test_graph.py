import numpy as np
import pytest
from hypothesis import given

from cspath.graph import (
    DuplicateEdge,
    InstanceFormatError,
    NonPositiveValue,
    ProblemInstance,
    SelfLoop,
    build_graph,
    format_instance,
    infinite_budget,
    instance_from_edges,
    parse_instance,
    read_instance,
    validate_instance,
    write_instance,
)
from strategies import small_instances


def test_half_edges_paired_and_sorted():
    g = build_graph(4, [(2, 0, 3, 1), (0, 1, 1, 2), (1, 3, 5, 4)])
    assert g.n_edges == 3 and g.n_half_edges == 6
    assert np.all(g.twin[g.twin] == np.arange(6))
    assert np.all(g.start[g.twin] == g.end)
    assert np.all(g.f1[g.twin] == g.f1)
    keys = g.start * 10 + g.end
    assert np.all(np.diff(keys) > 0)
    assert list(g.out_edges(0)) == [0, 1]
    assert g.first_edge(3) == 5
    assert g.neighbors(1).tolist() == [0, 3]
    assert g.degree.tolist() == [2, 2, 1, 1]


def test_arrays_read_only():
    g = build_graph(2, [(0, 1, 1, 1)])
    with pytest.raises(ValueError):
        g.f1[0] = 9


def test_find_half_edge():
    g = build_graph(3, [(0, 1, 1, 1), (1, 2, 2, 2)])
    h = g.find_half_edge(2, 1)
    assert (g.start[h], g.end[h]) == (2, 1)
    assert g.find_half_edge(0, 2) is None


@pytest.mark.parametrize(
    "edges, exc, needle",
    [
        ([(0, 1, 1, 1), (1, 0, 2, 2)], DuplicateEdge, "0"),
        ([(1, 1, 1, 1)], SelfLoop, "1"),
        ([(0, 1, 0, 1)], NonPositiveValue, "f1"),
        ([(0, 1, 1, -2)], NonPositiveValue, "-2"),
    ],
)
def test_build_rejects_bad_edges(edges, exc, needle):
    with pytest.raises(exc, match=needle):
        build_graph(3, edges)


def test_infinite_budget():
    g = build_graph(3, [(0, 1, 1, 4), (1, 2, 1, 6)])
    assert infinite_budget(g) == 11


def test_validate_instance_messages():
    g = build_graph(3, [(0, 1, 1, 1)])
    assert validate_instance(ProblemInstance(g, [0], [1], 5)) == []
    msgs = validate_instance(ProblemInstance(g, [0, 1], [1], 0))
    assert any("A∩B" in m for m in msgs)
    assert any("budget below 1" in m for m in msgs)
    assert any("empty" in m for m in validate_instance(ProblemInstance(g, [], [2], 3)))


def test_induced_without_keeps_vertex_ids():
    g = build_graph(4, [(0, 1, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1)])
    h = g.induced_without({1})
    assert h.n_vertices == 4
    assert h.edges().tolist() == [[2, 3, 1, 1]]


def test_text_format_example():
    text = "cspath v1\n# tiny\nn 3 m 2 M 7\nA 0\nB 2\ne 0 1 2 3\ne 1 2 4 1  # tail\n"
    inst = parse_instance(text)
    assert inst.budget == 7 and inst.sources == (0,) and inst.targets == (2,)
    assert inst.graph.edges().tolist() == [[0, 1, 2, 3], [1, 2, 4, 1]]


@pytest.mark.parametrize(
    "text",
    [
        "",
        "cspath v2\nn 2 m 1 M 3\nA 0\nB 1\ne 0 1 1 1\n",
        "cspath v1\nn 2 m 2 M 3\nA 0\nB 1\ne 0 1 1 1\n",
        "cspath v1\nn 2 m 1 M 3\nB 1\nA 0\ne 0 1 1 1\n",
        "cspath v1\nn 2 m 1 M x\nA 0\nB 1\ne 0 1 1 1\n",
        "cspath v1\nn 2 m 1 M 3\nA 0\nB 1\nf 0 1 1 1\n",
    ],
)
def test_parse_rejects(text):
    with pytest.raises(InstanceFormatError):
        parse_instance(text)


@given(small_instances())
def test_format_roundtrip(inst):
    back = parse_instance(format_instance(inst))
    assert back.graph.edges().tolist() == inst.graph.edges().tolist()
    assert (back.sources, back.targets, back.budget) == (inst.sources, inst.targets, inst.budget)
    assert format_instance(back) == format_instance(inst)


def test_file_roundtrip(tmp_path):
    inst = instance_from_edges(3, [(0, 1, 2, 2), (1, 2, 3, 3)], [0], [2], 9)
    path = tmp_path / "x.txt"
    write_instance(inst, path)
    back = read_instance(path)
    assert back.name == "x.txt"
    assert back.graph.edges().tolist() == inst.graph.edges().tolist()
    assert (back.sources, back.targets, back.budget) == (inst.sources, inst.targets, inst.budget)


def test_vertex_at_needs_coords():
    inst = instance_from_edges(2, [(0, 1, 1, 1)], [0], [1], 3)
    with pytest.raises(ValueError):
        inst.vertex_at(0, 0)
