import json
import random
from fractions import Fraction

import pytest
from conftest import circle, figure_eight, random_graphs, theta
from oracles import core_edges, point_distance, simple_path_distance

from mlsrigid.metric_graph import (
    GraphFormatError,
    HalfEdge,
    MetricGraph,
    as_length,
    compute_core,
    distance,
    graph_from_json,
    graph_to_json,
    is_branch_point,
    minimizer_edges,
    to_dot,
)
from mlsrigid.reconstruct import isometric


def test_lengths_are_exact():
    assert as_length("3/6") == Fraction(1, 2)
    assert as_length("0.1") == Fraction(1, 10)
    assert as_length(0.1) == Fraction(1, 10)
    with pytest.raises(ValueError):
        as_length("abc")


def test_rejects_bad_graphs():
    with pytest.raises(ValueError):
        MetricGraph(2, [(0, 1, 0)])
    with pytest.raises(ValueError):
        MetricGraph(3, [(0, 1, 1)])
    with pytest.raises(ValueError):
        MetricGraph(1, [(0, 0, -1)])


def test_half_edges():
    h = HalfEdge(3)
    assert h.reverse().reverse() == h
    assert str(h) == "e3" and str(h.reverse()) == "e3'"
    g = theta()
    assert g.tail(HalfEdge(0, True)) == 1 and g.head(HalfEdge(0, True)) == 0


def test_distance_examples():
    g = MetricGraph(2, [(0, 1, 5)])
    assert distance(g, g.vertex_point(0), g.vertex_point(1)) == 5
    t = theta()
    p = t.point(HalfEdge(1), Fraction(1, 3))
    assert distance(t, p, p) == 0
    assert distance(t, t.vertex_point(0), t.vertex_point(1)) == 1
    assert simple_path_distance(t, 0, 1) == 1


def test_point_canonical_form():
    g = theta()
    a = g.point(HalfEdge(2), Fraction(1, 2))
    b = g.point(HalfEdge(2, True), Fraction(5, 2))
    assert a == b
    assert g.point(HalfEdge(0), 0) == g.vertex_point(0)
    assert g.point(HalfEdge(0), 1) == g.vertex_point(1)


def test_foreign_points_rejected():
    g, h = theta(), theta()
    with pytest.raises(ValueError):
        distance(g, g.vertex_point(0), h.vertex_point(1))


def _random_point(rng, g):
    e = rng.randrange(g.num_edges)
    length = g.edges[e][2]
    t = length * Fraction(rng.randint(1, 9), 10)
    return (e, t), g.point(HalfEdge(e), t)


def test_distance_is_a_metric_matching_brute_force():
    rng = random.Random(11)
    for g in random_graphs(3, 15, rank=3):
        if g.num_edges == 0:
            continue
        pts = [_random_point(rng, g) for _ in range(4)]
        for (ra, a) in pts:
            for (rb, b) in pts:
                d = distance(g, a, b)
                assert d == point_distance(g, ra, rb)
                assert d == distance(g, b, a) and d >= 0
                assert (d == 0) == (a == b)
                for (_, c) in pts:
                    assert distance(g, a, c) <= d + distance(g, b, c)


def test_core_examples():
    tree = MetricGraph(4, [(0, 1, 1), (1, 2, 2), (1, 3, 3)])
    assert compute_core(tree).is_empty
    c = compute_core(circle(4))
    assert c.rank == 1 and c.graph.edges == ((0, 0, Fraction(4)),) and not c.branch_points
    g = MetricGraph(3, [(0, 1, 1), (0, 1, 2), (0, 1, 3), (0, 2, 7)])
    c = compute_core(g)
    assert isometric(c.graph, theta())
    assert sorted(c.vertex_map[v] for v in c.branch_points) == [0, 1]
    assert 3 not in c.host_edges


def test_degree_two_chains_are_suppressed():
    g = MetricGraph(4, [(0, 1, 1), (1, 2, 2), (2, 0, 3), (0, 3, 1), (3, 0, 1)])
    c = compute_core(g)
    assert c.graph.num_vertices == 1
    assert sorted(x for *_, x in c.graph.edges) == [2, 6]


def test_core_matches_loop_enumeration():
    for g in random_graphs(5, 12, rank=2, vertices=4):
        c = compute_core(g)
        assert set(c.host_edges) == core_edges(g)
        assert c.rank == g.num_edges - g.num_vertices + 1


def test_core_idempotent():
    for g in random_graphs(6, 20, rank=3):
        c = compute_core(g)
        again = compute_core(c.graph)
        assert isometric(again.graph, c.graph)
        assert again.rank == c.rank


def test_branch_points():
    c = compute_core(theta())
    assert is_branch_point(c, 0) and is_branch_point(c, 1)
    assert not is_branch_point(compute_core(circle()), 0)
    assert is_branch_point(compute_core(figure_eight()), 0)


def test_minimizers_stay_in_core():
    rng = random.Random(2)
    for g in random_graphs(8, 10, rank=3):
        c = compute_core(g)
        if c.is_empty:
            continue
        core = sorted(c.host_edges)
        for _ in range(10):
            pts = []
            for _ in range(2):
                e = rng.choice(core)
                pts.append(g.point(HalfEdge(e), g.edges[e][2] * Fraction(rng.randint(0, 4), 4)))
            assert minimizer_edges(g, *pts) <= set(core)


def test_json_roundtrip_and_positions():
    g = MetricGraph(2, [(0, 1, Fraction(3, 2)), (1, 1, "0.25")])
    text = graph_to_json(g)
    again = graph_from_json(text)
    assert again.edges == g.edges
    with pytest.raises(GraphFormatError) as err:
        graph_from_json('{"vertices": 2, "edges": [{"a": 0, "b": 1, "len": "x"}]}')
    assert "/edges/0/len" in str(err.value)
    with pytest.raises(GraphFormatError) as err:
        graph_from_json('{"vertices": 2,')
    assert "line 1" in str(err.value)
    loop = graph_from_json('{"vertices": 1, "edges": [{"a": 0, "b": 0, "len": 0.1}]}')
    assert loop.edges[0][2] == Fraction(1, 10)
    assert json.loads(text)["edges"][1]["len"] == "1/4"


def test_dot_marks_branch_points():
    c = compute_core(theta())
    dot = to_dot(c.graph, c.branch_points)
    assert "doublecircle" in dot and "e2: 3" in dot
