"""Graphs, matching complexes, orientations and simplicial boundaries."""

import json
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morsematch.complex import (
    Graph,
    MatchingComplex,
    boundary_matrix_csv,
    build_complete_graph,
    build_matching_complex,
    complex_to_json_text,
    edge_label,
    euler_characteristic,
    f_vector,
    f_vector_formula,
    incidence_number,
    is_levelled_edge,
    simplicial_boundary_matrix,
    simplicial_chain_complex,
    vertex_coords,
    vertex_from_coords,
)
from morsematch.constructions import build_level_partition


def brute_force_matchings(graph):
    """Every nonempty matching, by checking all edge subsets."""
    out = {}
    for k in range(1, len(graph.edges) + 1):
        for subset in combinations(range(len(graph.edges)), k):
            ends = [v for e in subset for v in graph.edges[e]]
            if len(set(ends)) == len(ends):
                out.setdefault(k - 1, set()).add(subset)
    return out


def test_complete_graph_edge_counts():
    assert len(build_complete_graph(4).edges) == 6
    assert len(build_complete_graph(7).edges) == 21
    assert len(build_complete_graph(8).edges) == 28
    with pytest.raises(ValueError):
        build_complete_graph(0)


def test_level_sizes():
    assert build_level_partition(7).sizes == (3, 3, 1)
    assert build_level_partition(8).sizes == (3, 3, 2)
    assert build_level_partition(9).sizes == (3, 3, 3)


def test_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        Graph(3, ((0, 0),))
    with pytest.raises(ValueError):
        Graph(3, ((0, 3),))
    with pytest.raises(ValueError):
        Graph(3, ((0, 1), (1, 0)))


def test_vertex_coordinates_roundtrip():
    for v in range(30):
        assert vertex_from_coords(*vertex_coords(v)) == v
    assert vertex_coords(0) == (1, 1)
    assert vertex_coords(6) == (3, 1)


def test_edge_order_matches_digit_strings_for_single_digit_levels():
    # tuple order agrees with comparing concatenated i1 j1 i2 j2 digit strings
    for n in range(2, 10):
        edges = build_complete_graph(n).edges
        strings = ["".join(map(str, edge_label(u, v))) for u, v in edges]
        assert strings == sorted(strings)
        assert len(set(strings)) == len(strings)


def test_levelled_edges():
    assert is_levelled_edge(0, 2)
    assert not is_levelled_edge(2, 3)


@pytest.mark.parametrize("n, expected", [
    (2, (1,)), (4, (6, 3)), (6, (15, 45, 15)), (7, (21, 105, 105)), (8, (28, 210, 420, 105)),
])
def test_f_vector_examples(n, expected):
    assert f_vector(build_matching_complex(build_complete_graph(n))) == expected


@pytest.mark.parametrize("n", range(2, 13))
def test_f_vector_formula(n):
    # independent count: choose 2(i+1) vertices, then a perfect matching on them
    def count(i):
        k = i + 1
        double_factorial = 1
        for x in range(2 * k - 1, 0, -2):
            double_factorial *= x
        return comb(n, 2 * k) * double_factorial

    expected = tuple(count(i) for i in range(n // 2))
    assert f_vector_formula(n) == expected
    assert f_vector(build_matching_complex(build_complete_graph(n))) == expected


def test_path_graph():
    assert f_vector(build_matching_complex(Graph(3, ((0, 1), (1, 2))))) == (2,)


def test_edgeless_graph_has_no_cells():
    cx = build_matching_complex(Graph(3, ()))
    assert f_vector(cx) == ()
    assert cx.dim == -1


@pytest.mark.parametrize("n, chi", [(6, -15), (7, 21), (8, 133)])
def test_euler_characteristic(n, chi):
    assert euler_characteristic(build_matching_complex(build_complete_graph(n))) == chi


def test_incidence_examples():
    a, b, c, d = 1, 4, 7, 9
    assert incidence_number([a, b, c], [b, c]) == 1
    assert incidence_number([a, b, c], [a, c]) == -1
    assert incidence_number([a, b, c], [a, d]) == 0
    with pytest.raises(ValueError):
        incidence_number([a, b, c], [a])


def test_boundary_examples():
    d1 = simplicial_boundary_matrix(build_matching_complex(build_complete_graph(5)), 1).toarray()
    assert d1.shape == (10, 15)
    assert all(sorted(col[col != 0]) == [-1, 1] for col in d1.T)

    cx7 = build_matching_complex(build_complete_graph(7))
    d2 = simplicial_boundary_matrix(cx7, 2).toarray()
    assert d2.shape == (105, 105)
    assert ((d2 != 0).sum(axis=0) == 3).all()
    assert not (simplicial_boundary_matrix(cx7, 1) @ simplicial_boundary_matrix(cx7, 2)).toarray().any()

    cx2 = build_matching_complex(build_complete_graph(2))
    assert simplicial_boundary_matrix(cx2, 1).shape == (1, 0)
    with pytest.raises(ValueError):
        simplicial_boundary_matrix(cx7, 3)
    with pytest.raises(ValueError):
        simplicial_boundary_matrix(cx7, 0)


def random_graphs():
    return st.integers(2, 7).flatmap(
        lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=21).map(
            lambda pairs: Graph(n, tuple({(min(u, v), max(u, v)) for u, v in pairs if u != v}))
        )
    )


@settings(max_examples=60, deadline=None)
@given(random_graphs())
def test_complex_is_exactly_the_matchings(graph):
    cx = build_matching_complex(graph)
    expected = brute_force_matchings(graph)
    assert {k: set(layer) for k, layer in enumerate(cx.simplices)} == expected
    for k, layer in enumerate(cx.simplices):
        assert layer == sorted(layer)
        for s in layer:
            ends = [v for e in s for v in graph.edges[e]]
            assert len(set(ends)) == len(ends)


@settings(max_examples=40, deadline=None)
@given(random_graphs())
def test_boundary_squares_to_zero_and_faces_are_closed(graph):
    cx = build_matching_complex(graph)
    mats, dims = simplicial_chain_complex(cx)
    for a, b in zip(mats, mats[1:]):
        assert not (a @ b).toarray().any()
    for k in range(1, cx.dim + 1):
        for i in range(cx.count(k)):
            for face, sign in cx.facets((k, i)):
                assert sign == incidence_number(cx.simplex((k, i)), cx.simplex(face))
                assert (k, i) in cx.cofaces(face)


def test_cofaces_invert_facets():
    cx = build_matching_complex(build_complete_graph(6))
    for k in range(cx.dim):
        for i in range(cx.count(k)):
            for b in cx.cofaces((k, i)):
                assert (k, i) in dict(cx.facets(b))


def test_index_lookup():
    cx = build_matching_complex(build_complete_graph(5))
    cell = (1, 3)
    assert cx.index(reversed(cx.simplex(cell))) == cell
    assert cx.find((0, 1)) is None  # edges 0 and 1 share vertex 0
    with pytest.raises(KeyError):
        cx.index((0, 1))


def test_json_roundtrip_and_format():
    g = build_complete_graph(4)
    assert Graph.from_json(json.loads(json.dumps(g.to_json()))) == g
    data = json.loads(complex_to_json_text(build_matching_complex(g)))
    assert data["graph"] == {"n": 4, "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]}
    assert data["simplices"]["1"] == [[0, 5], [1, 4], [2, 3]]


def test_boundary_csv():
    cx = build_matching_complex(build_complete_graph(4))
    m = simplicial_boundary_matrix(cx, 1)
    text = boundary_matrix_csv(m, [f"e{i}" for i in range(6)], ["a", "b", "c"])
    lines = text.splitlines()
    assert lines[0] == ",a,b,c"
    assert lines[1] == "e0,-1,0,0"
    assert len(lines) == 7


def test_format_simplex():
    cx = build_matching_complex(build_complete_graph(7))
    cell = cx.index([cx.graph.edge_id(1, 4), cx.graph.edge_id(2, 5)])
    assert cx.format_simplex(cell) == "v(1,2)-v(2,2) v(1,3)-v(2,3)"


def test_facet_table_is_read_only():
    table = build_matching_complex(build_complete_graph(5)).facet_table(1)
    with pytest.raises(ValueError):
        table[0, 0] = 3
    assert isinstance(table, np.ndarray)


def test_general_graph_complex():
    # 4-cycle: two perfect matchings
    cx = MatchingComplex(Graph(4, ((0, 1), (1, 2), (2, 3), (0, 3))))
    assert f_vector(cx) == (4, 2)
