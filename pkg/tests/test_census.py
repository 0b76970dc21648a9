import networkx as nx
import pytest

from oracles import four_regular_counts

from gradspine.census import (MAX_COMPLEXITY, bound_check, enum_4valent_graphs,
                              enum_marked_spines, graph_counts, matching_of)
from gradspine.errors import ScaleExceeded
from gradspine.spine import ADMISSIBLE, canonical_form, spine_from_matching


@pytest.mark.parametrize("c", [1, 2, 3])
def test_graph_counts_match_matching_oracle(c):
    assert len(enum_4valent_graphs(c)) == four_regular_counts(c)


def test_graph_counts_known_values():
    assert [len(enum_4valent_graphs(c)) for c in (1, 2, 3, 4)] == [1, 2, 4, 10]
    assert graph_counts(3) == (4, 7)


def as_multigraph(adj):
    g = nx.MultiGraph()
    g.add_nodes_from(range(len(adj)))
    for i, j, k in ((i, j, k) for i in range(len(adj)) for j in range(i, len(adj))
                    for k in range(adj[i][j] // (2 if i == j else 1))):
        g.add_edge(i, j)
    return g


@pytest.mark.parametrize("c", [1, 2, 3, 4])
def test_graphs_are_4_regular_connected_and_distinct(c):
    graphs = [as_multigraph(a) for a in enum_4valent_graphs(c)]
    for g in graphs:
        assert nx.is_connected(g)
        assert all(d == 4 for _, d in g.degree())
    for i in range(len(graphs)):
        for j in range(i + 1, len(graphs)):
            assert not nx.is_isomorphic(graphs[i], graphs[j])


@pytest.mark.parametrize("c", [1, 2, 3])
def test_matching_realizes_adjacency(c):
    for adj in enum_4valent_graphs(c):
        m = matching_of(adj)
        ends = [x for pair in m for x in pair]
        assert sorted(ends) == [(v, s) for v in range(c) for s in range(4)]


@pytest.mark.parametrize("c,count", [(1, 6), (2, 138)])
def test_marked_counts(c, count):
    rows = enum_marked_spines(c)
    assert len(rows) == count
    v = bound_check(c, rows)
    assert v.ok and v.codes_distinct
    assert v.bound == v.graphs_cumulative * 12 ** c


def test_one_vertex_classes_cover_all_patterns():
    adj = enum_4valent_graphs(1)[0]
    codes = {canonical_form(spine_from_matching(1, matching_of(adj), [p]))
             for p in ADMISSIBLE}
    assert codes == {r.code for r in enum_marked_spines(1)}


def test_rows_sorted_and_serializable():
    rows = enum_marked_spines(2)
    assert [r.code for r in rows] == sorted(r.code for r in rows)
    d = rows[0].as_dict()
    assert set(d) == {"c", "graph", "patterns", "orientable", "code"}


def test_scale_limits():
    with pytest.raises(ScaleExceeded):
        enum_4valent_graphs(MAX_COMPLEXITY + 1)
    with pytest.raises(ScaleExceeded):
        enum_marked_spines(5)
    with pytest.raises(ValueError):
        bound_check(0)
