import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firstlink.graph import (
    ABSENT,
    ArticleTable,
    FirstLinkGraph,
    GraphError,
    build_graph,
    canonical_title,
    in_degree,
    load_edges,
    rank_nodes,
    save_edges,
)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("rail_transport", "Rail transport"),
        ("  natural   science ", "Natural science"),
        ("Train", "Train"),
        ("", ""),
    ],
)
def test_canonical_title(raw, expected):
    assert canonical_title(raw) == expected


def test_table_roundtrip_lookup():
    table = ArticleTable(["a", "B_c", "a"])
    assert table.titles == ("A", "B c")
    for i in range(len(table)):
        assert table.lookup(table.title_of(i)) == i
    assert "b c" in table


def test_build_empty():
    g, t = build_graph([])
    assert g.n == 0 and len(t) == 0


def test_self_loop_preserved():
    g, t = build_graph([("A", "A")])
    assert g.n == 1
    assert g.succ_of(0) == 0


def test_fixture_shape(fixture_graph):
    g, t = fixture_graph
    assert g.n == 7
    assert np.all(g.has_successor())


def test_targets_become_absent_nodes():
    g, t = build_graph([("X", "Y"), ("Z", None)])
    assert t.titles == ("X", "Z", "Y")
    assert g.successor.tolist() == [2, ABSENT, ABSENT]


def test_duplicate_source_named():
    with pytest.raises(GraphError, match="'Train'"):
        build_graph([("Train", "Rail"), ("train", "Steam")])


def test_successor_bounds_checked():
    with pytest.raises(GraphError):
        FirstLinkGraph([0, 5])


def test_graph_is_immutable(fixture_graph):
    g, _ = fixture_graph
    with pytest.raises(ValueError):
        g.successor[0] = 3


def test_in_degree_fixture(fixture_graph, ids):
    g, _ = fixture_graph
    deg = in_degree(g).in_degree
    # predecessors counted by hand: A <- G, C ; C <- E, F ; F <- nobody
    assert deg[ids["A"]] == 2
    assert deg[ids["C"]] == 2
    assert deg[ids["F"]] == 0


def test_in_degree_empty_and_cycle():
    stats = in_degree(FirstLinkGraph([]))
    assert stats.in_degree.size == 0 and stats.quantiles == {}
    assert in_degree(FirstLinkGraph([1, 2, 0])).in_degree.tolist() == [1, 1, 1]


def test_self_loop_counts_in_degree():
    assert in_degree(FirstLinkGraph([0, 0])).in_degree.tolist() == [2, 0]


def test_rank_nodes_ties_by_id():
    assert [i for i, _ in rank_nodes([3, 3, 3])] == [0, 1, 2]
    assert rank_nodes([0, 0, 5, 0])[0] == (2, 5)
    assert rank_nodes([1, 4, 4, 2]) == [(1, 4), (2, 4), (3, 2), (0, 1)]


def test_rank_fixture_visits(fixture_graph, ids):
    from firstlink.traversal import compute_visits

    g, _ = fixture_graph
    top3 = [i for i, _ in rank_nodes(compute_visits(g))[:3]]
    assert top3 == sorted([ids["A"], ids["B"], ids["G"]])


def test_save_load_empty(tmp_path):
    p = tmp_path / "e.tsv"
    g, t = build_graph([])
    save_edges(p, g, t)
    assert p.read_text() == "source\ttarget\n"
    g2, t2 = load_edges(p)
    assert g2.n == 0 and len(t2) == 0


def test_save_load_fixture_byte_identical(tmp_path, fixture_graph):
    g, t = fixture_graph
    p1, p2 = tmp_path / "a.tsv", tmp_path / "b.tsv"
    save_edges(p1, g, t)
    g2, t2 = load_edges(p1)
    save_edges(p2, g2, t2)
    assert g2 == g and t2 == t
    assert p1.read_bytes() == p2.read_bytes()


def test_load_skips_provenance_comment(tmp_path, fixture_graph):
    g, t = fixture_graph
    p = tmp_path / "a.tsv"
    save_edges(p, g, t, provenance="firstlink test")
    assert p.read_text().startswith("# firstlink test\n")
    assert load_edges(p)[0] == g


def test_load_duplicate_names_line(tmp_path):
    p = tmp_path / "d.tsv"
    p.write_text("source\ttarget\nA\tB\nB\t\nA\tC\n")
    with pytest.raises(GraphError, match=r":4: duplicate source 'A' \(first on line 2\)"):
        load_edges(p)


def test_load_malformed_line(tmp_path):
    p = tmp_path / "m.tsv"
    p.write_text("source\ttarget\nA\tB\tC\n")
    with pytest.raises(GraphError, match=":2:"):
        load_edges(p)


def test_load_requires_header(tmp_path):
    p = tmp_path / "h.tsv"
    p.write_text("A\tB\n")
    with pytest.raises(GraphError, match=":1:"):
        load_edges(p)


successors = st.integers(0, 40).flatmap(
    lambda n: st.lists(st.integers(-1, n - 1), min_size=n, max_size=n) if n else st.just([])
)


@settings(max_examples=100, deadline=None)
@given(successors)
def test_in_degree_sum_law(succ):
    g = FirstLinkGraph(succ)
    assert in_degree(g).in_degree.sum() == int(g.has_successor().sum())


@settings(max_examples=50, deadline=None)
@given(successors)
def test_roundtrip_property(tmp_path_factory, succ):
    g = FirstLinkGraph(succ)
    t = ArticleTable([f"Node {i}" for i in range(g.n)])
    p = tmp_path_factory.mktemp("rt") / "g.tsv"
    save_edges(p, g, t)
    g2, t2 = load_edges(p)
    assert g2 == g and t2 == t


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-5, 5), max_size=30))
def test_rank_nodes_is_sorted_permutation(vals):
    ranked = rank_nodes(vals)
    assert sorted(i for i, _ in ranked) == list(range(len(vals)))
    keys = [(-v, i) for i, v in ranked]
    assert keys == sorted(keys)
