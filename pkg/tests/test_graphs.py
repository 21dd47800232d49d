from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collabnet import fivefirm
from collabnet.errors import CapExceeded, GraphError, NotGraphical
from collabnet.graphs import (
    CollaborationGraph, add_link, degree_sequence, drop_link, enumerate_graphs,
    enumerate_realizations, is_graphical, random_realization, realize_degree_sequence,
)


def realizable_sequences(n):
    return {tuple(degree_sequence(g).tolist()) for g in enumerate_graphs(n)}


def test_degree_sequence_examples():
    assert degree_sequence(CollaborationGraph.empty(3)).tolist() == [0, 0, 0]
    assert degree_sequence(CollaborationGraph.complete(4)).tolist() == [3, 3, 3, 3]
    assert degree_sequence(fivefirm.FIGURE_1).tolist() == [2, 3, 4, 3, 2]
    assert degree_sequence(fivefirm.FIGURE_2).tolist() == [2, 3, 4, 3, 2]


def test_degree_sum_is_twice_edges():
    g = fivefirm.FIGURE_1
    assert degree_sequence(g).sum() == 2 * len(g.edges)


def test_add_drop():
    g = fivefirm.FIGURE_1
    assert drop_link(g, 1, 2).add_link(2, 1) == g
    assert degree_sequence(add_link(CollaborationGraph.empty(2), 0, 1)).tolist() == [1, 1]
    dropped = drop_link(g, 1, 2)
    # recount edges directly
    recount = [sum(1 for e in dropped.edges if v in e) for v in range(5)]
    assert recount == [2, 2, 3, 3, 2]
    assert degree_sequence(dropped).tolist() == recount


@pytest.mark.parametrize("op, args", [
    ("add_link", (1, 1)), ("drop_link", (2, 2)), ("add_link", (0, 1)), ("drop_link", (0, 4)),
])
def test_edge_operation_errors(op, args):
    with pytest.raises(GraphError):
        getattr(fivefirm.FIGURE_1, op)(*args)


def test_constructor_rejects_bad_edges():
    with pytest.raises(GraphError):
        CollaborationGraph.from_edges(3, [(0, 3)])
    with pytest.raises(GraphError):
        CollaborationGraph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        CollaborationGraph.from_edges(3, [(1, 1)])


@pytest.mark.parametrize("k, expected", [
    ([2, 3, 4, 3, 2], True), ([3, 3, 3], False), ([1, 1], True), ([0, 0], True),
    ([2, 2, 0], False), ([3, 3, 1, 1], False), ([1, 1, 2], True),
])
def test_is_graphical(k, expected):
    assert is_graphical(k) is expected


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_is_graphical_matches_brute_force(n):
    realizable = realizable_sequences(n)
    for k in np.ndindex(*([n] * n)):
        assert is_graphical(k) == (k in realizable), k


def test_realize_examples():
    assert degree_sequence(realize_degree_sequence([2, 3, 4, 3, 2])).tolist() == [2, 3, 4, 3, 2]
    assert realize_degree_sequence([0, 0]) == CollaborationGraph.empty(2)
    paths = [g for g in enumerate_graphs(3) if degree_sequence(g).tolist() == [1, 1, 2]]
    assert paths == [realize_degree_sequence([1, 1, 2])]
    with pytest.raises(NotGraphical):
        realize_degree_sequence([3, 3, 3])


@pytest.mark.parametrize("n, count", [(2, 2), (3, 8), (4, 64)])
def test_enumerate_counts(n, count):
    graphs = list(enumerate_graphs(n))
    assert len(graphs) == count
    assert len(set(graphs)) == count


def test_enumerate_cap():
    with pytest.raises(CapExceeded):
        enumerate_graphs(8)
    with pytest.raises(CapExceeded):
        enumerate_realizations([1, 1, 1, 1], cap=3)
    assert sum(1 for _ in enumerate_graphs(4, cap=4)) == 64


@pytest.mark.parametrize("k, count", [([1, 1], 1), ([2, 2, 2], 1)])
def test_enumerate_realizations_small(k, count):
    assert len(list(enumerate_realizations(k))) == count


def test_five_firm_class_matches_filter():
    k = [2, 3, 4, 3, 2]
    brute = {g for g in enumerate_graphs(5) if degree_sequence(g).tolist() == k}
    assert set(enumerate_realizations(k)) == brute
    assert brute == {fivefirm.FIGURE_1, fivefirm.FIGURE_2}


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_realizations_equal_filtered_enumeration(n):
    by_k = {}
    for g in enumerate_graphs(n):
        by_k.setdefault(tuple(degree_sequence(g).tolist()), set()).add(g)
    for k, graphs in by_k.items():
        got = list(enumerate_realizations(k))
        assert len(got) == len(set(got))
        assert set(got) == graphs


@st.composite
def graphical_sequences(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    possible = list(combinations(range(n), 2))
    edges = draw(st.sets(st.sampled_from(possible)))
    return degree_sequence(CollaborationGraph(n, frozenset(edges))).tolist()


@settings(max_examples=100, deadline=None)
@given(k=graphical_sequences(), seed=st.integers(0, 2**32 - 1))
def test_random_realization_preserves_degrees(k, seed):
    assert is_graphical(k)
    g = random_realization(k, seed)
    assert degree_sequence(g).tolist() == k
    assert random_realization(k, seed) == g
    for h in (g, realize_degree_sequence(k)):
        deg = degree_sequence(h)
        assert deg.min() >= 0 and deg.max() <= len(k) - 1 and deg.sum() % 2 == 0


def test_random_realization_explores_class():
    k = [2, 3, 4, 3, 2]
    seen = {random_realization(k, seed) for seed in range(40)}
    assert seen == {fivefirm.FIGURE_1, fivefirm.FIGURE_2}


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 6), mask=st.integers(0, 2**15 - 1), data=st.data())
def test_add_drop_inverse(n, mask, data):
    m = n * (n - 1) // 2
    g = CollaborationGraph.from_mask(n, mask % (1 << m))
    i, j = data.draw(st.sampled_from(list(combinations(range(n), 2))))
    if g.has_edge(i, j):
        h = g.drop_link(i, j)
        assert h.add_link(i, j) == g
    else:
        h = g.add_link(i, j)
        assert h.drop_link(i, j) == g
    diff = degree_sequence(h) - degree_sequence(g)
    assert np.count_nonzero(diff) == 2 and abs(diff[i]) == 1 and abs(diff[j]) == 1


def test_mask_roundtrip():
    for g in enumerate_graphs(4):
        assert CollaborationGraph.from_mask(4, g.mask) == g


def test_text_format_roundtrip():
    g = fivefirm.FIGURE_2
    text = g.to_text()
    assert text.splitlines()[0] == "n=5"
    assert "0 2" in text.splitlines()
    assert CollaborationGraph.from_text(text) == g
    with pytest.raises(GraphError):
        CollaborationGraph.from_text("0 1\n")


def test_dot_export():
    dot = fivefirm.FIGURE_1.to_dot("fig1")
    assert dot.startswith("graph fig1 {")
    assert dot.count("--") == 7
