"""Matching, covers, Hall violators, 1-factors, connectivity."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamlab import (
    BipartiteGraph,
    Digraph,
    PreconditionError,
    defect_hall_matching,
    find_one_factor,
    find_separator,
    hall_violator,
    internally_disjoint_paths,
    is_strongly_connected,
    is_strongly_k_connected,
    max_matching,
    min_cover,
    strong_connectivity,
    vertex_menger_value,
)
from helpers import (
    brute_max_matching,
    brute_vertex_menger,
    covers_all_edges,
    exhaustive_hall_factor_exists,
    random_bipartite,
    random_digraph,
)


def _assert_valid_matching(b, m):
    a_used = [a for a, _ in m.pairs]
    b_used = [bb for _, bb in m.pairs]
    assert len(set(a_used)) == len(a_used)
    assert len(set(b_used)) == len(b_used)
    assert all((a, bb) in b.edges for a, bb in m.pairs)


@given(
    st.integers(1, 7), st.integers(1, 7),
    st.floats(0.05, 0.9), st.integers(0, 2**32 - 1),
)
@settings(max_examples=120, deadline=None)
def test_max_matching_matches_brute_force(na, nb, p, seed):
    b = random_bipartite(na, nb, p, seed)
    m = max_matching(b)
    _assert_valid_matching(b, m)
    assert m.size() == brute_max_matching(b)


@given(
    st.integers(1, 8), st.integers(1, 8),
    st.floats(0.05, 0.9), st.integers(0, 2**32 - 1),
)
@settings(max_examples=120, deadline=None)
def test_koenig_equality_and_cover_validity(na, nb, p, seed):
    b = random_bipartite(na, nb, p, seed)
    m = max_matching(b)
    c = min_cover(b)
    assert m.size() == c.size()
    assert covers_all_edges(b, c.a_side, c.b_side)


def test_matching_known_values():
    b = BipartiteGraph.from_edges(3, 3, [(0, 0), (0, 1), (1, 0), (2, 2)])
    assert max_matching(b).size() == 3
    star = BipartiteGraph.from_edges(4, 1, [(i, 0) for i in range(4)])
    assert max_matching(star).size() == 1
    assert min_cover(star).size() == 1


def test_hall_violator_reverifies():
    # A = {0,1,2} all pointing only at B-vertex 0
    b = BipartiteGraph.from_edges(3, 2, [(0, 0), (1, 0), (2, 0)])
    s = hall_violator(b)
    assert s is not None
    nbrs = {j for i in s for j in b.adj()[i]}
    assert len(nbrs) < len(s)
    # defect 2 tolerates it
    assert hall_violator(b, defect=2) is None
    assert defect_hall_matching(b, 2).size() == 1
    with pytest.raises(PreconditionError):
        defect_hall_matching(b, 0)


@given(st.integers(2, 7), st.floats(0.1, 0.9), st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_one_factor_dichotomy_vs_exhaustive_hall(n, p, seed):
    g = random_digraph(n, p, seed)
    cert = find_one_factor(g)
    exists = exhaustive_hall_factor_exists(g)
    if cert.factor is not None:
        assert exists
        assert all(g.has_edge(v, cert.factor.successor(v)) for v in range(n))
    else:
        assert not exists
        s = cert.violator
        nbrs = set()
        for v in s:
            nbrs |= g.out_sets[v]
        assert len(nbrs) < len(s)


def test_menger_value_matches_brute_force():
    for seed in range(25):
        g = random_digraph(7, 0.35, seed)
        for x in range(3):
            for y in range(3, 6):
                if x == y or g.has_edge(x, y):
                    continue
                assert vertex_menger_value(g, x, y) == brute_vertex_menger(g, x, y)


def test_internally_disjoint_paths_are_disjoint():
    g = random_digraph(12, 0.5, 3)
    x, y = 0, 11
    if g.has_edge(x, y):
        pytest.skip("adjacent pair in this seed")
    count = vertex_menger_value(g, x, y)
    paths = internally_disjoint_paths(g, x, y, count)
    assert len(paths) == count
    interior = [v for p in paths for v in p[1:-1]]
    assert len(interior) == len(set(interior))
    for p in paths:
        assert p[0] == x and p[-1] == y
        assert all(g.has_edge(p[i], p[i + 1]) for i in range(len(p) - 1))


def test_strong_connectivity_basics():
    c = Digraph.directed_cycle(6)
    assert is_strongly_connected(c)
    assert strong_connectivity(c) == 1
    assert is_strongly_k_connected(c, 1)
    assert not is_strongly_k_connected(c, 2)
    assert not is_strongly_connected(Digraph.directed_path(4))
    k = Digraph.complete(5)
    assert strong_connectivity(k) == 4


def test_find_separator():
    # two 4-cliques joined through a single cut vertex 8
    edges = []
    for grp in (range(4), range(4, 8)):
        edges += [(u, v) for u in grp for v in grp if u != v]
    edges += [(3, 8), (8, 4), (7, 8), (8, 0)]
    g = Digraph(9, edges)
    sep = find_separator(g, 2)
    assert sep is not None and len(sep) < 2
    rest = g.remove_vertices(sep)
    assert not is_strongly_connected(rest)
    assert find_separator(Digraph.complete(5), 3) is None
