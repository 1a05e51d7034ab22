"""Similarity-guided sparse initialization."""

import numpy as np
import pytest

from fsgl.errors import InvalidBudget
from fsgl.graph import gram, is_connected
from fsgl.init_graph import init_sparse_graph, max_similarity_tree


def random_gram(rng, n, k=None):
    k = k or int(rng.integers(1, n + 3))
    return gram(rng.standard_normal((n, k)))


def replay_tree_choices(y, edges):
    """Check each attachment took the largest frontier similarity.

    Replays the greedy growth: after the first edge, the next edge must
    be the maximum of y over all (tree node, outside node) pairs, with
    lexicographic preference on ties.
    """
    n = y.shape[0]
    inside = set(edges[0])
    for (a, b) in edges[1:]:
        new = b if a in inside else a
        assert (a in inside) != (b in inside), "edge must cross the frontier"
        best = None
        for u in sorted(inside):
            for v in range(n):
                if v in inside:
                    continue
                key = (-y[min(u, v), max(u, v)], min(u, v), max(u, v))
                if best is None or key < best:
                    best = key
        assert -best[0] == pytest.approx(y[min(a, b), max(a, b)], abs=0.0)
        assert (best[1], best[2]) == (min(a, b), max(a, b))
        inside.add(new)
    assert len(inside) == n


def test_tree_covers_all_nodes_once():
    for seed in range(30):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 16))
        y = random_gram(rng, n)
        edges = max_similarity_tree(y)
        assert len(edges) == n - 1
        assert {v for e in edges for v in e} == set(range(n))


def test_tree_replay_confirms_greedy_choices():
    for seed in range(25):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 12))
        y = random_gram(rng, n)
        edges = max_similarity_tree(y)
        replay_tree_choices(y, edges)


def test_tree_first_edge_is_global_max():
    for seed in range(25):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 12))
        y = random_gram(rng, n)
        (m, n2) = max_similarity_tree(y)[0]
        iu, ju = np.triu_indices(n, k=1)
        assert y[m, n2] == np.max(y[iu, ju])


def test_tree_tie_break_lexicographic():
    y = np.ones((4, 4))  # every pair ties
    edges = max_similarity_tree(y)
    assert edges == [(0, 1), (0, 2), (0, 3)]


def test_init_edge_count_and_unit_weights():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 20))
        available = n * (n - 1) // 2 - (n - 1)
        b = int(rng.integers(0, available + 1))
        g = init_sparse_graph(random_gram(rng, n), b)
        assert g.n == n
        assert g.edge_count == n - 1 + b
        assert all(w == 1.0 for w in g.edges.values())
        assert is_connected(g)


def test_init_budget_validation():
    rng = np.random.default_rng(0)
    y = random_gram(rng, 6)  # 15 pairs, 5 tree edges, 10 spare
    init_sparse_graph(y, 10)
    with pytest.raises(InvalidBudget):
        init_sparse_graph(y, 11)
    with pytest.raises(InvalidBudget):
        init_sparse_graph(y, -1)
    with pytest.raises(ValueError):
        init_sparse_graph(random_gram(rng, 1), 0)


def test_init_extras_are_next_largest_pairs():
    # the b extra edges are exactly the largest off-tree similarities
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 14))
        y = random_gram(rng, n)
        tree = set(max_similarity_tree(y))
        available = n * (n - 1) // 2 - (n - 1)
        b = int(rng.integers(1, available + 1))
        g = init_sparse_graph(y, b)
        extras = set(g.edges) - tree
        assert len(extras) == b
        rest = [(i, j) for i in range(n) for j in range(i + 1, n)
                if (i, j) not in tree and (i, j) not in extras]
        if rest:
            worst_taken = min(y[m, n2] for (m, n2) in extras)
            best_left = max(y[m, n2] for (m, n2) in rest)
            assert worst_taken >= best_left - 1e-12


def test_init_deterministic():
    rng = np.random.default_rng(11)
    y = random_gram(rng, 10)
    a = init_sparse_graph(y, 7)
    b = init_sparse_graph(y, 7)
    assert a.edges == b.edges
