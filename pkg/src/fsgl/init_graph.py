"""Sparse starting graphs built from observation similarity.

The initializer grows a spanning tree that greedily follows the largest
Gram entries, then tops it up with a fixed budget of the next-largest
pairs. All selected edges start at unit weight, so the solver only ever
removes mass. The result has N - 1 + B edges (fewer when the budget
exceeds the remaining pairs) and is connected by construction.
"""

from __future__ import annotations

import heapq

import numpy as np

from .errors import InvalidBudget
from .graph import WeightedGraph


def max_similarity_tree(y: np.ndarray) -> list[tuple[int, int]]:
    """Spanning tree edges in attachment order, greedy on Gram entries.

    Starts from the largest off-diagonal of `y` and repeatedly attaches
    the outside node with the strongest link to the tree. Ties prefer
    the lexicographically smallest (m, n) pair.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if y.ndim != 2 or y.shape[1] != n:
        raise ValueError("similarity matrix must be square")
    if n < 2:
        return []
    iu, ju = np.triu_indices(n, k=1)
    vals = y[iu, ju]
    first = np.lexsort((ju, iu, -vals))[0]
    m0, n0 = int(iu[first]), int(ju[first])

    attached = np.zeros(n, dtype=bool)
    heap: list[tuple[float, int, int, int]] = []

    def offer(node: int):
        attached[node] = True
        for other in range(n):
            if not attached[other]:
                a, b = (node, other) if node < other else (other, node)
                heapq.heappush(heap, (-y[a, b], a, b, other))

    edges = [(m0, n0)]
    offer(m0)
    offer(n0)
    while len(edges) < n - 1:
        _, a, b, outside = heapq.heappop(heap)
        if attached[outside]:
            continue
        edges.append((a, b))
        offer(outside)
    return edges


def init_sparse_graph(y: np.ndarray, b: int) -> WeightedGraph:
    """Unit-weight starting graph: similarity spanning tree plus budget.

    After the tree, the `b` largest off-diagonal entries not already in
    it are added (ties again lexicographic), giving N - 1 + b edges.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if n < 2:
        raise ValueError("need at least two nodes")
    available = n * (n - 1) // 2 - (n - 1)
    if not 0 <= b <= available:
        raise InvalidBudget(f"edge budget must lie in [0, {available}], got {b}")
    tree = max_similarity_tree(y)
    selected = set(tree)
    if b > 0:
        iu, ju = np.triu_indices(n, k=1)
        order = np.lexsort((ju, iu, -y[iu, ju]))
        taken = 0
        for idx in order:
            if taken == b:
                break
            e = (int(iu[idx]), int(ju[idx]))
            if e not in selected:
                selected.add(e)
                taken += 1
    return WeightedGraph(n, {e: 1.0 for e in selected})
