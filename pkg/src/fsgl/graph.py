"""Weighted graph representation, Laplacian construction, and edge mutation.

Edges are stored once, keyed by the unordered pair (m, n) with m < n, so
symmetry holds by construction. Weights are strictly positive; a weight
driven to (numerical) zero removes the edge entry, keeping the edge set
equal to the support of the adjacency matrix.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import MissingEdge

# Edge entries at or below this weight are dropped from the edge map.
WEIGHT_ZERO = 1e-12

# Dense Laplacian below this many nodes, sparse CSR at or above it.
DENSE_LIMIT = 64


def canonical_edge(m: int, n: int) -> tuple[int, int]:
    if m == n:
        raise ValueError(f"self-loop ({m},{n}) is not a valid edge")
    return (m, n) if m < n else (n, m)


class WeightedGraph:
    """Undirected graph with positive edge weights and no self-loops.

    Immutable after construction for readers; `weaken_edge` produces a new
    logical version, so a graph instance can be shared freely across
    concurrent scoring workers.
    """

    __slots__ = ("n", "edges", "_arrays")

    def __init__(self, n: int, edges=None):
        if n < 1:
            raise ValueError("node count must be >= 1")
        self.n = int(n)
        canon: dict[tuple[int, int], float] = {}
        if edges:
            items = edges.items() if hasattr(edges, "items") else edges
            for key, w in items:
                m, k = canonical_edge(int(key[0]), int(key[1]))
                if not (0 <= m < self.n and 0 <= k < self.n):
                    raise ValueError(f"edge ({m},{k}) out of range for n={self.n}")
                w = float(w)
                if w <= 0.0:
                    raise ValueError(f"edge ({m},{k}) has nonpositive weight {w}")
                canon[(m, k)] = w
        # Keys kept in sorted order so cached arrays need no re-sort.
        self.edges = dict(sorted(canon.items()))
        self._arrays = None

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def weight(self, m: int, n: int) -> float:
        return self.edges[canonical_edge(m, n)]

    def has_edge(self, m: int, n: int) -> bool:
        return canonical_edge(m, n) in self.edges

    def edge_arrays(self):
        """Edge endpoints and weights as arrays, sorted by (m, n)."""
        if self._arrays is None:
            if self.edges:
                mn = np.array(list(self.edges.keys()), dtype=np.intp)
                w = np.array(list(self.edges.values()), dtype=np.float64)
                self._arrays = (mn[:, 0], mn[:, 1], w)
            else:
                empty = np.empty(0, dtype=np.intp)
                self._arrays = (empty, empty, np.empty(0, dtype=np.float64))
        return self._arrays

    def adjacency(self) -> np.ndarray:
        """Dense symmetric adjacency matrix W."""
        w_mat = np.zeros((self.n, self.n))
        m, n, w = self.edge_arrays()
        w_mat[m, n] = w
        w_mat[n, m] = w
        return w_mat

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for (m, n) in self.edges:
            adj[m].append(n)
            adj[n].append(m)
        return adj

    def copy_with(self, edge: tuple[int, int], new_weight: float) -> "WeightedGraph":
        """New version with one edge set (or removed when weight ~ 0)."""
        key = canonical_edge(*edge)
        g = WeightedGraph.__new__(WeightedGraph)
        g.n = self.n
        if new_weight > WEIGHT_ZERO:
            g.edges = {k: (new_weight if k == key else w) for k, w in self.edges.items()}
            if key not in g.edges:
                g.edges = dict(sorted({**self.edges, key: new_weight}.items()))
        else:
            g.edges = {k: w for k, w in self.edges.items() if k != key}
        g._arrays = None
        return g

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, edges={self.edge_count})"


class LaplacianView:
    """Combinatorial Laplacian L = diag(W 1) - W derived from a graph.

    Dense ndarray below DENSE_LIMIT nodes, CSR above; `dense()` always
    yields the ndarray form.
    """

    __slots__ = ("n", "matrix", "is_dense")

    def __init__(self, n: int, matrix, is_dense: bool):
        self.n = n
        self.matrix = matrix
        self.is_dense = is_dense

    def dense(self) -> np.ndarray:
        return self.matrix if self.is_dense else self.matrix.toarray()

    def validate(self, w_fro: float | None = None):
        """Assert row sums vanish and the spectrum is nonnegative."""
        dense = self.dense()
        if w_fro is None:
            off = dense - np.diag(np.diag(dense))
            w_fro = float(np.linalg.norm(off))
        row_tol = 1e-12 * (1.0 + w_fro)
        if np.max(np.abs(dense.sum(axis=1)), initial=0.0) > row_tol:
            raise AssertionError("Laplacian rows do not sum to zero")
        if self.n > 0 and np.linalg.eigvalsh(dense)[0] < -1e-9:
            raise AssertionError("Laplacian is not positive semi-definite")


def build_laplacian(g: WeightedGraph) -> LaplacianView:
    """Laplacian of `g`, dense or sparse depending on node count."""
    m, n, w = g.edge_arrays()
    if g.n < DENSE_LIMIT:
        lap = np.zeros((g.n, g.n))
        lap[m, n] = -w
        lap[n, m] = -w
        deg = np.zeros(g.n)
        np.add.at(deg, m, w)
        np.add.at(deg, n, w)
        lap[np.arange(g.n), np.arange(g.n)] = deg
        return LaplacianView(g.n, lap, True)
    rows = np.concatenate([m, n, m, n])
    cols = np.concatenate([n, m, m, n])
    vals = np.concatenate([-w, -w, w, w])
    lap = sp.coo_matrix((vals, (rows, cols)), shape=(g.n, g.n)).tocsr()
    return LaplacianView(g.n, lap, False)


def weaken_edge(g: WeightedGraph, edge: tuple[int, int], eps: float) -> WeightedGraph:
    """Subtract `eps` from one edge weight, clamping at zero.

    Equivalent to subtracting min(eps, w) * E^{m,n} from the Laplacian,
    where E^{m,n} = (e_m - e_n)(e_m - e_n)^T. The edge entry is deleted
    once the clamped weight falls to numerical zero.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    key = canonical_edge(*edge)
    w = g.edges.get(key)
    if w is None:
        raise MissingEdge(f"edge {key} not in graph")
    return g.copy_with(key, max(0.0, w - eps))


def gram(x: np.ndarray) -> np.ndarray:
    """Gram matrix Y = X X^T of an N x K observation matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] < 1:
        raise ValueError("x must be an N x K matrix with K >= 1")
    y = x @ x.T
    return 0.5 * (y + y.T)


class ObservationSet:
    """Observation matrix X (N x K, one sample per column) with cached Gram."""

    __slots__ = ("x", "_gram")

    def __init__(self, x: np.ndarray):
        self.x = np.asarray(x, dtype=np.float64)
        if self.x.ndim != 2 or self.x.shape[1] < 1:
            raise ValueError("x must be an N x K matrix with K >= 1")
        self._gram = None

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def k(self) -> int:
        return self.x.shape[1]

    @property
    def gram(self) -> np.ndarray:
        if self._gram is None:
            self._gram = gram(self.x)
        return self._gram


def is_connected(g: WeightedGraph) -> bool:
    """True iff a traversal from node 0 reaches all nodes."""
    if g.n <= 1:
        return True
    adj = g.neighbors()
    seen = np.zeros(g.n, dtype=bool)
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == g.n


def connected_components(n: int, edge_list) -> list[list[int]]:
    """Connected components of the graph on nodes [0, n) with given edges."""
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for m, k in edge_list:
        ra, rb = find(m), find(k)
        if ra != rb:
            parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def complete_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    """Fully connected graph with uniform weights."""
    edges = {(i, j): weight for i in range(n) for j in range(i + 1, n)}
    return WeightedGraph(n, edges)
