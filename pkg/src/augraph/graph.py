"""Immutable undirected graph representation and structural primitives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph


class GraphError(ValueError):
    """Raised when a graph violates its structural invariants."""


class Graph:
    """A simple undirected graph with node features and an optional label.

    Edges are stored canonically as (min, max) pairs in lexicographic order.
    Instances are immutable after construction; all mutating algorithms
    return new graphs. Derived views (adjacency, sparse matrix) are built
    lazily and cached, which is safe because the graph never changes.
    """

    __slots__ = ("num_nodes", "edges", "features", "label",
                 "_indptr", "_indices", "_csr", "_norm_adj")

    def __init__(self, num_nodes, edges=(), features=None, label=None):
        num_nodes = int(num_nodes)
        if num_nodes < 0:
            raise GraphError("node count must be non-negative")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            lo = np.minimum(e[:, 0], e[:, 1])
            hi = np.maximum(e[:, 0], e[:, 1])
            e = np.stack([lo, hi], axis=1)
            e = e[np.lexsort((e[:, 1], e[:, 0]))]
            if lo.min() < 0 or hi.max() >= num_nodes:
                raise GraphError("edge endpoint out of range")
            if (e[:, 0] == e[:, 1]).any():
                raise GraphError("self-loops are not allowed")
            if (np.diff(e, axis=0) == 0).all(axis=1).any():
                raise GraphError("duplicate edges are not allowed")
        if features is None:
            features = np.zeros((num_nodes, 1))
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] != num_nodes:
            raise GraphError(
                f"feature matrix must have {num_nodes} rows, got {features.shape}")

        object.__setattr__(self, "num_nodes", num_nodes)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "label", None if label is None else int(label))
        object.__setattr__(self, "_indptr", None)
        object.__setattr__(self, "_indices", None)
        object.__setattr__(self, "_csr", None)
        object.__setattr__(self, "_norm_adj", None)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    # -- basic counts ----------------------------------------------------

    @property
    def num_edges(self):
        return self.edges.shape[0]

    @property
    def feature_dim(self):
        return self.features.shape[1]

    def degrees(self):
        """Degree of every node as an int array."""
        indptr, _ = self.adjacency()
        return np.diff(indptr)

    def degree(self, v):
        indptr, _ = self.adjacency()
        self._check_node(v)
        return int(indptr[v + 1] - indptr[v])

    # -- adjacency views ---------------------------------------------------

    def adjacency(self):
        """CSR-style (indptr, indices) with neighbor lists sorted ascending."""
        if self._indptr is None:
            n, e = self.num_nodes, self.edges
            src = np.concatenate([e[:, 0], e[:, 1]])
            dst = np.concatenate([e[:, 1], e[:, 0]])
            order = np.lexsort((dst, src))
            indices = dst[order]
            counts = np.bincount(src, minlength=n)
            indptr = np.concatenate([[0], counts.cumsum()])
            object.__setattr__(self, "_indptr", indptr)
            object.__setattr__(self, "_indices", indices)
        return self._indptr, self._indices

    def neighbors(self, v):
        """Sorted array of nodes adjacent to v."""
        self._check_node(v)
        indptr, indices = self.adjacency()
        return indices[indptr[v]:indptr[v + 1]]

    def has_edge(self, u, v):
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def to_csr(self):
        """Scipy CSR adjacency matrix (unweighted, symmetric)."""
        if self._csr is None:
            indptr, indices = self.adjacency()
            m = sp.csr_matrix(
                (np.ones(indices.size), indices, indptr),
                shape=(self.num_nodes, self.num_nodes))
            object.__setattr__(self, "_csr", m)
        return self._csr

    _DENSE_LIMIT = 128

    def normalized_adjacency(self):
        """Symmetrically normalized adjacency D^(-1/2) A D^(-1/2).

        Rows and columns of zero-degree nodes are zero. Returned dense for
        small graphs and as a scipy CSR matrix otherwise; cached either way.
        """
        if self._norm_adj is None:
            deg = self.degrees().astype(np.float64)
            inv_sqrt = np.zeros_like(deg)
            nz = deg > 0
            inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
            if self.num_nodes <= self._DENSE_LIMIT:
                m = np.zeros((self.num_nodes, self.num_nodes))
                e = self.edges
                w = inv_sqrt[e[:, 0]] * inv_sqrt[e[:, 1]]
                m[e[:, 0], e[:, 1]] = w
                m[e[:, 1], e[:, 0]] = w
            else:
                indptr, indices = self.adjacency()
                src = np.repeat(np.arange(self.num_nodes), np.diff(indptr))
                data = inv_sqrt[src] * inv_sqrt[indices]
                m = sp.csr_matrix((data, indices, indptr),
                                  shape=(self.num_nodes, self.num_nodes))
            object.__setattr__(self, "_norm_adj", m)
        return self._norm_adj

    def _check_node(self, v):
        if not 0 <= v < self.num_nodes:
            raise GraphError(f"node index {v} out of range [0, {self.num_nodes})")

    # -- value semantics ---------------------------------------------------

    def replace(self, **kwargs):
        """New graph with the given fields replaced."""
        parts = {"num_nodes": self.num_nodes, "edges": self.edges,
                 "features": self.features, "label": self.label}
        parts.update(kwargs)
        return Graph(**parts)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.num_nodes == other.num_nodes
                and self.label == other.label
                and self.edges.shape == other.edges.shape
                and (self.edges == other.edges).all()
                and self.features.shape == other.features.shape
                and (self.features == other.features).all())

    __hash__ = None

    def __repr__(self):
        return (f"Graph(nodes={self.num_nodes}, edges={self.num_edges}, "
                f"d={self.feature_dim}, label={self.label})")


@dataclass
class GraphSet:
    """A labeled collection of graphs with shared feature dimensionality."""

    graphs: list
    labels: list
    num_classes: int
    feature_dim: int

    def __post_init__(self):
        if len(self.graphs) != len(self.labels):
            raise GraphError("graphs and labels must have equal length")
        if self.graphs and self.num_classes < 1:
            raise GraphError("num_classes must be positive")
        for i, (g, y) in enumerate(zip(self.graphs, self.labels)):
            if not 0 <= y < self.num_classes:
                raise GraphError(f"label {y} of graph {i} out of range")
            if g.feature_dim != self.feature_dim:
                raise GraphError(
                    f"graph {i} has feature dim {g.feature_dim}, expected {self.feature_dim}")

    def __len__(self):
        return len(self.graphs)

    def __getitem__(self, i):
        return self.graphs[i]


@dataclass
class TriangleStats:
    """Triangle census: total count, triangles per node, triangles per edge.

    per_edge is aligned with the rows of the graph's canonical edge array.
    """

    total: int
    per_node: np.ndarray
    per_edge: np.ndarray


def count_triangles(g):
    """Exact number of 3-cliques in the graph."""
    return _edge_triangles(g).sum() // 3


def triangle_stats(g):
    """Full triangle census of the graph."""
    per_edge = _edge_triangles(g)
    per_node = np.zeros(g.num_nodes, dtype=np.int64)
    np.add.at(per_node, g.edges[:, 0], per_edge)
    np.add.at(per_node, g.edges[:, 1], per_edge)
    # each triangle at v is counted once per incident edge, i.e. twice
    per_node //= 2
    return TriangleStats(int(per_edge.sum()) // 3, per_node, per_edge)


def _edge_triangles(g):
    """Number of triangles through each edge (= common neighbors of its ends)."""
    indptr, indices = g.adjacency()
    out = np.zeros(g.num_edges, dtype=np.int64)
    for i, (u, v) in enumerate(g.edges):
        nu = indices[indptr[u]:indptr[u + 1]]
        nv = indices[indptr[v]:indptr[v + 1]]
        out[i] = _sorted_intersect_size(nu, nv)
    return out


def _sorted_intersect_size(a, b):
    if a.size > b.size:
        a, b = b, a
    if a.size == 0:
        return 0
    pos = np.searchsorted(b, a)
    pos[pos == b.size] = 0
    return int((b[pos] == a).sum())


def triangles_at(g, v):
    """Triangle count at node v and the set of nodes in those triangles.

    Returns (t_v, members) where members is a sorted array containing v
    and every node that forms a triangle with v; members is empty when
    v is in no triangle.
    """
    g._check_node(v)
    nv = g.neighbors(v)
    twice_t = 0
    parts = []
    for u in nv:
        common = common_neighbors(g, v, int(u))
        twice_t += common.size
        if common.size:
            parts.append(common)
    if twice_t == 0:
        return 0, np.empty(0, dtype=np.int64)
    members = np.unique(np.concatenate(parts + [np.array([v], dtype=np.int64)]))
    return twice_t // 2, members


def common_neighbors(g, u, v):
    """Sorted array of nodes adjacent to both u and v."""
    if u == v:
        raise GraphError("common_neighbors requires distinct nodes")
    nu, nv = g.neighbors(u), g.neighbors(v)
    if nu.size > nv.size:
        nu, nv = nv, nu
    if nu.size == 0:
        return np.empty(0, dtype=np.int64)
    pos = np.searchsorted(nv, nu)
    pos[pos == nv.size] = 0
    return nu[nv[pos] == nu]


def connected_component(g, r):
    """Sorted array of all nodes reachable from r, including r."""
    g._check_node(r)
    labels = _component_labels(g)
    return np.flatnonzero(labels == labels[r])


def is_connected(g):
    """True iff the graph has exactly one connected component."""
    if g.num_nodes == 0:
        raise GraphError("connectivity is undefined for the empty graph")
    if g.num_nodes == 1:
        return True
    n, _ = csgraph.connected_components(g.to_csr(), directed=False)
    return n == 1


def _component_labels(g):
    if g.num_nodes == 1:
        return np.zeros(1, dtype=np.int64)
    _, labels = csgraph.connected_components(g.to_csr(), directed=False)
    return labels


def induced_subgraph(g, nodes):
    """Vertex-induced subgraph on the given nodes, relabeled in their order."""
    nodes = np.asarray(nodes, dtype=np.int64)
    pos = np.full(g.num_nodes, -1, dtype=np.int64)
    pos[nodes] = np.arange(nodes.size)
    e = g.edges
    keep = (pos[e[:, 0]] >= 0) & (pos[e[:, 1]] >= 0)
    return Graph(nodes.size, pos[e[keep]], g.features[nodes], g.label)


def bfs_order(g, r):
    """Breadth-first visitation order from r, restricted to r's component.

    Within each frontier, nodes are visited in ascending index order, so
    the result is deterministic.
    """
    g._check_node(r)
    indptr, indices = g.adjacency()
    visited = np.zeros(g.num_nodes, dtype=bool)
    visited[r] = True
    frontier = np.array([r], dtype=np.int64)
    order = [frontier]
    while frontier.size:
        nbrs = _gather(indptr, indices, frontier)
        nbrs = nbrs[~visited[nbrs]]
        if nbrs.size == 0:
            break
        frontier = np.unique(nbrs)
        visited[frontier] = True
        order.append(frontier)
    return np.concatenate(order)


def _gather(indptr, indices, nodes):
    """Concatenated neighbor lists of the given nodes."""
    starts = indptr[nodes]
    counts = indptr[nodes + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    # standard trick: turn (start, count) ranges into one index vector
    keep = counts > 0
    starts, counts = starts[keep], counts[keep]
    step = np.ones(total, dtype=np.int64)
    step[0] = starts[0]
    ends = starts + counts
    cum = counts.cumsum()
    step[cum[:-1]] = starts[1:] - ends[:-1] + 1
    return indices[step.cumsum()]
