"""TUDataset-format loading and writing, synthetic graphs, dataset stats.

The on-disk layout is the common multi-file plain-text one: an edge list
with every undirected edge in both directions (`<name>_A.txt`, 1-indexed),
a per-node graph indicator, per-graph labels, and optional per-node labels
or real-valued attributes. Written datasets add `<name>_soft_labels.txt`
when samples carry soft labels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, GraphError, GraphSet


class DatasetError(ValueError):
    """Raised for malformed or missing dataset files."""


@dataclass
class DatasetStats:
    num_graphs: int
    total_nodes: int
    total_edges: int
    feature_dim: int
    num_labels: int

    def row(self):
        return (self.num_graphs, self.total_nodes, self.total_edges,
                self.feature_dim, self.num_labels)


@dataclass
class FoldSplit:
    """Per-graph fold assignment in [0, num_folds)."""

    assignments: np.ndarray
    num_folds: int


def load_tudataset(directory, name):
    """Load a dataset in TUDataset text format into a GraphSet.

    Node features come from one-hot node labels when present, else from
    node attributes, else from a one-hot encoding of node degree.
    """
    directory = Path(directory)
    edges_file = directory / f"{name}_A.txt"
    indicator_file = directory / f"{name}_graph_indicator.txt"
    for f in (edges_file, indicator_file):
        if not f.exists():
            raise DatasetError(f"required file {f} is missing")

    indicator = _read_ints(indicator_file)
    if indicator.ndim != 1 or indicator.size == 0:
        raise DatasetError(f"{indicator_file} must list one graph id per node")
    num_nodes = indicator.size
    num_graphs = int(indicator.max())
    if indicator.min() < 1:
        raise DatasetError("graph indicator ids must be 1-indexed")
    if (np.diff(indicator) < 0).any():
        raise DatasetError("graph indicator must be non-decreasing")

    raw_edges = _read_ints(edges_file)
    raw_edges = raw_edges.reshape(-1, 2)
    if raw_edges.size and (raw_edges.min() < 1 or raw_edges.max() > num_nodes):
        raise DatasetError("edge list references a node outside the indicator")

    # collapse directed line pairs into undirected edges
    lo = np.minimum(raw_edges[:, 0], raw_edges[:, 1]) - 1
    hi = np.maximum(raw_edges[:, 0], raw_edges[:, 1]) - 1
    if (lo == hi).any():
        raise DatasetError("self-loops are not supported")
    keys, counts = np.unique(lo * num_nodes + hi, return_counts=True)
    if (counts == 1).any():
        warnings.warn(
            f"{name}: {(counts == 1).sum()} edge(s) listed in one direction only",
            stacklevel=2)
    lo, hi = keys // num_nodes, keys % num_nodes

    if (indicator[lo] != indicator[hi]).any():
        raise DatasetError("an edge connects nodes of different graphs")

    labels_file = directory / f"{name}_graph_labels.txt"
    if labels_file.exists():
        raw_labels = _read_ints(labels_file)
        if raw_labels.size != num_graphs:
            raise DatasetError("graph label count does not match graph count")
        classes = np.unique(raw_labels)
        labels = np.searchsorted(classes, raw_labels)
    else:
        labels = np.zeros(num_graphs, dtype=np.int64)

    features = _node_features(directory, name, num_nodes, lo, hi)

    node_offset = np.zeros(num_graphs + 1, dtype=np.int64)
    node_counts = np.bincount(indicator - 1, minlength=num_graphs)
    node_offset[1:] = node_counts.cumsum()
    edge_graph = indicator[lo] - 1
    order = np.argsort(edge_graph, kind="stable")
    lo, hi, edge_graph = lo[order], hi[order], edge_graph[order]
    edge_offset = np.zeros(num_graphs + 1, dtype=np.int64)
    edge_offset[1:] = np.bincount(edge_graph, minlength=num_graphs).cumsum()

    graphs = []
    for gi in range(num_graphs):
        n0, n1 = node_offset[gi], node_offset[gi + 1]
        e0, e1 = edge_offset[gi], edge_offset[gi + 1]
        local = np.stack([lo[e0:e1] - n0, hi[e0:e1] - n0], axis=1)
        graphs.append(Graph(int(n1 - n0), local, features[n0:n1],
                            int(labels[gi])))
    num_classes = int(labels.max()) + 1 if num_graphs else 0
    feature_dim = features.shape[1]
    return GraphSet(graphs, [int(y) for y in labels], num_classes, feature_dim)


def _node_features(directory, name, num_nodes, lo, hi):
    node_labels_file = directory / f"{name}_node_labels.txt"
    attrs_file = directory / f"{name}_node_attributes.txt"
    if node_labels_file.exists():
        raw = _read_ints(node_labels_file)
        if raw.size != num_nodes:
            raise DatasetError("node label count does not match node count")
        values = np.unique(raw)
        feats = np.zeros((num_nodes, values.size))
        feats[np.arange(num_nodes), np.searchsorted(values, raw)] = 1.0
        return feats
    if attrs_file.exists():
        feats = _read_floats(attrs_file)
        if feats.ndim == 1:
            feats = feats.reshape(-1, 1)
        if feats.shape[0] != num_nodes:
            raise DatasetError("node attribute count does not match node count")
        return feats
    degrees = np.zeros(num_nodes, dtype=np.int64)
    np.add.at(degrees, lo, 1)
    np.add.at(degrees, hi, 1)
    values = np.unique(degrees)
    feats = np.zeros((num_nodes, values.size))
    feats[np.arange(num_nodes), np.searchsorted(values, degrees)] = 1.0
    return feats


def _read_ints(path):
    try:
        data = np.loadtxt(path, dtype=np.int64, delimiter=",", ndmin=1)
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from None
    return data


def _read_floats(path):
    try:
        return np.loadtxt(path, dtype=np.float64, delimiter=",", ndmin=1)
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from None


def write_dataset(data, directory, name):
    """Write graphs (a GraphSet or a list of augmented samples) to disk.

    Samples with soft labels additionally produce `<name>_soft_labels.txt`
    with one probability row per graph; their hard label files contain the
    argmax of the soft distribution.
    """
    graphs, hard_labels, soft_labels = _unpack(data)
    if not graphs:
        raise DatasetError("refusing to write a dataset with no graphs")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    a_lines = []
    indicator_lines = []
    attr_lines = []
    offset = 0
    for gi, g in enumerate(graphs):
        indptr, indices = g.adjacency()
        for u in range(g.num_nodes):
            for v in indices[indptr[u]:indptr[u + 1]]:
                a_lines.append(f"{offset + u + 1}, {offset + int(v) + 1}")
        indicator_lines.extend([str(gi + 1)] * g.num_nodes)
        for row in g.features:
            attr_lines.append(", ".join(repr(float(x)) for x in row))
        offset += g.num_nodes

    _write_lines(directory / f"{name}_A.txt", a_lines)
    _write_lines(directory / f"{name}_graph_indicator.txt", indicator_lines)
    _write_lines(directory / f"{name}_graph_labels.txt",
                 [str(y) for y in hard_labels])
    _write_lines(directory / f"{name}_node_attributes.txt", attr_lines)
    if soft_labels is not None:
        _write_lines(directory / f"{name}_soft_labels.txt",
                     [", ".join(repr(float(x)) for x in row)
                      for row in soft_labels])


def _unpack(data):
    if isinstance(data, GraphSet):
        return list(data.graphs), list(data.labels), None
    samples = list(data)
    graphs = [s.graph for s in samples]
    soft = [s.soft_label for s in samples]
    hard = [int(np.argmax(row)) for row in soft]
    return graphs, hard, soft


def _write_lines(path, lines):
    with open(path, "w") as f:
        f.write("\n".join(lines))
        if lines:
            f.write("\n")


def degree_onehot(gset):
    """Replace all features by a one-hot encoding of node degree.

    The feature dimension equals the number of distinct degrees across the
    whole set, and each node's row is one-hot at its degree's rank.
    """
    all_degrees = [g.degrees() for g in gset.graphs]
    values = np.unique(np.concatenate(all_degrees)) if gset.graphs else np.empty(0)
    graphs = []
    for g, deg in zip(gset.graphs, all_degrees):
        feats = np.zeros((g.num_nodes, values.size))
        feats[np.arange(g.num_nodes), np.searchsorted(values, deg)] = 1.0
        graphs.append(g.replace(features=feats))
    return GraphSet(graphs, list(gset.labels), gset.num_classes, int(values.size))


def gen_er(n, m, rng):
    """Uniform random simple graph with exactly n nodes and m edges."""
    possible = n * (n - 1) // 2
    if m > possible:
        raise DatasetError(f"{m} edges is infeasible for {n} nodes")
    if m == 0:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    if n <= 2048:
        iu, iv = np.triu_indices(n, 1)
        pick = rng.choice(possible, size=m, replace=False)
        pick.sort()
        edges = np.stack([iu[pick], iv[pick]], axis=1)
        return Graph(n, edges)
    keys = np.empty(0, dtype=np.int64)
    while keys.size < m:
        need = m - keys.size
        u = rng.integers(n, size=2 * need + 16)
        v = rng.integers(n, size=2 * need + 16)
        ok = u != v
        lo = np.minimum(u[ok], v[ok])
        hi = np.maximum(u[ok], v[ok])
        keys = np.unique(np.concatenate([keys, lo * n + hi]))
    if keys.size > m:
        # drawn pairs are exchangeable, so a uniform subset stays uniform
        keep = rng.choice(keys.size, size=m, replace=False)
        keep.sort()
        keys = keys[keep]
    return Graph(n, np.stack([keys // n, keys % n], axis=1))


def stats(gset):
    """Exact totals of the set: graphs, nodes, edges, features, labels."""
    return DatasetStats(
        num_graphs=len(gset),
        total_nodes=sum(g.num_nodes for g in gset.graphs),
        total_edges=sum(g.num_edges for g in gset.graphs),
        feature_dim=gset.feature_dim if gset.graphs else 0,
        num_labels=gset.num_classes if gset.graphs else 0,
    )


def make_folds(gset, k, rng):
    """Stratified split into k folds; per-class fold sizes differ by <= 1."""
    if k < 2:
        raise DatasetError("need at least 2 folds")
    if len(gset) < k:
        raise DatasetError(f"cannot split {len(gset)} graphs into {k} folds")
    labels = np.asarray(gset.labels)
    assignments = np.empty(len(gset), dtype=np.int64)
    cursor = 0
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        idx = idx[rng.permutation(idx.size)]
        for i in idx:
            assignments[i] = cursor % k
            cursor += 1
    return FoldSplit(assignments, k)
