"""Simple comparison augmenters: edge/node/attribute perturbations.

These implement the common heuristic baselines. Unlike the split-merge and
subgraph-mixing augmenters they generally bias the graph size or break
connectivity, which is exactly what the verification harness demonstrates.
"""

from __future__ import annotations

import math

import numpy as np

from .diffusion import sample_connected
from .graph import Graph, GraphError, connected_component, induced_subgraph

DEFAULT_RHO = 0.7


def drop_edge(g, rng):
    """Remove one edge chosen uniformly at random."""
    if g.num_edges == 0:
        raise GraphError("cannot drop an edge from an edgeless graph")
    i = int(rng.integers(g.num_edges))
    return Graph(g.num_nodes, np.delete(g.edges, i, axis=0),
                 g.features, g.label)


def drop_node(g, rng):
    """Remove one uniform node with all incident edges; indices compact."""
    if g.num_nodes < 2:
        raise GraphError("cannot drop a node from a graph with fewer than 2 nodes")
    v = int(rng.integers(g.num_nodes))
    keep = np.concatenate([np.arange(v), np.arange(v + 1, g.num_nodes)])
    return induced_subgraph(g, keep)


def add_edge(g, rng):
    """Insert one uniform non-edge."""
    n = g.num_nodes
    possible = n * (n - 1) // 2
    if g.num_edges == possible:
        raise GraphError("cannot add an edge to a complete graph")
    for _ in range(64):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u != v and not g.has_edge(u, v):
            return Graph(n, np.concatenate([g.edges, [[u, v]]]),
                         g.features, g.label)
    # dense graph: enumerate the remaining non-edges and draw exactly
    iu, iv = np.triu_indices(n, 1)
    keys = g.edges[:, 0] * n + g.edges[:, 1]
    mask = ~np.isin(iu * n + iv, keys)
    pick = int(rng.integers(mask.sum()))
    u, v = iu[mask][pick], iv[mask][pick]
    return Graph(n, np.concatenate([g.edges, [[u, v]]]), g.features, g.label)


def change_attr(g, rng):
    """Move the nonzero feature index of one uniform node to another index."""
    _require_onehot(g)
    v = int(rng.integers(g.num_nodes))
    return _change_attr_at(g, v, rng)


def _is_onehot(g):
    x = g.features
    return (g.feature_dim >= 2 and np.isin(x, (0.0, 1.0)).all()
            and (x.sum(axis=1) == 1.0).all())


def _require_onehot(g):
    if g.feature_dim < 2:
        raise GraphError("attribute change needs feature dimension >= 2")
    if not _is_onehot(g):
        raise GraphError("attribute change requires one-hot feature rows")


def _change_attr_at(g, v, rng):
    cur = int(np.argmax(g.features[v]))
    new = int(rng.integers(g.feature_dim - 1))
    if new >= cur:
        new += 1
    feats = g.features.copy()
    feats[v, cur] = 0.0
    feats[v, new] = 1.0
    return Graph(g.num_nodes, g.edges, feats, g.label)


def graph_crop(g, rng, rho=DEFAULT_RHO):
    """Keep a diffusion-selected connected subgraph around a uniform root."""
    if not 0.0 < rho <= 1.0:
        raise GraphError(f"crop ratio must be in (0, 1], got {rho}")
    if g.num_nodes == 0:
        raise GraphError("cannot crop an empty graph")
    r = int(rng.integers(g.num_nodes))
    k = math.ceil(rho * connected_component(g, r).size)
    sel = sample_connected(g, r, k)
    return induced_subgraph(g, sel.nodes)


def node_aug(g, rng):
    """Perturb the local neighborhood of one uniform target node.

    Applies, in order: an attribute change on the target (when features are
    one-hot), removal of one uniform incident edge (when any exists), and
    insertion of one uniform missing edge at the target (when any is
    missing). Inapplicable stages are skipped.
    """
    if g.num_nodes < 2:
        raise GraphError("local perturbation needs at least 2 nodes")
    v = int(rng.integers(g.num_nodes))
    out = g
    if _is_onehot(g):
        out = _change_attr_at(out, v, rng)
    incident = np.flatnonzero((out.edges[:, 0] == v) | (out.edges[:, 1] == v))
    if incident.size:
        i = incident[int(rng.integers(incident.size))]
        out = Graph(out.num_nodes, np.delete(out.edges, i, axis=0),
                    out.features, out.label)
    candidates = np.setdiff1d(np.arange(out.num_nodes), out.neighbors(v))
    candidates = candidates[candidates != v]
    if candidates.size:
        u = candidates[int(rng.integers(candidates.size))]
        out = Graph(out.num_nodes, np.concatenate([out.edges, [[v, u]]]),
                    out.features, out.label)
    return out


def motif_swap(g, rng):
    """Swap one edge of a uniformly chosen open triangle.

    An open triangle is a path u-v-w whose closing edge (u, w) is absent.
    The edge (v, w) is replaced by (u, w), preserving node count, edge
    count, and connectivity. Enumeration is global over all open triangles,
    so the cost grows with the number of wedges, not with the edge count.
    """
    keys = g.edges[:, 0] * g.num_nodes + g.edges[:, 1]
    counts = np.zeros(g.num_nodes, dtype=np.int64)
    for v in range(g.num_nodes):
        counts[v] = _open_pairs(g, v, keys)[0]
    cum = counts.cumsum()
    total = int(cum[-1]) if counts.size else 0
    if total == 0:
        raise GraphError("graph contains no open triangle")
    # ordered triples: each unordered wedge counts twice, once per direction
    pick = int(rng.integers(2 * total))
    v = int(np.searchsorted(cum * 2, pick, side="right"))
    offset = pick - 2 * int(cum[v - 1]) if v else pick
    _, pairs = _open_pairs(g, v, keys)
    u, w = pairs[offset // 2]
    if offset % 2:
        u, w = w, u
    e = g.edges
    lo, hi = min(v, w), max(v, w)
    drop = np.flatnonzero((e[:, 0] == lo) & (e[:, 1] == hi))
    e = np.delete(e, drop[0], axis=0)
    return Graph(g.num_nodes, np.concatenate([e, [[u, w]]]),
                 g.features, g.label)


def _open_pairs(g, v, keys):
    """Count and list the non-adjacent neighbor pairs of v.

    `keys` is the sorted encoding of the graph's canonical edge list.
    """
    nbrs = g.neighbors(v)
    if nbrs.size < 2:
        return 0, np.empty((0, 2), dtype=np.int64)
    iu, iw = np.triu_indices(nbrs.size, 1)
    pair_keys = nbrs[iu] * g.num_nodes + nbrs[iw]
    pos = np.searchsorted(keys, pair_keys)
    pos[pos == keys.size] = 0
    open_mask = keys[pos] != pair_keys
    return int(open_mask.sum()), np.stack([nbrs[iu][open_mask], nbrs[iw][open_mask]], axis=1)
