"""NodeSam augmenter: split a node, adjust triangles, merge a node pair.

The three stages compose into an augmentation that preserves the node count
exactly and the expected edge count, while still changing both node features
and topology on every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, triangles_at

VARIANTS = ("full", "base", "split-only", "merge-only")


@dataclass
class SplitOutcome:
    """Result of splitting one node into an adjacent pair.

    `target` is the split node's index in the input graph; `children` are
    the two replacement nodes in `graph` (the first reuses the target's
    index, the second is the new last index).
    """

    graph: Graph
    target: int
    children: tuple[int, int]


@dataclass
class AdjustParams:
    """Inputs and random draw of the adjustment stage for one split."""

    t_i: int
    d_i: int
    c_i: float
    h_i: float
    candidates: np.ndarray
    chosen: np.ndarray


@dataclass
class MergeOutcome:
    """Result of merging two adjacent nodes into one."""

    graph: Graph
    merged: tuple[int, int]
    result: int
    removed_edges: int


def split(g, rng, target=None):
    """Split a uniformly chosen node into two adjacent nodes.

    Each edge at the target is reattached to one of the two children by an
    independent fair coin, so the child degrees follow Binomial(d, 1/2).
    Both children inherit the target's feature row. Pass `target` to fix
    the split node instead of sampling it.
    """
    if g.num_nodes == 0:
        raise GraphError("cannot split a node of an empty graph")
    v = int(rng.integers(g.num_nodes)) if target is None else int(target)
    g._check_node(v)
    n = g.num_nodes
    e = g.edges.copy()
    incident = np.flatnonzero((e[:, 0] == v) | (e[:, 1] == v))
    moved = incident[rng.random(incident.size) < 0.5]
    rows = e[moved]
    rows[rows == v] = n
    e[moved] = rows
    e = np.concatenate([e, [[v, n]]])
    feats = np.concatenate([g.features, g.features[v:v + 1]])
    return SplitOutcome(Graph(n + 1, e, feats, g.label), v, (v, n))


def compute_h(t_i, d_i, n_nodes, n_edges):
    """Expected number of edges the adjustment stage should insert.

    Solves for the insertion budget that balances the edges the merge stage
    is expected to remove, given the triangle count t_i and degree d_i of
    the split target. Clamped below at zero.
    """
    if t_i > 0 and d_i == 0:
        raise GraphError("a node with triangles cannot have degree 0")
    c = n_edges - (3.0 * t_i / d_i if d_i > 0 else 0.0) - 2.0
    disc = c * c + 4.0 * t_i * n_nodes - 6.0 * t_i
    return max(0.0, 0.5 * (math.sqrt(disc) - c))


def adjust_params(g, target, rng):
    """Draw the adjustment subset for a split of `target` in graph g.

    Every node that forms a triangle with the target is included
    independently with probability min(1, h_i / (|T_i| - 1)).
    """
    t_i, members = triangles_at(g, target)
    d_i = g.degree(target)
    if t_i == 0:
        empty = np.empty(0, dtype=np.int64)
        c_i = float(g.num_edges) - (3.0 * t_i / d_i if d_i > 0 else 0.0) - 2.0
        return AdjustParams(0, d_i, c_i, 0.0, empty, empty)
    h_i = compute_h(t_i, d_i, g.num_nodes, g.num_edges)
    c_i = g.num_edges - 3.0 * t_i / d_i - 2.0
    candidates = members[members != target]
    prob = min(1.0, h_i / candidates.size)
    chosen = candidates[rng.random(candidates.size) < prob]
    return AdjustParams(t_i, d_i, c_i, h_i, candidates, chosen)


def adjust(g, split_out, rng):
    """Insert compensating edges after a split.

    Each chosen node ends up adjacent to both children: it already touches
    one of them (it was a neighbor of the target), and the edge to the
    other child is added. A no-op when the target was in no triangle.
    """
    params = adjust_params(g, split_out.target, rng)
    if params.chosen.size == 0:
        return split_out.graph
    gp = split_out.graph
    vj, vk = split_out.children
    # vk is the largest index in gp, so its edges sit in the second column
    nbrs_of_k = gp.edges[gp.edges[:, 1] == vk, 0]
    partner = np.where(np.isin(params.chosen, nbrs_of_k), vj, vk)
    added = np.stack([params.chosen, partner], axis=1)
    return Graph(gp.num_nodes, np.concatenate([gp.edges, added]),
                 gp.features, gp.label)


def merge(g, rng):
    """Merge the endpoints of a uniformly chosen edge into one node.

    The merged node carries the mean of the endpoint features; incident
    edges are rewired to it and parallel duplicates collapse, removing
    1 + t edges where t counts the triangles through the chosen edge.
    """
    if g.num_edges == 0:
        raise GraphError("cannot merge in a graph without edges")
    o, p = (int(x) for x in g.edges[int(rng.integers(g.num_edges))])
    n = g.num_nodes
    # merged node keeps slot o; slot p disappears and higher slots shift down
    idx_map = np.concatenate([np.arange(p), [o], np.arange(p, n - 1)])
    e = idx_map[g.edges]
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    keep = lo != hi
    keys = np.unique(lo[keep] * (n - 1) + hi[keep])
    new_edges = np.stack([keys // (n - 1), keys % (n - 1)], axis=1)
    feats = np.delete(g.features, p, axis=0)
    feats[o] = (g.features[o] + g.features[p]) / 2.0
    out = Graph(n - 1, new_edges, feats, g.label)
    return MergeOutcome(out, (o, p), o, g.num_edges - out.num_edges)


def nodesam(g, rng):
    """Full split-adjust-merge pipeline; preserves node count and label."""
    s = split(g, rng)
    adjusted = adjust(g, s, rng)
    return merge(adjusted, rng).graph


def nodesam_variant(g, variant, rng):
    """Run only the named stages: full, base (no adjust), split- or merge-only."""
    if variant == "full":
        return nodesam(g, rng)
    if variant == "base":
        return merge(split(g, rng).graph, rng).graph
    if variant == "split-only":
        return split(g, rng).graph
    if variant == "merge-only":
        return merge(g, rng).graph
    raise GraphError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
