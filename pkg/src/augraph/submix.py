"""SubMix augmenter: replace a connected subgraph with one from another graph.

The donor subgraph is matched onto the target by diffusion rank, and the
label becomes a soft mix of both graph labels weighted by the fraction of
edges kept from the original graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffusion import OrderedNodeSet, sample_connected
from .graph import Graph, GraphError, connected_component

DEFAULT_P = 0.4


@dataclass
class AugmentedSample:
    """An augmented graph with its soft label distribution."""

    graph: Graph
    soft_label: np.ndarray
    kept_ratio: float
    kept_edges: int
    donor_edges: int


@dataclass
class NodeMapping:
    """Rank-order bijection from donor positions to target positions."""

    donor: np.ndarray
    target: np.ndarray

    def apply(self, nodes, donor_size):
        table = np.full(donor_size, -1, dtype=np.int64)
        table[self.donor] = self.target
        return table[nodes]


def pick_partner(gset, g_index, rng):
    """Uniform index of any graph in the set other than g_index."""
    if len(gset) < 2:
        raise GraphError("partner selection needs at least two graphs")
    j = int(rng.integers(len(gset) - 1))
    return j + 1 if j >= g_index else j


def sample_pair(g, g2, p, rng):
    """Equal-size ordered connected node sets from two graphs.

    Roots are uniform in each graph; the shared size k is a uniform(0, p)
    fraction of the smaller root component, floored. k = 0 is permitted
    and yields two empty sets.
    """
    if not 0.0 < p < 1.0:
        raise GraphError(f"sampling ratio p must be in (0, 1), got {p}")
    if g.num_nodes == 0 or g2.num_nodes == 0:
        raise GraphError("cannot sample from an empty graph")
    r = int(rng.integers(g.num_nodes))
    r2 = int(rng.integers(g2.num_nodes))
    bound = min(connected_component(g, r).size, connected_component(g2, r2).size)
    k = math.floor(rng.uniform(0.0, p) * bound)
    return sample_connected(g, r, k), sample_connected(g2, r2, k)


def mix(g, y, g2, y2, s, s2, num_classes):
    """Replace the subgraph of g on s with the subgraph of g2 on s2.

    Keeps every edge of g that is not fully inside s, transfers every edge
    of g2 fully inside s2 through the rank mapping, and swaps in the donor
    feature rows. The soft label weights y by the kept-edge fraction.
    """
    if len(s) != len(s2):
        raise GraphError(f"node sets must have equal size, got {len(s)} and {len(s2)}")
    if g.feature_dim != g2.feature_dim:
        raise GraphError("feature dimensionalities differ")
    phi = NodeMapping(donor=s2.nodes, target=s.nodes)

    in_s = np.zeros(g.num_nodes, dtype=bool)
    in_s[s.nodes] = True
    e = g.edges
    kept = e[~(in_s[e[:, 0]] & in_s[e[:, 1]])]

    in_s2 = np.zeros(g2.num_nodes, dtype=bool)
    in_s2[s2.nodes] = True
    e2 = g2.edges
    inside = e2[in_s2[e2[:, 0]] & in_s2[e2[:, 1]]]
    donated = phi.apply(inside, g2.num_nodes)

    feats = g.features.copy()
    feats[phi.target] = g2.features[phi.donor]
    out = Graph(g.num_nodes, np.concatenate([kept, donated]), feats, y)

    total = kept.shape[0] + donated.shape[0]
    q = 1.0 if total == 0 else kept.shape[0] / total
    soft = q * _onehot(y, num_classes) + (1.0 - q) * _onehot(y2, num_classes)
    return AugmentedSample(out, soft, q, kept.shape[0], donated.shape[0])


def submix(gset, g_index, rng, p=DEFAULT_P):
    """Augment one graph of the set by mixing in a random partner."""
    j = pick_partner(gset, g_index, rng)
    g, g2 = gset[g_index], gset[j]
    s, s2 = sample_pair(g, g2, p, rng)
    return mix(g, gset.labels[g_index], g2, gset.labels[j], s, s2,
               gset.num_classes)


def submix_base(gset, g_index, rng, p=DEFAULT_P):
    """Ablation variant: node sets are uniform random subsets, no diffusion."""
    if not 0.0 < p < 1.0:
        raise GraphError(f"sampling ratio p must be in (0, 1), got {p}")
    j = pick_partner(gset, g_index, rng)
    g, g2 = gset[g_index], gset[j]
    k = math.floor(rng.uniform(0.0, p) * min(g.num_nodes, g2.num_nodes))
    s = _random_subset(g.num_nodes, k, rng)
    s2 = _random_subset(g2.num_nodes, k, rng)
    return mix(g, gset.labels[g_index], g2, gset.labels[j], s, s2,
               gset.num_classes)


def _random_subset(n, k, rng):
    nodes = rng.choice(n, size=k, replace=False).astype(np.int64)
    return OrderedNodeSet(nodes, int(nodes[0]) if k else None, "random")


def _onehot(y, num_classes):
    if not 0 <= y < num_classes:
        raise GraphError(f"label {y} out of range [0, {num_classes})")
    out = np.zeros(num_classes)
    out[y] = 1.0
    return out
