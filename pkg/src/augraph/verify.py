"""Statistical certification of augmenter properties and expectation oracles.

Each check produces a PropertyReport that is reproducible bit-for-bit from
(method, dataset, trials, seed). The five properties are:

  P1  unbiased size change (mean node and edge deltas are zero)
  P2  connectivity preserved in both directions on every trial
  P3  nodes change (node-count or feature-matrix second moment positive)
  P4  edges change (squared edge-delta mean positive)
  P5  near-linear runtime growth with the number of edges

Monte Carlo oracles validate closed-form expectations of the split, adjust,
and merge stages with 3-standard-error acceptance bands.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .datasets import gen_er
from .graph import Graph, GraphError, GraphSet, common_neighbors, count_triangles, \
    is_connected, triangle_stats, triangles_at
from .methods import make_augmenter
from .nodesam import compute_h, merge, split

Z99 = 2.576
SLOPE_LIMIT = 1.15
R2_LIMIT = 0.95
# below this slope the runtime is essentially flat and the R2 criterion is
# uninformative (no variance left for the fit to explain)
FLAT_SLOPE = 0.25


@dataclass
class PropertyReport:
    """Verdict of one method on one property, with its estimate and CI."""

    method: str
    prop: str
    verdict: str
    estimate: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self):
        return {"method": self.method, "property": self.prop,
                "verdict": self.verdict, "estimate": self.estimate,
                "ci_low": self.ci_low, "ci_high": self.ci_high,
                "trials": self.trials, "seed": self.seed,
                "details": self.details}


@dataclass
class OracleReport:
    """Monte Carlo mean of one stage statistic against its predicted value."""

    name: str
    predicted: float
    observed_mean: float
    observed_se: float
    trials: int
    seed: int

    @property
    def passed(self):
        if self.observed_se == 0.0:
            return self.observed_mean == self.predicted
        return abs(self.observed_mean - self.predicted) <= 3.0 * self.observed_se

    def to_dict(self):
        return {"name": self.name, "predicted": self.predicted,
                "observed_mean": self.observed_mean,
                "observed_se": self.observed_se, "trials": self.trials,
                "seed": self.seed, "passed": self.passed}


@dataclass
class DeltaDistribution:
    """Edge-count deltas of one method on one dataset."""

    method: str
    dataset: str
    deltas: np.ndarray

    def summary(self):
        d = self.deltas
        q1, med, q3 = np.percentile(d, [25, 50, 75])
        return {"min": float(d.min()), "q1": float(q1), "median": float(med),
                "q3": float(q3), "max": float(d.max()), "mean": float(d.mean())}

    def write_csv(self, directory):
        from pathlib import Path
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        raw = directory / f"{self.method}_deltas.csv"
        with open(raw, "w") as f:
            f.write("delta\n")
            f.write("".join(f"{int(x)}\n" for x in self.deltas))
        s = self.summary()
        cols = ["min", "q1", "median", "q3", "max", "mean"]
        with open(directory / f"{self.method}_delta_summary.csv", "w") as f:
            f.write(",".join(cols) + "\n")
            f.write(",".join(repr(s[c]) for c in cols) + "\n")
        return raw


def trial_rng(seed, trial):
    """Independent random stream for one trial, derived from the master seed."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def mean_ci(values, z=Z99):
    """(mean, ci_low, ci_high, se) of a sample; degenerate samples get se 0."""
    values = np.asarray(values, dtype=np.float64)
    m = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return m, m - z * se, m + z * se, se


# -- property checks ---------------------------------------------------------


def check_p1(method, gset, trials, seed, **params):
    """Unbiased size change: node deltas all zero (or CI straddling 0) and
    edge-delta 99% CI containing 0."""
    aug = make_augmenter(method, **params)
    pool, ratio = _trial_pool(method, gset)
    node_deltas = np.empty(trials, dtype=np.int64)
    edge_deltas = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        rng = trial_rng(seed, t)
        gi = int(pool[rng.integers(pool.size)])
        g = gset[gi]
        out = aug(gset, gi, rng).graph
        node_deltas[t] = out.num_nodes - g.num_nodes
        edge_deltas[t] = out.num_edges - g.num_edges
    n_mean, n_lo, n_hi, n_se = mean_ci(node_deltas)
    e_mean, e_lo, e_hi, e_se = mean_ci(edge_deltas)
    nodes_ok = bool((node_deltas == 0).all()) or n_lo <= 0.0 <= n_hi
    edges_ok = e_lo <= 0.0 <= e_hi
    verdict = "pass" if nodes_ok and edges_ok else "fail"
    details = {"node_mean": n_mean, "node_ci": [n_lo, n_hi], "node_se": n_se,
               "edge_se": e_se, "eligible_graphs": int(pool.size)}
    if ratio is not None:
        details["min_edge_to_h_ratio"] = ratio
    return PropertyReport(method, "P1", verdict, e_mean, e_lo, e_hi,
                          trials, seed, details)


def _trial_pool(method, gset):
    """Graph indices to draw trials from, with the edge-to-budget ratio.

    The size-unbiasedness of the split-adjust-merge pipeline is asymptotic
    in |E| relative to the adjustment budget h, so its P1 certificate is
    restricted to graphs with |E| >= 20 * max_i h_i and the achieved ratio
    is reported.
    """
    indices = np.arange(len(gset))
    if method != "nodesam":
        return indices, None
    ratios = np.array([_edge_to_h_ratio(g) for g in gset.graphs])
    eligible = indices[ratios >= 20.0]
    if eligible.size == 0:
        eligible = indices
    min_ratio = float(ratios[eligible].min())
    return eligible, (None if math.isinf(min_ratio) else min_ratio)


def _edge_to_h_ratio(g):
    ts = triangle_stats(g)
    deg = g.degrees()
    h_max = 0.0
    for v in range(g.num_nodes):
        h_max = max(h_max, compute_h(int(ts.per_node[v]), int(deg[v]),
                                     g.num_nodes, g.num_edges))
    if h_max == 0.0:
        return math.inf
    return g.num_edges / h_max


def check_p2(method, gset, trials, seed, **params):
    """Connectivity preserved: status identical before and after, all trials."""
    aug = make_augmenter(method, **params)
    mismatches = 0
    from_connected = 0
    from_disconnected = 0
    for t in range(trials):
        rng = trial_rng(seed, t)
        gi = int(rng.integers(len(gset)))
        g = gset[gi]
        before = is_connected(g)
        after = is_connected(aug(gset, gi, rng).graph)
        if before:
            from_connected += 1
        else:
            from_disconnected += 1
        if before != after:
            mismatches += 1
    rate = mismatches / trials
    verdict = "pass" if mismatches == 0 else "fail"
    details = {"mismatches": mismatches, "connected_trials": from_connected,
               "disconnected_trials": from_disconnected}
    return PropertyReport(method, "P2", verdict, rate, rate, rate,
                          trials, seed, details)


def check_p3(method, gset, trials, seed, **params):
    """Nodes change: positive second moment of node-count delta, or positive
    mean squared feature change on size-aligned trials."""
    aug = make_augmenter(method, **params)
    node_sq = np.empty(trials, dtype=np.float64)
    feat_sq = []
    for t in range(trials):
        rng = trial_rng(seed, t)
        gi = int(rng.integers(len(gset)))
        g = gset[gi]
        out = aug(gset, gi, rng).graph
        node_sq[t] = (out.num_nodes - g.num_nodes) ** 2
        if out.num_nodes == g.num_nodes:
            feat_sq.append(float(((out.features - g.features) ** 2).sum()))
    node_moment = float(node_sq.mean())
    feat_moment = float(np.mean(feat_sq)) if feat_sq else 0.0
    verdict = "pass" if node_moment > 0.0 or feat_moment > 0.0 else "fail"
    estimate = node_moment if node_moment > 0.0 else feat_moment
    details = {"node_sq_mean": node_moment, "feature_sq_mean": feat_moment,
               "size_aligned_trials": len(feat_sq)}
    return PropertyReport(method, "P3", verdict, estimate, estimate, estimate,
                          trials, seed, details)


def check_p4(method, gset, trials, seed, **params):
    """Edges change: positive mean of squared edge-count delta."""
    aug = make_augmenter(method, **params)
    sq = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        rng = trial_rng(seed, t)
        gi = int(rng.integers(len(gset)))
        g = gset[gi]
        out = aug(gset, gi, rng).graph
        sq[t] = float(out.num_edges - g.num_edges) ** 2
    m, lo, hi, _ = mean_ci(sq)
    verdict = "pass" if m > 0.0 else "fail"
    return PropertyReport(method, "P4", verdict, m, lo, hi, trials, seed, {})


def check_p5(method, sizes, seed, degree=6.0, repeats=5, fixed_nodes=None,
             trials=None, **params):
    """Near-linear scaling: log-log slope of median runtime vs edge count.

    Benchmarks the method on uniform random graphs whose edge counts follow
    `sizes`. With `fixed_nodes` the node count stays constant so density
    (and the wedge count) grows, which is the regime that separates
    wedge-enumerating methods from linear ones. Passes when the fitted
    slope is at most 1.15 and the fit explains the variance (R^2 >= 0.95),
    or when the runtime is essentially flat.
    """
    if len(sizes) < 2:
        raise GraphError("scaling fit needs at least two sizes")
    aug = make_augmenter(method, **params)
    med_times = []
    node_counts = []
    for si, m_edges in enumerate(sizes):
        n = int(fixed_nodes) if fixed_nodes else max(int(round(2 * m_edges / degree)), 3)
        node_counts.append(n)
        gen = np.random.default_rng(np.random.SeedSequence([seed, si]))
        base = gen_er(n, m_edges, gen)
        partner = gen_er(n, m_edges, gen)
        feats = _random_onehot(n, 2, gen)
        feats2 = _random_onehot(n, 2, gen)
        reps = []
        for rep in range(repeats):
            # fresh objects so lazy caches never carry over between repeats
            g = Graph(n, base.edges, feats, 0)
            g2 = Graph(n, partner.edges, feats2, 1)
            pair = GraphSet([g, g2], [0, 1], 2, 2)
            rng = trial_rng(seed, si * repeats + rep)
            t0 = time.perf_counter()
            aug(pair, 0, rng)
            reps.append(time.perf_counter() - t0)
        med_times.append(float(np.median(reps)))
    slope, r2, se = _loglog_fit(np.asarray(sizes, dtype=float),
                                np.asarray(med_times))
    ok = slope <= SLOPE_LIMIT and (r2 >= R2_LIMIT or slope <= FLAT_SLOPE)
    details = {"sizes": [int(s) for s in sizes], "node_counts": node_counts,
               "median_seconds": med_times, "r2": r2,
               "fixed_nodes": int(fixed_nodes) if fixed_nodes else None}
    return PropertyReport(method, "P5", "pass" if ok else "fail", slope,
                          slope - Z99 * se, slope + Z99 * se,
                          len(sizes) * repeats, seed, details)


def _loglog_fit(sizes, times):
    x = np.log10(sizes)
    y = np.log10(np.maximum(times, 1e-12))
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    pred = slope * x + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(r2), float(math.sqrt(max(cov[0, 0], 0.0)))


def _random_onehot(n, d, rng):
    feats = np.zeros((n, d))
    feats[np.arange(n), rng.integers(d, size=n)] = 1.0
    return feats


# -- Monte Carlo oracles -----------------------------------------------------


def oracle_split_triangles(g, target, trials, seed):
    """Mean triangle count after splitting `target` vs T(G) - t/2."""
    t_v, _ = triangles_at(g, target)
    predicted = count_triangles(g) - t_v / 2.0
    obs = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        rng = trial_rng(seed, t)
        obs[t] = count_triangles(split(g, rng, target=target).graph)
    m, _, _, se = mean_ci(obs)
    return OracleReport("split-triangles", predicted, m, se, trials, seed)


def oracle_adjust_triangles(g, target, u, trials, seed):
    """Mean new-triangle count of one adjustment edge vs |common|/2 + 1.

    `u` must be a neighbor of the split target; the inserted edge connects
    u to whichever child it is not already adjacent to.
    """
    if not g.has_edge(u, target):
        raise GraphError("the adjusted node must neighbor the split target")
    predicted = common_neighbors(g, u, target).size / 2.0 + 1.0
    obs = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        rng = trial_rng(seed, t)
        out = split(g, rng, target=target)
        gp = out.graph
        vj, vk = out.children
        other = vj if gp.has_edge(u, vk) else vk
        before = count_triangles(gp)
        inserted = Graph(gp.num_nodes,
                         np.concatenate([gp.edges, [[u, other]]]),
                         gp.features)
        obs[t] = count_triangles(inserted) - before
    m, _, _, se = mean_ci(obs)
    return OracleReport("adjust-triangles", predicted, m, se, trials, seed)


def oracle_merge_edges(g, trials, seed):
    """Mean post-merge edge count vs |E| - 3T(G)/|E| - 1."""
    if g.num_edges == 0:
        raise GraphError("merge oracle needs at least one edge")
    predicted = g.num_edges - 3.0 * count_triangles(g) / g.num_edges - 1.0
    obs = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        rng = trial_rng(seed, t)
        obs[t] = merge(g, rng).graph.num_edges
    m, _, _, se = mean_ci(obs)
    return OracleReport("merge-edges", predicted, m, se, trials, seed)


# -- distributions and the full matrix --------------------------------------


def delta_distribution(method, gset, trials, seed, dataset="dataset", **params):
    """Raw edge-count deltas of a method over the set."""
    aug = make_augmenter(method, **params)
    deltas = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        rng = trial_rng(seed, t)
        gi = int(rng.integers(len(gset)))
        out = aug(gset, gi, rng).graph
        deltas[t] = out.num_edges - gset[gi].num_edges
    return DeltaDistribution(method, dataset, deltas)


SPARSE_SIZES = (1000, 3162, 10000, 31623, 100000)
DENSE_SIZES = (1000, 3162, 10000, 31623, 100000)
DENSE_NODES = 2000


def property_matrix(methods, gset, trials, seed, sparse_sizes=SPARSE_SIZES,
                    dense_sizes=DENSE_SIZES, dense_nodes=DENSE_NODES,
                    repeats=3, degree=6.0, include_p5=True, **params):
    """P1..P5 verdicts for every named method.

    Wedge-enumerating methods get the fixed-node (density-growing) ladder
    for P5; everything else is benchmarked on constant-degree graphs.
    """
    reports = []
    for method in methods:
        reports.append(check_p1(method, gset, trials, seed, **params))
        reports.append(check_p2(method, gset, trials, seed, **params))
        reports.append(check_p3(method, gset, trials, seed, **params))
        reports.append(check_p4(method, gset, trials, seed, **params))
        if include_p5:
            if method == "motifswap":
                reports.append(check_p5(method, dense_sizes, seed,
                                        repeats=repeats,
                                        fixed_nodes=dense_nodes, **params))
            else:
                reports.append(check_p5(method, sparse_sizes, seed,
                                        degree=degree, repeats=repeats,
                                        **params))
    return reports


# -- synthetic verification corpus -------------------------------------------


def synthetic_corpus(seed, feature_dim=4):
    """Mixed corpus for property certification.

    Contains connected triangle-bearing random graphs, stars (bridges and
    open triangles), and disconnected two-component unions, so that every
    registered method is applicable and every property failure mode is
    observable. Features are random one-hot rows.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    graphs = []
    for n in (24, 30, 36, 42, 48):
        graphs.append(_connected_er(n, 3 * n, rng))
    for n in (10, 12, 14):
        hub = np.stack([np.zeros(n - 1, dtype=np.int64),
                        np.arange(1, n, dtype=np.int64)], axis=1)
        graphs.append(Graph(n, hub))
    for n in (12, 14, 16, 18):
        a = _connected_er(n, int(2.5 * n), rng)
        b = _connected_er(n, int(2.5 * n), rng)
        edges = np.concatenate([a.edges, b.edges + n])
        graphs.append(Graph(2 * n, edges))
    out = []
    labels = []
    for i, g in enumerate(graphs):
        feats = _random_onehot(g.num_nodes, feature_dim, rng)
        label = i % 2
        out.append(Graph(g.num_nodes, g.edges, feats, label))
        labels.append(label)
    return GraphSet(out, labels, 2, feature_dim)


def _connected_er(n, m, rng):
    for _ in range(1000):
        g = gen_er(n, m, rng)
        if is_connected(g):
            return g
    raise GraphError(f"could not draw a connected graph with n={n}, m={m}")
