"""
Recover aggregation weights that justify a known clustering.

A node's pull towards a cluster is the composite weight of its edges into
that cluster; its holding power is the pull towards its own cluster minus
the strongest pull towards any other. Weight vectors are scored by how many
nodes they give positive holding power, smoothed through arctan so that the
optimizer sees a continuous objective.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import pearsonr

from .community import Clustering, modularity
from .errors import ConfigError, OptimizerError, UnknownClusterError
from .metaclustering import sample_alphas
from .metrics import vi_distance
from .multigraph import WeightVector, aggregate_linear
from .optimizer import Box, SearchResult, Sphere, pattern_search

logger = logging.getLogger(__name__)

HISTOGRAM_BIN_FRACTION = 0.05


@dataclass(frozen=True, eq=False)
class HoldingReport:
    per_node: dict
    positive_fraction: float
    objective_value: float
    steepness: float
    search: SearchResult = None

    def as_dict(self):
        return {
            "positive_fraction": self.positive_fraction,
            "objective_value": self.objective_value,
            "steepness": self.steepness,
            "evaluations": None if self.search is None else self.search.evaluations,
            "converged": None if self.search is None else self.search.converged,
            "improved": None if self.search is None else self.search.improved,
        }


@dataclass(frozen=True)
class ParetoPoint:
    alpha: WeightVector
    positive_fraction: float
    normalized_modularity: float


def _check_steepness(steepness):
    if not steepness > 0:
        raise ConfigError(f"steepness must be positive, got {steepness}")


class HoldingEvaluator:
    """
    Pulls and holding powers of one clustering under many weight vectors.

    Every (node, cluster) pair reached by an edge is a cell; the cells and
    the edge ends feeding them are computed once, so each evaluation is a
    pair of weighted bincounts over the edges.
    """

    def __init__(self, g, truth):
        self.graph = g
        self.truth = truth.aligned_to(g.nodes)
        labels = self.truth.labels
        self.n_clusters = self.truth.n_clusters
        ends = np.concatenate([g.sources, g.targets])
        reached = np.concatenate([labels[g.targets], labels[g.sources]])
        keys = ends * self.n_clusters + reached
        cell_keys, self._end_cell = np.unique(keys, return_inverse=True)
        self._end_cell = self._end_cell.reshape(-1)
        self._end_edge = np.tile(np.arange(g.n_edges), 2)
        self._cell_node = cell_keys // self.n_clusters
        cell_cluster = cell_keys % self.n_clusters
        self._own = cell_cluster == labels[self._cell_node]

    def composite(self, alpha):
        alpha = np.asarray(getattr(alpha, "alpha", alpha), dtype=float)
        return np.maximum(self.graph.weights @ alpha, 0.0)

    def cell_pulls(self, alpha):
        weights = self.composite(alpha)[self._end_edge]
        return np.bincount(self._end_cell, weights=weights, minlength=len(self._own))

    def holding_powers(self, alpha):
        n = self.graph.n_nodes
        pulls = self.cell_pulls(alpha)
        own = np.bincount(
            self._cell_node[self._own], weights=pulls[self._own], minlength=n
        )
        competing = np.zeros(n)
        np.maximum.at(competing, self._cell_node[~self._own], pulls[~self._own])
        return own - competing

    def arctan_objective(self, alpha, steepness):
        _check_steepness(steepness)
        return float(np.arctan(steepness * self.holding_powers(alpha)).sum())

    def report(self, alpha, steepness, search=None):
        _check_steepness(steepness)
        powers = self.holding_powers(alpha)
        return HoldingReport(
            per_node=dict(zip(self.graph.nodes, powers.tolist())),
            positive_fraction=float(np.count_nonzero(powers > 0)) / len(powers),
            objective_value=float(np.arctan(steepness * powers).sum()),
            steepness=steepness,
            search=search,
        )


def pull(g, alpha, c, v, k):
    """Composite weight of the edges between node `v` and cluster `k` of `c`."""
    c.aligned_to(g.nodes)
    index = g.index_of(v)
    if not isinstance(k, (int, np.integer)) or not 0 <= k < c.n_clusters:
        raise UnknownClusterError(f"Unknown cluster {k!r}; labels run from 0 to {c.n_clusters - 1}")
    # `k` names a cluster in `c`'s own labelling, not in the graph's node order
    members = np.zeros(g.n_nodes, dtype=bool)
    members[[g.index_of(node) for node in c.clusters[k]]] = True
    composite = np.maximum(g.weights @ np.asarray(getattr(alpha, "alpha", alpha)), 0.0)
    into = ((g.sources == index) & members[g.targets]) | ((g.targets == index) & members[g.sources])
    return float(composite[into].sum())


def holding_power(g, alpha, c, v):
    index = g.index_of(v)
    return float(HoldingEvaluator(g, c).holding_powers(alpha)[index])


def arctan_objective(g, alpha, c, steepness):
    return HoldingEvaluator(g, c).arctan_objective(alpha, steepness)


def cut_objective(g, alpha, c):
    """Composite weight crossing clusters, and its per-type sums."""
    labels = c.aligned_to(g.nodes).labels
    cut = labels[g.sources] != labels[g.targets]
    per_type = g.weights[cut].sum(axis=0)
    alpha = np.asarray(getattr(alpha, "alpha", alpha), dtype=float)
    return float(per_type @ alpha), per_type


def cut_simplex_minimum(per_type):
    """The simplex minimizer of a linear cut objective is the vertex of its smallest sum."""
    per_type = np.asarray(per_type, dtype=float)
    best = int(np.argmin(per_type))
    return WeightVector.coordinate(len(per_type), best), float(per_type[best])


def simplex_cut_search(per_type, cfg):
    """Minimize the cut objective over the simplex with pattern search on x / sum(x)."""
    per_type = np.asarray(per_type, dtype=float)

    def objective(x):
        total = x.sum()
        if total <= 0:
            return -math.inf
        return -float(per_type @ (x / total))

    result = pattern_search(objective, len(per_type), Box(0.0, 1.0), cfg)
    point = np.asarray(result.best_point)
    alpha = WeightVector(tuple(point / point.sum()))
    return alpha, float(per_type @ alpha.as_array()), result


def recover_weights(g, truth, cfg):
    """
    Search the unit sphere for the weight vector that maximizes the arctan
    holding-power objective of `truth`.

    Every coordinate vector and `cfg.n_starts` random unit vectors are
    screened first; pattern search starts from the best of them. When the
    budget runs out before any improving step, the screened point is
    returned and `report.search.improved` is false.
    """
    evaluator = HoldingEvaluator(g, truth)
    steepness = cfg.steepness
    if g.k == 1:
        alpha = WeightVector((1.0,))
        return alpha, evaluator.report(alpha, steepness)
    if cfg.max_evaluations <= 0:
        raise OptimizerError("The evaluation budget is 0; nothing to search")

    def objective(x):
        return evaluator.arctan_objective(x, steepness)

    candidates = [WeightVector.coordinate(g.k, t) for t in range(g.k)]
    candidates += sample_alphas(g.k, cfg.n_starts, cfg.seed_sequence("recover_starts"))
    candidates = candidates[: cfg.max_evaluations]
    values = [objective(alpha.as_array()) for alpha in candidates]
    start = candidates[int(np.argmax(values))].as_array()
    remaining = cfg.max_evaluations - len(candidates)
    logger.debug("recover: screened %d starts, best %.6g", len(candidates), max(values))
    if remaining <= 0:
        search = SearchResult(start, max(values), len(candidates), False, (max(values),))
    else:
        search = pattern_search(objective, g.k, Sphere(), cfg, start=start, budget=remaining)
        search = SearchResult(
            search.best_point,
            search.best_value,
            search.evaluations + len(candidates),
            search.converged,
            search.trace,
            search.improved,
        )
    alpha = WeightVector(tuple(search.best_point))
    report = evaluator.report(alpha, steepness, search=search)
    logger.info(
        "recover: positive fraction %.4f after %d evaluations",
        report.positive_fraction,
        search.evaluations,
    )
    return alpha, report


def forward_clustering(g, alpha, clusterer):
    """Cluster the clamped aggregate; an aggregate without weight gives singletons."""
    aggregate = aggregate_linear(g, alpha, clamp_negative=True)
    if aggregate.n_edges == 0:
        return Clustering.singletons(g.nodes)
    return clusterer(aggregate)


def inverse_objective(g, alpha, truth, clusterer):
    return vi_distance(forward_clustering(g, alpha, clusterer), truth)


def nondominated(points):
    """Points not dominated in (positive_fraction, normalized_modularity), sorted by the first."""
    points = list(points)
    front = []
    for index, p in enumerate(points):
        dominated = False
        for other_index, q in enumerate(points):
            if other_index == index:
                continue
            at_least = (
                q.positive_fraction >= p.positive_fraction
                and q.normalized_modularity >= p.normalized_modularity
            )
            if not at_least:
                continue
            strictly = (
                q.positive_fraction > p.positive_fraction
                or q.normalized_modularity > p.normalized_modularity
            )
            # equal points: keep the first
            if strictly or other_index < index:
                dominated = True
                break
        if not dominated:
            front.append(p)
    return sorted(front, key=lambda p: (p.positive_fraction, -p.normalized_modularity))


def pareto_sweep(g, truth, cfg, reference_alpha=None):
    """
    Trade-off between positive holding fraction and the modularity of
    `truth` over sampled, coordinate and optimized weight vectors.

    Modularity is divided by its value under `reference_alpha` when given,
    otherwise by the largest value observed; raw values are kept when that
    reference is not positive.
    """
    evaluator = HoldingEvaluator(g, truth)
    candidates = sample_alphas(g.k, cfg.n_samples, cfg.seed_sequence("pareto_samples"))
    candidates += [WeightVector.coordinate(g.k, t) for t in range(g.k)]
    optimized, _ = recover_weights(g, truth, cfg)
    candidates.append(optimized)

    scored = []
    for alpha in candidates:
        aggregate = aggregate_linear(g, alpha, clamp_negative=True)
        if aggregate.n_edges == 0:
            continue
        fraction = evaluator.report(alpha, cfg.steepness).positive_fraction
        scored.append((alpha, fraction, modularity(aggregate, truth)))
    if reference_alpha is not None:
        reference = modularity(aggregate_linear(g, reference_alpha, clamp_negative=True), truth)
    else:
        reference = max((q for _, _, q in scored), default=0.0)
    scale = reference if reference > 0 else 1.0
    return nondominated(ParetoPoint(alpha, fraction, q / scale) for alpha, fraction, q in scored)


def pearson_correlation(x, y):
    """Pearson's r, or None when either sequence has no variance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    return float(pearsonr(x, y)[0])


def correlation_sweep(g, truth, clusterer, steepness_grid, cfg):
    """Correlation between the arctan objective and -VI of forward clusterings, per steepness."""
    steepness_grid = list(steepness_grid)
    if not steepness_grid:
        raise ConfigError("The steepness grid is empty")
    evaluator = HoldingEvaluator(g, truth)
    alphas = sample_alphas(g.k, cfg.n_samples, cfg.seed_sequence("correlation_samples"))
    closeness = [-inverse_objective(g, alpha, truth, clusterer) for alpha in alphas]
    rows = []
    for steepness in steepness_grid:
        values = [evaluator.arctan_objective(alpha, steepness) for alpha in alphas]
        rows.append((steepness, pearson_correlation(values, closeness)))
    return rows


def holding_histogram(report, bin_fraction=HISTOGRAM_BIN_FRACTION):
    """Fixed-width bins of holding power, each `bin_fraction` of the largest |H| wide."""
    powers = np.fromiter(report.per_node.values(), dtype=float)
    top = float(np.abs(powers).max()) if len(powers) else 0.0
    if top == 0:
        return [(0.0, 0.0, len(powers))]
    n_bins = int(round(2 / bin_fraction))
    counts, edges = np.histogram(powers, bins=n_bins, range=(-top, top))
    return [(float(lo), float(hi), int(count)) for lo, hi, count in zip(edges, edges[1:], counts)]


def steepness_sweep(g, truth, grid, cfg):
    rows = []
    for steepness in grid:
        alpha, report = recover_weights(g, truth, cfg.replace(steepness=steepness))
        rows.append((steepness, alpha, report))
    return rows


@dataclass(frozen=True)
class PerturbationRow:
    ground_truth: float
    perturbed_average: float
    optimized: float
    alpha: WeightVector


def perturbation_study(original, copies, truth, cfg, signal_type=None):
    """
    Positive holding fractions under the unperturbed signal type, under
    each perturbed copy alone (averaged), and under the optimized
    combination of all copies.
    """
    signal = 0 if signal_type is None else original.type_index(signal_type)
    ground_truth = HoldingEvaluator(original, truth).report(
        WeightVector.coordinate(original.k, signal), cfg.steepness
    )
    evaluator = HoldingEvaluator(copies, truth)
    fractions = [
        evaluator.report(WeightVector.coordinate(copies.k, t), cfg.steepness).positive_fraction
        for t in range(copies.k)
    ]
    alpha, optimized = recover_weights(copies, truth, cfg)
    return PerturbationRow(
        ground_truth=ground_truth.positive_fraction,
        perturbed_average=float(np.mean(fractions)),
        optimized=optimized.positive_fraction,
        alpha=alpha,
    )
