"""
Search for clusterings that are both good and unlike the ones we already have.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .community import Clustering, modularity
from .errors import DimensionError, NodeMismatchError
from .metrics import vi_distance
from .multigraph import (
    WeightVector,
    aggregate_linear,
    aggregate_product,
    aggregate_union,
    extract_edge_type,
)
from .optimizer import Box, multistart

logger = logging.getLogger(__name__)

LOW_NOVELTY = 0.05
EMPTY_AGGREGATE = "empty-aggregate"
LOW_NOVELTY_FLAG = "low-novelty"


@dataclass(frozen=True, eq=False)
class DiscoveryReport:
    alpha: WeightVector
    clustering: Clustering
    modularity: float
    vi_to_given: list
    scalarized: float
    flags: tuple = ()

    def as_dict(self):
        return {
            "alpha": list(self.alpha.alpha),
            "modularity": self.modularity,
            "vi_to_given": list(self.vi_to_given),
            "scalarized": None if math.isinf(self.scalarized) else self.scalarized,
            "n_clusters": self.clustering.n_clusters,
            "flags": list(self.flags),
        }


def _log_nodes(n):
    return math.log(n) if n > 1 else 1.0


def unexpected_objective(g, alpha, given, clusterer, lambda_):
    """Modularity of the forward clustering plus lambda times its normalized VI to the closest given clustering."""
    given = list(given)
    if not given:
        raise NodeMismatchError("Need at least one given clustering")
    if not isinstance(alpha, WeightVector):
        alpha = WeightVector(tuple(alpha))
    aggregate = aggregate_linear(g, alpha, clamp_negative=True)
    if aggregate.n_edges == 0:
        report = DiscoveryReport(
            alpha, Clustering.singletons(g.nodes), None, [], -math.inf, (EMPTY_AGGREGATE,)
        )
        return -math.inf, report
    clustering = clusterer(aggregate)
    quality = modularity(aggregate, clustering)
    distances = [vi_distance(clustering, other) for other in given]
    novelty = min(distances) / _log_nodes(g.n_nodes)
    value = quality + lambda_ * novelty
    flags = (LOW_NOVELTY_FLAG,) if novelty < LOW_NOVELTY else ()
    return value, DiscoveryReport(alpha, clustering, quality, distances, value, flags)


def find_unexpected(g, given, cfg, clusterer):
    """
    Maximize `unexpected_objective` over the box [-1, 1]^k.

    The coordinate vectors are used as warm starts ahead of the seeded
    random ones.
    """
    given = list(given)
    reports = {}

    def objective(x):
        key = tuple(np.asarray(x, dtype=float).tolist())
        if key not in reports:
            reports[key] = unexpected_objective(g, key, given, clusterer, cfg.lambda_)
        return reports[key][0]

    warm = [WeightVector.coordinate(g.k, t).as_array() for t in range(g.k)]
    result = multistart(objective, g.k, Box(-1.0, 1.0), cfg, warm_starts=warm)
    _, report = reports[tuple(result.best_point.tolist())]
    logger.info(
        "discovery: objective %.6f (Q=%s) after %d evaluations, %d distinct points",
        report.scalarized,
        report.modularity,
        result.evaluations,
        len(reports),
    )
    if LOW_NOVELTY_FLAG in report.flags:
        logger.warning("discovery: best clustering is close to a given clustering")
    return report


@dataclass(frozen=True, eq=False)
class PairTableRow:
    label: str
    types: tuple
    modularity: float = None
    vi_to_reference: float = None
    clustering: Clustering = field(default=None, repr=False)


def _pair_row(label, types, aggregate, reference, clusterer):
    if aggregate.n_edges == 0:
        logger.warning("%s: aggregate has no edges", label)
        return PairTableRow(label, types)
    clustering = clusterer(aggregate)
    return PairTableRow(
        label,
        types,
        modularity(aggregate, clustering),
        vi_distance(clustering, reference),
        clustering,
    )


def enumerate_pairs(g, reference, clusterer, include_singletons=True, include_self_pairs=False):
    """
    Cluster every singleton edge type and every product of two types.

    Rows come back sorted by VI to `reference`, largest first; rows whose
    aggregate has no edges carry no scores and sort last.
    """
    reference = reference.aligned_to(g.nodes)
    rows = []
    if include_singletons:
        for name in g.edge_types:
            rows.append(
                _pair_row(name, (name,), extract_edge_type(g, name), reference, clusterer)
            )
    combine = itertools.combinations_with_replacement if include_self_pairs else itertools.combinations
    for a, b in combine(g.edge_types, 2):
        rows.append(
            _pair_row(f"{a} x {b}", (a, b), aggregate_product(g, a, b), reference, clusterer)
        )
    return sorted(
        rows,
        key=lambda row: (row.vi_to_reference is None, -(row.vi_to_reference or 0.0)),
    )


def select_distant_set(candidates, reference, m):
    """
    Greedily pick `m` candidates, each maximizing its smallest VI to the
    reference and everything picked before it.

    `candidates` may be clusterings or pair-table rows. Returns
    `(candidate, distance)` pairs in selection order.
    """
    candidates = [
        candidate
        for candidate in candidates
        if getattr(candidate, "clustering", candidate) is not None
    ]
    if m > len(candidates):
        raise DimensionError(f"Asked for {m} candidates, only {len(candidates)} available")
    clusterings = [getattr(candidate, "clustering", candidate) for candidate in candidates]
    closest = np.array([vi_distance(c, reference) for c in clusterings])
    remaining = list(range(len(candidates)))
    selection = []
    for _ in range(m):
        pick = max(remaining, key=lambda i: closest[i])
        remaining.remove(pick)
        selection.append((candidates[pick], float(closest[pick])))
        for i in remaining:
            closest[i] = min(closest[i], vi_distance(clusterings[i], clusterings[pick]))
    if selection and all(distance == 0 for _, distance in selection):
        logger.warning("every selected candidate is identical to the reference")
    return selection


@dataclass(frozen=True)
class UnionProductComparison:
    modularity_a: float
    modularity_b: float
    modularity_union: float
    modularity_product: float


def compare_union_product(g, a, b, clusterer):
    def score(aggregate):
        return modularity(aggregate, clusterer(aggregate))

    return UnionProductComparison(
        modularity_a=score(extract_edge_type(g, a)),
        modularity_b=score(extract_edge_type(g, b)),
        modularity_union=score(aggregate_union(g, a, b)),
        modularity_product=score(aggregate_product(g, a, b)),
    )
