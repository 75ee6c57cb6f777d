"""
Synthetic multigraphs with known ground truth.

Every generator is pure given its spec: the same spec (seed included)
always produces the same multigraph, node names and edge order.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph, csr_matrix
from scipy.spatial import cKDTree

from .community import Clustering
from .errors import EmptyGraphError, InfeasibleSpecError
from .multigraph import MultiGraph

logger = logging.getLogger(__name__)


def spec_as_dict(spec):
    return {"generator": type(spec).__name__, **dataclasses.asdict(spec)}


def _sorted_pairs(sources, targets):
    low = np.minimum(sources, targets)
    high = np.maximum(sources, targets)
    order = np.lexsort((high, low))
    return low[order], high[order]


@dataclass(frozen=True)
class PlantedSpec:
    n: int = 500
    n_clusters: int = 14
    avg_degree: float = 30.0
    # share of each node's expected edge weight that leaves its cluster
    mixing: float = 0.3
    k_types: int = 1
    noise_types: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.n_clusters <= self.n:
            raise InfeasibleSpecError(
                f"n_clusters must lie between 1 and n ({self.n}), got {self.n_clusters}"
            )
        if self.avg_degree >= self.n:
            raise InfeasibleSpecError(
                f"avg_degree ({self.avg_degree}) must be smaller than n ({self.n})"
            )
        if self.avg_degree <= 0:
            raise InfeasibleSpecError(f"avg_degree must be positive, got {self.avg_degree}")
        if not 0 <= self.mixing <= 1:
            raise InfeasibleSpecError(f"mixing must lie in [0, 1], got {self.mixing}")
        if self.k_types < 1 or self.noise_types < 0:
            raise InfeasibleSpecError("Need at least one signal type and no negative counts")


def _internal_edges(members, degree):
    size = len(members)
    half = min(degree // 2, (size - 1) // 2)
    sources, targets = [], []
    for offset in range(1, half + 1):
        sources.append(members)
        targets.append(np.roll(members, -offset))
    # an odd degree is completed with the opposite node when the cluster size is even
    if size % 2 == 0 and size > 1 and (degree % 2 == 1 or degree >= size - 1):
        sources.append(members[: size // 2])
        targets.append(members[size // 2 :])
    if not sources:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(sources), np.concatenate(targets)


def _external_edges(rng, labels, count):
    n = len(labels)
    possible = (n * n - np.sum(np.bincount(labels) ** 2)) // 2
    count = min(count, int(possible))
    keys = np.zeros(0, dtype=np.int64)
    while len(keys) < count:
        draw = rng.integers(0, n, size=(2 * (count - len(keys)) + 16, 2))
        draw = draw[labels[draw[:, 0]] != labels[draw[:, 1]]]
        low, high = draw.min(axis=1), draw.max(axis=1)
        drawn = low * n + high
        # first occurrences, in draw order
        _, first = np.unique(drawn, return_index=True)
        fresh = drawn[np.sort(first)]
        fresh = fresh[~np.isin(fresh, keys)]
        keys = np.concatenate([keys, fresh[: count - len(keys)]])
    return keys // n, keys % n


def generate_planted(spec):
    """
    Equal-size planted partition.

    Each node gets round((1 - mixing) * avg_degree) internal edges from a
    circulant over a random order of its cluster; about
    n * mixing * avg_degree / 2 external edges are placed uniformly between
    clusters. Signal types weigh every edge 1, noise types draw a uniform
    weight per edge on the same support.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    labels = rng.permutation(n) % spec.n_clusters
    degree = int(round((1 - spec.mixing) * spec.avg_degree))
    sources, targets = [], []
    for cluster in range(spec.n_clusters):
        members = rng.permutation(np.flatnonzero(labels == cluster))
        s, t = _internal_edges(members, degree)
        sources.append(s)
        targets.append(t)
    external = int(round(n * spec.mixing * spec.avg_degree / 2))
    if spec.n_clusters > 1 and external:
        s, t = _external_edges(rng, labels, external)
        sources.append(s)
        targets.append(t)
    sources, targets = _sorted_pairs(np.concatenate(sources), np.concatenate(targets))
    m = len(sources)
    weights = np.ones((m, spec.k_types + spec.noise_types))
    if spec.noise_types:
        weights[:, spec.k_types :] = rng.uniform(0.0, 1.0, (m, spec.noise_types))
    edge_types = [f"signal{t}" for t in range(spec.k_types)]
    edge_types += [f"noise{t}" for t in range(spec.noise_types)]
    nodes = tuple(f"v{i}" for i in range(n))
    logger.debug("planted: %d nodes, %d edges, internal degree %d", n, m, degree)
    g = MultiGraph(nodes, tuple(edge_types), sources, targets, weights)
    return g, Clustering(nodes, labels)


def perturb(g, seed, sigma_bound=2.0, nu_bounds=(0.0, 1.0)):
    """
    w <- max(0, nu * (w + sigma)) for every weight component, with
    sigma uniform in (-sigma_bound * w_a, sigma_bound * w_a), nu uniform in
    `nu_bounds`, and w_a the mean weight of the component's edge type.
    """
    if g.n_edges == 0:
        raise EmptyGraphError("Cannot perturb a multigraph without edges")
    rng = np.random.default_rng(seed)
    average = g.weights.mean(axis=0)
    sigma = rng.uniform(-sigma_bound * average, sigma_bound * average, size=g.weights.shape)
    nu = rng.uniform(nu_bounds[0], nu_bounds[1], size=g.weights.shape)
    return g.with_weights(np.maximum(0.0, nu * (g.weights + sigma)))


def perturbed_copies(g, type_name, n_copies, seed):
    """A multigraph of `n_copies` independently perturbed copies of one edge type."""
    column = g.weights[:, g.type_index(type_name)]
    names = tuple(f"{type_name}_{i}" for i in range(n_copies))
    copies = g.with_weights(np.tile(column[:, None], (1, n_copies)), edge_types=names)
    return perturb(copies, seed)


@dataclass(frozen=True)
class GridSpec:
    rows: int = 3
    cols: int = 3
    points_per_cell: int = 30
    n_projections: int = 16
    neighbor_radius: float = 1.2
    seed: int = 0
    # projection directions in radians; drawn uniformly from [0, pi) when absent
    angles: tuple = None
    spread: float = 0.1
    spacing: float = 1.0
    epsilon: float = 0.05

    def __post_init__(self):
        if min(self.rows, self.cols, self.points_per_cell, self.n_projections) < 1:
            raise InfeasibleSpecError("Grid counts must be at least 1")
        if self.angles is not None:
            object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
            if len(self.angles) != self.n_projections:
                raise InfeasibleSpecError(
                    f"Got {len(self.angles)} angles for {self.n_projections} projections"
                )
        if self.neighbor_radius <= 0 or self.epsilon <= 0:
            raise InfeasibleSpecError("neighbor_radius and epsilon must be positive")

    @property
    def n(self):
        return self.rows * self.cols * self.points_per_cell


def generate_grid(spec):
    """
    Points scattered around a rows x cols grid of cell centres. Every edge
    type is one projection of the plane onto a line; points closer than
    `neighbor_radius` in the plane are joined, weighted by the inverse of
    their projected distance.

    Returns the multigraph and the cell, row and column clusterings.
    """
    rng = np.random.default_rng(spec.seed)
    cell_row = np.repeat(np.arange(spec.rows), spec.cols * spec.points_per_cell)
    cell_col = np.tile(np.repeat(np.arange(spec.cols), spec.points_per_cell), spec.rows)
    centres = np.column_stack([cell_col, cell_row]) * spec.spacing
    points = centres + rng.normal(0.0, spec.spread, size=centres.shape)
    if spec.angles is None:
        angles = rng.uniform(0.0, math.pi, spec.n_projections)
    else:
        angles = np.asarray(spec.angles)

    pairs = cKDTree(points).query_pairs(spec.neighbor_radius, output_type="ndarray")
    sources, targets = _sorted_pairs(pairs[:, 0].astype(np.int64), pairs[:, 1].astype(np.int64))
    directions = np.column_stack([np.cos(angles), np.sin(angles)])
    projected = points @ directions.T
    weights = 1.0 / (np.abs(projected[sources] - projected[targets]) + spec.epsilon)

    n = spec.n
    support = csr_matrix((np.ones(len(sources)), (sources, targets)), shape=(n, n))
    n_components, _ = csgraph.connected_components(support, directed=False)
    if n_components > 1:
        logger.warning(
            "grid support has %d connected components; neighbor_radius %.3g may be too small",
            n_components,
            spec.neighbor_radius,
        )
    nodes = tuple(f"p{i}" for i in range(n))
    edge_types = tuple(f"proj{t:02d}" for t in range(spec.n_projections))
    g = MultiGraph(nodes, edge_types, sources, targets, weights)
    cells = Clustering(nodes, cell_row * spec.cols + cell_col)
    return g, cells, Clustering(nodes, cell_row), Clustering(nodes, cell_col)


@dataclass(frozen=True)
class FactorSpec:
    n: int = 270
    n_factors: int = 2
    groups_per_factor: int = 3
    views_per_factor: int = 2
    p_in: float = 0.6
    p_out: float = 0.06
    noise_types: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.n_factors < 1 or self.groups_per_factor < 2 or self.views_per_factor < 1:
            raise InfeasibleSpecError("Need a factor with at least two groups and one view")
        if self.n_factors > 26:
            raise InfeasibleSpecError("At most 26 factors are supported")
        if self.n % self.groups_per_factor**self.n_factors:
            raise InfeasibleSpecError(
                f"n ({self.n}) must be a multiple of "
                f"{self.groups_per_factor}^{self.n_factors} for balanced factors"
            )
        for name in ("p_in", "p_out"):
            if not 0 <= getattr(self, name) <= 1:
                raise InfeasibleSpecError(f"{name} must lie in [0, 1]")


def factor_name(index):
    return chr(ord("A") + index)


def generate_factors(spec):
    """
    Latent-factor multigraph: every factor splits the nodes into equal
    groups independently of the others, and each of its views is an
    independent planted-partition sample of those groups.

    Returns the multigraph and one clustering per factor.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    index = np.arange(n)
    groups = [
        (index // spec.groups_per_factor**f) % spec.groups_per_factor
        for f in range(spec.n_factors)
    ]
    sources, targets = np.triu_indices(n, k=1)
    columns, edge_types = [], []
    for f, labels in enumerate(groups):
        inside = labels[sources] == labels[targets]
        probability = np.where(inside, spec.p_in, spec.p_out)
        for view in range(spec.views_per_factor):
            columns.append((rng.random(len(sources)) < probability).astype(float))
            edge_types.append(f"{factor_name(f)}{view}")
    density = float(np.mean([column.mean() for column in columns]))
    for t in range(spec.noise_types):
        present = rng.random(len(sources)) < density
        columns.append(np.where(present, rng.uniform(0.0, 1.0, len(sources)), 0.0))
        edge_types.append(f"noise{t}")
    weights = np.column_stack(columns)
    keep = weights.max(axis=1) > 0
    nodes = tuple(f"n{i}" for i in range(n))
    g = MultiGraph(nodes, tuple(edge_types), sources[keep], targets[keep], weights[keep])
    return g, [Clustering(nodes, labels) for labels in groups]
