"""
Clusterings of clusterings.

Sample linear aggregations of a multigraph, cluster each aggregate, then
cluster the resulting ensemble by variation of information and reduce
every meta-cluster to one consensus clustering.
"""

import itertools
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.cluster.hierarchy import leaves_list, linkage
from scipy.spatial.distance import squareform

from .community import Clustering, read_clustering, write_clustering
from .errors import DimensionError, LimitExceededError, NodeMismatchError, ParseError
from .metrics import entropy, product_clustering, setwise_information, vi_matrix
from .multigraph import Graph, WeightVector, aggregate_linear

logger = logging.getLogger(__name__)

EXACT_ORDERING_MAX = 8
MIN_META_FRACTION = 0.03
MANIFEST_NAME = "manifest.json"


def sample_alphas(k, n, seed):
    """`n` unit vectors with components drawn uniformly from (-1, 1)."""
    if k < 1 or n < 1:
        raise DimensionError(f"Need k >= 1 and n >= 1, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    alphas = []
    while len(alphas) < n:
        draw = rng.uniform(-1.0, 1.0, k)
        if np.linalg.norm(draw) == 0:
            continue
        alphas.append(WeightVector.unit(draw))
    return alphas


@dataclass(frozen=True, eq=False)
class Ensemble:
    entries: tuple
    node_universe: tuple
    warnings: tuple = ()

    def __post_init__(self):
        universe = tuple(self.node_universe)
        entries = []
        for alpha, clustering in self.entries:
            if not isinstance(alpha, WeightVector):
                alpha = WeightVector(tuple(alpha))
            entries.append((alpha, clustering.aligned_to(universe)))
        object.__setattr__(self, "entries", tuple(entries))
        object.__setattr__(self, "node_universe", universe)
        object.__setattr__(self, "warnings", tuple(self.warnings))

    def __len__(self):
        return len(self.entries)

    @property
    def alphas(self):
        return [alpha for alpha, _ in self.entries]

    @property
    def clusterings(self):
        return [clustering for _, clustering in self.entries]


def sample_clustering_space(g, alphas, clusterer):
    alphas = list(alphas)
    if not alphas:
        raise DimensionError("Need at least one weight vector to sample")
    entries = []
    warnings = []
    for index, alpha in enumerate(alphas):
        aggregate = aggregate_linear(g, alpha, clamp_negative=True)
        if aggregate.n_edges == 0:
            message = f"sample {index}: aggregate has no edge weight, using singletons"
            logger.warning(message)
            warnings.append(message)
            clustering = Clustering.singletons(g.nodes)
        else:
            clustering = clusterer(aggregate)
        entries.append((alpha, clustering))
        if (index + 1) % 50 == 0:
            logger.info("sampled %d/%d clusterings", index + 1, len(alphas))
    return Ensemble(tuple(entries), g.nodes, tuple(warnings))


def meta_regularizer(n_nodes):
    return 0.01 * math.log(max(n_nodes, 2))


def build_meta_graph(e):
    """Complete graph over ensemble indices weighted by 1 / (VI + delta)."""
    if len(e) < 2:
        raise DimensionError(f"Need at least two clusterings, got {len(e)}")
    delta = meta_regularizer(len(e.node_universe))
    distances = vi_matrix(e)
    sources, targets = np.triu_indices(len(e), k=1)
    weights = 1.0 / (distances[sources, targets] + delta)
    return Graph(tuple(range(len(e))), sources, targets, weights)


def metacluster(e, clusterer):
    return clusterer(build_meta_graph(e))


def co_occurrence_graph(cs):
    """Node pairs weighted by how many clusterings put them together."""
    cs = list(cs)
    if not cs:
        raise NodeMismatchError("Need at least one clustering")
    nodes = cs[0].nodes
    n = len(nodes)
    blocks = []
    for c in cs:
        labels = c.aligned_to(nodes).labels
        blocks.append(
            sparse.csr_matrix(
                (np.ones(n), (np.arange(n), labels)), shape=(n, c.n_clusters)
            )
        )
    membership = sparse.hstack(blocks).tocsr()
    counts = sparse.triu(membership @ membership.T, k=1).tocoo()
    return Graph(nodes, counts.row, counts.col, counts.data)


def cspa_consensus(cs, clusterer):
    graph = co_occurrence_graph(cs)
    if graph.n_edges == 0:
        return Clustering.singletons(graph.nodes)
    return clusterer(graph)


def _order_exact(cs):
    if len(cs) > EXACT_ORDERING_MAX:
        raise LimitExceededError(
            f"Exact ordering handles at most {EXACT_ORDERING_MAX} clusterings, "
            f"got {len(cs)}; use greedy mode"
        )
    order, scores = [], []
    remaining = list(range(len(cs)))
    while remaining:
        gains = [setwise_information([cs[i] for i in order] + [cs[j]]) for j in remaining]
        pick = remaining[int(np.argmax(gains))]
        order.append(pick)
        scores.append(max(gains))
        remaining.remove(pick)
    return order, scores


def _order_greedy(cs):
    if len(cs) == 1:
        return [0], [entropy(cs[0])]
    distances = vi_matrix(cs)
    first, second = max(
        itertools.combinations(range(len(cs)), 2), key=lambda pair: distances[pair]
    )
    order = [first, second]
    remaining = [i for i in range(len(cs)) if i not in order]
    while remaining:
        spread = [distances[j, order].min() for j in remaining]
        order.append(remaining.pop(int(np.argmax(spread))))
    scores = [setwise_information([cs[i] for i in order[: size + 1]]) for size in range(len(order))]
    return order, scores


def order_indices(cs, mode="exact"):
    cs = list(cs)
    if not cs:
        raise NodeMismatchError("Need at least one clustering to order")
    if mode == "exact":
        return _order_exact(cs)
    if mode == "greedy":
        return _order_greedy(cs)
    raise DimensionError(f"Unknown ordering mode {mode!r}; expected 'exact' or 'greedy'")


def order_representatives(cs, mode="exact"):
    """
    Order clusterings so that each prefix carries as much joint information
    as possible.

    Returns the ordered clusterings and, for every prefix, its set-wise
    information.
    """
    cs = list(cs)
    order, scores = order_indices(cs, mode)
    return [cs[i] for i in order], scores


def seriate(e):
    """Leaf order of an average-linkage dendrogram over pairwise VI."""
    if len(e) <= 2:
        return list(range(len(e)))
    condensed = squareform(vi_matrix(e), checks=False)
    return [int(i) for i in leaves_list(linkage(condensed, method="average"))]


def invariant_groups(e):
    """Groups of at least two nodes that every clustering keeps together."""
    clusterings = getattr(e, "clusterings", e)
    product = product_clustering(clusterings)
    return [frozenset(cluster) for cluster in product.clusters if len(cluster) >= 2]


@dataclass(frozen=True, eq=False)
class MetaClusteringReport:
    meta_partition: Clustering
    representatives: list
    ordering_scores: list
    seriation: list
    # ensemble indices behind each representative, in representative order
    members: list
    dropped: list
    mode: str


def analyze_ensemble(e, clusterer, min_fraction=MIN_META_FRACTION, mode=None):
    if len(e) >= 2:
        meta = metacluster(e, clusterer)
    else:
        meta = Clustering.whole(range(len(e)))
    threshold = min_fraction * len(e)
    kept = [members for members in meta.clusters if len(members) >= threshold]
    dropped = [members for members in meta.clusters if len(members) < threshold]
    if dropped:
        logger.warning(
            "dropping %d meta-clusters smaller than %.1f%% of the ensemble",
            len(dropped),
            100 * min_fraction,
        )
    if not kept:
        logger.warning("every meta-cluster is below the size threshold; keeping all")
        kept, dropped = list(meta.clusters), []

    clusterings = e.clusterings
    representatives = [
        cspa_consensus([clusterings[i] for i in members], clusterer) for members in kept
    ]
    if mode is None:
        mode = "exact" if len(representatives) <= EXACT_ORDERING_MAX else "greedy"
    order, scores = order_indices(representatives, mode)
    logger.info(
        "%d meta-clusters, %d kept, ordered in %s mode", meta.n_clusters, len(kept), mode
    )
    return MetaClusteringReport(
        meta_partition=meta,
        representatives=[representatives[i] for i in order],
        ordering_scores=scores,
        seriation=seriate(e),
        members=[list(kept[i]) for i in order],
        dropped=[list(members) for members in dropped],
        mode=mode,
    )


def _entry_name(index):
    return f"clustering_{index:04d}.tsv"


def save_ensemble(e, directory, seed=None):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for index, clustering in enumerate(e.clusterings):
        name = _entry_name(index)
        write_clustering(clustering, directory / name)
        files.append(name)
    manifest = {
        "seed": seed,
        "clamped": True,
        "node_universe": [str(node) for node in e.node_universe],
        "alphas": [list(alpha.alpha) for alpha in e.alphas],
        "files": files,
        "warnings": list(e.warnings),
    }
    path = directory / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def load_ensemble(directory):
    directory = Path(directory)
    path = directory / MANIFEST_NAME
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as error:
        raise ParseError(f"Invalid ensemble manifest: {error.msg}", error.lineno, path) from None
    if len(manifest["alphas"]) != len(manifest["files"]):
        raise ParseError("Manifest lists different numbers of alphas and files", source=path)
    entries = [
        (WeightVector(tuple(alpha)), read_clustering(directory / name))
        for alpha, name in zip(manifest["alphas"], manifest["files"])
    ]
    return Ensemble(tuple(entries), tuple(manifest["node_universe"]), tuple(manifest["warnings"]))
