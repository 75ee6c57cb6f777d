"""
Single-edge-type community detection and the weighted modularity score.
"""

import heapq
import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    EmptyGraphError,
    LimitExceededError,
    NodeMismatchError,
    ParseError,
)
from .multigraph import Graph

logger = logging.getLogger(__name__)

ORACLE_MAX_NODES = 64


def canonical_labels(labels):
    """Relabel to contiguous integers in order of first appearance."""
    labels = np.asarray(labels)
    if labels.size == 0:
        return np.zeros(0, dtype=np.int64)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.reshape(-1)]


@dataclass(frozen=True, eq=False)
class Clustering:
    """
    A partition of a node set.

    `labels[i]` is the cluster of `nodes[i]`; labels are kept canonical
    (0..K-1 in order of first appearance), so two clusterings of the same
    node order are the same partition exactly when their labels are equal.
    """

    nodes: tuple
    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        labels = np.asarray(self.labels)
        if labels.shape != (len(self.nodes),):
            raise NodeMismatchError(
                f"Got {labels.size} labels for {len(self.nodes)} nodes"
            )
        if len(set(self.nodes)) != len(self.nodes):
            raise NodeMismatchError("A clustering lists the same node twice")
        labels = canonical_labels(labels)
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_assignment(cls, assignment):
        """Build from a mapping of node to any hashable cluster label."""
        codes = {}
        labels = [codes.setdefault(label, len(codes)) for label in assignment.values()]
        return cls(tuple(assignment), np.asarray(labels, dtype=np.int64))

    @classmethod
    def from_labels(cls, nodes, labels):
        return cls(tuple(nodes), np.asarray(labels))

    @classmethod
    def from_clusters(cls, clusters):
        assignment = {}
        for label, members in enumerate(clusters):
            for node in members:
                if node in assignment:
                    raise NodeMismatchError(f"Node {node!r} appears in two clusters")
                assignment[node] = label
        return cls.from_assignment(assignment)

    @classmethod
    def singletons(cls, nodes):
        nodes = tuple(nodes)
        return cls(nodes, np.arange(len(nodes)))

    @classmethod
    def whole(cls, nodes):
        nodes = tuple(nodes)
        return cls(nodes, np.zeros(len(nodes), dtype=np.int64))

    @property
    def n_nodes(self):
        return len(self.nodes)

    @cached_property
    def n_clusters(self):
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @cached_property
    def sizes(self):
        return np.bincount(self.labels, minlength=self.n_clusters)

    @cached_property
    def clusters(self):
        members = [[] for _ in range(self.n_clusters)]
        for node, label in zip(self.nodes, self.labels):
            members[label].append(node)
        return [tuple(cluster) for cluster in members]

    @cached_property
    def assignment(self):
        return {node: int(label) for node, label in zip(self.nodes, self.labels)}

    @cached_property
    def node_set(self):
        return frozenset(self.nodes)

    def aligned_to(self, nodes):
        """The same partition listed in the order of `nodes`."""
        nodes = tuple(nodes)
        if nodes == self.nodes:
            return self
        if len(nodes) != len(self.nodes) or frozenset(nodes) != self.node_set:
            missing = sorted(frozenset(nodes) - self.node_set)[:3]
            extra = sorted(self.node_set - frozenset(nodes))[:3]
            raise NodeMismatchError(
                f"Node sets differ (missing from clustering: {missing}, "
                f"not in reference: {extra})"
            )
        assignment = self.assignment
        return Clustering(nodes, np.fromiter((assignment[node] for node in nodes), np.int64))

    def same_partition(self, other):
        try:
            other = other.aligned_to(self.nodes)
        except NodeMismatchError:
            return False
        return bool(np.array_equal(self.labels, other.labels))

    def __eq__(self, other):
        if not isinstance(other, Clustering):
            return NotImplemented
        return self.same_partition(other)

    __hash__ = None


Clusterer = Callable[[Graph], Clustering]


def read_clustering(path):
    path = Path(path)
    assignment = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = raw.split("\t") if "\t" in raw else line.split()
        fields = [field.strip() for field in fields]
        if len(fields) != 2:
            raise ParseError(f"Expected 'node<TAB>cluster_label', got {line!r}", number, path)
        node, label = fields
        if node in assignment:
            raise ParseError(f"Node {node!r} assigned twice", number, path)
        assignment[node] = label
    return Clustering.from_assignment(assignment)


def format_clustering(c):
    return "".join(f"{node}\t{label}\n" for node, label in zip(c.nodes, c.labels))


def write_clustering(c, path):
    Path(path).write_text(format_clustering(c), encoding="utf-8")


def modularity(g, c):
    """
    Weighted modularity, accumulated per community.

    Q = sum_c [ W_c / m - (D_c / 2m)^2 ] where W_c is the weight inside
    community c, D_c its total degree and m the total edge weight.
    """
    labels = c.aligned_to(g.nodes).labels
    m = g.total_weight
    if m <= 0:
        raise EmptyGraphError("Modularity is undefined for a graph without edge weight")
    internal = g.weights[labels[g.sources] == labels[g.targets]].sum()
    community_degree = np.bincount(labels, weights=g.degrees)
    return float(internal / m - np.sum((community_degree / (2 * m)) ** 2))


def modularity_oracle(g, c):
    """Literal double sum over all ordered node pairs (small graphs only)."""
    n = g.n_nodes
    if n > ORACLE_MAX_NODES:
        raise LimitExceededError(
            f"The modularity oracle handles at most {ORACLE_MAX_NODES} nodes, got {n}"
        )
    labels = c.aligned_to(g.nodes).labels
    adjacency = np.zeros((n, n))
    for s, t, w in zip(g.sources, g.targets, g.weights):
        adjacency[s, t] += w
        adjacency[t, s] += w
    degree = adjacency.sum(axis=1)
    two_m = adjacency.sum()
    if two_m <= 0:
        raise EmptyGraphError("Modularity is undefined for a graph without edge weight")
    total = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                total += adjacency[i, j] - degree[i] * degree[j] / two_m
    return total / two_m


def cluster_greedy_modularity(g):
    """
    Agglomerative modularity maximization.

    Starting from singletons, repeatedly merge the adjacent pair of clusters
    with the largest modularity gain (ties go to the smallest
    (min-label, max-label) pair), continuing past negative gains until no
    adjacent pair is left. Returns the partition with the highest modularity
    seen along the way; the earliest one wins ties.
    """
    if g.n_edges == 0:
        raise EmptyGraphError("Cannot cluster a graph without edges")
    n = g.n_nodes
    two_m = 2 * g.total_weight
    a = g.degrees / two_m
    neighbours = [dict() for _ in range(n)]
    for s, t, w in zip(g.sources.tolist(), g.targets.tolist(), g.weights.tolist()):
        share = w / two_m
        neighbours[s][t] = neighbours[s].get(t, 0.0) + share
        neighbours[t][s] = neighbours[t].get(s, 0.0) + share

    def gain(i, j):
        return 2.0 * (neighbours[i][j] - a[i] * a[j])

    heap = [(-gain(i, j), i, j) for i in range(n) for j in neighbours[i] if i < j]
    heapq.heapify(heap)

    q = float(-np.sum(a**2))
    best_q, best_step = q, 0
    merges = []
    while heap:
        negative_gain, i, j = heapq.heappop(heap)
        if j not in neighbours[i] or gain(i, j) != -negative_gain:
            continue
        # j is absorbed into i (i < j), so surviving labels are the smallest
        for other, share in neighbours[j].items():
            if other == i:
                continue
            neighbours[i][other] = neighbours[i].get(other, 0.0) + share
            neighbours[other][i] = neighbours[i][other]
            del neighbours[other][j]
        del neighbours[i][j]
        neighbours[j] = {}
        a[i] += a[j]
        a[j] = 0.0
        q -= negative_gain
        merges.append((i, j))
        if q > best_q:
            best_q, best_step = q, len(merges)
        for other in neighbours[i]:
            low, high = min(i, other), max(i, other)
            heapq.heappush(heap, (-gain(low, high), low, high))

    logger.debug(
        "greedy modularity: %d merges, best Q=%.6f after %d", len(merges), best_q, best_step
    )
    parent = np.arange(n)
    for i, j in merges[:best_step]:
        parent[parent == j] = i
    return Clustering(g.nodes, parent)
