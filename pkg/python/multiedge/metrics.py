"""
Information-theoretic comparison of clusterings.

All logarithms are natural. Mutual information follows Meila's definition
(sum of P(k,l) log[P(k,l) / P(k) P(l)]); the joint entropy of several
clusterings is exposed separately as `setwise_information`.
"""

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import entropy as _entropy
from sklearn.metrics import mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from .community import Clustering
from .errors import LimitExceededError, NodeMismatchError

MAX_PRODUCT_CELLS = 10**6


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    counts: object  # scipy.sparse matrix, K x K'
    n: int

    @property
    def row_sums(self):
        return np.asarray(self.counts.sum(axis=1)).ravel()

    @property
    def column_sums(self):
        return np.asarray(self.counts.sum(axis=0)).ravel()


def _common_labels(a, b):
    if a.n_nodes == 0:
        raise NodeMismatchError("Clusterings must cover at least one node")
    return a.labels, b.aligned_to(a.nodes).labels


def _size_entropy(counts):
    counts = np.sort(np.asarray(counts, dtype=float))
    counts = counts[counts > 0]
    if len(counts) <= 1:
        return 0.0
    return float(_entropy(counts))


def contingency_table(a, b):
    la, lb = _common_labels(a, b)
    return ContingencyTable(contingency_matrix(la, lb, sparse=True), len(la))


def entropy(c):
    if c.n_nodes == 0:
        raise NodeMismatchError("Entropy of an empty clustering is undefined")
    return _size_entropy(c.sizes)


def mutual_information(a, b):
    table = contingency_table(a, b)
    return max(0.0, float(mutual_info_score(None, None, contingency=table.counts)))


def _joint_labels(label_arrays):
    codes = np.zeros(len(label_arrays[0]), dtype=np.int64)
    for labels in label_arrays:
        _, codes = np.unique(codes * (int(labels.max()) + 1) + labels, return_inverse=True)
        codes = codes.reshape(-1)
        if codes.max() + 1 > MAX_PRODUCT_CELLS:
            raise LimitExceededError(
                f"The product partition has more than {MAX_PRODUCT_CELLS} nonempty cells; "
                "use the greedy max-min ordering instead"
            )
    return codes


def _vi_from_labels(la, lb, ha, hb):
    cells = np.bincount(_joint_labels([la, lb]))
    if len(cells) == la.max() + 1 == lb.max() + 1:
        # same partition up to relabeling
        return 0.0
    return max(0.0, 2.0 * _size_entropy(cells) - (ha + hb))


def vi_distance(a, b):
    """Variation of information, H(a) + H(b) - 2 I(a, b)."""
    la, lb = _common_labels(a, b)
    return _vi_from_labels(la, lb, _size_entropy(np.bincount(la)), _size_entropy(np.bincount(lb)))


def product_clustering(cs):
    """The partition whose cells are the nonempty intersections across `cs`."""
    cs = list(cs)
    if not cs:
        raise NodeMismatchError("Need at least one clustering")
    reference = cs[0]
    arrays = [reference.labels] + [c.aligned_to(reference.nodes).labels for c in cs[1:]]
    return Clustering(reference.nodes, _joint_labels(arrays))


def setwise_information(cs):
    """Joint entropy of the Cartesian-product partition of `cs`."""
    return entropy(product_clustering(cs))


def vi_matrix(clusterings):
    """Pairwise VI distances; accepts an Ensemble or a sequence of clusterings."""
    clusterings = list(getattr(clusterings, "clusterings", clusterings))
    if not clusterings:
        raise NodeMismatchError("Need at least one clustering")
    reference = clusterings[0].nodes
    labels = [c.aligned_to(reference).labels for c in clusterings]
    entropies = [_size_entropy(np.bincount(la)) for la in labels]
    size = len(labels)
    matrix = np.zeros((size, size))
    for i, j in itertools.combinations(range(size), 2):
        matrix[i, j] = matrix[j, i] = _vi_from_labels(
            labels[i], labels[j], entropies[i], entropies[j]
        )
    return matrix


def write_vi_matrix(matrix, ids, path):
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["", *ids])
        for identifier, row in zip(ids, matrix):
            writer.writerow([identifier, *(repr(float(value)) for value in row)])
