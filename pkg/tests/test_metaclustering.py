import json
import logging
import math

import numpy as np
import pytest

from multiedge.community import Clustering, cluster_greedy_modularity
from multiedge.errors import DimensionError, LimitExceededError
from multiedge.metaclustering import (
    MANIFEST_NAME,
    Ensemble,
    analyze_ensemble,
    build_meta_graph,
    co_occurrence_graph,
    cspa_consensus,
    invariant_groups,
    load_ensemble,
    meta_regularizer,
    metacluster,
    order_indices,
    order_representatives,
    sample_alphas,
    sample_clustering_space,
    save_ensemble,
    seriate,
)
from multiedge.metrics import product_clustering, setwise_information
from multiedge.multigraph import WeightVector

from .utils import moved

N = 64
NODES = tuple(range(N))
BY_RESIDUE = Clustering(NODES, [i % 4 for i in NODES])
BY_BLOCK = Clustering(NODES, [i // 16 for i in NODES])


def ensemble(clusterings):
    alpha = WeightVector((1.0, 0.0))
    return Ensemble(tuple((alpha, c) for c in clusterings), NODES)


@pytest.fixture
def two_groups():
    """Two families of four nearly identical clusterings, orthogonal to each other."""
    return ensemble(
        [
            BY_RESIDUE,
            moved(BY_RESIDUE, 0, 1),
            moved(BY_RESIDUE, 1, 2),
            moved(BY_RESIDUE, 2, 3),
            BY_BLOCK,
            moved(BY_BLOCK, 0, 1),
            moved(BY_BLOCK, 16, 2),
            moved(BY_BLOCK, 32, 3),
        ]
    )


EIGHT = tuple(range(8))
HALVES = Clustering(EIGHT, [i // 4 for i in EIGHT])
PARITY = Clustering(EIGHT, [i % 2 for i in EIGHT])
NEAR_HALVES = moved(HALVES, 0, 1)


def test_sample_alphas():
    alphas = sample_alphas(3, 20, seed=1)
    assert len(alphas) == 20
    assert all(alpha.norm == pytest.approx(1.0) for alpha in alphas)
    assert all(-1.0 <= value <= 1.0 for alpha in alphas for value in alpha.alpha)
    assert alphas == sample_alphas(3, 20, seed=1)
    assert alphas != sample_alphas(3, 20, seed=2)


def test_sample_alphas_in_one_dimension():
    assert {alpha.alpha for alpha in sample_alphas(1, 30, seed=0)} <= {(1.0,), (-1.0,)}


def test_sample_alphas_needs_a_count():
    with pytest.raises(DimensionError):
        sample_alphas(2, 0, seed=0)


def test_sample_clustering_space(two_triangles_multigraph, triangles_truth, caplog):
    alphas = [WeightVector((1.0,)), WeightVector((-1.0,))]
    with caplog.at_level(logging.WARNING):
        e = sample_clustering_space(two_triangles_multigraph, alphas, cluster_greedy_modularity)
    assert len(e) == 2
    assert e.alphas == alphas
    assert e.clusterings[0] == triangles_truth
    assert e.clusterings[1] == Clustering.singletons(two_triangles_multigraph.nodes)
    assert e.warnings == ("sample 1: aggregate has no edge weight, using singletons",)
    assert "sample 1: aggregate has no edge weight" in caplog.text


def test_ensemble_aligns_to_universe():
    c = Clustering(("b", "a"), [0, 1])
    e = Ensemble(((WeightVector((1.0,)), c),), ("a", "b"))
    assert e.clusterings[0].nodes == ("a", "b")


def test_meta_regularizer():
    assert meta_regularizer(100) == pytest.approx(0.01 * math.log(100))
    assert meta_regularizer(1) == meta_regularizer(2)


def test_meta_graph_of_identical_pair():
    g = build_meta_graph(ensemble([BY_RESIDUE, BY_RESIDUE]))
    assert g.nodes == (0, 1)
    assert g.weights.tolist() == [pytest.approx(1 / meta_regularizer(N))]


def test_meta_graph_needs_two_entries():
    with pytest.raises(DimensionError):
        build_meta_graph(ensemble([BY_RESIDUE]))


def test_meta_graph_is_complete(two_groups):
    g = build_meta_graph(two_groups)
    assert g.n_nodes == 8
    assert g.n_edges == 28


def test_metacluster_separates_families(two_groups):
    meta = metacluster(two_groups, cluster_greedy_modularity)
    assert sorted(sorted(cluster) for cluster in meta.clusters) == [[0, 1, 2, 3], [4, 5, 6, 7]]


def test_metacluster_identical_entries():
    meta = metacluster(ensemble([BY_BLOCK] * 3), cluster_greedy_modularity)
    assert meta.n_clusters == 1


def test_co_occurrence_graph():
    g = co_occurrence_graph([HALVES, HALVES, NEAR_HALVES])
    weights = {frozenset((u, v)): w for u, v, w in g.edges()}
    assert weights[frozenset((1, 2))] == 3.0
    assert weights[frozenset((0, 1))] == 2.0
    assert weights[frozenset((0, 4))] == 1.0
    assert frozenset((2, 4)) not in weights


def test_cspa_single_input_is_identity(triangles_truth):
    assert cspa_consensus([triangles_truth], cluster_greedy_modularity) == triangles_truth


def test_cspa_majority_chain():
    nodes = ("a", "b", "c")
    ab_c = Clustering(nodes, [0, 0, 1])
    a_bc = Clustering(nodes, [0, 1, 1])
    consensus = cspa_consensus([ab_c, ab_c, a_bc], cluster_greedy_modularity)
    assert consensus == Clustering.whole(nodes)


def test_cspa_of_singletons():
    singletons = Clustering.singletons(EIGHT)
    assert cspa_consensus([singletons, singletons], cluster_greedy_modularity) == singletons


def test_cspa_ignores_input_order():
    inputs = [HALVES, NEAR_HALVES, PARITY, HALVES]
    forward = cspa_consensus(inputs, cluster_greedy_modularity)
    backward = cspa_consensus(inputs[::-1], cluster_greedy_modularity)
    assert forward == backward


@pytest.mark.parametrize("mode", ["exact", "greedy"])
def test_order_representatives(mode):
    ordered, scores = order_representatives([HALVES, NEAR_HALVES, PARITY], mode)
    assert ordered[0] == HALVES
    assert ordered[1] == PARITY
    assert ordered[2] == NEAR_HALVES
    assert scores[0] == pytest.approx(math.log(2))
    assert scores[1] == pytest.approx(math.log(4))
    assert scores[2] == pytest.approx(setwise_information([HALVES, NEAR_HALVES, PARITY]))


def test_order_indices():
    assert order_indices([HALVES, NEAR_HALVES, PARITY])[0] == [0, 2, 1]


def test_exact_ordering_limit():
    with pytest.raises(LimitExceededError):
        order_indices([HALVES] * 9, "exact")
    order, _ = order_indices([HALVES] * 9, "greedy")
    assert sorted(order) == list(range(9))


def test_unknown_ordering_mode():
    with pytest.raises(DimensionError):
        order_indices([HALVES], "random")


def test_seriation_keeps_families_together(two_groups):
    order = seriate(two_groups)
    assert sorted(order) == list(range(8))
    first = {order.index(i) for i in range(4)}
    assert max(first) - min(first) == 3


def test_seriation_of_small_ensembles():
    assert seriate(ensemble([BY_BLOCK, BY_RESIDUE])) == [0, 1]


def test_invariant_groups():
    assert invariant_groups([HALVES, NEAR_HALVES]) == [frozenset({1, 2, 3}), frozenset({4, 5, 6, 7})]


def test_invariant_groups_of_orthogonal_clusterings():
    nodes = tuple(range(4))
    halves = Clustering(nodes, [0, 0, 1, 1])
    alternating = Clustering(nodes, [0, 1, 0, 1])
    assert invariant_groups([halves, alternating]) == []


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_refining_never_enlarges_invariant_groups(seed):
    before = invariant_groups([BY_BLOCK, Clustering(NODES, [i // 2 % 8 for i in NODES])])
    split = Clustering(NODES, np.random.default_rng(seed).integers(0, 3, N))
    refined = product_clustering([BY_BLOCK, split])
    after = invariant_groups([refined, Clustering(NODES, [i // 2 % 8 for i in NODES])])
    assert before
    assert all(any(group <= old for old in before) for group in after)


def test_analyze_ensemble(two_groups):
    report = analyze_ensemble(two_groups, cluster_greedy_modularity)
    assert report.mode == "exact"
    assert report.dropped == []
    assert len(report.representatives) == 2
    found = report.representatives
    assert any(rep == BY_RESIDUE for rep in found)
    assert any(rep == BY_BLOCK for rep in found)
    assert sorted(sorted(members) for members in report.members) == [[0, 1, 2, 3], [4, 5, 6, 7]]
    assert report.ordering_scores[-1] == pytest.approx(setwise_information(found))
    assert sorted(report.seriation) == list(range(8))


def test_analyze_keeps_everything_below_threshold(two_groups, caplog):
    with caplog.at_level(logging.WARNING):
        report = analyze_ensemble(two_groups, cluster_greedy_modularity, min_fraction=0.6)
    assert report.dropped == []
    assert len(report.representatives) == 2
    assert "keeping all" in caplog.text


def test_save_and_load_ensemble(tmp_path, two_triangles_multigraph):
    alphas = [WeightVector((1.0,)), WeightVector((-1.0,))]
    e = sample_clustering_space(two_triangles_multigraph, alphas, cluster_greedy_modularity)
    directory = tmp_path / "ensemble"
    manifest_path = save_ensemble(e, directory, seed=3)
    assert manifest_path == directory / MANIFEST_NAME

    manifest = json.loads(manifest_path.read_text())
    assert manifest["seed"] == 3
    assert manifest["files"] == ["clustering_0000.tsv", "clustering_0001.tsv"]
    assert manifest["alphas"] == [[1.0], [-1.0]]

    loaded = load_ensemble(directory)
    assert loaded.node_universe == e.node_universe
    assert loaded.alphas == e.alphas
    assert loaded.warnings == e.warnings
    assert all(a == b for a, b in zip(loaded.clusterings, e.clusterings))
    assert np.array_equal(loaded.clusterings[0].labels, e.clusterings[0].labels)
