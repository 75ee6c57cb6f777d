import logging
import math

import pytest

from multiedge.community import Clustering, cluster_greedy_modularity, modularity
from multiedge.config import SearchConfig
from multiedge.discovery import (
    EMPTY_AGGREGATE,
    LOW_NOVELTY_FLAG,
    compare_union_product,
    enumerate_pairs,
    find_unexpected,
    select_distant_set,
    unexpected_objective,
)
from multiedge.errors import DimensionError, NodeMismatchError
from multiedge.metrics import vi_distance
from multiedge.multigraph import MultiGraph, WeightVector, aggregate_product, extract_edge_type

from .utils import moved

EIGHT = tuple(range(8))
HALVES = Clustering(EIGHT, [i // 4 for i in EIGHT])
PARITY = Clustering(EIGHT, [i % 2 for i in EIGHT])
NEAR_HALVES = moved(HALVES, 0, 1)


def test_objective_without_novelty_is_modularity(two_triangles_multigraph, triangles_truth):
    given = [Clustering.singletons(two_triangles_multigraph.nodes)]
    value, report = unexpected_objective(
        two_triangles_multigraph, (1.0,), given, cluster_greedy_modularity, 0.0
    )
    assert value == pytest.approx(5 / 14)
    assert report.modularity == pytest.approx(5 / 14)
    assert report.clustering == triangles_truth
    assert report.flags == ()


def test_objective_adds_normalized_distance(two_triangles_multigraph, triangles_truth):
    g = two_triangles_multigraph
    given = [Clustering.singletons(g.nodes)]
    value, report = unexpected_objective(g, (1.0,), given, cluster_greedy_modularity, 2.0)
    distance = vi_distance(triangles_truth, given[0])
    assert report.vi_to_given == [pytest.approx(distance)]
    assert value == pytest.approx(5 / 14 + 2.0 * distance / math.log(6))
    assert report.scalarized == value


def test_objective_flags_low_novelty(two_triangles_multigraph, triangles_truth):
    value, report = unexpected_objective(
        two_triangles_multigraph, (1.0,), [triangles_truth], cluster_greedy_modularity, 1.0
    )
    assert report.flags == (LOW_NOVELTY_FLAG,)
    assert value == pytest.approx(report.modularity)


def test_objective_of_empty_aggregate(two_triangles_multigraph, triangles_truth):
    value, report = unexpected_objective(
        two_triangles_multigraph, (-1.0,), [triangles_truth], cluster_greedy_modularity, 1.0
    )
    assert value == -math.inf
    assert report.modularity is None
    assert report.flags == (EMPTY_AGGREGATE,)
    assert report.as_dict()["scalarized"] is None


def test_objective_needs_given_clusterings(two_triangles_multigraph):
    with pytest.raises(NodeMismatchError):
        unexpected_objective(two_triangles_multigraph, (1.0,), [], cluster_greedy_modularity, 1.0)


def test_find_unexpected_recovers_other_factor(factors):
    g, (factor_a, factor_b) = factors
    cfg = SearchConfig(max_evaluations=150, n_starts=2, seed=1)
    report = find_unexpected(g, [factor_a], cfg, cluster_greedy_modularity)
    assert report.vi_to_given[0] >= 0.9 * 2 * math.log(3)
    assert report.modularity >= 0.3
    assert vi_distance(report.clustering, factor_b) < vi_distance(report.clustering, factor_a)
    assert LOW_NOVELTY_FLAG not in report.flags

    summary = report.as_dict()
    assert summary["n_clusters"] == report.clustering.n_clusters
    assert len(summary["alpha"]) == g.k


def test_find_unexpected_is_deterministic(factors):
    g, (factor_a, _) = factors
    cfg = SearchConfig(max_evaluations=60, n_starts=1, seed=4)
    first = find_unexpected(g, [factor_a], cfg, cluster_greedy_modularity)
    second = find_unexpected(g, [factor_a], cfg, cluster_greedy_modularity)
    assert first.alpha == second.alpha
    assert first.scalarized == second.scalarized


@pytest.mark.parametrize(
    "singletons,self_pairs,expected",
    [
        pytest.param(False, False, 6, id="pairs"),
        pytest.param(True, False, 10, id="with-singletons"),
        pytest.param(True, True, 14, id="with-self-pairs"),
    ],
)
def test_enumerate_pairs_counts(factors, singletons, self_pairs, expected):
    g, (factor_a, _) = factors
    rows = enumerate_pairs(
        g,
        factor_a,
        cluster_greedy_modularity,
        include_singletons=singletons,
        include_self_pairs=self_pairs,
    )
    assert len(rows) == expected


def test_enumerate_pairs_sorted_by_distance(factors):
    g, (factor_a, _) = factors
    rows = enumerate_pairs(g, factor_a, cluster_greedy_modularity)
    distances = [row.vi_to_reference for row in rows]
    assert distances == sorted(distances, reverse=True)
    assert {row.label for row in rows} >= {"A0", "B1", "A0 x B0", "B0 x B1"}
    top = rows[0]
    assert top.modularity == pytest.approx(modularity(_aggregate(g, top.types), top.clustering))


def _aggregate(g, types):
    if len(types) == 1:
        return extract_edge_type(g, types[0])
    return aggregate_product(g, *types)


def test_enumerate_pairs_empty_product_sorts_last(caplog):
    g = MultiGraph.from_edges(("a", "b"), [("x", "y", (1.0, 0.0)), ("y", "z", (0.0, 1.0))])
    reference = Clustering.singletons(g.nodes)
    with caplog.at_level(logging.WARNING):
        rows = enumerate_pairs(g, reference, cluster_greedy_modularity)
    assert [row.label for row in rows][-1] == "a x b"
    assert rows[-1].modularity is None
    assert rows[-1].vi_to_reference is None
    assert rows[-1].clustering is None
    assert "a x b: aggregate has no edges" in caplog.text


def test_select_distant_set():
    selection = select_distant_set([HALVES, PARITY, NEAR_HALVES], HALVES, 2)
    assert [candidate for candidate, _ in selection] == [PARITY, NEAR_HALVES]
    assert selection[0][1] == pytest.approx(2 * math.log(2))
    assert selection[1][1] == pytest.approx(vi_distance(NEAR_HALVES, HALVES))


def test_select_distant_set_too_many():
    with pytest.raises(DimensionError) as exc_info:
        select_distant_set([HALVES, PARITY, NEAR_HALVES], HALVES, 4)
    assert str(exc_info.value) == "Asked for 4 candidates, only 3 available"


def test_select_distant_set_identical(caplog):
    with caplog.at_level(logging.WARNING):
        selection = select_distant_set([HALVES], HALVES, 1)
    assert selection == [(HALVES, 0.0)]
    assert "identical to the reference" in caplog.text


def test_select_distant_set_skips_empty_rows():
    g = MultiGraph.from_edges(("a", "b"), [("x", "y", (1.0, 0.0)), ("y", "z", (0.0, 1.0))])
    rows = enumerate_pairs(g, Clustering.singletons(g.nodes), cluster_greedy_modularity)
    with pytest.raises(DimensionError):
        select_distant_set(rows, Clustering.singletons(g.nodes), 3)
    assert len(select_distant_set(rows, Clustering.singletons(g.nodes), 2)) == 2


def test_compare_union_product_of_two_views(factors):
    g, _ = factors
    comparison = compare_union_product(g, "A0", "A1", cluster_greedy_modularity)
    assert comparison.modularity_product > comparison.modularity_union
    assert comparison.modularity_a > 0.3
    assert comparison.modularity_b > 0.3


def test_weight_vector_is_accepted(two_triangles_multigraph, triangles_truth):
    value, _ = unexpected_objective(
        two_triangles_multigraph,
        WeightVector((2.0,)),
        [triangles_truth],
        cluster_greedy_modularity,
        1.0,
    )
    assert value == pytest.approx(5 / 14)
