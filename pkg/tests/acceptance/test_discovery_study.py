import math

import pytest

from multiedge.community import cluster_greedy_modularity
from multiedge.config import SearchConfig
from multiedge.discovery import compare_union_product, find_unexpected
from multiedge.metrics import vi_distance
from multiedge.synth import FactorSpec, generate_factors

pytestmark = pytest.mark.slow


def test_product_of_two_views_beats_singletons_beats_union():
    g, _ = generate_factors(FactorSpec(n=270, seed=0))
    comparison = compare_union_product(g, "A0", "A1", cluster_greedy_modularity)
    best_single = max(comparison.modularity_a, comparison.modularity_b)
    assert comparison.modularity_product >= best_single + 0.02
    assert best_single >= comparison.modularity_union + 0.02


def test_discovery_finds_the_other_factor(factors):
    g, (factor_a, factor_b) = factors
    report = find_unexpected(
        g, [factor_a], SearchConfig(max_evaluations=2000, seed=0), cluster_greedy_modularity
    )
    assert report.modularity >= 0.3
    assert report.vi_to_given[0] >= 0.9 * vi_distance(factor_a, factor_b)
    assert vi_distance(factor_a, factor_b) == pytest.approx(2 * math.log(3))
