import math

import numpy as np
import pytest

from multiedge.config import SearchConfig
from multiedge.errors import OptimizerError
from multiedge.optimizer import Box, Sphere, multistart, pattern_search


def quadratic(x):
    return -((x[0] - 0.3) ** 2) - (x[1] + 0.2) ** 2


def bimodal(x):
    return math.exp(-((x[0] - 0.7) ** 2) / 0.05) + 0.5 * math.exp(-((x[0] + 0.7) ** 2) / 0.05)


def assert_monotone(result):
    assert all(later > earlier for earlier, later in zip(result.trace, result.trace[1:]))
    assert result.trace[-1] == result.best_value


def test_quadratic_on_box():
    result = pattern_search(quadratic, 2, Box(-1.0, 1.0), SearchConfig(), start=(0.0, 0.0))
    assert result.best_point == pytest.approx([0.3, -0.2], abs=1e-3)
    assert result.evaluations <= 600
    assert result.converged
    assert result.improved
    assert_monotone(result)


def test_box_projection_clips():
    result = pattern_search(lambda x: x.sum(), 2, Box(0.0, 1.0), SearchConfig(), start=(0.5, 0.5))
    assert result.best_point.tolist() == [1.0, 1.0]


def test_one_dimensional_sphere():
    result = pattern_search(lambda x: x[0], 1, Sphere(), SearchConfig(), start=(-3.0,))
    assert result.best_point.tolist() == [1.0]
    assert result.evaluations == 2
    assert result.converged


def test_sphere_points_have_unit_norm():
    target = np.array([1.0, 2.0, 2.0]) / 3.0
    result = pattern_search(lambda x: float(x @ target), 3, Sphere(), SearchConfig(seed=1))
    assert np.linalg.norm(result.best_point) == pytest.approx(1.0)
    assert result.best_point == pytest.approx(target, abs=1e-2)
    assert_monotone(result)


def test_constant_objective_stays_at_start():
    result = pattern_search(lambda x: 1.0, 2, Box(), SearchConfig(), start=(0.1, 0.2))
    assert result.best_point.tolist() == [0.1, 0.2]
    assert result.converged
    assert not result.improved
    assert result.trace == (1.0,)


def test_nan_objective():
    with pytest.raises(OptimizerError) as exc_info:
        pattern_search(lambda x: math.nan, 2, Box(), SearchConfig(), start=(0.0, 0.0))
    assert str(exc_info.value) == "Objective returned NaN at [0.0, 0.0]"


def test_zero_budget():
    with pytest.raises(OptimizerError):
        pattern_search(quadratic, 2, Box(), SearchConfig(max_evaluations=0))


def test_budget_exhausted():
    result = pattern_search(quadratic, 2, Box(), SearchConfig(max_evaluations=3), start=(0.0, 0.0))
    assert result.evaluations == 3
    assert not result.converged
    assert_monotone(result)


def test_sphere_rejects_zero_start():
    with pytest.raises(OptimizerError):
        pattern_search(quadratic, 2, Sphere(), SearchConfig(), start=(0.0, 0.0))


def test_pattern_search_is_deterministic():
    cfg = SearchConfig(seed=42)
    first = pattern_search(quadratic, 2, Box(), cfg)
    second = pattern_search(quadratic, 2, Box(), cfg)
    assert first.best_point.tolist() == second.best_point.tolist()
    assert first.evaluations == second.evaluations


def test_multistart_single_start_matches_pattern_search():
    cfg = SearchConfig(seed=8, n_starts=1)
    single = pattern_search(quadratic, 2, Box(), cfg)
    multi = multistart(quadratic, 2, Box(), cfg)
    assert multi.best_point.tolist() == single.best_point.tolist()
    assert multi.evaluations == single.evaluations
    assert multi.converged == single.converged


def test_multistart_finds_global_basin():
    cfg = SearchConfig(seed=0, n_starts=8)
    result = multistart(bimodal, 1, Box(), cfg)
    grid = np.linspace(-1.0, 1.0, 20001)
    best = grid[np.argmax([bimodal((x,)) for x in grid])]
    assert result.best_point[0] == pytest.approx(best, abs=1e-3)
    assert result.evaluations <= cfg.max_evaluations


def test_multistart_uses_warm_starts():
    cfg = SearchConfig(n_starts=1, max_evaluations=40)
    result = multistart(bimodal, 1, Box(), cfg, warm_starts=[(0.7,)])
    assert result.best_value >= bimodal((0.7,))


def test_multistart_budget_split():
    cfg = SearchConfig(n_starts=4, max_evaluations=10)
    result = multistart(quadratic, 2, Box(), cfg)
    assert result.evaluations <= 10
    assert not result.converged
