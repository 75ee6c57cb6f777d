"""
Derivative-free maximization over a box or the unit sphere.

`pattern_search` is a compass search: poll +step and -step along each
coordinate of the incumbent in a fixed order, move to the first point that
improves on it, and contract the step when a full poll fails. Candidates
on the sphere are projected to unit norm before they are evaluated.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import OptimizerError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Box:
    lo: float = -1.0
    hi: float = 1.0

    def project(self, point):
        return np.clip(point, self.lo, self.hi)

    def sample(self, rng, d):
        return rng.uniform(self.lo, self.hi, d)


@dataclass(frozen=True)
class Sphere:
    """The unit L2 sphere; the zero vector has no projection."""

    def project(self, point):
        norm = np.linalg.norm(point)
        if norm == 0:
            return None
        return point / norm

    def sample(self, rng, d):
        while True:
            point = rng.standard_normal(d)
            norm = np.linalg.norm(point)
            if norm > 0:
                return point / norm


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_point: np.ndarray
    best_value: float
    evaluations: int
    converged: bool
    # incumbent value after every accepted move, starting with the start value
    trace: tuple = ()
    improved: bool = False


def default_start(d, domain, cfg):
    return domain.sample(np.random.default_rng(cfg.seed_sequence("search_start")), d)


class _Counter:
    def __init__(self, f, budget):
        self.f = f
        self.budget = budget
        self.evaluations = 0

    @property
    def exhausted(self):
        return self.evaluations >= self.budget

    def __call__(self, point):
        value = float(self.f(point))
        self.evaluations += 1
        if math.isnan(value):
            raise OptimizerError(f"Objective returned NaN at {point.tolist()}")
        return value


def pattern_search(f, d, domain, cfg, start=None, budget=None):
    """Maximize `f` over `domain` in dimension `d`, starting from `start`."""
    budget = cfg.max_evaluations if budget is None else budget
    if budget <= 0:
        raise OptimizerError("The evaluation budget is 0; nothing to search")
    if d < 1:
        raise OptimizerError(f"Dimension must be at least 1, got {d}")
    if start is None:
        start = default_start(d, domain, cfg)
    point = domain.project(np.array(start, dtype=float).reshape(d))
    if point is None:
        raise OptimizerError("Cannot start a sphere search from the zero vector")
    evaluate = _Counter(f, budget)

    if d == 1 and isinstance(domain, Sphere):
        return _search_signs(evaluate, point)

    value = evaluate(point)
    trace = [value]
    step = cfg.initial_step
    while step >= cfg.step_tolerance:
        moved = False
        for i in range(d):
            for sign in (1.0, -1.0):
                candidate = point.copy()
                candidate[i] += sign * step
                candidate = domain.project(candidate)
                if candidate is None or np.array_equal(candidate, point):
                    continue
                if evaluate.exhausted:
                    return _result(point, trace, evaluate, converged=False)
                candidate_value = evaluate(candidate)
                if candidate_value > value:
                    point, value = candidate, candidate_value
                    trace.append(value)
                    moved = True
                    break
            if moved:
                break
        if not moved:
            step *= cfg.contraction
    return _result(point, trace, evaluate, converged=True)


def _search_signs(evaluate, point):
    # the one-dimensional sphere is {-1, +1}
    value = evaluate(point)
    trace = [value]
    if evaluate.exhausted:
        return _result(point, trace, evaluate, converged=False)
    other = -point
    other_value = evaluate(other)
    if other_value > value:
        point = other
        trace.append(other_value)
    return _result(point, trace, evaluate, converged=True)


def _result(point, trace, evaluate, converged):
    point = np.array(point, dtype=float)
    point.flags.writeable = False
    return SearchResult(
        best_point=point,
        best_value=trace[-1],
        evaluations=evaluate.evaluations,
        converged=converged,
        trace=tuple(trace),
        improved=len(trace) > 1,
    )


def multistart(f, d, domain, cfg, warm_starts=()):
    """
    Run `pattern_search` from every warm start, then from `cfg.n_starts`
    seeded random starts, sharing `cfg.max_evaluations` between the runs.

    The best run wins; the earliest run wins ties. The returned evaluation
    count covers every run.
    """
    if cfg.max_evaluations <= 0:
        raise OptimizerError("The evaluation budget is 0; nothing to search")
    rng = np.random.default_rng(cfg.seed_sequence("multistart"))
    starts = [np.asarray(start, dtype=float) for start in warm_starts]
    starts += [domain.sample(rng, d) for _ in range(cfg.n_starts)]

    best = None
    evaluations = 0
    converged = True
    for number, start in enumerate(starts):
        remaining = cfg.max_evaluations - evaluations
        share = remaining // (len(starts) - number)
        if share < 1:
            converged = False
            break
        if domain.project(start) is None:
            logger.debug("multistart: skipping zero start %d", number)
            continue
        result = pattern_search(f, d, domain, cfg, start=start, budget=share)
        evaluations += result.evaluations
        converged = converged and result.converged
        logger.debug(
            "multistart: run %d/%d reached %.6g after %d evaluations",
            number + 1,
            len(starts),
            result.best_value,
            result.evaluations,
        )
        if best is None or result.best_value > best.best_value:
            best = result
    if best is None:
        raise OptimizerError("No usable start point for the search")
    return SearchResult(
        best_point=best.best_point,
        best_value=best.best_value,
        evaluations=evaluations,
        converged=converged,
        trace=best.trace,
        improved=best.improved,
    )
