"""Choose step size and iteration count for a requested precision.

Two services live here.  ``plan_for_epsilon`` applies the closed-form
recipe: cap the step so the bias term stays below the target precision,
then run long enough for the geometric term to shrink under it.
``minimal_k_lmc`` and ``minimal_k_baseline`` instead search for the
smallest iteration count any step size on a grid can certify, which is
what the head-to-head comparison curves are built from.

Grid searches are resolved in two stages: a coarse geometric sweep over
the admissible range, then an equally sized local grid around the best
coarse step.  The feasibility predicate is monotone in K, so the
minimal K on a fixed grid is unique and binary search finds it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .bounds import baseline_value, BoundInputs, init_w2_from_mean, lmc_bound, lmc_value_small_step
from .parallel import parallel_map

__all__ = [
    "Plan",
    "CurvePoint",
    "UnreachablePrecisionError",
    "default_h_grid",
    "plan_for_epsilon",
    "minimal_k_lmc",
    "minimal_k_baseline",
    "figure1_curves",
]

DEFAULT_GRID_SIZE = 10_000
DEFAULT_GRID_SPAN = 1e9
DEFAULT_K_CAP = 10**12


class UnreachablePrecisionError(ValueError):
    """Requested precision below what any step on the grid can certify."""

    def __init__(self, epsilon: float, bound_infimum: float, k_cap: int):
        self.epsilon = epsilon
        self.bound_infimum = bound_infimum
        super().__init__(
            f"precision epsilon={epsilon:g} is unreachable: after {k_cap} iterations the "
            f"bound's infimum over the step grid is {bound_infimum:.6g}; use a grid with "
            f"smaller steps or relax epsilon"
        )


@dataclass(frozen=True)
class Plan:
    """Planned run: step size, iteration count, and the certified bound."""

    epsilon: float
    h: float
    K: int
    predicted_bound: float
    binding: str
    zero_iterations: bool = False

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "h": self.h,
            "K": self.K,
            "predicted_bound": self.predicted_bound,
            "binding": self.binding,
            "zero_iterations": self.zero_iterations,
        }


@dataclass(frozen=True)
class CurvePoint:
    """One point of the iteration-count comparison curves."""

    p: int
    epsilon: float
    k_lmc: int
    k_baseline: int

    @property
    def ratio(self) -> float:
        """k_baseline / k_lmc; inf for a zero k_lmc, 1 when both are zero."""
        if self.k_lmc == 0:
            return 1.0 if self.k_baseline == 0 else math.inf
        return self.k_baseline / self.k_lmc

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "epsilon": self.epsilon,
            "k_lmc": self.k_lmc,
            "k_baseline": self.k_baseline,
            "ratio": self.ratio,
        }


def _check_common(m: float, M: float, p: int, w2_init: float, epsilon: float) -> None:
    if not (0.0 < m <= M and math.isfinite(M)):
        raise ValueError(f"curvature constants must satisfy 0 < m <= M < inf, got m={m}, M={M}")
    if int(p) < 1:
        raise ValueError(f"dimension p must be at least 1, got {p}")
    if not (w2_init >= 0.0 and math.isfinite(w2_init)):
        raise ValueError(f"w2_init must be nonnegative and finite, got {w2_init}")
    if not (epsilon > 0.0 and math.isfinite(epsilon)):
        raise ValueError(f"epsilon must be positive and finite, got {epsilon}")


def default_h_grid(
    m: float, M: float, size: int = DEFAULT_GRID_SIZE, span: float = DEFAULT_GRID_SPAN
) -> np.ndarray:
    """Geometric grid of candidate steps over (2/((m+M) span), 2/(m+M)].

    The upper end is the regime boundary, where both bounds are stated;
    the span covers nine decades by default so that tight precisions
    stay reachable in high dimension.
    """
    if not (0.0 < m <= M and math.isfinite(M)):
        raise ValueError(f"curvature constants must satisfy 0 < m <= M < inf, got m={m}, M={M}")
    if int(size) < 2:
        raise ValueError(f"grid size must be at least 2, got {size}")
    if not (float(span) > 1.0):
        raise ValueError(f"grid span must exceed 1, got {span}")
    hi = 2.0 / (m + M)
    return np.geomspace(hi / span, hi, int(size))


def plan_for_epsilon(m: float, M: float, p: int, w2_init: float, epsilon: float) -> Plan:
    """Closed-form (h, K) recipe certifying W2 error at most epsilon.

    The step is h = min(m^2 eps^2 / (14 M^2 p), 2/(m+M)): the first cap
    pins the bias term under eps with margin, the second keeps h in the
    small-step regime.  Then K = ceil(log(2 w2_init / eps) / (m h))
    drives the geometric term below eps/2.  The returned
    predicted_bound re-evaluates the closed-form bound at (h, K) and is
    guaranteed to be at most epsilon.
    """
    _check_common(m, M, p, w2_init, epsilon)
    p = int(p)
    h_bias = m * m * epsilon * epsilon / (14.0 * M * M * p)
    boundary = 2.0 / (m + M)
    h = min(h_bias, boundary)
    binding = "bias" if h < boundary else "boundary"
    if 2.0 * w2_init <= epsilon:
        K = 0
    else:
        K = max(0, math.ceil(math.log(2.0 * w2_init / epsilon) / (m * h)))
    predicted = lmc_bound(BoundInputs(m=m, M=M, h=h, K=K, p=p, w2_init=w2_init)).value
    if not predicted <= epsilon:
        raise RuntimeError(
            f"planned (h={h:g}, K={K}) certifies {predicted:.6g} > epsilon={epsilon:g}; "
            f"this should be impossible and indicates a bug"
        )
    return Plan(
        epsilon=epsilon,
        h=h,
        K=K,
        predicted_bound=predicted,
        binding=binding,
        zero_iterations=(K == 0),
    )


ValueFn = Callable[..., np.ndarray]


def _validate_grid(h_grid: Optional[np.ndarray], m: float, M: float) -> np.ndarray:
    boundary = 2.0 / (m + M)
    if h_grid is None:
        return default_h_grid(m, M)
    grid = np.asarray(h_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError(f"h_grid must be a nonempty 1-d array, got shape {grid.shape}")
    if not np.all(np.isfinite(grid)) or not np.all(grid > 0.0):
        raise ValueError("h_grid values must be positive and finite")
    if float(grid.max()) > boundary:
        raise ValueError(
            f"h_grid values must lie in (0, 2/(m+M)] = (0, {boundary:.6g}], "
            f"got max {grid.max():.6g}"
        )
    if grid.size > 1 and not np.all(np.diff(grid) > 0.0):
        raise ValueError("h_grid must be strictly increasing")
    return grid


def _smallest_feasible_k(
    value: ValueFn,
    m: float,
    M: float,
    p: int,
    w2_init: float,
    epsilon: float,
    grid: np.ndarray,
    k_cap: int,
) -> Optional[int]:
    def feasible(K: int) -> bool:
        with np.errstate(under="ignore"):
            return bool((value(m, M, grid, float(K), p, w2_init) <= epsilon).any())

    if not feasible(k_cap):
        return None
    if feasible(0):
        return 0
    lo, hi = 0, k_cap
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _minimal_k(
    value: ValueFn,
    m: float,
    M: float,
    p: int,
    w2_init: float,
    epsilon: float,
    h_grid: Optional[np.ndarray],
    k_cap: int,
) -> int:
    _check_common(m, M, p, w2_init, epsilon)
    p = int(p)
    grid = _validate_grid(h_grid, m, M)
    k1 = _smallest_feasible_k(value, m, M, p, w2_init, epsilon, grid, k_cap)
    if k1 is None:
        with np.errstate(under="ignore"):
            floor = float(value(m, M, grid, float(k_cap), p, w2_init).min())
        raise UnreachablePrecisionError(epsilon, floor, k_cap)
    if k1 == 0:
        return 0
    # refine locally around the best coarse step with an equally dense grid
    n = grid.size
    boundary = 2.0 / (m + M)
    with np.errstate(under="ignore"):
        vals = value(m, M, grid, float(k1), p, w2_init)
    i = int(np.argmin(vals))
    lo_h = grid[max(0, i - 2)]
    hi_h = min(grid[min(n - 1, i + 2)], boundary)
    if not lo_h < hi_h:
        return k1
    local = np.geomspace(lo_h, hi_h, n)
    k2 = _smallest_feasible_k(value, m, M, p, w2_init, epsilon, local, k1)
    return k1 if k2 is None else min(k1, k2)


def minimal_k_lmc(
    m: float,
    M: float,
    p: int,
    w2_init: float,
    epsilon: float,
    h_grid: Optional[np.ndarray] = None,
    k_cap: int = DEFAULT_K_CAP,
) -> int:
    """Smallest K such that some grid step certifies W2 error <= epsilon
    under the exact-gradient chain bound."""
    return _minimal_k(lmc_value_small_step, m, M, p, w2_init, epsilon, h_grid, k_cap)


def minimal_k_baseline(
    m: float,
    M: float,
    p: int,
    w2_init: float,
    epsilon: float,
    h_grid: Optional[np.ndarray] = None,
    k_cap: int = DEFAULT_K_CAP,
) -> int:
    """Smallest K certified by the squared-form comparison bound."""
    return _minimal_k(baseline_value, m, M, p, w2_init, epsilon, h_grid, k_cap)


def figure1_curves(
    m: float,
    M: float,
    epsilons: Iterable[float],
    p_values: Iterable[int],
    grid_size: int = DEFAULT_GRID_SIZE,
    span: float = DEFAULT_GRID_SPAN,
    k_cap: int = DEFAULT_K_CAP,
) -> list[CurvePoint]:
    """Head-to-head iteration counts across dimensions and precisions.

    For each (epsilon, p) the start is placed at squared distance p from
    the mode, giving w2_init = sqrt(p + p/m) through the mean-based
    initial bound, and both planners search the same step grid.  The
    certified counts must satisfy k_lmc <= k_baseline on every point;
    a violation raises, since it would mean a planner bug.
    """
    eps_list = [float(e) for e in epsilons]
    p_list = [int(p) for p in p_values]
    if not eps_list or not p_list:
        raise ValueError("epsilons and p_values must be nonempty")
    grid = default_h_grid(m, M, size=grid_size, span=span)

    def solve(point: tuple[float, int]) -> CurvePoint:
        eps, p = point
        w2 = init_w2_from_mean(float(p), p, m)
        k_l = minimal_k_lmc(m, M, p, w2, eps, h_grid=grid, k_cap=k_cap)
        k_b = minimal_k_baseline(m, M, p, w2, eps, h_grid=grid, k_cap=k_cap)
        if k_l > k_b:
            raise RuntimeError(
                f"comparison invariant violated at epsilon={eps:g}, p={p}: "
                f"k_lmc={k_l} > k_baseline={k_b}; this indicates a planner bug"
            )
        return CurvePoint(p=p, epsilon=eps, k_lmc=k_l, k_baseline=k_b)

    jobs = [(eps, p) for eps in eps_list for p in p_list]
    return parallel_map(solve, jobs)
