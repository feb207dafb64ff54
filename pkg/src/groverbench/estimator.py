"""Geometric-sampling estimators for QSearch run-times when the marked count
is unknown.

Drawing with replacement until the first marked hit gives l ~ Geo(f) with
E[l] = 1/f, but plugging l into the closed-form bound underestimates it in
expectation (Jensen, via the concave sqrt and log).  The corrected one-draw
estimator here upper-bounds the expected QSearch cost instead, with the
multiplicative constants 4/pi (square root) and e^gamma (logarithm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bounds
from .bounds import CostModel, DEFAULT_MODEL

EULER_GAMMA = float(np.euler_gamma)

# Constants of the corrected Grover-part estimator; see the derivation checks
# in the test suite for how each one arises from the closed-form bound.
GROVER_EST_OFFSET = -1.1272
GROVER_EST_ROOT_L = 1.7850
GROVER_EST_LINEAR = 1.2991
GROVER_EST_SQRT = 5.1962
GROVER_EST_SQRT_ROOT_L = 2.5064
GROVER_EST_LOG = 1.25

BRANCH_CLASSICAL = "classical_hit"
BRANCH_GROVER = "grover_estimate"
BRANCH_EMPTY = "assumed_empty"

_LN_LAMBDA = math.log(bounds.LAMBDA)


def sqrt_bias_factor() -> float:
    """Jensen correction d1 = 4/pi: E[sqrt(d1 l)] >= sqrt(E[l]) for geometric l."""
    return 4.0 / math.pi


def log_bias_factor() -> float:
    """Jensen correction d2 = e^gamma: E[log(d2 l)] >= log(E[l]) for geometric l."""
    return math.exp(EULER_GAMMA)


def grover_query_estimator(l, list_size: int):
    """One-draw estimator of the Grover-phase oracle queries, given the draw count l.

    Upper-bounds E_Grover(L, t) in expectation over l ~ Geo(t/L) for every
    1 <= t <= L.  Accepts a scalar or array l >= 1; result is in oracle-call
    units (multiply by c_q for queries to g).
    """
    arr = np.asarray(l, dtype=np.float64)
    if np.any(arr < 1):
        raise ValueError("draw count l must be >= 1")
    root_l = math.sqrt(list_size)
    out = (
        GROVER_EST_OFFSET
        + GROVER_EST_ROOT_L / root_l
        + (GROVER_EST_LINEAR / root_l) * arr
        + (GROVER_EST_SQRT - GROVER_EST_SQRT_ROOT_L / root_l) * (2.0 * np.sqrt(arr) / math.sqrt(math.pi))
        + GROVER_EST_LOG * np.log(log_bias_factor() * arr) / _LN_LAMBDA
    )
    return float(out) if np.isscalar(l) or np.ndim(l) == 0 else out


def naive_grover_estimator(l, list_size: int, model: CostModel = DEFAULT_MODEL):
    """Uncorrected plug-in: the closed-form bound evaluated at t = L/l.

    Negative control only: for small marked fractions this *undershoots*
    E_Grover in expectation, which is exactly the bias the corrected
    estimator removes.  Draws so large that t = L/l exhausts the run budget
    evaluate to +inf.
    """
    arr = np.asarray(l, dtype=np.float64)
    if np.any(arr < 1):
        raise ValueError("draw count l must be >= 1")
    t = list_size / arr
    F = _f_upper_real_array(list_size, t)
    x = F / (model.alpha * math.sqrt(list_size))
    with np.errstate(divide="ignore"):
        out = np.where(x < 1.0, F * (1.0 + 1.0 / (1.0 - x)), np.inf)
    return float(out) if np.isscalar(l) or np.ndim(l) == 0 else out


def _f_upper_real_array(list_size: int, t: np.ndarray) -> np.ndarray:
    # Same kernel as bounds._f_upper_array but tolerant of real t < 1.
    L = float(list_size)
    out = np.full(t.shape, bounds.F_PLATEAU, dtype=np.float64)
    small = t < L / 4.0
    if np.any(small):
        ts = t[small]
        root = np.sqrt((L - ts) * ts)
        m_t = L / (2.0 * root)
        out[small] = 2.25 * L / root + np.ceil(np.log(m_t) / _LN_LAMBDA - 1e-12) - 3.0
    return out


def h_estimator(l, list_size: int, n_samples: int, model: CostModel = DEFAULT_MODEL):
    """Full QSearch estimator H(l) = min(l, N) + [l > N] c_q * grover_query_estimator(l).

    E[H(l)] >= E_QSearch(L, t, N, .) over l ~ Geo(t/L) for all t >= 1.
    Accepts scalar or array l.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    arr = np.asarray(l, dtype=np.float64)
    h1 = np.minimum(arr, float(n_samples))
    grover = model.c_q * np.asarray(grover_query_estimator(arr, list_size))
    out = h1 + np.where(arr > n_samples, grover, 0.0)
    return float(out) if np.isscalar(l) or np.ndim(l) == 0 else out


@dataclass(frozen=True)
class EstimateConfig:
    """Knobs of the estimation procedure.

    delta is the tolerated probability of wrongly concluding "no marked
    items"; it fixes the draw cap l_max = ceil(L / delta) unless an explicit
    override is given (the MAX-SAT harness uses 10 n).
    """

    n_samples: int = 130
    delta: float = 0.01
    epsilon: float = 1e-5
    l_max_override: int | None = None

    def __post_init__(self) -> None:
        if self.n_samples < 0:
            raise ValueError("n_samples must be non-negative")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.l_max_override is not None and self.l_max_override < 1:
            raise ValueError("l_max_override must be positive")

    def l_max(self, list_size: int) -> int:
        if self.l_max_override is not None:
            return self.l_max_override
        return math.ceil(list_size / self.delta)


@dataclass(frozen=True)
class EstimateOutcome:
    """Result of one estimation call.

    l is the number of draws performed (capped at l_max); branch records
    whether the draw would have been answered classically, by Grover, or by
    concluding the list is empty.  found_item is None on the empty branch.
    """

    l: int
    branch: str
    estimated_queries: float
    found_item: int | None


class MarkedFractionSampler:
    """Geometric draws against an anonymous membership predicate.

    Knows only (list_size, marked); item identity is immaterial to query
    counts, so `found_item` is an index into the marked set.  Owns a private
    RNG stream; not thread-safe across concurrent callers.
    """

    def __init__(self, list_size: int, marked: int, rng: np.random.Generator):
        if not 0 <= marked <= list_size:
            raise ValueError("marked must lie in [0, list_size]")
        self.list_size = list_size
        self.marked = marked
        self.rng = rng

    def draw(self, l_max: int) -> tuple[int, int | None]:
        """Draw until the first marked hit or l_max tries; (tries, hit index or None)."""
        if self.marked == 0:
            return l_max, None
        l = int(self.rng.geometric(self.marked / self.list_size))
        if l > l_max:
            return l_max, None
        return l, int(self.rng.integers(self.marked))


def estimate_qsearch(
    sampler,
    list_size: int,
    config: EstimateConfig = EstimateConfig(),
    model: CostModel = DEFAULT_MODEL,
    n_draws: int = 1,
) -> EstimateOutcome:
    """Estimate the expected QSearch cost from geometric draws, without knowing t.

    One draw (the default) carries the one-sided guarantee: with probability
    at least 1 - delta the estimate upper-bounds E_QSearch in expectation.
    `n_draws > 1` averages per-draw estimates for lower variance; the
    averaged form is exposed for experiments but sits outside the guarantee.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    l_max = config.l_max(list_size)
    first: tuple[int, str, int | None] | None = None
    total = 0.0
    for _ in range(n_draws):
        l, found = sampler.draw(l_max)
        if found is None:
            branch = BRANCH_EMPTY
            est = bounds.w_qsearch(list_size, config.n_samples, config.epsilon, model).queries
        elif l <= config.n_samples:
            branch = BRANCH_CLASSICAL
            est = float(l)
        else:
            branch = BRANCH_GROVER
            est = config.n_samples + model.c_q * grover_query_estimator(l, list_size)
        total += est
        if first is None:
            first = (l, branch, found)
    l0, branch0, found0 = first
    return EstimateOutcome(l0, branch0, total / n_draws, found0)


@dataclass(frozen=True)
class EpsilonBudget:
    """Total failure budget split uniformly over at most t_max_steps subroutine calls."""

    epsilon_total: float
    t_max_steps: int

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon_total < 1.0:
            raise ValueError("epsilon_total must lie in (0, 1)")
        if self.t_max_steps < 1:
            raise ValueError("t_max_steps must be >= 1")


def subroutine_epsilon(budget: EpsilonBudget) -> float:
    """Per-call budget 1 - (1 - eps_total)^(1/T), so T calls stay within eps_total."""
    return -math.expm1(math.log1p(-budget.epsilon_total) / budget.t_max_steps)
