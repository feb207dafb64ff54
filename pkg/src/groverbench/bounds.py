"""Closed-form upper bounds on the query complexity of Grover search with an
unknown number of marked items, and of quantum maximum finding.

All quantities count queries to the marking function g.  A coherent oracle
call costs `CostModel.c_q` queries to g (2 for compute/uncompute); functions
that return oracle-level figures say so in their docstrings.  Everything here
is pure: same inputs give bit-identical outputs, safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dilog import li2

#: Cycle growth factor for the unknown-t Grover schedule (optimal in (1, 4/3)).
LAMBDA = 6.0 / 5.0
#: Timeout coefficient: a single Grover run is cut off after ALPHA * sqrt(L) queries.
ALPHA = 9.2
#: Expected-queries plateau of F(L, t) once at least a quarter of items are marked.
F_PLATEAU = 2.0344
#: Loose maximum-finding bound: c_q * (6.3505 sqrt(L) + 2.8203).
QMAX_LOOSE_SQRT_COEF = 6.3505
QMAX_LOOSE_CONST = 2.8203
#: Leading coefficient of the tighter maximum-finding bound, 3*sqrt(3)*(1+pi)/4.
QMAX_TIGHT_SQRT_COEF = 3.0 * math.sqrt(3.0) * (1.0 + math.pi) / 4.0
QMAX_TIGHT_CONST = 5.3482
#: Largest list size for which classical sampling beats Grover at every marked
#: fraction (numerical-study domain; see `crossover_fraction`).
CLASSICAL_ALWAYS_WINS_MAX = 260

_LN3 = math.log(3.0)
_LN_LAMBDA = math.log(LAMBDA)
# Ceilings of logarithms must not round 3.0000000000000004 up to 2 steps.
_CEIL_SLACK = 1e-12


def _ceil_tol(x: float) -> int:
    return int(math.ceil(x - _CEIL_SLACK))


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")


def _check_list_size(list_size: int) -> None:
    if list_size < 1:
        raise ValueError(f"list_size must be >= 1, got {list_size}")


def boost_rounds(epsilon: float) -> int:
    """Repetitions ceil(log3(1/epsilon)) that push the failure probability below epsilon."""
    _check_epsilon(epsilon)
    return max(1, _ceil_tol(-math.log(epsilon) / _LN3))


def alpha_floor(growth: float = LAMBDA) -> float:
    """Smallest admissible timeout coefficient, 9*sqrt(3)/2 + 25/(36 e ln(growth))."""
    return 4.5 * math.sqrt(3.0) + 25.0 / (36.0 * math.e * math.log(growth))


@dataclass(frozen=True)
class CostModel:
    """Global constants parameterizing every bound.

    c_q: queries to g per coherent oracle call (2 for compute/uncompute).
    alpha: run-timeout coefficient (Q_max = alpha * sqrt(L)).
    growth: per-cycle growth factor of the iteration cap.
    n_samples_default: classical samples drawn before Grover engages.
    """

    c_q: float = 2.0
    alpha: float = ALPHA
    growth: float = LAMBDA
    n_samples_default: int = 130

    def __post_init__(self) -> None:
        if self.c_q < 1.0:
            raise ValueError(f"c_q must be >= 1, got {self.c_q}")
        if not 1.0 < self.growth < 4.0 / 3.0:
            raise ValueError(f"growth factor must lie in (1, 4/3), got {self.growth}")
        if self.alpha < alpha_floor(self.growth) - 1e-9:
            raise ValueError(
                f"alpha={self.alpha} below the admissible floor {alpha_floor(self.growth):.4f}"
            )
        if self.n_samples_default < 0:
            raise ValueError("n_samples_default must be non-negative")


DEFAULT_MODEL = CostModel()


@dataclass(frozen=True)
class SearchRegime:
    """A search problem shape: list size and (known-to-the-analysis) marked count."""

    list_size: int
    marked: int

    def __post_init__(self) -> None:
        _check_list_size(self.list_size)
        if not 0 <= self.marked <= self.list_size:
            raise ValueError(
                f"marked must lie in [0, list_size], got {self.marked} of {self.list_size}"
            )

    @property
    def fraction(self) -> float:
        return self.marked / self.list_size

    @property
    def theta(self) -> float:
        """Grover angle with sin^2(theta) = marked / list_size."""
        return math.asin(math.sqrt(self.fraction))

    @property
    def m_t(self) -> float:
        """Critical-stage threshold L / (2 sqrt((L - t) t)); needs 1 <= t < L."""
        if not 1 <= self.marked < self.list_size:
            raise ValueError("m_t is defined for 1 <= marked < list_size")
        L, t = float(self.list_size), float(self.marked)
        return L / (2.0 * math.sqrt((L - t) * t))


@dataclass(frozen=True)
class BoundValue:
    """A bound in queries to g, tagged expected or worst-case."""

    queries: float
    kind: str  # "expected" | "worst_case"

    def __post_init__(self) -> None:
        if not math.isfinite(self.queries) or self.queries < 0.0:
            raise ValueError(f"bound must be finite and non-negative, got {self.queries}")
        if self.kind not in ("expected", "worst_case"):
            raise ValueError(f"unknown bound kind {self.kind!r}")


# ---------------------------------------------------------------------------
# Search with an unknown number of marked items
# ---------------------------------------------------------------------------

def f_upper(list_size: int, marked: int) -> float:
    """Expected oracle queries F(L, t) of one unbounded Grover run.

    (9/4) L / sqrt((L-t) t) + ceil(log_{6/5}(L / (2 sqrt((L-t) t)))) - 3 while
    fewer than a quarter of items are marked, then the 2.0344 plateau.
    Rejects marked = 0 (use `w_qsearch`: no marked items means worst case).
    """
    _check_list_size(list_size)
    if marked < 1:
        raise ValueError("f_upper needs marked >= 1; the t = 0 case is w_qsearch")
    if marked > list_size:
        raise ValueError(f"marked={marked} exceeds list_size={list_size}")
    return _f_upper_real(list_size, float(marked))


def _f_upper_real(list_size: int, marked: float) -> float:
    # Real-valued t is needed when solving the classical/Grover crossover.
    L = float(list_size)
    if marked >= L / 4.0:
        return F_PLATEAU
    root = math.sqrt((L - marked) * marked)
    m_t = L / (2.0 * root)
    return 2.25 * L / root + _ceil_tol(math.log(m_t) / _LN_LAMBDA) - 3.0


def _f_upper_array(list_size: int, marked: np.ndarray) -> np.ndarray:
    L = float(list_size)
    out = np.full(marked.shape, F_PLATEAU, dtype=np.float64)
    small = marked < L / 4.0
    if np.any(small):
        t = marked[small]
        root = np.sqrt((L - t) * t)
        m_t = L / (2.0 * root)
        log_term = np.ceil(np.log(m_t) / _LN_LAMBDA - _CEIL_SLACK)
        out[small] = 2.25 * L / root + log_term - 3.0
    return out


def e_grover_upper(list_size: int, marked: int, model: CostModel = DEFAULT_MODEL) -> float:
    """Expected oracle queries of the full Grover phase (all runs, any timeout count).

    F(L, t) * (1 + 1/(1 - F/(alpha sqrt(L)))), in oracle-call units (no c_q).
    """
    _check_list_size(list_size)
    if marked < 1:
        raise ValueError("e_grover_upper needs marked >= 1; the t = 0 case is w_qsearch")
    if marked > list_size:
        raise ValueError(f"marked={marked} exceeds list_size={list_size}")
    return _e_grover_upper_real(list_size, float(marked), model)


def _e_grover_upper_real(list_size: int, marked: float, model: CostModel) -> float:
    F = _f_upper_real(list_size, marked)
    x = F / (model.alpha * math.sqrt(list_size))
    if x >= 1.0:
        # Unreachable for integer t >= 1; real-valued t < 1 (plug-in estimators)
        # can push F past the timeout budget, where the bound is vacuous.
        return math.inf
    return F * (1.0 + 1.0 / (1.0 - x))


def _e_grover_upper_array(
    list_size: int, marked: np.ndarray, model: CostModel
) -> np.ndarray:
    F = _f_upper_array(list_size, marked)
    x = F / (model.alpha * math.sqrt(list_size))
    out = np.where(x < 1.0, F * (1.0 + 1.0 / (1.0 - np.minimum(x, 0.999999))), np.inf)
    return out


def e_qsearch(
    list_size: int,
    marked: int,
    n_samples: int,
    epsilon: float,
    model: CostModel = DEFAULT_MODEL,
) -> BoundValue:
    """Expected g-queries of QSearch: classical sampling phase plus Grover phase.

    (L/t)(1 - (1-f)^N) + (1-f)^N c_q E_Grover for t >= 1 (independent of
    epsilon); for t = 0 the expectation equals the worst case `w_qsearch`.
    """
    _check_list_size(list_size)
    _check_epsilon(epsilon)
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    if not 0 <= marked <= list_size:
        raise ValueError(f"marked must lie in [0, list_size], got {marked}")
    if marked == 0:
        return BoundValue(w_qsearch(list_size, n_samples, epsilon, model).queries, "worst_case")
    f = marked / list_size
    miss = (1.0 - f) ** n_samples
    classical = (1.0 - miss) / f
    quantum = miss * model.c_q * e_grover_upper(list_size, marked, model)
    return BoundValue(classical + quantum, "expected")


def w_qsearch(
    list_size: int,
    n_samples: int,
    epsilon: float,
    model: CostModel = DEFAULT_MODEL,
) -> BoundValue:
    """Worst-case g-queries of QSearch: N_samples + alpha c_q ceil(log3(1/eps)) sqrt(L)."""
    _check_list_size(list_size)
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    runs = boost_rounds(epsilon)
    return BoundValue(
        n_samples + model.alpha * model.c_q * runs * math.sqrt(list_size), "worst_case"
    )


def w_qsearch_zalka(
    list_size: int, epsilon: float, model: CostModel = DEFAULT_MODEL
) -> BoundValue:
    """Worst-case g-queries of the staged-exact-search variant.

    With t0 = ceil(ln(1/eps) / (2 ln(4/3))): c_q (5 t0 + pi sqrt(L) sqrt(t0)).
    Error dependence is sqrt(ln(1/eps)), quadratically better than `w_qsearch`.
    """
    _check_list_size(list_size)
    _check_epsilon(epsilon)
    t0 = max(1, _ceil_tol(math.log(1.0 / epsilon) / (2.0 * math.log(4.0 / 3.0))))
    return BoundValue(
        model.c_q * (5.0 * t0 + math.pi * math.sqrt(list_size) * math.sqrt(t0)),
        "worst_case",
    )


def crossover_fraction(
    list_size: int, model: CostModel = DEFAULT_MODEL
) -> float | None:
    """Inverse marked fraction 1/f0 at which Grover stops beating classical sampling.

    Solves 1/f = c_q * E_Grover(L, f L) by sign-checked bisection over
    f in [1/L, 1], treating t = f L as real inside F (log ceiling retained).
    Oracle queries are weighted by c_q so both sides count queries to g; with
    the default c_q = 2 the solution tends to 131.665 as L grows.  Returns
    None for L <= 260, the domain where classical sampling needs fewer
    queries at every fraction, and when no bracketed sign change exists.
    """
    _check_list_size(list_size)
    if list_size <= CLASSICAL_ALWAYS_WINS_MAX:
        return None

    def gap(f: float) -> float:
        return 1.0 / f - model.c_q * _e_grover_upper_real(list_size, f * list_size, model)

    lo, hi = 1.0 / list_size, 1.0
    if gap(lo) <= 0.0 or gap(hi) >= 0.0:
        return None
    # Bisect on log f; the gap is monotone enough that any sign change works.
    while hi / lo - 1.0 > 1e-9:
        mid = math.sqrt(lo * hi)
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 1.0 / math.sqrt(lo * hi)


def optimal_n_samples(list_size: int, model: CostModel = DEFAULT_MODEL) -> int:
    """Classical sample budget minimizing the uniform-t average of `e_qsearch`.

    Exhaustive scan of N in [0, L]; ties resolve toward smaller N.  The
    average runs over t = 1..L (the t >= 1 expectation is epsilon-free).
    """
    _check_list_size(list_size)
    L = list_size
    t = np.arange(1, L + 1, dtype=np.float64)
    f = t / L
    quantum = model.c_q * _e_grover_upper_array(L, t, model)
    classical_full = 1.0 / f
    # avg(N) = mean(1/f) - mean((1/f - c_q E_Grover) * (1-f)^N)
    delta = classical_full - quantum
    base = float(np.mean(classical_full))
    miss = np.ones(L, dtype=np.float64)
    shrink = 1.0 - f
    best_n = 0
    best_val = base - float(np.mean(delta * miss))
    for n in range(1, L + 1):
        miss *= shrink
        val = base - float(np.mean(delta * miss))
        if val < best_val:
            best_n, best_val = n, val
    return best_n


# ---------------------------------------------------------------------------
# Maximum finding
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1024)
def _qmax_inf_sum_oracle(list_size: int) -> float:
    if list_size == 1:
        return 0.0  # a 1-element maximum needs no Grover queries
    t = np.arange(1, list_size, dtype=np.float64)
    return float(np.sum(_f_upper_array(list_size, t) / (t + 1.0)))


def e_qmax_inf_sum(list_size: int, model: CostModel = DEFAULT_MODEL) -> float:
    """Expected g-queries of unbounded maximum finding: c_q sum_t F(L,t)/(t+1)."""
    _check_list_size(list_size)
    return model.c_q * _qmax_inf_sum_oracle(list_size)


def e_qmax_loose(list_size: int, model: CostModel = DEFAULT_MODEL) -> float:
    """Integral-comparison form of the maximum-finding bound: c_q (6.3505 sqrt(L) + 2.8203)."""
    _check_list_size(list_size)
    return model.c_q * (QMAX_LOOSE_SQRT_COEF * math.sqrt(list_size) + QMAX_LOOSE_CONST)


def e_qmax_tight(list_size: int, model: CostModel = DEFAULT_MODEL) -> float:
    """Sharper closed form with a 5.3801 sqrt(L) leading term and a dilogarithm tail.

    The derivation assumes ceil(L/4) - 1 >= 4 (so L >= 17); smaller lists must
    fall back to `e_qmax_loose` or the explicit sum.  The smaller leading
    coefficient pays off only once sqrt(L) dominates the log^2(L) terms.
    """
    _check_list_size(list_size)
    q = math.ceil(list_size / 4) - 1
    if q < 4:
        raise ValueError("e_qmax_tight assumes ceil(L/4) - 1 >= 4; use e_qmax_loose")
    L = float(list_size)
    two_ln_lambda = 2.0 * _LN_LAMBDA
    val = (
        QMAX_TIGHT_SQRT_COEF * math.sqrt(L)
        + math.log(L / 4.0) / two_ln_lambda * (math.log(L / 3.0) + math.log(L / 4.0 + 1.0))
        - 2.0 * math.log(L / 4.0)
        + QMAX_TIGHT_CONST
        + li2(-float(q)) / two_ln_lambda
    )
    return model.c_q * val


def qmax_timeout(list_size: int, model: CostModel = DEFAULT_MODEL) -> float:
    """Markov cutoff 3 * E[QMax_inf]: exceeded with probability at most 1/3."""
    return 3.0 * e_qmax_inf_sum(list_size, model)


def e_qmax(
    list_size: int, epsilon: float, model: CostModel = DEFAULT_MODEL
) -> BoundValue:
    """Expected g-queries of boosted maximum finding: ceil(log3(1/eps)) * 3 * E[QMax_inf]."""
    _check_list_size(list_size)
    return BoundValue(boost_rounds(epsilon) * qmax_timeout(list_size, model), "expected")
