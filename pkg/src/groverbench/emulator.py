"""Behavioral Monte-Carlo emulation of the Grover subroutines as stochastic
query-count processes.

This module is the measurement side of the dual route: it re-derives the
schedule constants locally and never imports from `bounds`, so the emulated
means can legitimately validate the closed forms.  Marked-item identity never
affects query counts, so searches are parameterized by (list_size, marked)
and maximum finding by the rank structure of its values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LAMBDA = 6.0 / 5.0
ALPHA = 9.2
_LN3 = math.log(3.0)

_MAX_CYCLES = 1_000_000  # safety valve; unbounded searches with t >= 1 stop long before


def grover_angle(list_size: int, marked: int) -> float:
    """Angle theta with sin^2(theta) = marked / list_size."""
    if not 0 <= marked <= list_size:
        raise ValueError("marked must lie in [0, list_size]")
    return math.asin(math.sqrt(marked / list_size))


def cycle_success_probability(theta: float, j: int) -> float:
    """Probability sin^2((2j+1) theta) that measuring after j iterations hits a marked item."""
    if j < 0:
        raise ValueError("iteration count j must be non-negative")
    return math.sin((2 * j + 1) * theta) ** 2


def cycle_average_success(theta: float, m: int) -> float:
    """P_m = 1/2 - sin(4 m theta) / (4 m sin(2 theta)): success of a cycle with j ~ U{0..m-1}."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    s2 = math.sin(2.0 * theta)
    if s2 == 0.0:
        # theta = 0: nothing marked; theta = pi/2: every (2j+1) multiple hits.
        return 0.0 if math.sin(theta) == 0.0 else 1.0
    return 0.5 - math.sin(4.0 * m * theta) / (4.0 * m * s2)


def _runs_for(epsilon: float) -> int:
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    return max(1, math.ceil(-math.log(epsilon) / _LN3 - 1e-12))


@dataclass
class Cycle:
    m: float
    j: int
    success: bool


@dataclass
class RunTrace:
    """Query accounting of one emulated call.

    oracle_queries counts coherent oracle calls (j iterations + 1 check per
    cycle); classical_queries counts plain sampling draws.  Total queries to
    the underlying function are classical + c_q * oracle.
    """

    oracle_queries: int = 0
    classical_queries: int = 0
    cycles: list[Cycle] = field(default_factory=list)
    found: bool = False
    timed_out: bool = False

    def g_queries(self, c_q: float = 2.0) -> float:
        return self.classical_queries + c_q * self.oracle_queries


# ---------------------------------------------------------------------------
# Single-run emulation (detailed traces)
# ---------------------------------------------------------------------------

def emulate_qsearch_inf(list_size: int, marked: int, rng: np.random.Generator) -> RunTrace:
    """Run the unbounded search until a marked item is measured.

    Cycle schedule: m starts at 6/5 and grows by 6/5 per failure, capped at
    sqrt(L); each cycle draws j ~ U{0..ceil(m)-1}, costs j + 1 oracle queries,
    and succeeds with probability sin^2((2j+1) theta).
    """
    if marked < 1:
        raise ValueError("the unbounded search never halts with no marked items")
    theta = grover_angle(list_size, marked)
    root_l = math.sqrt(list_size)
    trace = RunTrace()
    m = LAMBDA
    for _ in range(_MAX_CYCLES):
        j = int(rng.integers(0, math.ceil(m)))
        success = rng.random() < cycle_success_probability(theta, j)
        trace.oracle_queries += j + 1
        trace.cycles.append(Cycle(m, j, success))
        if success:
            trace.found = True
            return trace
        m = min(m * LAMBDA, root_l)
    raise RuntimeError("unbounded search exceeded the cycle safety valve")


def emulate_qsearch(
    list_size: int,
    marked: int,
    n_samples: int,
    epsilon: float,
    rng: np.random.Generator,
) -> RunTrace:
    """Full bounded-error QSearch: classical sampling, then timed Grover runs.

    Up to N_samples Bernoulli(t/L) draws at one query each; on a miss,
    ceil(log3(1/epsilon)) runs of the unbounded search, each cut off once
    Q_sum plus the next j would exceed alpha * sqrt(L).
    """
    if not 0 <= marked <= list_size:
        raise ValueError("marked must lie in [0, list_size]")
    f = marked / list_size
    trace = RunTrace()
    for _ in range(n_samples):
        trace.classical_queries += 1
        if f > 0.0 and rng.random() < f:
            trace.found = True
            return trace
    theta = grover_angle(list_size, marked)
    root_l = math.sqrt(list_size)
    q_max = ALPHA * root_l
    for _ in range(_runs_for(epsilon)):
        m = LAMBDA
        q_sum = 0
        while True:
            j = int(rng.integers(0, math.ceil(m)))
            # The check query counts against the budget too, so a finished run
            # never exceeds Q_max and the printed worst case holds exactly.
            if q_sum + j + 1 > q_max:
                break
            success = rng.random() < cycle_success_probability(theta, j)
            trace.oracle_queries += j + 1
            trace.cycles.append(Cycle(m, j, success))
            if success:
                trace.found = True
                return trace
            q_sum += j + 1
            m = min(m * LAMBDA, root_l)
    trace.timed_out = True
    return trace


def emulate_qmax_inf(values, rng: np.random.Generator) -> RunTrace:
    """Maximum finding by repeated unbounded search against the strictly-greater set.

    Starts from a uniformly random item; each round searches the items whose
    value beats the current one and moves to a uniform member of that set.
    Stops (with zero further cost) once the greater set is empty.  The initial
    value query is not counted, matching oracle-call accounting.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise ValueError("values must be nonempty")
    order = np.argsort(-vals, kind="stable")
    sorted_vals = vals[order]
    greater_of = np.searchsorted(-sorted_vals, -sorted_vals, side="left")
    size = vals.size

    trace = RunTrace()
    t = int(greater_of[int(rng.integers(size))])
    while t > 0:
        sub = emulate_qsearch_inf(size, t, rng)
        trace.oracle_queries += sub.oracle_queries
        trace.cycles.extend(sub.cycles)
        pick = int(rng.integers(t))  # uniform over the strictly-greater items
        t = int(greater_of[pick])
    trace.found = True
    return trace


# ---------------------------------------------------------------------------
# Batched emulation (vectorized over runs; used by verification sweeps)
# ---------------------------------------------------------------------------

def batch_qsearch_inf_queries(
    list_size: int, marked: int, n_runs: int, rng: np.random.Generator
) -> np.ndarray:
    """Oracle-query totals of n_runs independent unbounded searches."""
    if marked < 1:
        raise ValueError("the unbounded search never halts with no marked items")
    theta = grover_angle(list_size, marked)
    root_l = math.sqrt(list_size)
    queries = np.zeros(n_runs, dtype=np.int64)
    alive = np.arange(n_runs)
    m = LAMBDA
    for _ in range(_MAX_CYCLES):
        if alive.size == 0:
            return queries
        j = rng.integers(0, math.ceil(m), size=alive.size)
        p = np.sin((2 * j + 1) * theta) ** 2
        success = rng.random(alive.size) < p
        queries[alive] += j + 1
        alive = alive[~success]
        m = min(m * LAMBDA, root_l)
    raise RuntimeError("unbounded search exceeded the cycle safety valve")


def _batch_timed_run(
    theta: float, root_l: float, q_max: float, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """One timed Grover run for `size` trials: (oracle queries used, success flags)."""
    queries = np.zeros(size, dtype=np.int64)
    succeeded = np.zeros(size, dtype=bool)
    live = np.arange(size)
    m = LAMBDA
    while live.size:
        j = rng.integers(0, math.ceil(m), size=live.size)
        over = queries[live] + j + 1 > q_max
        live = live[~over]
        if live.size == 0:
            break
        j = j[~over]
        p = np.sin((2 * j + 1) * theta) ** 2
        hit = rng.random(live.size) < p
        queries[live] += j + 1
        succeeded[live[hit]] = True
        live = live[~hit]
        m = min(m * LAMBDA, root_l)
    return queries, succeeded


def batch_qsearch_queries(
    list_size: int,
    marked: int,
    n_samples: int,
    epsilon: float,
    n_trials: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vector QSearch emulation: (classical queries, oracle queries, success) per trial."""
    if not 0 <= marked <= list_size:
        raise ValueError("marked must lie in [0, list_size]")
    f = marked / list_size
    classical = np.full(n_trials, n_samples, dtype=np.int64)
    oracle = np.zeros(n_trials, dtype=np.int64)
    success = np.zeros(n_trials, dtype=bool)
    if f > 0.0 and n_samples > 0:
        geo = rng.geometric(f, size=n_trials)
        hit = geo <= n_samples
        classical = np.minimum(geo, n_samples).astype(np.int64)
        success |= hit
    unresolved = np.flatnonzero(~success)
    if unresolved.size and marked > 0:
        theta = grover_angle(list_size, marked)
        root_l = math.sqrt(list_size)
        q_max = ALPHA * root_l
        for _ in range(_runs_for(epsilon)):
            if unresolved.size == 0:
                break
            q, s = _batch_timed_run(theta, root_l, q_max, unresolved.size, rng)
            oracle[unresolved] += q
            success[unresolved[s]] = True
            unresolved = unresolved[~s]
    elif unresolved.size:
        # No marked items: every run times out deterministically in count terms.
        theta = 0.0
        root_l = math.sqrt(list_size)
        q_max = ALPHA * root_l
        for _ in range(_runs_for(epsilon)):
            q, _ = _batch_timed_run(theta, root_l, q_max, unresolved.size, rng)
            oracle[unresolved] += q
    return classical, oracle, success


def batch_qmax_inf_queries(values, n_runs: int, rng: np.random.Generator) -> np.ndarray:
    """Oracle-query totals of n_runs independent unbounded maximum-finding runs."""
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise ValueError("values must be nonempty")
    size = vals.size
    order = np.argsort(-vals, kind="stable")
    sorted_vals = vals[order]
    greater_of = np.searchsorted(-sorted_vals, -sorted_vals, side="left").astype(np.int64)

    root_l = math.sqrt(size)
    queries = np.zeros(n_runs, dtype=np.int64)
    t = greater_of[rng.integers(0, size, size=n_runs)]
    theta = np.arcsin(np.sqrt(t / size))
    active = np.flatnonzero(t > 0)
    while active.size:
        searching = active
        m = LAMBDA
        # One synchronized round: all active runs execute their search; the m
        # schedule depends only on the cycle index, so it is shared.
        while searching.size:
            j = rng.integers(0, math.ceil(m), size=searching.size)
            p = np.sin((2 * j + 1) * theta[searching]) ** 2
            hit = rng.random(searching.size) < p
            queries[searching] += j + 1
            winners = searching[hit]
            if winners.size:
                pick = rng.integers(0, t[winners])
                t[winners] = greater_of[pick]
                theta[winners] = np.arcsin(np.sqrt(t[winners] / size))
            searching = searching[~hit]
            m = min(m * LAMBDA, root_l)
        active = active[t[active] > 0]
    return queries
