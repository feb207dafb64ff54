"""Weighted MAX-k-SAT instances, the matrix-form objective, random instance
generation, and the incremental marked-set data structure used by the exact
hill climbers.

Assignments are length-n +-1 sign vectors (int8 numpy arrays).  Clauses are
stored sparsely as (m, k) arrays of variable indices and literal signs; the
row j of the implicit {-1, 0, 1} clause matrix A has sign s at column v for
each (v, s) pair of clause j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .rng import make_rng


@dataclass
class MaxSatInstance:
    """A weighted MAX-k-SAT instance.  Treat as immutable once constructed."""

    n: int
    k: int
    clause_vars: np.ndarray   # (m, k) int32, distinct within each row
    clause_signs: np.ndarray  # (m, k) int8, +-1
    weights: np.ndarray       # (m,) float64, non-negative

    def __post_init__(self) -> None:
        if self.k < 1 or self.n < 1:
            raise ValueError("n and k must be positive")
        if self.k > self.n:
            raise ValueError(f"k={self.k} literals per clause need k <= n={self.n}")
        cv, cs, w = self.clause_vars, self.clause_signs, self.weights
        if cv.shape != cs.shape or cv.ndim != 2 or cv.shape[1] != self.k:
            raise ValueError("clause arrays must be (m, k) and congruent")
        if w.shape != (cv.shape[0],):
            raise ValueError("weights must be one per clause")
        if cv.size and (cv.min() < 0 or cv.max() >= self.n):
            raise ValueError("clause variable index out of range")
        if np.any(np.sort(cv, axis=1)[:, 1:] == np.sort(cv, axis=1)[:, :-1]):
            raise ValueError("clauses must use distinct variables")
        if np.any(np.abs(cs) != 1):
            raise ValueError("literal signs must be +-1")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")

    @property
    def m(self) -> int:
        return self.clause_vars.shape[0]

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @cached_property
    def _var_index(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # CSR-style var -> (clause row, slot) incidence, sorted by variable.
        flat_vars = self.clause_vars.ravel()
        order = np.argsort(flat_vars, kind="stable")
        rows = (order // self.k).astype(np.int64)
        slots = (order % self.k).astype(np.int64)
        indptr = np.searchsorted(flat_vars[order], np.arange(self.n + 1))
        return indptr.astype(np.int64), rows, slots

    def clauses_of(self, var: int) -> tuple[np.ndarray, np.ndarray]:
        """Clause rows containing `var` and the slot `var` occupies in each."""
        indptr, rows, slots = self._var_index
        lo, hi = indptr[var], indptr[var + 1]
        return rows[lo:hi], slots[lo:hi]


def random_assignment(n: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.integers(0, 2, size=n, dtype=np.int8) * 2 - 1).astype(np.int8)


def objective(instance: MaxSatInstance, signs: np.ndarray) -> float:
    """Matrix-form objective W^T ceil((A x + k) / (2k)).

    The clause margin (A x)_j lies in [-k, k]; the ceiling is 0 exactly when
    every literal is violated and 1 otherwise.
    """
    margins = clause_margins(instance, signs)
    satisfied = np.ceil((margins + instance.k) / (2.0 * instance.k))
    return float(instance.weights @ satisfied)


def clause_margins(instance: MaxSatInstance, signs: np.ndarray) -> np.ndarray:
    """Per-clause margins (A x)_j = sum of literal signs times assigned signs."""
    if signs.shape != (instance.n,):
        raise ValueError(f"assignment must be length {instance.n}")
    return (instance.clause_signs * signs[instance.clause_vars]).sum(axis=1)


def neighborhood_size(n: int, d: int) -> int:
    """|N_d| = sum_{i=1..d} C(n, i), the number of assignments within d flips."""
    if d < 1 or d > n:
        raise ValueError("need 1 <= d <= n")
    return sum(math.comb(n, i) for i in range(1, d + 1))


def generate_instance(n: int, k: int, r: float, seed) -> MaxSatInstance:
    """Random instance with m = ceil(r n) clauses.

    Each clause picks k distinct variables uniformly without replacement,
    negates each independently with probability 1/2, and carries a
    Uniform[0, 1] weight.  Deterministic in the seed.
    """
    if k > n:
        raise ValueError(f"k={k} literals per clause need k <= n={n}")
    if r <= 0:
        raise ValueError("clause ratio r must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng("maxsat-gen", seed)
    m = math.ceil(r * n)
    if 2 * k > n:
        tiled = np.tile(np.arange(n, dtype=np.int32), (m, 1))
        clause_vars = rng.permuted(tiled, axis=1)[:, :k]
    else:
        clause_vars = rng.integers(0, n, size=(m, k), dtype=np.int32)
        while True:
            s = np.sort(clause_vars, axis=1)
            bad = np.flatnonzero((s[:, 1:] == s[:, :-1]).any(axis=1))
            if bad.size == 0:
                break
            clause_vars[bad] = rng.integers(0, n, size=(bad.size, k), dtype=np.int32)
    clause_signs = (rng.integers(0, 2, size=(m, k), dtype=np.int8) * 2 - 1).astype(np.int8)
    weights = rng.random(m)
    return MaxSatInstance(n, k, np.ascontiguousarray(clause_vars), clause_signs, weights)


def _concat_ranges(starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    # Vectorized concatenate of arange(s, s+c) blocks.
    keep = counts > 0
    starts, counts = starts[keep], counts[keep]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    out = np.ones(total, dtype=np.int64)
    out[0] = starts[0]
    heads = np.cumsum(counts)[:-1]
    out[heads] = starts[1:] - starts[:-1] - counts[:-1] + 1
    return np.cumsum(out)


class MarginState:
    """Assignment plus per-clause margins: the memory-light state the sampling
    climber keeps (no gains table, no marked list)."""

    def __init__(self, instance: MaxSatInstance, signs: np.ndarray):
        self.instance = instance
        self.signs = signs.astype(np.int8).copy()
        self.margins = clause_margins(instance, self.signs)
        self.objective = float(instance.weights @ (self.margins > -instance.k))

    def gain_of(self, var: int) -> float:
        """Objective change if `var` were flipped, from this state's margins."""
        inst = self.instance
        rows, slots = inst.clauses_of(var)
        if rows.size == 0:
            return 0.0
        s = inst.clause_signs[rows, slots]
        mg = self.margins[rows]
        made = mg == -inst.k
        broken = (mg == -(inst.k - 2)) & (s * self.signs[var] == 1)
        return float(inst.weights[rows] @ (made.astype(np.float64) - broken))

    def flip(self, var: int) -> None:
        inst = self.instance
        rows, slots = inst.clauses_of(var)
        self.objective += self.gain_of(var)
        if rows.size:
            s = inst.clause_signs[rows, slots]
            self.margins[rows] -= 2 * s * self.signs[var]
        self.signs[var] = -self.signs[var]

    def marked_count_scan(self) -> int:
        """Full scan: number of variables whose flip strictly improves the objective."""
        return int(np.count_nonzero(_all_gains(self.instance, self.signs, self.margins) > 0))

    @property
    def entries(self) -> int:
        """Memory proxy: persistent array entries beyond the instance itself."""
        return self.instance.m + self.instance.n


def _all_gains(instance: MaxSatInstance, signs: np.ndarray, margins: np.ndarray) -> np.ndarray:
    k = instance.k
    made = (margins == -k)[:, None]
    lit_true = instance.clause_signs * signs[instance.clause_vars] == 1
    broken = (margins == -(k - 2))[:, None] & lit_true
    contrib = instance.weights[:, None] * (made.astype(np.float64) - broken)
    return np.bincount(instance.clause_vars.ravel(), weights=contrib.ravel(), minlength=instance.n)


class MarkedSetTracker:
    """Incremental record of the marked variables (flips that strictly increase
    the objective) of the current assignment.

    A flip of variable i only re-ranks variables co-occurring with i in some
    clause, so updates touch at most k * deg(i) variables.  Gains are always
    recomputed from the affected clauses rather than adjusted by cached
    deltas, which keeps float drift out of the marked set.
    Single-owner mutable; one tracker per climber run.
    """

    def __init__(self, instance: MaxSatInstance, signs: np.ndarray):
        self.instance = instance
        self.signs = signs.astype(np.int8).copy()
        self.margins = clause_margins(instance, self.signs)
        self.objective = float(instance.weights @ (self.margins > -instance.k))
        self.gains = _all_gains(instance, self.signs, self.margins)
        self.marked_mask = self.gains > 0
        self.marked_count = int(np.count_nonzero(self.marked_mask))

    def rebuild(self) -> None:
        """Recompute everything from the assignment (the full-rescan mode)."""
        self.margins = clause_margins(self.instance, self.signs)
        self.objective = float(self.instance.weights @ (self.margins > -self.instance.k))
        self.gains = _all_gains(self.instance, self.signs, self.margins)
        self.marked_mask = self.gains > 0
        self.marked_count = int(np.count_nonzero(self.marked_mask))

    def marked_indices(self) -> np.ndarray:
        return np.flatnonzero(self.marked_mask)

    def best_marked(self) -> int:
        """Marked variable with the largest gain; ties go to the lowest index."""
        idx = self.marked_indices()
        if idx.size == 0:
            raise ValueError("no marked variables at a local maximum")
        return int(idx[np.argmax(self.gains[idx])])

    def affected_by(self, var: int) -> np.ndarray:
        """Variables whose marks can change when `var` flips (co-occurring vars)."""
        rows, _ = self.instance.clauses_of(var)
        if rows.size == 0:
            return np.array([var], dtype=np.int64)
        return np.unique(self.instance.clause_vars[rows])

    def apply_flip(self, var: int) -> None:
        inst = self.instance
        if not 0 <= var < inst.n:
            raise IndexError(f"variable index {var} out of range")
        self.objective += float(self.gains[var])
        rows, slots = inst.clauses_of(var)
        if rows.size:
            s = inst.clause_signs[rows, slots]
            self.margins[rows] -= 2 * s * self.signs[var]
        self.signs[var] = -self.signs[var]

        affected = self.affected_by(var)
        indptr, vrows, vslots = inst._var_index
        counts = indptr[affected + 1] - indptr[affected]
        live = counts > 0
        take = _concat_ranges(indptr[affected], counts)
        rows2, slots2 = vrows[take], vslots[take]
        owners = np.repeat(np.arange(affected.size)[live], counts[live])
        owner_signs = self.signs[np.repeat(affected[live], counts[live])]
        s2 = inst.clause_signs[rows2, slots2]
        mg = self.margins[rows2]
        made = mg == -inst.k
        broken = (mg == -(inst.k - 2)) & (s2 * owner_signs == 1)
        contrib = inst.weights[rows2] * (made.astype(np.float64) - broken)
        new_gains = np.bincount(owners, weights=contrib, minlength=affected.size)

        was = int(np.count_nonzero(self.marked_mask[affected]))
        self.gains[affected] = new_gains
        self.marked_mask[affected] = new_gains > 0
        self.marked_count += int(np.count_nonzero(self.marked_mask[affected])) - was

    @property
    def entries(self) -> int:
        """Memory proxy: persistent array entries beyond the instance itself."""
        return self.instance.m + 3 * self.instance.n


def build_tracker(instance: MaxSatInstance, signs: np.ndarray) -> MarkedSetTracker:
    """All-flips evaluation of the assignment: exact marked set and gains."""
    return MarkedSetTracker(instance, signs)


def apply_flip(tracker: MarkedSetTracker, var: int) -> MarkedSetTracker:
    """Flip `var` in place, updating marks only through the clauses touching it."""
    tracker.apply_flip(var)
    return tracker


# ---------------------------------------------------------------------------
# Instance files: textual weighted-CNF-like format
# ---------------------------------------------------------------------------

def write_wcnf(instance: MaxSatInstance, path) -> None:
    """Write `p wknf n m k` then one `w lit ... lit 0` line per clause.

    Literals are 1-based; a negative literal negates its variable.  Weights
    use repr so the round trip is bit-exact.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"p wknf {instance.n} {instance.m} {instance.k}\n")
        for w, vars_, signs_ in zip(instance.weights, instance.clause_vars, instance.clause_signs):
            lits = " ".join(str(int(s) * (int(v) + 1)) for v, s in zip(vars_, signs_))
            fh.write(f"{float(w)!r} {lits} 0\n")


def read_wcnf(path) -> MaxSatInstance:
    with open(path, "r", encoding="utf-8") as fh:
        header = None
        weights, cvars, csigns = [], [], []
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 5 or parts[1] != "wknf":
                    raise ValueError(f"bad header line: {line!r}")
                header = tuple(int(x) for x in parts[2:])
                continue
            if header is None:
                raise ValueError("clause line before header")
            parts = line.split()
            if parts[-1] != "0":
                raise ValueError(f"clause line must end in 0: {line!r}")
            weights.append(float(parts[0]))
            lits = [int(x) for x in parts[1:-1]]
            cvars.append([abs(lit) - 1 for lit in lits])
            csigns.append([1 if lit > 0 else -1 for lit in lits])
    if header is None:
        raise ValueError("missing header")
    n, m, k = header
    if len(weights) != m:
        raise ValueError(f"expected {m} clauses, found {len(weights)}")
    return MaxSatInstance(
        n,
        k,
        np.asarray(cvars, dtype=np.int32),
        np.asarray(csigns, dtype=np.int8),
        np.asarray(weights, dtype=np.float64),
    )
