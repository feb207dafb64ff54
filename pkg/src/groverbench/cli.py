"""Command-line harness: bound evaluation, emulator-vs-bound verification
sweeps, MAX-k-SAT experiment campaigns, and sampled-vs-exact estimation
comparisons.

Experiment outputs are a versioned CSV of one row per run plus a JSON summary
(fitted scaling exponents, speedup ratios, build id, config echo).  All
randomness flows from the spec seed; wall-clock readings never enter the CSV,
so identical spec + seed reproduces it byte for byte.  Report figures are
rendered alongside unless --no-figures is given.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, bounds, emulator, estimator, hillclimb, maxsat
from .bounds import CostModel
from .hillclimb import ClimberConfig, fit_scaling_exponent
from .rng import make_rng

SCHEMA_VERSION = 1

_VARIANT_CODE = {"simple": 0, "steep": 1}
_MODE_CODE = {"classical": 0, "quantum_exact": 1, "quantum_sampled": 2}


def _build_id() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"groverbench-{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return f"groverbench-{__version__}"


def _worker_count() -> int:
    raw = os.environ.get("GROVERBENCH_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Experiment campaigns
# ---------------------------------------------------------------------------

_SPEC_DEFAULTS = {
    "format_version": SCHEMA_VERSION,
    "variants": ["simple", "steep"],
    "modes": ["classical", "quantum_exact"],
    "epsilon_total": 1e-5,
    "n_samples": 130,
    "c_q": 2.0,
    "base_seed": 0,
}
_SPEC_REQUIRED = ("n_grid", "k", "r", "seeds")


@dataclass(frozen=True)
class ExperimentSpec:
    n_grid: tuple[int, ...]
    k: int
    r: float
    seeds: int
    variants: tuple[str, ...]
    modes: tuple[str, ...]
    epsilon_total: float
    n_samples: int
    c_q: float
    base_seed: int
    format_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if self.format_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported format_version {self.format_version}")
        for v in self.variants:
            if v not in _VARIANT_CODE:
                raise ValueError(f"unknown variant {v!r}")
        for m in self.modes:
            if m not in _MODE_CODE:
                raise ValueError(f"unknown mode {m!r}")

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentSpec":
        unknown = set(data) - set(_SPEC_DEFAULTS) - set(_SPEC_REQUIRED)
        if unknown:
            raise ValueError(f"unknown spec keys: {sorted(unknown)}")
        missing = [k for k in _SPEC_REQUIRED if k not in data]
        if missing:
            raise ValueError(f"missing spec keys: {missing}")
        merged = {**_SPEC_DEFAULTS, **data}
        return cls(
            n_grid=tuple(int(n) for n in merged["n_grid"]),
            k=int(merged["k"]),
            r=float(merged["r"]),
            seeds=int(merged["seeds"]),
            variants=tuple(merged["variants"]),
            modes=tuple(merged["modes"]),
            epsilon_total=float(merged["epsilon_total"]),
            n_samples=int(merged["n_samples"]),
            c_q=float(merged["c_q"]),
            base_seed=int(merged["base_seed"]),
        )

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("experiment spec must be a JSON object")
        return cls.from_mapping(data)

    def echo(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class ResultRow:
    n: int
    k: int
    r: float
    seed: int
    variant: str
    mode: str
    classical_queries: float
    quantum_queries: float
    steps: int
    converged: bool
    budget_exceeded: bool
    soft_failures: int
    r_query_surcharge: int
    final_objective: float
    satisfied_fraction: float

    @property
    def total_queries(self) -> float:
        return self.classical_queries if self.mode == "classical" else self.quantum_queries


EXPERIMENT_COLUMNS = [
    "format_version", "n", "k", "r", "seed", "variant", "mode",
    "classical_queries", "quantum_queries", "steps", "converged",
    "budget_exceeded", "soft_failures", "r_query_surcharge",
    "final_objective", "satisfied_fraction",
]


def _run_point(spec: ExperimentSpec, n: int, variant: str, mode: str, seed_idx: int) -> tuple[ResultRow, float]:
    instance = maxsat.generate_instance(n, spec.k, spec.r, make_rng("instance", spec.base_seed, n, seed_idx))
    config = ClimberConfig(
        variant=variant,
        mode=mode,
        epsilon_total=spec.epsilon_total,
        n_samples=spec.n_samples,
        seed=(spec.base_seed, n, _VARIANT_CODE[variant], _MODE_CODE[mode], seed_idx),
    )
    model = CostModel(c_q=spec.c_q)
    start = time.perf_counter()
    ledger = hillclimb.run_climber(instance, config, model)
    elapsed = time.perf_counter() - start
    row = ResultRow(
        n=n, k=spec.k, r=spec.r, seed=seed_idx, variant=variant, mode=mode,
        classical_queries=ledger.classical_total,
        quantum_queries=ledger.quantum_total,
        steps=ledger.steps_taken,
        converged=ledger.converged,
        budget_exceeded=ledger.budget_exceeded,
        soft_failures=ledger.soft_failures,
        r_query_surcharge=ledger.r_query_surcharge,
        final_objective=ledger.final_objective,
        satisfied_fraction=ledger.final_objective / instance.total_weight,
    )
    return row, elapsed


def _point_task(args):
    spec_dict, n, variant, mode, seed_idx = args
    spec = ExperimentSpec.from_mapping(spec_dict)
    row, elapsed = _run_point(spec, n, variant, mode, seed_idx)
    return dataclasses.asdict(row), elapsed


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> tuple[list[ResultRow], dict]:
    """Execute the campaign; rows come back in deterministic point order."""
    points = [
        (n, variant, mode, s)
        for variant in spec.variants
        for mode in spec.modes
        for n in spec.n_grid
        for s in range(spec.seeds)
        if not (variant == "steep" and mode == "quantum_sampled")
    ]
    workers = _worker_count() if workers is None else workers
    rows: list[ResultRow] = []
    timings: dict[str, float] = {}
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        spec_dict = spec.echo()
        tasks = [(spec_dict, n, v, m, s) for (n, v, m, s) in points]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_point_task, tasks))
        for (n, v, m, s), (row_dict, elapsed) in zip(points, results):
            rows.append(ResultRow(**row_dict))
            timings[f"{v}/{m}/n={n}/seed={s}"] = elapsed
    else:
        for n, v, m, s in points:
            row, elapsed = _run_point(spec, n, v, m, s)
            rows.append(row)
            timings[f"{v}/{m}/n={n}/seed={s}"] = elapsed
    summary = summarize_experiment(spec, rows)
    summary["timings_seconds"] = timings
    return rows, summary


def summarize_experiment(spec: ExperimentSpec, rows: list[ResultRow]) -> dict:
    """Fitted scaling exponents per (variant, mode) and classical/quantum ratios."""
    fits: dict[str, dict] = {}
    by_group: dict[tuple[str, str], dict[int, list[float]]] = {}
    for row in rows:
        by_group.setdefault((row.variant, row.mode), {}).setdefault(row.n, []).append(row.total_queries)
    for (variant, mode), by_n in sorted(by_group.items()):
        points = []
        for n in sorted(by_n):
            vals = np.asarray(by_n[n])
            points.append((n, float(vals.mean()), float(vals.std(ddof=1)) if vals.size > 1 else 0.0))
        entry: dict = {"points": points}
        if len(points) >= 3:
            exponent, stderr = fit_scaling_exponent(points)
            entry["exponent"] = exponent
            entry["exponent_stderr"] = stderr
        fits[f"{variant}/{mode}"] = entry
    ratios = {}
    for variant in spec.variants:
        classical = fits.get(f"{variant}/classical", {}).get("exponent")
        for qmode in ("quantum_exact", "quantum_sampled"):
            quantum = fits.get(f"{variant}/{qmode}", {}).get("exponent")
            if classical is not None and quantum is not None:
                ratios[f"{variant}:classical/{qmode}"] = classical / quantum
    return {
        "build": _build_id(),
        "format_version": SCHEMA_VERSION,
        "spec": spec.echo(),
        "seeds": list(range(spec.seeds)),
        "fits": fits,
        "speedup_ratios": ratios,
    }


def _csv_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_experiment_csv(rows: list[ResultRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(EXPERIMENT_COLUMNS)
        for row in rows:
            writer.writerow(
                [_csv_value(v) for v in (
                    SCHEMA_VERSION, row.n, row.k, row.r, row.seed, row.variant, row.mode,
                    row.classical_queries, row.quantum_queries, row.steps, row.converged,
                    row.budget_exceeded, row.soft_failures, row.r_query_surcharge,
                    row.final_objective, row.satisfied_fraction,
                )]
            )


# ---------------------------------------------------------------------------
# Verification sweeps (emulator vs bounds)
# ---------------------------------------------------------------------------

VERIFY_COLUMNS = [
    "format_version", "check", "list_size", "marked", "runs", "mc_mean", "mc_stderr",
    "bound", "margin_sigmas", "tail_freq", "tail_bound", "passed",
]


@dataclass
class VerifyCell:
    check: str
    list_size: int
    marked: int
    runs: int
    mc_mean: float
    mc_stderr: float
    bound: float
    margin_sigmas: float
    tail_freq: float
    tail_bound: float
    passed: bool


def default_verify_grid() -> list[tuple[int, int]]:
    cells = []
    for size in (16, 64, 256, 1024):
        for t in (1, math.ceil(size / 8), math.ceil(size / 4), size):
            if (size, t) not in cells:
                cells.append((size, t))
    return cells


def run_verify(samples: int, seed: int, grid=None) -> list[VerifyCell]:
    """Dominance checks of the emulated processes against the closed forms."""
    if samples < 10_000:
        raise ValueError("verification needs at least 10^4 samples per cell")
    cells: list[VerifyCell] = []
    grid = default_verify_grid() if grid is None else grid
    for size, t in grid:
        rng = make_rng("verify", seed, size, t)
        q = emulator.batch_qsearch_inf_queries(size, t, samples, rng)
        mean = float(q.mean())
        se = float(q.std(ddof=1) / math.sqrt(samples))
        bound = bounds.e_grover_upper(size, t)
        margin = (bound - mean) / se if se > 0 else math.inf
        tail_bound = 1.0 / (3.0 * math.sqrt(t)) if t < size / 4 else 1.0 / 3.0
        tail_freq = float(np.mean(q >= emulator.ALPHA * math.sqrt(size)))
        tail_se = math.sqrt(max(tail_freq * (1 - tail_freq), 1e-12) / samples)
        ok = mean <= bound + 3 * se and tail_freq <= tail_bound + 3 * tail_se
        cells.append(
            VerifyCell("qsearch_inf_mean", size, t, samples, mean, se, bound, margin, tail_freq, tail_bound, ok)
        )
    # t = 0 rows: the full QSearch against the deterministic worst-case bound.
    for size in (64, 256):
        rng = make_rng("verify-w", seed, size)
        classical, oracle, _ = emulator.batch_qsearch_queries(size, 0, 130, 1e-5, max(samples // 10, 1000), rng)
        g = classical + 2.0 * oracle
        wb = bounds.w_qsearch(size, 130, 1e-5).queries
        worst = float(g.max())
        cells.append(
            VerifyCell("qsearch_t0_worst", size, 0, g.size, float(g.mean()),
                       float(g.std(ddof=1) / math.sqrt(g.size)), wb,
                       math.inf, 0.0, 0.0, worst <= wb)
        )
    # Maximum finding against the explicit sum, in oracle units.
    for size in (100,):
        rng = make_rng("verify-qmax", seed, size)
        q = emulator.batch_qmax_inf_queries(np.arange(size, dtype=float), samples, rng)
        mean = float(q.mean())
        se = float(q.std(ddof=1) / math.sqrt(samples))
        bound = bounds.e_qmax_inf_sum(size, CostModel(c_q=1.0))
        timeout_freq = float(np.mean(q >= 3.0 * bound))
        t_se = math.sqrt(max(timeout_freq * (1 - timeout_freq), 1e-12) / samples)
        ok = mean <= bound + 3 * se and timeout_freq <= 1.0 / 3.0 + 3 * t_se
        cells.append(
            VerifyCell("qmax_inf_mean", size, size - 1, samples, mean, se, bound,
                       (bound - mean) / se if se else math.inf, timeout_freq, 1.0 / 3.0, ok)
        )
    return cells


def write_verify_csv(cells: list[VerifyCell], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(VERIFY_COLUMNS)
        for c in cells:
            writer.writerow(
                [_csv_value(v) for v in (
                    SCHEMA_VERSION, c.check, c.list_size, c.marked, c.runs, c.mc_mean,
                    c.mc_stderr, c.bound, c.margin_sigmas, c.tail_freq, c.tail_bound, c.passed,
                )]
            )


# ---------------------------------------------------------------------------
# Sampled-vs-exact estimation comparison
# ---------------------------------------------------------------------------

COMPARE_COLUMNS = [
    "format_version", "n", "method", "seeds", "mean_quantum_estimate",
    "std_quantum_estimate", "mean_wall_time", "memory_entries", "known_underestimate",
]


@dataclass
class CompareRow:
    n: int
    method: str
    seeds: int
    mean_quantum_estimate: float
    std_quantum_estimate: float
    mean_wall_time: float
    memory_entries: int
    known_underestimate: bool
    estimates: list[float]


def run_compare(n_grid, seeds: int, base_seed: int = 0, k: int = 2, r: float = 3.0,
                n_samples: int = 130) -> list[CompareRow]:
    """Per n: sampled-mode estimate vs exact-mode bound, wall time, memory proxy.

    The sampled method carries its one-sided guarantee only once n exceeds the
    classical sample budget; smaller rows are flagged as the known
    underestimation regime (the Grover term rarely engages there).
    """
    rows: list[CompareRow] = []
    methods = (
        ("exact_tracker", "quantum_exact", False),
        ("exact_full_scan", "quantum_exact", True),
        ("sampled", "quantum_sampled", False),
    )
    for n in n_grid:
        for method, mode, full_rescan in methods:
            estimates, times = [], []
            entries = 0
            for s in range(seeds):
                instance = maxsat.generate_instance(n, k, r, make_rng("instance", base_seed, n, s))
                # All three methods share a walk seed: the two exact methods then
                # take identical trajectories and differ only in wall time.
                config = ClimberConfig(
                    variant="simple", mode=mode, n_samples=n_samples,
                    seed=(base_seed, n, 7, s),
                    full_rescan=full_rescan,
                )
                start = time.perf_counter()
                ledger = hillclimb.run_simple(instance, config)
                times.append(time.perf_counter() - start)
                estimates.append(ledger.quantum_total)
                entries = instance.m + n if mode == "quantum_sampled" or full_rescan else instance.m + 3 * n
            est = np.asarray(estimates)
            rows.append(
                CompareRow(
                    n=n, method=method, seeds=seeds,
                    mean_quantum_estimate=float(est.mean()),
                    std_quantum_estimate=float(est.std(ddof=1)) if seeds > 1 else 0.0,
                    mean_wall_time=float(np.mean(times)),
                    memory_entries=entries,
                    known_underestimate=(method == "sampled" and n < n_samples),
                    estimates=[float(e) for e in est],
                )
            )
    return rows


def write_compare_csv(rows: list[CompareRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(COMPARE_COLUMNS)
        for row in rows:
            writer.writerow(
                [_csv_value(v) for v in (
                    SCHEMA_VERSION, row.n, row.method, row.seeds, row.mean_quantum_estimate,
                    row.std_quantum_estimate, row.mean_wall_time, row.memory_entries,
                    row.known_underestimate,
                )]
            )


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _model_from_args(args) -> CostModel:
    return CostModel(c_q=args.cq)


def cmd_bounds(args) -> int:
    model = _model_from_args(args)
    op = args.operation
    if op == "f-upper":
        value = bounds.f_upper(args.list, args.marked)
    elif op == "e-grover":
        value = bounds.e_grover_upper(args.list, args.marked, model)
    elif op == "e-qsearch":
        value = bounds.e_qsearch(args.list, args.marked, args.samples, args.eps, model).queries
    elif op == "w-qsearch":
        value = bounds.w_qsearch(args.list, args.samples, args.eps, model).queries
    elif op == "zalka":
        value = bounds.w_qsearch_zalka(args.list, args.eps, model).queries
    elif op == "crossover":
        value = bounds.crossover_fraction(args.list, model)
        if value is None:
            print("none")
            return 0
    elif op == "optimal-samples":
        value = bounds.optimal_n_samples(args.list, model)
        print(value)
        return 0
    elif op == "qmax-sum":
        value = bounds.e_qmax_inf_sum(args.list, model)
    elif op == "qmax-loose":
        value = bounds.e_qmax_loose(args.list, model)
    elif op == "qmax-tight":
        value = bounds.e_qmax_tight(args.list, model)
    elif op == "qmax-timeout":
        value = bounds.qmax_timeout(args.list, model)
    elif op == "qmax":
        value = bounds.e_qmax(args.list, args.eps, model).queries
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(op)
    print(f"{value:.6g}")
    return 0


def cmd_verify(args) -> int:
    cells = run_verify(args.samples, args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_verify_csv(cells, out_dir / "verify_report.csv")
    failed = [c for c in cells if not c.passed]
    for c in cells:
        status = "pass" if c.passed else "FAIL"
        print(f"{status} {c.check} L={c.list_size} t={c.marked} mean={c.mc_mean:.4g} "
              f"bound={c.bound:.4g} tail={c.tail_freq:.4g}<={c.tail_bound:.4g}")
    print(f"report: {out_dir / 'verify_report.csv'}")
    return 1 if failed else 0


def cmd_experiment(args) -> int:
    spec = ExperimentSpec.from_json(args.spec)
    rows, summary = run_experiment(spec, workers=args.workers)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_experiment_csv(rows, out_dir / "results.csv")
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not args.no_figures:
        from . import report

        report.render_experiment_figures(rows, out_dir)
    print(f"wrote {out_dir / 'results.csv'} ({len(rows)} rows)")
    for key, fit in summary["fits"].items():
        if "exponent" in fit:
            print(f"  {key}: exponent {fit['exponent']:.3f} +- {fit['exponent_stderr']:.3f}")
    for key, ratio in summary["speedup_ratios"].items():
        print(f"  speedup {key}: {ratio:.3f}")
    return 0


def cmd_compare(args) -> int:
    n_grid = [int(x) for x in args.n_grid.split(",")]
    rows = run_compare(n_grid, args.seeds, args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_compare_csv(rows, out_dir / "estimation_compare.csv")
    if not args.no_figures:
        from . import report

        report.render_compare_figures(rows, out_dir)
    for row in rows:
        flag = " (known underestimate: n < N_samples)" if row.known_underestimate else ""
        print(f"n={row.n} {row.method}: estimate {row.mean_quantum_estimate:.6g} "
              f"time {row.mean_wall_time:.4f}s entries {row.memory_entries}{flag}")
    return 0


def cmd_gen_instance(args) -> int:
    instance = maxsat.generate_instance(args.n, args.k, args.r, args.seed)
    maxsat.write_wcnf(instance, args.out)
    print(f"wrote {args.out}: n={instance.n} m={instance.m} k={instance.k}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="groverbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="evaluate a closed-form bound")
    p_bounds.add_argument(
        "operation",
        choices=["f-upper", "e-grover", "e-qsearch", "w-qsearch", "zalka", "crossover",
                 "optimal-samples", "qmax-sum", "qmax-loose", "qmax-tight", "qmax-timeout", "qmax"],
    )
    p_bounds.add_argument("--list", type=int, required=True, help="list size |L|")
    p_bounds.add_argument("--marked", type=int, default=1, help="marked count t")
    p_bounds.add_argument("--samples", type=int, default=130, help="classical sample budget")
    p_bounds.add_argument("--eps", type=float, default=1e-5, help="failure probability")
    p_bounds.add_argument("--cq", type=float, default=1.0,
                          help="queries to g per oracle call; bounds print in raw oracle "
                               "units by default, pass --cq 2 for compute/uncompute "
                               "accounting (the crossover figure assumes 2)")
    p_bounds.set_defaults(func=cmd_bounds)

    p_verify = sub.add_parser("verify", help="emulator-vs-bound dominance sweep")
    p_verify.add_argument("--samples", type=int, default=100_000)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", default="verify-out")
    p_verify.set_defaults(func=cmd_verify)

    p_exp = sub.add_parser("experiment", help="run a MAX-k-SAT climber campaign")
    p_exp.add_argument("--spec", required=True, help="experiment spec JSON")
    p_exp.add_argument("--out", default="experiment-out")
    p_exp.add_argument("--workers", type=int, default=None,
                       help="process count (default: GROVERBENCH_WORKERS or 1)")
    p_exp.add_argument("--no-figures", action="store_true")
    p_exp.set_defaults(func=cmd_experiment)

    p_cmp = sub.add_parser("compare-estimation", help="sampled vs exact run-time estimation")
    p_cmp.add_argument("--n-grid", default="100,300,1000,3000")
    p_cmp.add_argument("--seeds", type=int, default=10)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--out", default="compare-out")
    p_cmp.add_argument("--no-figures", action="store_true")
    p_cmp.set_defaults(func=cmd_compare)

    p_gen = sub.add_parser("gen-instance", help="generate a random weighted instance")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--k", type=int, default=2)
    p_gen.add_argument("--r", type=float, default=3.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen_instance)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
