"""Matplotlib rendering of experiment and estimation-comparison reports.

Figures are rendered to files next to the delimited output; nothing here
feeds back into the numbers, so the CSV/JSON outputs stay deterministic.
"""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

_MODE_STYLE = {
    "classical": dict(marker="o", linestyle="-"),
    "quantum_exact": dict(marker="x", linestyle="--"),
    "quantum_sampled": dict(marker="+", linestyle=":"),
}


def _series(rows, value):
    """Group rows by (variant, mode, n) and reduce to mean/std curves."""
    grouped = defaultdict(lambda: defaultdict(list))
    for row in rows:
        grouped[(row.variant, row.mode)][row.n].append(value(row))
    curves = {}
    for key, by_n in grouped.items():
        ns = sorted(by_n)
        means = [sum(by_n[n]) / len(by_n[n]) for n in ns]
        stds = [
            math.sqrt(sum((v - mu) ** 2 for v in by_n[n]) / max(len(by_n[n]) - 1, 1))
            for n, mu in zip(ns, means)
        ]
        curves[key] = (ns, means, stds)
    return curves


def render_experiment_figures(rows, out_dir) -> list[Path]:
    """Log-log query counts per variant with a satisfied-fraction inset."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    queries = _series(rows, lambda r: r.total_queries)
    fractions = _series(rows, lambda r: r.satisfied_fraction)
    variants = sorted({v for v, _ in queries})
    if not variants:
        return []

    fig, axes = plt.subplots(1, len(variants), figsize=(6.0 * len(variants), 4.6), squeeze=False)
    for ax, variant in zip(axes[0], variants):
        inset = ax.inset_axes([0.55, 0.12, 0.4, 0.3])
        for (v, mode), (ns, means, stds) in sorted(queries.items()):
            if v != variant:
                continue
            style = _MODE_STYLE.get(mode, {})
            ax.errorbar(ns, means, yerr=stds, label=mode, capsize=2, **style)
            fn, fm, _ = fractions[(v, mode)]
            inset.plot(fn, fm, lw=1.0, **{k: v2 for k, v2 in style.items() if k == "linestyle"})
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("variables n")
        ax.set_ylabel("queries to the marking functions")
        ax.set_title(f"{variant} hill climber")
        ax.legend(fontsize=8)
        inset.set_title(r"$\varphi(x^*)/W$", fontsize=7)
        inset.tick_params(labelsize=6)
    fig.tight_layout()
    path = out_dir / "experiment_queries.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def render_compare_figures(rows, out_dir) -> list[Path]:
    """Three-panel estimation comparison: query estimates, wall time, memory proxy."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_method = defaultdict(list)
    for row in rows:
        by_method[row.method].append(row)
    fig, (ax_q, ax_t, ax_m) = plt.subplots(1, 3, figsize=(15, 4.4))
    for method, mrows in sorted(by_method.items()):
        mrows = sorted(mrows, key=lambda r: r.n)
        ns = [r.n for r in mrows]
        ax_q.errorbar(
            ns,
            [r.mean_quantum_estimate for r in mrows],
            yerr=[r.std_quantum_estimate for r in mrows],
            label=method,
            marker="o",
            capsize=2,
        )
        ax_t.plot(ns, [r.mean_wall_time for r in mrows], label=method, marker="o")
        ax_m.plot(ns, [r.memory_entries for r in mrows], label=method, marker="o")
    for ax, title in ((ax_q, "estimated quantum queries"), (ax_t, "wall time [s]"), (ax_m, "state entries")):
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("variables n")
        ax.set_title(title)
        ax.legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / "estimation_compare.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
