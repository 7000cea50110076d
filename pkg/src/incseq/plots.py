"""Figure rendering for the CLI report path.

Each report-style subcommand gets one figure saved next to its delimited
output.  Rendering is deterministic (fixed metadata, no timestamps) so
re-runs produce byte-identical files.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_PNG_META = {"Software": "incseq"}


def _save(fig, path: str) -> str:
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata=_PNG_META)
    plt.close(fig)
    return path


def scaling_figure(rows: list[dict], slopes: dict[int, float], path: str) -> str:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    by_n: dict[int, list[dict]] = {}
    for r in rows:
        by_n.setdefault(r["n_total"], []).append(r)
    for n_total, group in sorted(by_n.items()):
        ks = [r["k"] for r in group]
        ms = [r["core_mean"] for r in group]
        label = f"N={n_total}"
        if n_total in slopes:
            label += f" (slope {slopes[n_total]:.2f})"
        ax1.loglog(ks, ms, "o-", label=label)
        ax2.semilogx([r["n_total"] for r in group], [r["ratio"] for r in group], "o")
    ax2.semilogx(
        [r["n_total"] for r in rows], [r["ratio"] for r in rows], "s", alpha=0.6
    )
    ax1.set_xlabel("k")
    ax1.set_ylabel("mean core matches")
    ax1.legend(fontsize=8)
    ax2.set_xlabel("N")
    ax2.set_ylabel(r"mean / ($k^{3/2}/N$)")
    ax2.set_ylim(bottom=0)
    fig.suptitle("core match scaling")
    return _save(fig, path)


def tv_sweep_figure(rows: list[dict], path: str) -> str:
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    by_n: dict[int, list[dict]] = {}
    for r in rows:
        by_n.setdefault(r["n"], []).append(r)
    for n, group in sorted(by_n.items()):
        group = sorted(group, key=lambda r: r["k"])
        ks = [r["k"] for r in group]
        tvs = [r["tv"] for r in group]
        errs = [r["mc_stderr"] or 0.0 for r in group]
        ax.errorbar(ks, tvs, yerr=errs, marker="o", label=f"n={n}")
    ax.set_xlabel("k")
    ax.set_ylabel("total variation distance")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    ax.set_title("distance of the adulterated measure from uniform")
    return _save(fig, path)


def zero_sweep_figure(rows: list[dict], path: str) -> str:
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    cs = [r["c"] for r in rows]
    ps = [r["prob_zero"] for r in rows]
    errs = [r["stderr"] for r in rows]
    ax.errorbar(cs, ps, yerr=errs, marker="o")
    ax.axvline(2.0, color="gray", ls="--", lw=1)
    ax.set_xlabel("c  (k = floor(c sqrt(n)))")
    ax.set_ylabel("P(count = 0)")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("zero-count phase transition at c = 2")
    return _save(fig, path)


def lis_shift_figure(result, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    lo = min(result.uniform_lis.min(), result.adulterated_lis.min()) - 1
    hi = max(result.uniform_lis.max(), result.adulterated_lis.max()) + 1
    bins = np.arange(lo, hi + 1)
    ax.hist(result.uniform_lis, bins=bins, alpha=0.6, label="uniform", density=True)
    ax.hist(result.adulterated_lis, bins=bins, alpha=0.6, label="adulterated", density=True)
    ax.set_xlabel("LIS length")
    ax.set_ylabel("frequency")
    ax.legend(fontsize=8)
    ax.set_title(f"LIS shift, n={result.n}, k={result.k}")
    return _save(fig, path)


def complement_figure(result, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    gs = [r["gamma"] for r in result.rows]
    fs = [r["frequency"] for r in result.rows]
    errs = [r["stderr"] for r in result.rows]
    ax.errorbar(gs, fs, yerr=errs, marker="o")
    ax.set_xlabel("gamma")
    ax.set_ylabel(r"P(complement LIS $\geq 2\sqrt{r} - \gamma r^{1/6}$)")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"complement LIS thresholds, n={result.n}, k={result.k}")
    return _save(fig, path)


def pmf_figure(law, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    ax.plot(law.support, law.pmf, lw=1.2)
    ax.fill_between(law.support, law.pmf, alpha=0.3)
    ax.set_xlabel("position r")
    ax.set_ylabel("probability")
    ax.set_title(f"rank-{law.j} position law, N={law.n_total}, k={law.k}")
    return _save(fig, path)
