"""Monte Carlo harness: the two-row card experiment, core-match scaling studies,
TV estimation sweeps, LIS-shift detection, and the zero-count phase probe.

Determinism contract: trial ``i`` of any experiment draws from
``RngStream(master_seed, start_index + i)`` and results are reduced in trial
order, so outputs are bit-identical for a fixed seed regardless of worker
count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analytics import core_match_mean_exact, core_match_second_moment_exact, core_window
from .counting import count_increasing_subsequences
from .measures import AdulterationSpec, exact_tv_distance, sample_adulterated, sample_conditioned
from .perms import Permutation, lis_length, lis_of_values, sample_k_subset, sample_uniform_permutation
from .rng import RngStream, as_generator

DEFAULT_C_GRID = (-2.0, -1.0, 0.0, 1.0, 2.0, 3.0)
DEFAULT_GAMMA_GRID = (0.0, 0.5, 1.0, 2.0, 3.0, 4.0)


# ---------------------------------------------------------------------------
# trial kernels and the deterministic runner


def _trial_card(params: tuple, stream: RngStream) -> dict:
    s, k = params
    res = run_card_experiment(s, k, stream)
    return {
        "cards": list(res.cards),
        "spaces": list(res.spaces),
        "match_count": res.match_count,
        "core_match_count": res.core_match_count,
        "verified_lis": res.verified_lis,
    }


def _trial_core_match(params: tuple, stream: RngStream) -> int:
    s, k = params
    n_total = s + k
    if k == 0:
        return 0
    window = core_window(k)
    if len(window) == 0:
        return 0
    gen = stream.generator()
    x = np.sort(gen.choice(n_total, size=k, replace=False))
    y = np.sort(gen.choice(n_total, size=k, replace=False))
    lo, hi = window.start - 1, window.stop - 1
    return int((x[lo:hi] == y[lo:hi]).sum())


def _trial_uniform_lis(params: tuple, stream: RngStream) -> int:
    (n,) = params
    return lis_length(sample_uniform_permutation(n, stream))


def _trial_adulterated_lis(params: tuple, stream: RngStream) -> int:
    n, k = params
    return lis_length(sample_adulterated(AdulterationSpec(n, k), stream))


def _trial_complement_lis(params: tuple, stream: RngStream) -> int:
    n, k = params
    gen = stream.generator()
    values = sample_k_subset(n, k, gen)
    perm = sample_conditioned(n, values, gen)
    chosen = np.zeros(n + 1, dtype=bool)
    chosen[list(values)] = True
    img = np.asarray(perm.image, dtype=np.int64)
    kept = img[~chosen[img]]
    return lis_of_values(kept.tolist())


def _trial_tv_deviation(params: tuple, stream: RngStream) -> float:
    n, k, log2_expected = params
    perm = sample_uniform_permutation(n, stream)
    z = count_increasing_subsequences(perm, k, mode="extended")
    if z.is_zero():
        return 0.5
    return abs(2.0 ** (z.log2() - log2_expected) - 1.0) / 2.0


_KERNELS: dict[str, Callable[[tuple, RngStream], object]] = {
    "card": _trial_card,
    "core_match": _trial_core_match,
    "uniform_lis": _trial_uniform_lis,
    "adulterated_lis": _trial_adulterated_lis,
    "complement_lis": _trial_complement_lis,
    "tv_deviation": _trial_tv_deviation,
}


def _run_chunk(kernel: str, params: tuple, master_seed: int, lo: int, hi: int) -> list:
    fn = _KERNELS[kernel]
    return [fn(params, RngStream(master_seed, i)) for i in range(lo, hi)]


def run_trials(
    kernel: str,
    params: tuple,
    trials: int,
    master_seed: int,
    threads: int = 1,
    start_index: int = 0,
) -> list:
    """Run ``trials`` independent trials of a registered kernel, in index order.

    Trial i uses stream ``(master_seed, start_index + i)``.  With
    ``threads > 1`` the index range is split into contiguous chunks executed
    by worker processes and re-joined in submission order, so the result list
    is identical to a serial run.
    """
    if kernel not in _KERNELS:
        raise ValueError(f"unknown trial kernel {kernel!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lo, hi = start_index, start_index + trials
    if threads <= 1:
        return _run_chunk(kernel, params, master_seed, lo, hi)
    chunk = max(1, math.ceil(trials / (threads * 4)))
    bounds = [(a, min(a + chunk, hi)) for a in range(lo, hi, chunk)]
    out: list = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_run_chunk, kernel, params, master_seed, a, b) for a, b in bounds]
        for fut in futures:
            out.extend(fut.result())
    return out


# ---------------------------------------------------------------------------
# the two-row card experiment


@dataclass(frozen=True)
class CardExperimentResult:
    """Full record of one two-row insertion trial.

    ``cards`` are the k selected card values (rank-ordered), ``spaces`` the k
    selected second-row positions; rank j matches when cards[j] lands at
    position spaces[j] equal to its own first-row space.  The constructed row
    always carries an increasing subsequence through all s unselected cards
    plus every matched rank, so ``verified_lis >= s + match_count`` is
    checked on every trial.
    """

    n_total: int
    cards: tuple[int, ...]
    spaces: tuple[int, ...]
    match_flags: tuple[bool, ...]
    match_count: int
    core_match_count: int
    row: Permutation
    verified_lis: int

    def __post_init__(self) -> None:
        k = len(self.cards)
        s = self.n_total - k
        if not self.core_match_count <= self.match_count <= k:
            raise AssertionError("match counts out of order")
        if self.verified_lis < s + self.match_count:
            raise AssertionError(
                f"constructed row violates the length guarantee: "
                f"lis={self.verified_lis} < {s}+{self.match_count}"
            )


def run_card_experiment(
    s: int, k: int, rng: RngStream | np.random.Generator
) -> CardExperimentResult:
    """One trial: choose k cards and k second-row spaces, insert in increasing order.

    The remaining s cards fill the remaining spaces in increasing order.  The
    LIS of the constructed row is recomputed by patience sorting and checked
    against the guaranteed ``s + match_count``.
    """
    if s < 0 or k < 0 or s + k < 1:
        raise ValueError("need s >= 0, k >= 0, s + k >= 1")
    n_total = s + k
    gen = as_generator(rng)
    if k > 0:
        cards = np.sort(gen.choice(n_total, size=k, replace=False)) + 1
        spaces = np.sort(gen.choice(n_total, size=k, replace=False)) + 1
        flags = cards == spaces
    else:
        cards = np.empty(0, dtype=np.int64)
        spaces = np.empty(0, dtype=np.int64)
        flags = np.empty(0, dtype=bool)
    match_count = int(flags.sum())
    window = core_window(k)
    core = int(flags[window.start - 1 : window.stop - 1].sum()) if len(window) else 0

    row = np.empty(n_total, dtype=np.int64)
    space_free = np.ones(n_total, dtype=bool)
    card_free = np.ones(n_total, dtype=bool)
    if k > 0:
        row[spaces - 1] = cards
        space_free[spaces - 1] = False
        card_free[cards - 1] = False
    row[space_free] = np.flatnonzero(card_free) + 1
    perm = Permutation(tuple(row.tolist()))
    return CardExperimentResult(
        n_total=n_total,
        cards=tuple(cards.tolist()),
        spaces=tuple(spaces.tolist()),
        match_flags=tuple(bool(f) for f in flags),
        match_count=match_count,
        core_match_count=core,
        row=perm,
        verified_lis=lis_length(perm),
    )


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo mean and second moment with their standard errors."""

    mean: float
    mean_stderr: float
    second_moment: float
    second_moment_stderr: float
    trials: int

    def __post_init__(self) -> None:
        # Sample second moment dominates the squared sample mean (Cauchy-Schwarz).
        if self.second_moment < self.mean**2 - 1e-9:
            raise AssertionError("second moment below squared mean; estimator bug")


def estimate_core_match_moments(
    s: int, k: int, trials: int, master_seed: int, threads: int = 1
) -> MomentEstimate:
    """Monte Carlo moments of the core match count; trial i uses stream (master_seed, i)."""
    if trials < 2:
        raise ValueError("trials must be >= 2")
    ts = np.asarray(
        run_trials("core_match", (s, k), trials, master_seed, threads=threads),
        dtype=np.float64,
    )
    sq = ts * ts
    return MomentEstimate(
        mean=float(ts.mean()),
        mean_stderr=float(ts.std(ddof=1) / math.sqrt(trials)),
        second_moment=float(sq.mean()),
        second_moment_stderr=float(sq.std(ddof=1) / math.sqrt(trials)),
        trials=trials,
    )


# ---------------------------------------------------------------------------
# experiment grids


def resolve_k(n: int, k: int | None = None, c: float | None = None, l: float | None = None) -> int:
    """Cell rule for k: explicit value, or floor(c * n**l) floored at 1 (0 when c = 0)."""
    if k is not None:
        if not 0 <= k <= n:
            raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
        return k
    if c is None or l is None:
        raise ValueError("give either k or both c and l")
    if c < 0:
        raise ValueError("c must be nonnegative")
    if c == 0:
        return 0
    return min(n, max(1, math.floor(c * n**l)))


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid of (n, k) cells with trial count, seed, and parallelism."""

    cells: tuple[tuple[int, int], ...]
    trials: int
    master_seed: int
    threads: int = 1
    sink: str | None = None

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("empty cell grid")
        for n, k in self.cells:
            if not 0 <= k <= n:
                raise ValueError(f"cell k={k} exceeds n={n}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    @classmethod
    def from_rule(
        cls,
        n_values: tuple[int, ...],
        k: int | None = None,
        c: float | None = None,
        l: float | None = None,
        trials: int = 1000,
        master_seed: int = 0,
        threads: int = 1,
        sink: str | None = None,
    ) -> "ExperimentConfig":
        cells = tuple((n, resolve_k(n, k=k, c=c, l=l)) for n in n_values)
        return cls(cells=cells, trials=trials, master_seed=master_seed, threads=threads, sink=sink)


@dataclass(frozen=True)
class ScalingResult:
    rows: tuple[dict, ...]
    slopes: dict[int, float] = field(compare=False)


def scaling_study(config: ExperimentConfig) -> ScalingResult:
    """Exact core-match mean and (exact or Monte Carlo) second moment per cell.

    Reports the normalized ratio ``mean / (k^{3/2} / N)`` and the bound
    constant ``second_moment * N^2 / k^3``; when several k share one N, the
    slope of log mean against log k is fitted per N.
    """
    rows: list[dict] = []
    for idx, (n_total, k) in enumerate(config.cells):
        mean = core_match_mean_exact(n_total, k)
        ratio = mean / (k**1.5 / n_total) if k > 0 else 0.0
        try:
            second = core_match_second_moment_exact(n_total, k)
            second_method = "exact"
            second_stderr = 0.0
        except ValueError:
            est = estimate_core_match_moments(
                n_total - k,
                k,
                config.trials,
                config.master_seed + idx + 1,
                threads=config.threads,
            )
            second = est.second_moment
            second_method = "monte-carlo"
            second_stderr = est.second_moment_stderr
        rows.append(
            {
                "n_total": n_total,
                "k": k,
                "core_mean": mean,
                "ratio": ratio,
                "second_moment": second,
                "second_method": second_method,
                "second_stderr": second_stderr,
                "bound_const": second * n_total**2 / k**3 if k > 0 else 0.0,
                "trials": 0 if second_method == "exact" else config.trials,
            }
        )
    slopes: dict[int, float] = {}
    by_n: dict[int, list[dict]] = {}
    for row in rows:
        by_n.setdefault(row["n_total"], []).append(row)
    for n_total, group in by_n.items():
        ks = [r["k"] for r in group if r["k"] > 1 and r["core_mean"] > 0]
        ms = [r["core_mean"] for r in group if r["k"] > 1 and r["core_mean"] > 0]
        if len(set(ks)) >= 2:
            slopes[n_total] = float(np.polyfit(np.log(ks), np.log(ms), 1)[0])
    return ScalingResult(rows=tuple(rows), slopes=slopes)


# ---------------------------------------------------------------------------
# LIS-shift detection and threshold probes


@dataclass(frozen=True)
class LisShiftResult:
    """Paired empirical LIS distributions under the uniform and adulterated laws."""

    n: int
    k: int
    trials: int
    uniform_lis: np.ndarray
    adulterated_lis: np.ndarray
    summary: tuple[dict, ...]
    exceedance: tuple[dict, ...]


def lis_shift_experiment(
    n: int,
    k: int,
    trials: int,
    master_seed: int,
    c_grid: tuple[float, ...] = DEFAULT_C_GRID,
    threads: int = 1,
) -> LisShiftResult:
    """Sample the LIS under both measures; report moments, quantiles, and
    how often the LIS strictly exceeds ``2 sqrt(n) + c n^{1/6}`` per c."""
    if trials < 2:
        raise ValueError("trials must be >= 2")
    uniform = np.asarray(
        run_trials("uniform_lis", (n,), trials, master_seed, threads=threads)
    )
    adulterated = np.asarray(
        run_trials(
            "adulterated_lis", (n, k), trials, master_seed, threads=threads,
            start_index=trials,
        )
    )
    qs = (0.05, 0.25, 0.5, 0.75, 0.95)
    summary = tuple(
        {
            "measure": name,
            "mean": float(vals.mean()),
            "std": float(vals.std(ddof=1)),
            **{f"q{int(q * 100):02d}": float(np.quantile(vals, q)) for q in qs},
        }
        for name, vals in (("uniform", uniform), ("adulterated", adulterated))
    )
    exceedance = []
    for c in c_grid:
        threshold = 2.0 * math.sqrt(n) + c * n ** (1.0 / 6.0)
        for name, vals in (("uniform", uniform), ("adulterated", adulterated)):
            freq = float((vals > threshold).mean())
            exceedance.append(
                {
                    "measure": name,
                    "c": c,
                    "threshold": threshold,
                    "frequency": freq,
                    "stderr": math.sqrt(max(freq * (1 - freq), 0.0) / trials),
                }
            )
    return LisShiftResult(
        n=n, k=k, trials=trials,
        uniform_lis=uniform, adulterated_lis=adulterated,
        summary=summary, exceedance=tuple(exceedance),
    )


@dataclass(frozen=True)
class ComplementLisResult:
    n: int
    k: int
    trials: int
    restricted_lis: np.ndarray
    rows: tuple[dict, ...]


def complement_lis_check(
    n: int,
    k: int,
    trials: int,
    master_seed: int,
    gamma_grid: tuple[float, ...] = DEFAULT_GAMMA_GRID,
    threads: int = 1,
) -> ComplementLisResult:
    """Conditioned-measure probe: LIS over the complement of the planted value set.

    Draws a uniform value set x, samples a permutation conditioned to contain
    x increasing, and measures the LIS of the remaining r = n - k values;
    reports the frequency of ``lis >= 2 sqrt(r) - gamma r^{1/6}`` per gamma.
    """
    if trials < 2:
        raise ValueError("trials must be >= 2")
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    vals = np.asarray(
        run_trials("complement_lis", (n, k), trials, master_seed, threads=threads)
    )
    r = n - k
    rows = []
    for gamma in gamma_grid:
        threshold = 2.0 * math.sqrt(r) - gamma * r ** (1.0 / 6.0)
        freq = float((vals >= threshold).mean())
        rows.append(
            {
                "gamma": gamma,
                "threshold": threshold,
                "frequency": freq,
                "stderr": math.sqrt(max(freq * (1 - freq), 0.0) / trials),
            }
        )
    return ComplementLisResult(n=n, k=k, trials=trials, restricted_lis=vals, rows=tuple(rows))


def zero_probability_sweep(
    n: int,
    c_list: tuple[float, ...],
    trials: int,
    master_seed: int,
    threads: int = 1,
) -> list[dict]:
    """Estimate P(count = 0) for k = floor(c sqrt(n)) across c, via LIS only.

    The count vanishes exactly when the LIS is shorter than k, so one batch
    of uniform LIS samples serves every c.
    """
    if trials < 2:
        raise ValueError("trials must be >= 2")
    lis_vals = np.asarray(
        run_trials("uniform_lis", (n,), trials, master_seed, threads=threads)
    )
    rows = []
    for c in c_list:
        k = resolve_k(n, c=c, l=0.5)
        prob = float((lis_vals < k).mean())
        rows.append(
            {
                "c": c,
                "k": k,
                "prob_zero": prob,
                "stderr": math.sqrt(max(prob * (1 - prob), 0.0) / trials),
                "trials": trials,
            }
        )
    return rows


def tv_sweep(config: ExperimentConfig, enum_budget: int = 10) -> list[dict]:
    """TV distance across a cell grid: exact enumeration where n fits the budget,
    Monte Carlo wherever trials allow (both where they overlap)."""
    from .measures import tv_monte_carlo  # deferred; measures imports run_trials lazily

    rows = []
    for idx, (n, k) in enumerate(config.cells):
        spec = AdulterationSpec(n, k)
        exact_est = None
        if n <= enum_budget:
            exact_est = exact_tv_distance(spec, enum_budget=enum_budget)
        mc_est = None
        if config.trials >= 2 and (exact_est is None or n <= enum_budget):
            mc_est = tv_monte_carlo(
                spec,
                config.trials,
                RngStream(config.master_seed, idx * config.trials),
                threads=config.threads,
            )
        primary = exact_est if exact_est is not None else mc_est
        rows.append(
            {
                "n": n,
                "k": k,
                "tv": primary.value if primary else float("nan"),
                "method": primary.method if primary else "none",
                "tv_exact": exact_est.value if exact_est else None,
                "exact_fraction": str(exact_est.exact) if exact_est else None,
                "tv_mc": mc_est.value if mc_est else None,
                "mc_stderr": mc_est.stderr if mc_est else None,
                "trials": config.trials if mc_est else 0,
            }
        )
    return rows
