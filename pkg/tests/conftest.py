"""Shared independent oracles and statistical helpers for the test suite.

Oracles here deliberately avoid the library's own algorithms: LIS by
quadratic DP or exhaustive subsequence search, counts by subset enumeration,
position laws by enumerating every subset.  Tests compare the fast paths
against these.
"""
from __future__ import annotations

from itertools import combinations, permutations

import numpy as np
from scipy.stats import chi2


def lis_quadratic(values) -> int:
    """O(m^2) longest-increasing-subsequence DP (longest chain formulation)."""
    m = len(values)
    if m == 0:
        return 0
    best = [1] * m
    for i in range(m):
        vi = values[i]
        for j in range(i):
            if values[j] < vi and best[j] + 1 > best[i]:
                best[i] = best[j] + 1
    return max(best)


def lis_exhaustive(values) -> int:
    """LIS by scanning every subsequence; only for very small inputs."""
    m = len(values)
    best = 0
    for size in range(m, 0, -1):
        for comb in combinations(values, size):
            if all(a < b for a, b in zip(comb, comb[1:])):
                return size
    return best


def count_by_enumeration(values, k: int) -> int:
    """Count increasing subsequences of length k by brute enumeration."""
    if k == 0:
        return 1
    return sum(
        1
        for comb in combinations(values, k)
        if all(a < b for a, b in zip(comb, comb[1:]))
    )


def enumerate_containing(n: int, required: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All permutations of {1..n} containing ``required`` as an increasing subsequence."""
    out = []
    for perm in permutations(range(1, n + 1)):
        pos = {v: i for i, v in enumerate(perm)}
        if all(pos[a] < pos[b] for a, b in zip(required, required[1:])):
            out.append(perm)
    return out


def subset_rank_position_counts(n_total: int, k: int, j: int) -> dict[int, int]:
    """For every k-subset of {1..N}, tally where its j-th smallest element sits."""
    counts: dict[int, int] = {}
    for sub in combinations(range(1, n_total + 1), k):
        r = sub[j - 1]
        counts[r] = counts.get(r, 0) + 1
    return counts


def chi_square_gof(observed: np.ndarray, probs: np.ndarray, alpha: float = 0.001,
                   min_expected: float = 5.0) -> tuple[float, float, bool]:
    """Goodness-of-fit statistic with small-expected-bin merging.

    Returns (statistic, critical value at ``alpha``, pass flag).
    """
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(probs, dtype=float) * observed.sum()
    obs_bins: list[float] = []
    exp_bins: list[float] = []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0:
        if exp_bins:
            obs_bins[-1] += acc_o
            exp_bins[-1] += acc_e
        else:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
    obs_arr = np.array(obs_bins)
    exp_arr = np.array(exp_bins)
    stat = float(((obs_arr - exp_arr) ** 2 / exp_arr).sum())
    dof = max(len(obs_arr) - 1, 1)
    critical = float(chi2.isf(alpha, dof))
    return stat, critical, stat <= critical
