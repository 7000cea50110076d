"""Uniform, conditioned, and adulterated permutation measures plus total-variation oracles.

The adulterated measure is the law of a uniform permutation after k randomly
chosen entries are pulled out and re-placed into their positions in increasing
order (the card-deck tampering picture).  Its density against counting measure
is ``count(sigma, k) * k! / (n! * C(n, k))``, which ties every total-variation
computation back to the subsequence-count distribution.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .counting import count_all_lengths, count_increasing_subsequences
from .perms import Permutation
from .rng import RngStream, as_generator

DEFAULT_ENUM_BUDGET = 10


@dataclass(frozen=True)
class AdulterationSpec:
    """Parameters (n, k) of the adulterated measure on S_n."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")


@dataclass(frozen=True)
class TvEstimate:
    """Total-variation value with provenance.

    ``method`` is ``"exact-enumeration"`` (stderr 0, ``exact`` holds the
    rational value) or ``"monte-carlo"`` (stderr from the sample variance;
    95% CI is value +/- 1.96 stderr).
    """

    value: float
    method: str
    stderr: float
    trials: int
    exact: Fraction | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("total variation lies in [0, 1]")
        if self.method == "exact-enumeration" and self.stderr != 0.0:
            raise ValueError("exact method carries stderr 0")


def sample_adulterated(
    spec: AdulterationSpec, rng: RngStream | np.random.Generator
) -> Permutation:
    """One draw from the adulterated measure.

    Lays down a uniform permutation, picks k positions uniformly, and
    re-places the values found there into those positions in increasing
    order.  Single-pass realization of the two-stage mixture definition.
    """
    gen = as_generator(rng)
    image = gen.permutation(spec.n) + 1
    if spec.k > 0:
        pos = np.sort(gen.choice(spec.n, size=spec.k, replace=False))
        image[pos] = np.sort(image[pos])
    return Permutation(tuple(image.tolist()))


def sample_conditioned(
    n: int, values: tuple[int, ...], rng: RngStream | np.random.Generator
) -> Permutation:
    """Uniform draw from the permutations containing ``values`` as an increasing subsequence.

    Places the given values in increasing order at a uniform position set and
    scatters the remaining values uniformly over the remaining positions; the
    map (position set, arrangement) -> permutation is a bijection onto the
    target set, so the output is exactly uniform over it.
    """
    values = tuple(int(v) for v in values)
    k = len(values)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("values must be strictly increasing")
    if k > 0 and (values[0] < 1 or values[-1] > n):
        raise ValueError("values must lie within 1..n")
    if k > n:
        raise ValueError("more values than positions")
    gen = as_generator(rng)
    image = np.empty(n, dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    if k > 0:
        pos = np.sort(gen.choice(n, size=k, replace=False))
        image[pos] = values
        mask[pos] = False
    rest = np.setdiff1d(np.arange(1, n + 1), values, assume_unique=True)
    image[mask] = gen.permutation(rest)
    return Permutation(tuple(image.tolist()))


def adulterated_density(p: Permutation, spec: AdulterationSpec) -> Fraction:
    """Exact probability the adulterated measure assigns to ``p``."""
    if spec.n != p.n:
        raise ValueError("permutation size does not match spec")
    z = count_increasing_subsequences(p, spec.k).exact
    return Fraction(
        z * math.factorial(spec.k),
        math.factorial(spec.n) * math.comb(spec.n, spec.k),
    )


@lru_cache(maxsize=4)
def count_histograms(n: int) -> tuple[Counter, ...]:
    """Per-k histograms of the count distribution over all of S_n.

    Entry k maps each distinct count value to the number of permutations
    attaining it.  Streams the n! permutations; memory stays proportional to
    the number of distinct counts.
    """
    hists: tuple[Counter, ...] = tuple(Counter() for _ in range(n + 1))
    for pm in itertools.permutations(range(1, n + 1)):
        vec = count_all_lengths(pm)
        for k in range(n + 1):
            hists[k][vec[k]] += 1
    return hists


def _tv_two_forms(n: int, k: int, hist: Counter) -> tuple[Fraction, Fraction]:
    """Both closed forms of the exact TV distance, in rational arithmetic.

    Form one sums |density - uniform| over the count histogram; form two is
    half the uniform expectation of |count / expected_count - 1|.  They are
    algebraically identical; computing both guards the implementation.
    """
    n_fact = math.factorial(n)
    cnk = math.comb(n, k)
    k_fact = math.factorial(k)
    form_density = Fraction(0)
    form_ratio = Fraction(0)
    expected = Fraction(cnk, k_fact)
    for z, count in hist.items():
        dens = Fraction(z * k_fact, n_fact * cnk)
        form_density += count * abs(dens - Fraction(1, n_fact))
        form_ratio += Fraction(count, n_fact) * abs(Fraction(z, 1) / expected - 1)
    return form_density / 2, form_ratio / 2


def exact_tv_distance(
    spec: AdulterationSpec, enum_budget: int = DEFAULT_ENUM_BUDGET
) -> TvEstimate:
    """Exact TV distance between the adulterated measure and uniform, by S_n enumeration."""
    if spec.n > enum_budget:
        raise ValueError(
            f"exact enumeration limited to n <= {enum_budget} (got n={spec.n}); "
            "raise the budget or use tv_monte_carlo"
        )
    hist = count_histograms(spec.n)[spec.k]
    a, b = _tv_two_forms(spec.n, spec.k, hist)
    if a != b:
        raise AssertionError("the two exact TV forms disagree; counting bug")
    return TvEstimate(
        value=float(a),
        method="exact-enumeration",
        stderr=0.0,
        trials=math.factorial(spec.n),
        exact=a,
    )


def exact_tv_all_k(n: int, enum_budget: int = DEFAULT_ENUM_BUDGET) -> dict[int, TvEstimate]:
    """Exact TV for every k = 0..n off a single S_n enumeration."""
    if n > enum_budget:
        raise ValueError(f"exact enumeration limited to n <= {enum_budget} (got n={n})")
    return {
        k: exact_tv_distance(AdulterationSpec(n, k), enum_budget=enum_budget)
        for k in range(n + 1)
    }


def _log2_big(z: int) -> float:
    e = z.bit_length() - 1
    return math.log2(z / (1 << e)) + e


def tv_monte_carlo(
    spec: AdulterationSpec,
    trials: int,
    rng: RngStream,
    threads: int = 1,
) -> TvEstimate:
    """Unbiased Monte Carlo TV estimate via half the mean of |count/expected - 1|.

    Trial i draws a uniform permutation from stream ``rng.shifted(i)`` and
    evaluates the count ratio in extended-float arithmetic, so no overflow
    occurs at any size.  stderr comes from the sample variance.
    """
    if trials < 2:
        raise ValueError("trials must be >= 2")
    from .experiments import run_trials  # local import; experiments builds on measures

    # log2 of the exact rational C(n,k)/k!, bit-normalized the same way as
    # CountValue.log2(); keeps constant-count cases (k = 1) at deviation 0.
    log2_expected = _log2_big(math.comb(spec.n, spec.k)) - _log2_big(
        math.factorial(spec.k)
    )
    devs = np.asarray(
        run_trials(
            "tv_deviation",
            (spec.n, spec.k, log2_expected),
            trials,
            rng.master_seed,
            threads=threads,
            start_index=rng.stream_index,
        )
    )
    mean = float(devs.mean())
    stderr = float(devs.std(ddof=1) / math.sqrt(trials))
    return TvEstimate(
        value=min(mean, 1.0), method="monte-carlo", stderr=stderr, trials=trials
    )
