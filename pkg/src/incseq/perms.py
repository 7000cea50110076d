"""Permutations in one-line form: uniform sampling, k-subsets, and LIS tools."""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .rng import RngStream, as_generator


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1..n} in one-line form: ``image[i-1]`` is the value at position i."""

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.image)
        if n < 1:
            raise ValueError("permutation requires n >= 1")
        seen = bytearray(n + 1)
        for v in self.image:
            if not (1 <= v <= n) or seen[v]:
                raise ValueError(f"image is not a bijection of 1..{n}")
            seen[v] = 1

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def reversed_identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n, 0, -1)))

    @classmethod
    def from_one_line(cls, values: Iterable[int]) -> "Permutation":
        return cls(tuple(int(v) for v in values))

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.image)


def sample_uniform_permutation(n: int, rng: RngStream | np.random.Generator) -> Permutation:
    """Exactly uniform draw from the n! permutations (Fisher-Yates via numpy)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = as_generator(rng)
    image = gen.permutation(n) + 1
    return Permutation(tuple(image.tolist()))


def sample_k_subset(n_total: int, k: int, rng: RngStream | np.random.Generator) -> tuple[int, ...]:
    """Uniform sorted k-subset of {1..n_total}; all C(n_total, k) subsets equally likely."""
    if n_total < 1:
        raise ValueError("n_total must be >= 1")
    if not 0 <= k <= n_total:
        raise ValueError(f"need 0 <= k <= n_total, got k={k}, n_total={n_total}")
    if k == 0:
        return ()
    gen = as_generator(rng)
    picks = np.sort(gen.choice(n_total, size=k, replace=False)) + 1
    return tuple(picks.tolist())


def lis_of_values(values: Sequence[int]) -> int:
    """Length of the longest strictly increasing subsequence (patience sorting, O(m log m))."""
    tops: list[int] = []
    for v in values:
        i = bisect_left(tops, v)
        if i == len(tops):
            tops.append(v)
        else:
            tops[i] = v
    return len(tops)


def lis_length(p: Permutation) -> int:
    """LIS length of the permutation; equals the largest k with a positive length-k count."""
    return lis_of_values(p.image)


def lis_length_restricted(p: Permutation, values: Iterable[int]) -> int:
    """LIS length after deleting every entry whose value is outside ``values``."""
    keep = frozenset(values)
    if keep:
        lo, hi = min(keep), max(keep)
        if lo < 1 or hi > p.n:
            raise ValueError("values must lie within 1..n")
    return lis_of_values([v for v in p.image if v in keep])
