"""Deterministic random-stream plumbing shared by all samplers and experiments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Addressable source of reproducible randomness.

    A stream is identified by ``(master_seed, stream_index)``: the same pair
    always reproduces the same draw sequence, and distinct indices give
    statistically independent streams (PCG64 keyed through SeedSequence
    spawn keys).  Experiments assign stream index ``i`` to trial ``i`` and
    reduce results in index order, so the number of workers can never change
    an output.
    """

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(
            self.master_seed & _U64, spawn_key=(self.stream_index & _U64,)
        )
        return np.random.default_rng(seq)

    def shifted(self, offset: int) -> "RngStream":
        """Stream at ``stream_index + offset`` under the same master seed."""
        return RngStream(self.master_seed, self.stream_index + offset)


def as_generator(rng: "RngStream | np.random.Generator") -> np.random.Generator:
    """Accept either a stream spec or a live generator.

    Passing an ``RngStream`` restarts it from the beginning; passing a
    ``Generator`` continues from its current state (useful when one stream
    feeds several draws in sequence).
    """
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")
