"""Deterministic hierarchical random streams.

Every stochastic routine in the package takes an :class:`RngStream` instead of
a bare seed.  A stream is identified by ``(seed, stream)`` and always produces
the same draws; child streams extend the stream path, so a worker pool can
hand out independent, reproducible streams without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """Seeded random stream with a hierarchical stream id.

    Identical ``(seed, stream)`` pairs reproduce identical draws, on any
    machine and regardless of how many other streams exist.
    """

    seed: int
    stream: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if isinstance(self.stream, int):
            object.__setattr__(self, "stream", (self.stream,))
        else:
            object.__setattr__(self, "stream", tuple(int(s) for s in self.stream))

    def generator(self) -> np.random.Generator:
        """Fresh generator for this stream; repeated calls restart the stream."""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, *ids: int) -> "RngStream":
        """Derived stream with ``ids`` appended to the stream path."""
        return RngStream(self.seed, self.stream + ids)
