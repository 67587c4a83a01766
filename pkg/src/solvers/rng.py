"""Reproducible, splittable random streams."""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

# Spawn keys of the per-solver child streams.
SOLVER_STREAMS: Dict[str, int] = {
    "mc": 0,
    "fd": 1,
    "walk-measured": 2,
    "walk-amplified": 3,
    "swap-score": 4,
    "mc-trace": 5,
}


@dataclass(frozen=True)
class RngStream:
    """Seed plus spawn path over ``numpy.random.SeedSequence``.

    Children are addressed by integer keys, so the stream of any batch can be
    rebuilt from the root seed alone. Generators use the counter-based Philox
    bit generator.
    """

    seed: int
    path: Tuple[int, ...] = field(default_factory=tuple)

    def child(self, key: int) -> "RngStream":
        if key < 0:
            raise ValueError("spawn keys must be nonnegative")
        return RngStream(self.seed, self.path + (int(key),))

    def for_solver(self, name: str) -> "RngStream":
        return self.child(SOLVER_STREAMS[name])

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.seed_sequence()))
