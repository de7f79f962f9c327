"""Uniform [0, 1) sources with an explicit, auditable seed policy.

Seeded sources wrap :class:`random.Random` (MT19937, period 2**19937 - 1).
Every source records the seed it was built from so any list it produced can
be regenerated later.
"""

from __future__ import annotations

import enum
import hashlib
import random
import time
from dataclasses import dataclass
from typing import Iterable, Optional

SEED_MASK = (1 << 64) - 1


class SourceExhausted(RuntimeError):
    """A replay source was asked for more values than it holds."""


class SeedMode(enum.Enum):
    CLOCK = "clock"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class SeedPolicy:
    mode: SeedMode = SeedMode.CLOCK
    explicit_seed: Optional[int] = None

    def __post_init__(self):
        if self.mode is SeedMode.EXPLICIT:
            if self.explicit_seed is None:
                raise ValueError("explicit seed policy needs a seed")
            if not 0 <= self.explicit_seed <= SEED_MASK:
                raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.explicit_seed}")
        elif self.explicit_seed is not None:
            raise ValueError("clock-derived policy takes no seed")

    @classmethod
    def explicit(cls, seed: int) -> "SeedPolicy":
        return cls(SeedMode.EXPLICIT, seed)

    @classmethod
    def clock(cls) -> "SeedPolicy":
        return cls(SeedMode.CLOCK)


class UniformSource:
    """Seeded stream of uniforms on [0, 1)."""

    def __init__(self, seed: int):
        self.seed_used = seed & SEED_MASK
        self._rng = random.Random(self.seed_used)

    def next_uniform(self) -> float:
        return self._rng.random()

    def __repr__(self):
        return f"UniformSource(seed_used={self.seed_used})"


class ReplaySource:
    """Emits a fixed list of uniforms in order, then raises SourceExhausted.

    Used to replay published draw sequences through the generator.
    """

    seed_used = None

    def __init__(self, values: Iterable[float]):
        self._values = [float(v) for v in values]
        for v in self._values:
            if not 0.0 <= v < 1.0:
                raise ValueError(f"replay value {v!r} outside [0, 1)")
        self._pos = 0

    def next_uniform(self) -> float:
        if self._pos >= len(self._values):
            raise SourceExhausted(f"replay source exhausted after {len(self._values)} values")
        u = self._values[self._pos]
        self._pos += 1
        return u

    @property
    def remaining(self) -> int:
        return len(self._values) - self._pos

    def __repr__(self):
        return f"ReplaySource({self._pos}/{len(self._values)} used)"


def clock_seed() -> int:
    return time.time_ns() & SEED_MASK


def make_source(policy: SeedPolicy) -> UniformSource:
    if policy.mode is SeedMode.EXPLICIT:
        return UniformSource(policy.explicit_seed)
    return UniformSource(clock_seed())


def next_uniform(source) -> float:
    return source.next_uniform()


def replay_source(values: Iterable[float]) -> ReplaySource:
    return ReplaySource(values)


def derive_seed(master_seed: int, index: int) -> int:
    """Deterministic 64-bit seed for replicate `index` under `master_seed`."""
    payload = (master_seed & SEED_MASK).to_bytes(8, "little") + index.to_bytes(8, "little")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")
