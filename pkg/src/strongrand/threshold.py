"""Threshold-based sampling without replacement.

Each step splits [0, 1) into as many equal bins as there are unassigned
patients; the bin holding the next uniform picks the survivor (in increasing
order) that is appended to the assignment list and deleted from the survivors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from strongrand.rng import SeedPolicy


class ConfigError(ValueError):
    """Trial parameters that the generator cannot accept."""


@dataclass(frozen=True)
class TrialConfig:
    patients: int
    groups: int
    seed_policy: SeedPolicy = field(default_factory=SeedPolicy.clock)

    def __post_init__(self):
        if self.patients < 1:
            raise ConfigError(f"number of patients must be >= 1, got {self.patients}")
        if self.groups < 1:
            raise ConfigError(f"number of groups must be >= 1, got {self.groups}")
        if self.patients % self.groups:
            raise ConfigError(
                f"{self.groups} groups do not divide {self.patients} patients evenly"
            )

    @property
    def group_size(self) -> int:
        return self.patients // self.groups


@dataclass(frozen=True)
class ThresholdSet:
    """Exact thresholds k/n for k = 0..n; ``values[0] == 0`` and ``values[n] == 1``."""

    count: int
    values: tuple

    def as_floats(self) -> List[float]:
        return [float(t) for t in self.values]

    def upper(self) -> tuple:
        """The n counted thresholds T_1..T_n (T_0 is the implicit lower bound)."""
        return self.values[1:]


def compute_thresholds(survivor_count: int) -> ThresholdSet:
    if survivor_count < 1:
        raise ValueError("threshold set needs at least one survivor")
    n = survivor_count
    return ThresholdSet(n, tuple(Fraction(k, n) for k in range(n + 1)))


def select_index(u: float, survivor_count: int) -> int:
    """1-based bin k with (k-1)/n <= u < k/n.

    Closed form floor(u*n) + 1; the clamp covers u*n rounding up to n.
    """
    k = math.floor(u * survivor_count) + 1
    return k if k < survivor_count else survivor_count


def select_index_scan(u: float, survivor_count: int) -> int:
    """Reference selection by scanning the exact threshold set."""
    values = compute_thresholds(survivor_count).values
    x = Fraction(u)
    for k in range(1, survivor_count + 1):
        if values[k - 1] <= x < values[k]:
            return k
    raise ValueError(f"u={u!r} outside [0, 1)")


@dataclass
class GeneratorState:
    """Step counter, ordered survivors and the partial assignment list.

    Survivors stay in increasing order, so "the k-th survivor" is well defined.
    """

    survivors: List[int]
    partial: List[int] = field(default_factory=list)

    @classmethod
    def initial(cls, patients: int) -> "GeneratorState":
        return cls(list(range(1, patients + 1)), [])

    @property
    def step(self) -> int:
        return len(self.partial)

    @property
    def done(self) -> bool:
        return not self.survivors


def draw_next(state: GeneratorState, u: float) -> GeneratorState:
    """Advance `state` by one draw in place and return it."""
    if not state.survivors:
        raise ValueError("no survivors left to draw from")
    if not 0.0 <= u < 1.0:
        raise ValueError(f"uniform {u!r} outside [0, 1)")
    k = select_index(u, len(state.survivors))
    state.partial.append(state.survivors.pop(k - 1))
    return state


def generate_list(patients: int, source) -> List[int]:
    """Random permutation of 1..patients, consuming exactly `patients` uniforms."""
    state = GeneratorState.initial(patients)
    while state.survivors:
        draw_next(state, source.next_uniform())
    return state.partial


def generate_assignment_list(config: TrialConfig, source) -> List[int]:
    return generate_list(config.patients, source)
