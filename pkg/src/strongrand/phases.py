"""Cyclic phase schedule for crossover designs.

The g x g matrix has the randomly drawn phase-1 row on top; row i is that row
rotated right by i-1 places. Cell (i, j) names the group that receives
treatment j in phase i. All indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from strongrand.grouping import partition_groups
from strongrand.threshold import TrialConfig, generate_list


def phi(phase: int, treatment: int, groups: int) -> int:
    """Column of the first row that feeds cell (phase, treatment), phase >= 2."""
    if not 2 <= phase <= groups or not 1 <= treatment <= groups:
        raise ValueError(f"phi needs 2 <= phase <= {groups} and 1 <= treatment <= {groups}")
    if treatment == phase - 1:
        return groups
    return (treatment - (phase - 1)) % groups


def _check_permutation(row: Sequence[int]) -> None:
    if sorted(row) != list(range(1, len(row) + 1)):
        raise ValueError(f"{list(row)} is not a permutation of 1..{len(row)}")


@dataclass(frozen=True)
class PhaseMatrix:
    rows: Tuple[Tuple[int, ...], ...]

    @property
    def groups(self) -> int:
        return len(self.rows)

    def cell(self, phase: int, treatment: int) -> int:
        return self.rows[phase - 1][treatment - 1]

    def first_row(self) -> Tuple[int, ...]:
        return self.rows[0]

    def columns(self) -> List[Tuple[int, ...]]:
        return [tuple(col) for col in zip(*self.rows)]

    def to_lists(self) -> List[List[int]]:
        return [list(r) for r in self.rows]


def build_phase_matrix(first_row: Sequence[int]) -> PhaseMatrix:
    _check_permutation(first_row)
    g = len(first_row)
    rows = [tuple(first_row)]
    for i in range(2, g + 1):
        rows.append(tuple(first_row[phi(i, j, g) - 1] for j in range(1, g + 1)))
    return PhaseMatrix(tuple(rows))


def generate_phase_one(groups: int, source) -> List[int]:
    """Random phase-1 row: the threshold generator run over group numbers."""
    return generate_list(groups, source)


def treatment_of(matrix: PhaseMatrix, phase: int, group: int) -> int:
    return matrix.rows[phase - 1].index(group) + 1


def full_schedule(config: TrialConfig, source):
    """Patient list (N draws), its partition, then the phase matrix (g more draws)."""
    assignment = generate_list(config.patients, source)
    partition = partition_groups(assignment, config.groups)
    matrix = build_phase_matrix(generate_phase_one(config.groups, source))
    return assignment, partition, matrix
