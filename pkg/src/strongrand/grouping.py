"""Split a completed assignment list into g equal, contiguous groups."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence


def partition_groups(assignment: Sequence[int], groups: int) -> List[List[int]]:
    """Group m (1-based) holds positions (m-1)*N/g + 1 .. m*N/g of the list."""
    n = len(assignment)
    if groups < 1 or n == 0 or n % groups:
        raise ValueError(f"cannot split {n} patients into {groups} equal groups")
    if sorted(assignment) != list(range(1, n + 1)):
        raise ValueError("assignment list is not a complete permutation of 1..N")
    size = n // groups
    return [list(assignment[m * size:(m + 1) * size]) for m in range(groups)]


def group_of_position(position: int, patients: int, groups: int) -> int:
    """1-based group holding 1-based list position `position`."""
    return (position - 1) // (patients // groups) + 1


def membership_probability_claim(patient: int, group: int, groups: int) -> Fraction:
    """Theoretical P(patient in group) for a uniformly random list: 1/g."""
    if groups < 1 or not 1 <= group <= groups or patient < 1:
        raise ValueError("patient and group indices are 1-based and group <= groups")
    return Fraction(1, groups)
