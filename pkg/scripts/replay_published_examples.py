"""Replay the two published worked examples step by step.

Prints, for the 12-patient example, the survivor list before each draw, the
selected bin and patient, and whether the printed row agrees; then the
4-treatment phase schedule.

    python scripts/replay_published_examples.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from published import FOUR_U, TWELVE_PRINTED_L, TWELVE_U  # noqa: E402
from strongrand.phases import build_phase_matrix, generate_phase_one, treatment_of  # noqa: E402
from strongrand.rng import replay_source  # noqa: E402
from strongrand.threshold import GeneratorState, draw_next, select_index  # noqa: E402


def twelve_patients():
    state = GeneratorState.initial(12)
    print(f"{'step':>4}  {'U':>11}  {'n':>2}  {'k':>2}  {'pick':>4}  printed  survivors before")
    for i, u in enumerate(TWELVE_U, start=1):
        before = list(state.survivors)
        k = select_index(u, len(before))
        draw_next(state, u)
        printed = TWELVE_PRINTED_L[i - 1]
        flag = "" if printed == state.partial[-1] else "  <-- differs"
        print(f"{i:>4}  {u:.9f}  {len(before):>2}  {k:>2}  {state.partial[-1]:>4}  {printed:>7}  {before}{flag}")
    print("generated:", state.partial)
    print("printed:  ", TWELVE_PRINTED_L)


def four_treatments():
    row = generate_phase_one(4, replay_source(FOUR_U))
    matrix = build_phase_matrix(row)
    print("phase-1 row:", row)
    for i, r in enumerate(matrix.rows, start=1):
        print(f"phase {i}: {list(r)}")
    print("phase 2, group 2 -> treatment", treatment_of(matrix, 2, 2))


if __name__ == "__main__":
    twelve_patients()
    print()
    four_treatments()
