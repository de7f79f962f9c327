"""Monte Carlo checks that generated lists are uniformly random.

Each check runs `trials` independent replicates (replicate r draws from its
own source seeded by ``derive_seed`` of the check's stream and r), tallies
the relevant cells and applies a Pearson chi-square test against the flat
expectation, alongside the largest absolute deviation of any empirical
cell frequency from its theoretical value.

Degrees of freedom and dispersion account for the structural constraints of
each table. For a uniform random permutation matrix the cell covariance is
(I - J/N) (x) (I - J/N) / (N - 1), so the Pearson sum over the N x N
position table is N/(N-1) times a chi-square with (N-1)^2 df; the N x g
membership table is N/(N-1) times chi-square((N-1)(g-1)); every phase slice
of the g x g x g table is a column permutation of the first one, which makes
that sum g^2/(g-1) times chi-square((g-1)^2).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from strongrand.phases import build_phase_matrix
from strongrand.rng import UniformSource, derive_seed
from strongrand.stats import ChiSquareResult, chi_square
from strongrand.threshold import TrialConfig, generate_list

MIN_EXPECTED = 20
MAX_EXHAUSTIVE = 6

# independent seed streams per check
POSITION_STREAM = 1
MEMBERSHIP_STREAM = 2
PHASE_STREAM = 3
PERMUTATION_STREAM = 4

ListGenerator = Callable[[int, object], Sequence[int]]


class PreconditionError(ValueError):
    """Too few trials for the chi-square approximation, or N too large to enumerate."""


def identity_generator(patients: int, source) -> List[int]:
    """Broken generator for negative controls: always 1..N, in order."""
    for _ in range(patients):
        source.next_uniform()
    return list(range(1, patients + 1))


def fixed_first_row(groups: int, source) -> List[int]:
    """Broken phase-1 draw for negative controls: always 1..g."""
    return identity_generator(groups, source)


@dataclass
class FrequencyTable:
    counts: np.ndarray
    trials: int

    @property
    def dimensions(self) -> tuple:
        return self.counts.shape

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.trials

    def max_deviation(self, probability: float) -> float:
        return float(np.abs(self.frequencies - probability).max())

    def to_dict(self) -> dict:
        return {"dimensions": list(self.dimensions), "trials": self.trials,
                "counts": self.counts.tolist()}


@dataclass
class CheckOutcome:
    name: str
    chi2: ChiSquareResult
    table: FrequencyTable
    probability: float
    max_deviation: float

    @property
    def passed(self) -> bool:
        return self.chi2.passed

    @property
    def sigma(self) -> float:
        p = self.probability
        return math.sqrt(p * (1 - p) / self.table.trials)

    def to_dict(self, with_counts: bool = False) -> dict:
        d = {
            "name": self.name,
            "probability": self.probability,
            "max_deviation": self.max_deviation,
            "sigma": self.sigma,
            "chi_square": self.chi2.to_dict(),
            "passed": self.passed,
        }
        if with_counts:
            d["table"] = self.table.to_dict()
        return d


# -- replicate engine -------------------------------------------------------

def _sample_chunk(sample, master_seed: int, stream: int, start: int, stop: int) -> np.ndarray:
    base = derive_seed(master_seed, stream)
    rows = [sample(UniformSource(derive_seed(base, r))) for r in range(start, stop)]
    return np.asarray(rows, dtype=np.int64)


def simulate(sample, trials: int, master_seed: int, stream: int, workers: int = 1) -> np.ndarray:
    """Stack ``sample(source)`` over replicates 0..trials-1, one source each.

    The result does not depend on `workers`: chunks are concatenated in
    replicate order.
    """
    if workers <= 1 or trials < 2 * workers:
        return _sample_chunk(sample, master_seed, stream, 0, trials)
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_sample_chunk, *zip(*[
            (sample, master_seed, stream, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])
        ]))
        return np.concatenate(list(parts))


def _require(expected: float, what: str) -> None:
    if expected < MIN_EXPECTED:
        raise PreconditionError(
            f"{what}: expected count per cell {expected:g} is below {MIN_EXPECTED}; raise --trials"
        )


# picklable samplers

@dataclass(frozen=True)
class _ListSample:
    patients: int
    generator: ListGenerator

    def __call__(self, source):
        return self.generator(self.patients, source)


@dataclass(frozen=True)
class _MembershipSample:
    patients: int
    groups: int
    generator: ListGenerator

    def __call__(self, source):
        assignment = self.generator(self.patients, source)
        size = self.patients // self.groups
        group_of = [0] * self.patients
        for pos, k in enumerate(assignment):
            group_of[k - 1] = pos // size
        return group_of


@dataclass(frozen=True)
class _PhaseSample:
    groups: int
    phase_one: ListGenerator

    def __call__(self, source):
        matrix = build_phase_matrix(self.phase_one(self.groups, source))
        return [m for row in matrix.rows for m in row]


# -- checks -----------------------------------------------------------------

def position_uniformity_test(config: TrialConfig, trials: int, significance: float = 0.001,
                             master_seed: int = 0, generator: ListGenerator = generate_list,
                             workers: int = 1) -> CheckOutcome:
    """Counts of (position i, patient k) against trials/N per cell."""
    n = config.patients
    _require(trials / n, "position uniformity")
    lists = simulate(_ListSample(n, generator), trials, master_seed, POSITION_STREAM, workers)
    flat = (np.arange(n) * n + (lists - 1)).ravel()
    counts = np.bincount(flat, minlength=n * n).reshape(n, n)
    table = FrequencyTable(counts, trials)
    df = (n - 1) ** 2
    result = chi_square(counts, trials / n, df, significance,
                        dispersion=n / (n - 1) if n > 1 else 1.0)
    return CheckOutcome("position_uniformity", result, table, 1 / n, table.max_deviation(1 / n))


def group_membership_test(config: TrialConfig, trials: int, significance: float = 0.001,
                          master_seed: int = 0, generator: ListGenerator = generate_list,
                          workers: int = 1) -> CheckOutcome:
    """Counts of (patient k, group m) against trials/g per cell."""
    n, g = config.patients, config.groups
    _require(trials / g, "group membership")
    groups = simulate(_MembershipSample(n, g, generator), trials, master_seed,
                      MEMBERSHIP_STREAM, workers)
    flat = (np.arange(n) * g + groups).ravel()
    counts = np.bincount(flat, minlength=n * g).reshape(n, g)
    table = FrequencyTable(counts, trials)
    df = (n - 1) * (g - 1)
    result = chi_square(counts, trials / g, df, significance,
                        dispersion=n / (n - 1) if n > 1 else 1.0)
    return CheckOutcome("group_membership", result, table, 1 / g, table.max_deviation(1 / g))


def phase_cell_test(groups: int, trials: int, significance: float = 0.001, master_seed: int = 0,
                    phase_one: ListGenerator = generate_list, workers: int = 1) -> CheckOutcome:
    """Counts of (phase i, treatment j, group m) against trials/g per cell."""
    g = groups
    _require(trials / g, "phase cells")
    cells = simulate(_PhaseSample(g, phase_one), trials, master_seed, PHASE_STREAM, workers)
    flat = (np.arange(g * g) * g + (cells - 1)).ravel()
    counts = np.bincount(flat, minlength=g ** 3).reshape(g, g, g)
    table = FrequencyTable(counts, trials)
    df = (g - 1) ** 2
    result = chi_square(counts, trials / g, df, significance,
                        dispersion=g * g / (g - 1) if g > 1 else 1.0)
    return CheckOutcome("phase_cells", result, table, 1 / g, table.max_deviation(1 / g))


def permutation_uniformity_test(patients: int, trials: int, significance: float = 0.001,
                                master_seed: int = 0, generator: ListGenerator = generate_list,
                                workers: int = 1) -> CheckOutcome:
    """Counts over all N! orderings against trials/N! each (N <= 6)."""
    n = patients
    if not 1 <= n <= MAX_EXHAUSTIVE:
        raise PreconditionError(f"exhaustive permutation check needs 1 <= N <= {MAX_EXHAUSTIVE}")
    perms = list(itertools.permutations(range(1, n + 1)))
    _require(trials / len(perms), "permutation uniformity")
    rank = {p: i for i, p in enumerate(perms)}
    lists = simulate(_ListSample(n, generator), trials, master_seed, PERMUTATION_STREAM, workers)
    idx = np.fromiter((rank[tuple(row)] for row in lists.tolist()), dtype=np.int64, count=trials)
    counts = np.bincount(idx, minlength=len(perms))
    table = FrequencyTable(counts, trials)
    p = 1 / len(perms)
    result = chi_square(counts, trials * p, len(perms) - 1, significance)
    return CheckOutcome("permutation_uniformity", result, table, p, table.max_deviation(p))


@dataclass
class VerificationReport:
    patients: int
    groups: int
    trials: int
    master_seed: int
    significance: float
    checks: List[CheckOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, with_counts: bool = False) -> dict:
        return {
            "config": {"patients": self.patients, "groups": self.groups},
            "trials": self.trials,
            "master_seed": self.master_seed,
            "significance": self.significance,
            "checks": [c.to_dict(with_counts) for c in self.checks],
            "passed": self.passed,
        }

    def to_text(self) -> str:
        lines = [
            f"verification N={self.patients} g={self.groups} trials={self.trials} "
            f"master_seed={self.master_seed} significance={self.significance:g}"
        ]
        for c in self.checks:
            r = c.chi2
            lines.append(
                f"{'PASS' if c.passed else 'FAIL'}  {c.name:<24} chi2={r.statistic:.3f} df={r.df} "
                f"p={r.p_value:.4g}  max|freq-{c.probability:.4g}|={c.max_deviation:.4g} "
                f"({c.max_deviation / c.sigma if c.sigma else 0:.1f} sigma)"
            )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def run_suite(config: TrialConfig, trials: int, significance: float = 0.001,
              master_seed: int = 0, generator: ListGenerator = generate_list,
              phase_one: ListGenerator = generate_list, workers: int = 1,
              exhaustive: Optional[bool] = None) -> VerificationReport:
    """All checks for `config`; the exhaustive check runs by default when N <= 6."""
    if exhaustive is None:
        exhaustive = config.patients <= MAX_EXHAUSTIVE
    kw = dict(significance=significance, master_seed=master_seed, workers=workers)
    # validate every precondition before spending time on any simulation
    _require(trials / config.patients, "position uniformity")
    _require(trials / config.groups, "group membership")
    if exhaustive:
        if config.patients > MAX_EXHAUSTIVE:
            raise PreconditionError(f"exhaustive permutation check needs N <= {MAX_EXHAUSTIVE}")
        _require(trials / math.factorial(config.patients), "permutation uniformity")
    report = VerificationReport(config.patients, config.groups, trials, master_seed, significance)
    report.checks.append(position_uniformity_test(config, trials, generator=generator, **kw))
    report.checks.append(group_membership_test(config, trials, generator=generator, **kw))
    report.checks.append(phase_cell_test(config.groups, trials, phase_one=phase_one, **kw))
    if exhaustive:
        report.checks.append(
            permutation_uniformity_test(config.patients, trials, generator=generator, **kw))
    return report
