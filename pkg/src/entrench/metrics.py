"""Observables on configurations and consensus-time statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from entrench.lattice import Configuration
from entrench.spectrum import attitudes


@dataclass(frozen=True)
class AttitudeHistogram:
    """Counts for attitudes ``-L..-1, 1..L`` in spectrum order."""

    L: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != 2 * self.L:
            raise ValueError(f"expected {2 * self.L} counts, got {len(self.counts)}")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

    @classmethod
    def from_frequencies(cls, L: int, freqs: Sequence[float], total: int = 10_000):
        """Histogram with counts proportional to ``freqs`` (handy for tests and the ODE)."""
        counts = tuple(int(round(f * total)) for f in freqs)
        return cls(L, counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.total

    def count(self, a: int) -> int:
        return self.counts[a + self.L if a < 0 else a + self.L - 1]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(attitudes(self.L), self.counts))


def histogram(config: Configuration) -> AttitudeHistogram:
    L = config.L
    raw = np.bincount(config.cells.astype(np.int64) + L, minlength=2 * L + 1)
    counts = np.concatenate([raw[:L], raw[L + 1:]])
    return AttitudeHistogram(L, tuple(int(c) for c in counts))


def is_consensus(config: Configuration) -> bool:
    """True iff every attitude has the same sign."""
    positive = int(np.count_nonzero(config.cells > 0))
    return positive == 0 or positive == config.size


LABELS = ("consensus", "polarized", "centered", "mixed")


def classify(hist: AttitudeHistogram, outer_threshold: float = 0.8,
             center_threshold: float = 0.8) -> str:
    """Label a distribution as consensus, polarized, centered or mixed.

    Checked in that order. Polarized needs at least ``outer_threshold`` of the
    mass on ``±L`` with each extreme holding a quarter of that mass or more;
    centered needs ``center_threshold`` of the mass on ``±1``. For ``L = 1``
    extremes and center coincide, so a balanced split reads as polarized.
    """
    for name, t in (("outer_threshold", outer_threshold), ("center_threshold", center_threshold)):
        if not 0.5 < t <= 1.0:
            raise ValueError(f"{name} must lie in (0.5, 1], got {t}")
    if hist.total == 0:
        raise ValueError("empty histogram")
    L = hist.L
    n = hist.total
    left = sum(hist.counts[:L])
    if left == 0 or left == n:
        return "consensus"
    lo, hi = hist.count(-L), hist.count(L)
    extreme = lo + hi
    if extreme >= outer_threshold * n and min(lo, hi) >= 0.25 * extreme:
        return "polarized"
    if hist.count(-1) + hist.count(1) >= center_threshold * n:
        return "centered"
    return "mixed"


def interface_density(config: Configuration, neighborhood: int = 4) -> float:
    """Fraction of nearest-neighbor bonds joining opposite-sign attitudes.

    ``neighborhood=4`` counts the 2N von Neumann bonds of the torus;
    ``neighborhood=8`` adds both diagonals for 4N bonds.
    """
    if neighborhood not in (4, 8):
        raise ValueError(f"neighborhood must be 4 or 8, got {neighborhood}")
    s = config.grid > 0
    crossing = np.count_nonzero(s != np.roll(s, -1, axis=1))
    crossing += np.count_nonzero(s != np.roll(s, -1, axis=0))
    bonds = 2 * config.size
    if neighborhood == 8:
        down = np.roll(s, -1, axis=0)
        crossing += np.count_nonzero(s != np.roll(down, -1, axis=1))
        crossing += np.count_nonzero(s != np.roll(down, 1, axis=1))
        bonds = 4 * config.size
    return crossing / bonds


@dataclass(frozen=True)
class ConsensusSample:
    """Outcome of one replicate. Censored samples store the step budget as ``time``."""

    fingerprint: str
    seed: int
    time: int
    censored: bool
    label: str

    def __post_init__(self):
        if self.time < 0:
            raise ValueError("consensus time must be nonnegative")


@dataclass(frozen=True)
class Summary:
    n: int
    count: int  # uncensored samples
    censored: int
    mean: float
    median: float
    stderr: float
    lower_bound: float  # smallest censoring budget, nan when nothing is censored

    @property
    def lower_bound_only(self) -> bool:
        return self.count == 0


def summarize(samples: Sequence[ConsensusSample]) -> Summary:
    """Mean/median/stderr over uncensored samples; censored ones are only counted."""
    if not samples:
        raise ValueError("cannot summarize an empty sample list")
    done = np.array([s.time for s in samples if not s.censored], dtype=float)
    cens = [s.time for s in samples if s.censored]
    lower = float(min(cens)) if cens else math.nan
    if done.size == 0:
        return Summary(len(samples), 0, len(cens), math.nan, math.nan, math.nan, lower)
    stderr = float(done.std(ddof=1) / math.sqrt(done.size)) if done.size > 1 else math.nan
    return Summary(len(samples), int(done.size), len(cens), float(done.mean()),
                   float(np.median(done)), stderr, lower)


def consensus_ratio(numerator: Summary, denominator: Summary) -> float:
    """Ratio of mean consensus times, e.g. telephoning over relocation."""
    if numerator.lower_bound_only or denominator.lower_bound_only:
        raise ValueError("ratio undefined when a summary has no finished runs")
    return numerator.mean / denominator.mean
