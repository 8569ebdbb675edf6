"""Random real-image assignment for labelled points, and the stopping-rule estimator.

A point carries a definite integer label plus a real coordinate that is only
ever assigned at random from a caller-supplied density on a bounded interval.
Sampling is by inverse-CDF lookup on a fixed quadrature grid, so a given seed
reproduces the same draws bit-for-bit on any platform (numpy PCG64).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInputError

# resolution of the tabulated inverse CDF; fixed so results are reproducible
_CDF_GRID = 8192


@dataclass(frozen=True)
class LabelledPoint:
    """A point with a definite integer label and an opaque bookkeeping tag.

    Points sharing a label are behaviourally interchangeable: no operation
    here may branch on the tag.
    """

    unit_index: int
    tag: str = ""

    def __post_init__(self):
        if self.unit_index < 0:
            raise InvalidInputError(f"unit_index must be >= 0, got {self.unit_index}")


@dataclass(frozen=True)
class MappingDistribution:
    """A nonnegative density on a closed bounded interval."""

    r_lo: float
    r_hi: float
    density: Callable[[float], float] = field(default=lambda r: 1.0)

    def __post_init__(self):
        if not self.r_lo < self.r_hi:
            raise InvalidInputError(f"need r_lo < r_hi, got [{self.r_lo}, {self.r_hi}]")

    def _tabulate(self) -> tuple[np.ndarray, np.ndarray]:
        """Grid of support points and the normalized CDF over them."""
        r = np.linspace(self.r_lo, self.r_hi, _CDF_GRID + 1)
        p = np.array([float(self.density(x)) for x in r])
        if np.any(p < 0.0):
            bad = r[np.argmin(p)]
            raise InvalidInputError(f"density is negative at r={bad}")
        if not np.all(np.isfinite(p)):
            raise InvalidInputError("density is non-finite on the support")
        # trapezoid masses per cell
        masses = 0.5 * (p[:-1] + p[1:]) * np.diff(r)
        total = float(masses.sum())
        if not (total > 0.0 and np.isfinite(total)):
            raise InvalidInputError(f"normalization must be positive and finite, got {total}")
        cdf = np.concatenate(([0.0], np.cumsum(masses))) / total
        return r, cdf


@dataclass(frozen=True)
class StoppingRuleRecord:
    """Counts from a search that stops when the last marked item is found."""

    n_target: int
    n_checked: int

    def __post_init__(self):
        if not (1 <= self.n_target <= self.n_checked):
            raise InvalidInputError(
                f"need n_checked >= n_target >= 1, got target={self.n_target} checked={self.n_checked}"
            )


def sample_image(
    point: LabelledPoint,
    dist: MappingDistribution,
    seed: int,
    count: int = 1,
) -> np.ndarray:
    """Draw `count` random real images for `point` from `dist`.

    Identical (dist, seed, count) produce identical output arrays. The point's
    tag is ignored by construction; only the label could matter, and here the
    density already encodes any label dependence, so draws depend on the
    distribution and seed alone.
    """
    if count < 1:
        raise InvalidInputError(f"count must be >= 1, got {count}")
    r, cdf = dist._tabulate()
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    out = np.interp(u, cdf, r)
    return out


def empirical_density(
    samples: Sequence[float],
    bins: int,
    support: tuple[float, float],
) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width histogram of `samples`; returns (bin_edges, frequencies).

    Frequencies sum to 1 (they are counts / N, not densities).
    """
    lo, hi = support
    if bins < 1:
        raise InvalidInputError(f"bins must be >= 1, got {bins}")
    if not lo < hi:
        raise InvalidInputError(f"bad support [{lo}, {hi}]")
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise InvalidInputError("empty sample list")
    if np.any(arr < lo) or np.any(arr > hi):
        raise InvalidInputError("sample outside support")
    counts, edges = np.histogram(arr, bins=bins, range=(lo, hi))
    return edges, counts / arr.size


def stopping_rule_probability(record: StoppingRuleRecord) -> float:
    """Marked-item probability: targets found over items examined, in (0, 1]."""
    return record.n_target / record.n_checked


def simulate_stopping_rule(
    n_target: int,
    marked_rate: float,
    seed: int,
) -> StoppingRuleRecord:
    """Scan a Bernoulli(marked_rate) stream until `n_target` marked items appear."""
    if not 0.0 < marked_rate <= 1.0:
        raise InvalidInputError(f"marked_rate must be in (0, 1], got {marked_rate}")
    if n_target < 1:
        raise InvalidInputError(f"n_target must be >= 1, got {n_target}")
    rng = np.random.default_rng(seed)
    found = 0
    checked = 0
    while found < n_target:
        checked += 1
        if rng.random() < marked_rate:
            found += 1
    return StoppingRuleRecord(n_target=n_target, n_checked=checked)
