"""Complex amplitudes: the additive object whose squared modulus is the probability.

Amplitudes are plain Python complex numbers. The phase convention is
exp(2*pi*i*n): shifting the integer-like coordinate n by c multiplies the
amplitude by exp(2*pi*i*c), so integer shifts are exact symmetries.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvalidInputError

TWO_PI = 2.0 * cmath.pi


@dataclass(frozen=True)
class Envelope:
    """A nonnegative modulus profile A(r) with a declared support interval."""

    profile: Callable[[float], float]
    r_lo: float
    r_hi: float

    def __post_init__(self):
        if not self.r_lo < self.r_hi:
            raise InvalidInputError(f"bad support [{self.r_lo}, {self.r_hi}]")

    def __call__(self, r: float) -> float:
        if not self.r_lo <= r <= self.r_hi:
            raise InvalidInputError(f"r={r} outside support [{self.r_lo}, {self.r_hi}]")
        a = float(self.profile(r))
        if a < 0.0 or not cmath.isfinite(complex(a)):
            raise InvalidInputError(f"envelope must be finite and nonnegative, got {a} at r={r}")
        return a


def unit_envelope(r_lo: float = -1e9, r_hi: float = 1e9) -> Envelope:
    return Envelope(lambda r: 1.0, r_lo, r_hi)


def eval_psi(A: Envelope, n: float, r: float) -> complex:
    """Amplitude A(r) * exp(2*pi*i*n)."""
    return A(r) * cmath.exp(1j * TWO_PI * n)


def born(psi: complex) -> float:
    """Squared modulus: the probability carried by an amplitude."""
    return psi.real * psi.real + psi.imag * psi.imag


def superpose(terms: Sequence[complex]) -> complex:
    """Componentwise sum of amplitudes. The sum is what gets squared, so
    probabilities of overlapping alternatives do not add."""
    if len(terms) == 0:
        raise InvalidInputError("superpose needs at least one amplitude")
    return complex(sum(terms))


def phase_shift(psi: complex, c: float) -> complex:
    """Rotate psi by phase angle 2*pi*c; the modulus is untouched."""
    return psi * cmath.exp(1j * TWO_PI * c)
