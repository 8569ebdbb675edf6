"""Time partitions, space grids, lattice paths, and the winding functional.

The winding m of a discrete path is the per-step phase increment summed over
all steps; it equals the midpoint-rule discrete action divided by the phase
quantum h. Velocity on a step is the forward difference; the Lagrangian is
evaluated at the spatial and temporal midpoints of the step.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .amplitude import TWO_PI
from .errors import InvalidInputError


@dataclass(frozen=True)
class TimeGrid:
    """Equal partition of (t_a, t_b) into k steps of width epsilon."""

    t_a: float
    t_b: float
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInputError(f"k must be >= 1, got {self.k}")
        if not self.t_b > self.t_a:
            raise InvalidInputError(f"need t_b > t_a, got ({self.t_a}, {self.t_b})")

    @property
    def epsilon(self) -> float:
        return (self.t_b - self.t_a) / self.k

    @property
    def nodes(self) -> np.ndarray:
        return self.t_a + self.epsilon * np.arange(self.k + 1)


def make_partition(t_a: float, t_b: float, k: int) -> TimeGrid:
    return TimeGrid(t_a=t_a, t_b=t_b, k=k)


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform grid of m_sites points on [r_min, r_max]."""

    r_min: float
    r_max: float
    m_sites: int

    def __post_init__(self):
        if self.m_sites < 2:
            raise InvalidInputError(f"m_sites must be >= 2, got {self.m_sites}")
        if not self.r_max > self.r_min:
            raise InvalidInputError(f"need r_max > r_min, got ({self.r_min}, {self.r_max})")

    @property
    def delta_r(self) -> float:
        return (self.r_max - self.r_min) / (self.m_sites - 1)

    @property
    def positions(self) -> np.ndarray:
        return self.r_min + self.delta_r * np.arange(self.m_sites)

    def position(self, j: int) -> float:
        if not 0 <= j < self.m_sites:
            raise InvalidInputError(f"site index {j} out of range [0, {self.m_sites})")
        return self.r_min + self.delta_r * j

    def nearest_site(self, r: float) -> int:
        j = int(round((r - self.r_min) / self.delta_r))
        return min(max(j, 0), self.m_sites - 1)


# A lattice path is a sequence of k+1 site indices with fixed endpoints.
LatticePath = Sequence[int]


def validate_path(path: LatticePath, tgrid: TimeGrid, sgrid: SpaceGrid) -> None:
    if len(path) != tgrid.k + 1:
        raise InvalidInputError(
            f"path has {len(path)} sites, expected k+1 = {tgrid.k + 1}"
        )
    for j in path:
        if not 0 <= j < sgrid.m_sites:
            raise InvalidInputError(f"site index {j} out of range [0, {sgrid.m_sites})")


@dataclass(frozen=True)
class LagrangianModel:
    """L(r, rdot, t) in energy units, with the parameters it was built from."""

    name: str
    evaluate: Callable[[float, float, float], float]
    mass: Optional[float] = None  # set for kinetic models; used by normalization

    def shifted(self, c: float) -> "LagrangianModel":
        """The same model with a constant c added to L."""
        base = self.evaluate
        return LagrangianModel(
            name=f"{self.name}+{c}", evaluate=lambda r, v, t: base(r, v, t) + c, mass=self.mass
        )

    def scaled(self, s: float) -> "LagrangianModel":
        """s * L; the kinetic coefficient scales too, so mass becomes s * mass."""
        base = self.evaluate
        return LagrangianModel(
            name=f"{s}*{self.name}",
            evaluate=lambda r, v, t: s * base(r, v, t),
            mass=None if self.mass is None else s * self.mass,
        )


def free_particle(mass: float = 1.0) -> LagrangianModel:
    if mass <= 0:
        raise InvalidInputError(f"mass must be > 0, got {mass}")
    return LagrangianModel("free", lambda r, v, t: 0.5 * mass * v * v, mass=mass)


def harmonic_oscillator(mass: float = 1.0, omega: float = 1.0) -> LagrangianModel:
    if mass <= 0:
        raise InvalidInputError(f"mass must be > 0, got {mass}")
    return LagrangianModel(
        "harmonic",
        lambda r, v, t: 0.5 * mass * v * v - 0.5 * mass * omega * omega * r * r,
        mass=mass,
    )


def step_increment(
    L: LagrangianModel,
    h: float,
    r_prev: float,
    r_next: float,
    t_mid: float,
    epsilon: float,
) -> float:
    """Signed phase increment for one step: epsilon * L(midpoint) / h.

    Signed, not absolute: increments must cancel where the Lagrangian changes
    sign, otherwise the action identification breaks.
    """
    if epsilon <= 0:
        raise InvalidInputError(f"epsilon must be > 0, got {epsilon}")
    if h <= 0:
        raise InvalidInputError(f"h must be > 0, got {h}")
    rdot = (r_next - r_prev) / epsilon
    r_mid = 0.5 * (r_prev + r_next)
    return epsilon * L.evaluate(r_mid, rdot, t_mid) / h


def path_winding(
    path: LatticePath,
    L: LagrangianModel,
    h: float,
    tgrid: TimeGrid,
    sgrid: SpaceGrid,
) -> float:
    """Total winding m: the discrete action along the path divided by h."""
    validate_path(path, tgrid, sgrid)
    eps = tgrid.epsilon
    pos = sgrid.positions
    m = 0.0
    for i in range(1, len(path)):
        t_mid = tgrid.t_a + (i - 0.5) * eps
        m += step_increment(L, h, pos[path[i - 1]], pos[path[i]], t_mid, eps)
    return m


def path_amplitude(
    path: LatticePath,
    L: LagrangianModel,
    h: float,
    tgrid: TimeGrid,
    sgrid: SpaceGrid,
    norm_const: complex = 1.0 + 0.0j,
) -> complex:
    """norm_const times the unit phase exp(2*pi*i*m) of the path."""
    m = path_winding(path, L, h, tgrid, sgrid)
    return norm_const * cmath.exp(1j * TWO_PI * m)


def step_conditional_probability(p_prev: float, p_next: float) -> float:
    """Ratio p_next / p_prev; the factor a single step contributes.

    Individual factors can exceed 1; only their telescoped product is a
    probability.
    """
    if p_prev < 0 or p_next < 0:
        raise InvalidInputError("probabilities must be nonnegative")
    if p_prev == 0:
        raise ZeroDivisionError("conditioning on a zero-probability point")
    return p_next / p_prev


def path_probability(path: LatticePath, A, sgrid: SpaceGrid) -> float:
    """(A(r_end) / A(r_start))**2 — endpoint-only, independent of the interior."""
    pos = sgrid.positions
    a0 = A(pos[path[0]])
    if a0 == 0.0:
        raise ZeroDivisionError("envelope vanishes at the starting point")
    ak = A(pos[path[-1]])
    ratio = ak / a0
    return ratio * ratio
