"""Stationary-path emergence and the least-time limit.

Three experiments live here: the least-winding lattice path (dynamic
programming with a brute-force cross-check), the phase-concentration sweep
that shows the path sum collapsing onto the minimizer as the phase quantum
shrinks, and the two-media least-time solver whose minimizer obeys Snell's
law. The least-time geometry is 2D (two half-planes split by the line y = 0)
because refraction is the sharp, checkable consequence of the least-time
principle; everything else in the package stays 1D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .amplitude import TWO_PI
from .errors import InvalidInputError
from .paths import LagrangianModel, SpaceGrid, TimeGrid
from .propagator import DEFAULT_MAX_PATHS, enumerate_paths


# ---------------------------------------------------------------------------
# least-winding lattice path


@dataclass(frozen=True)
class StationaryPathResult:
    path: tuple[int, ...]
    m_min: float
    runner_up_gap: float  # winding of the second-best path minus m_min


def least_winding_path(
    L: LagrangianModel,
    h: float,
    tgrid: TimeGrid,
    sgrid: SpaceGrid,
    i_a: int,
    i_b: int,
) -> StationaryPathResult:
    """Global minimizer of the winding over all fixed-endpoint lattice paths.

    Slice-by-slice dynamic programming on cost-to-come. Ties break toward the
    smaller predecessor site index, so the returned path is unique and stable.
    Also tracks the best and second-best cost per node, which yields the
    winding gap to the runner-up path.
    """
    from .propagator import step_increment_table

    M = sgrid.m_sites
    for j in (i_a, i_b):
        if not 0 <= j < M:
            raise InvalidInputError(f"endpoint site {j} out of range")
    best = np.full(M, np.inf)
    second = np.full(M, np.inf)
    best[i_a] = 0.0
    back = np.zeros((tgrid.k, M), dtype=int)
    for i in range(1, tgrid.k + 1):
        cost = step_increment_table(L, h, tgrid, sgrid, i)  # (j_next, j_prev)
        with np.errstate(invalid="ignore"):
            cand_best = cost + best[None, :]
            cand_second = cost + second[None, :]
        cand_best[np.isnan(cand_best)] = np.inf
        cand_second[np.isnan(cand_second)] = np.inf
        # np.argmin returns the first (smallest) predecessor index on ties
        back[i - 1] = np.argmin(cand_best, axis=1)
        new_best = cand_best[np.arange(M), back[i - 1]]
        # runner-up over both ranks of every predecessor; two entries of the
        # combined pool always denote two distinct paths
        pool = np.concatenate([cand_best, cand_second], axis=1)
        new_second = np.partition(pool, 1, axis=1)[:, 1]
        best, second = new_best, new_second
    sites = [i_b]
    for i in range(tgrid.k, 0, -1):
        sites.append(int(back[i - 1, sites[-1]]))
    sites.reverse()
    return StationaryPathResult(tuple(sites), float(best[i_b]), float(second[i_b] - best[i_b]))


def exhaustive_min_winding(
    L: LagrangianModel,
    h: float,
    tgrid: TimeGrid,
    sgrid: SpaceGrid,
    i_a: int,
    i_b: int,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> StationaryPathResult:
    """Brute-force oracle for least_winding_path; same tie-breaking rule."""
    from .paths import path_winding

    best_path = None
    best_m = math.inf
    second_m = math.inf
    for path in enumerate_paths(sgrid, tgrid.k, i_a, i_b, max_paths):
        m = path_winding(path, L, h, tgrid, sgrid)
        if m < best_m:
            second_m = best_m
            best_m = m
            best_path = path
        elif m < second_m:
            second_m = m
    return StationaryPathResult(tuple(best_path), best_m, second_m - best_m)


@dataclass(frozen=True)
class RateModel:
    """Constant time rate of change nu of the countable coordinate."""

    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise InvalidInputError(f"nu must be > 0, got {self.nu}")


def constant_rate_lagrangian(rate: RateModel, h: float) -> LagrangianModel:
    """L = h * nu: every step contributes nu * epsilon to the winding, so the
    winding of any path is nu * (t_b - t_a) and least winding means least
    elapsed time."""
    # broadcasts with the grid tables like the other models
    return LagrangianModel(
        f"constant-rate-{rate.nu}",
        lambda r, v, t: h * rate.nu * np.ones_like(np.asarray(r, dtype=float)),
    )


# ---------------------------------------------------------------------------
# phase concentration


def phase_concentration(
    L: LagrangianModel,
    tgrid: TimeGrid,
    sgrid: SpaceGrid,
    i_a: int,
    i_b: int,
    h_values: Sequence[float],
    delta: float = 0.5,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> list[dict]:
    """Fraction of the path sum carried by near-minimal paths, per h.

    For each h the ratio rho(h) = |sum of phases over paths with
    m <= m_min + delta| / |sum over all paths|. The action of each path is
    computed once; m scales as action / h.
    """
    if delta <= 0:
        raise InvalidInputError(f"delta must be > 0, got {delta}")
    from .paths import path_winding

    actions = np.array(
        [
            path_winding(p, L, 1.0, tgrid, sgrid)
            for p in enumerate_paths(sgrid, tgrid.k, i_a, i_b, max_paths)
        ]
    )
    s_min = float(actions.min())
    rows = []
    for h in h_values:
        if h <= 0:
            raise InvalidInputError(f"h must be > 0, got {h}")
        phases = np.exp(1j * TWO_PI * actions / h)
        in_window = actions <= s_min + delta * h
        total = phases.sum()
        window = phases[in_window].sum()
        rho = abs(window) / abs(total) if abs(total) > 0 else math.inf
        rows.append(
            {
                "h": h,
                "rho": float(rho),
                "m_min": s_min / h,
                "paths_in_window": int(in_window.sum()),
                "total_paths": int(actions.size),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# least time in a two-media plane


@dataclass(frozen=True)
class MediumProfile:
    """Two half-planes split by the interface y = 0: speed v_upper for y > 0,
    v_lower for y < 0."""

    v_upper: float
    v_lower: float

    def __post_init__(self):
        for v in (self.v_upper, self.v_lower):
            if not (v > 0 and math.isfinite(v)):
                raise InvalidInputError(f"speeds must be positive and finite, got {v}")


Point = tuple[float, float]


def fermat_travel_time(profile: MediumProfile, a: Point, b: Point, crossing: float) -> float:
    """Time along the two straight segments a -> (crossing, 0) -> b."""
    ax, ay = a
    bx, by = b
    seg1 = math.hypot(crossing - ax, ay)
    seg2 = math.hypot(bx - crossing, by)
    v1 = profile.v_upper if ay >= 0 else profile.v_lower
    v2 = profile.v_upper if by >= 0 else profile.v_lower
    return seg1 / v1 + seg2 / v2


def golden_section_minimize(f, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Argmin of a unimodal f on [lo, hi] to absolute tolerance tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def fermat_minimize(profile: MediumProfile, a: Point, b: Point) -> tuple[float, float]:
    """Least-time interface crossing and its travel time.

    Golden-section search on the crossing coordinate; the travel time is
    strictly convex in the crossing, and the minimizer lies between the feet
    of the two endpoints.
    """
    lo = min(a[0], b[0])
    hi = max(a[0], b[0])
    if hi - lo < 1e-12:
        lo -= 1e-6
        hi += 1e-6
    x_star = golden_section_minimize(lambda x: fermat_travel_time(profile, a, b, x), lo, hi)
    return x_star, fermat_travel_time(profile, a, b, x_star)


def fermat_grid_oracle(
    profile: MediumProfile, a: Point, b: Point, n_points: int = 1_000_000
) -> tuple[float, float]:
    """Dense grid search over the crossing; independent check of fermat_minimize."""
    lo = min(a[0], b[0])
    hi = max(a[0], b[0])
    if hi - lo < 1e-12:
        lo -= 1e-6
        hi += 1e-6
    xs = np.linspace(lo, hi, n_points)
    ax, ay = a
    bx, by = b
    t = np.hypot(xs - ax, ay) / profile.v_upper + np.hypot(bx - xs, by) / profile.v_lower
    j = int(np.argmin(t))
    return float(xs[j]), float(t[j])


def snell_ratio(a: Point, b: Point, crossing: float) -> float:
    """sin(theta_1) / sin(theta_2) at the crossing, angles from the normal."""
    ax, ay = a
    bx, by = b
    sin1 = (crossing - ax) / math.hypot(crossing - ax, ay)
    sin2 = (bx - crossing) / math.hypot(bx - crossing, by)
    if sin2 == 0.0:
        raise ZeroDivisionError("refracted ray is normal to the interface")
    return sin1 / sin2


def speed_bound_check(
    profile: MediumProfile,
    a: Point,
    b: Point,
    n_paths: int = 1000,
    seed: int = 0,
    tol: float = 1e-12,
) -> dict:
    """Least time lower-bounds every sampled two-segment crossing path.

    Equivalently: the least-time point's average speed upper-bounds the
    average speed of every sampled admissible path between the same points.
    """
    x_star, t_star = fermat_minimize(profile, a, b)
    rng = np.random.default_rng(seed)
    span = max(abs(a[0]), abs(b[0]), 1.0) * 4.0
    lo = min(a[0], b[0]) - span
    hi = max(a[0], b[0]) + span
    worst_margin = math.inf
    violations = 0
    for _ in range(n_paths):
        x = float(rng.uniform(lo, hi))
        t = fermat_travel_time(profile, a, b, x)
        margin = t - t_star
        worst_margin = min(worst_margin, margin)
        if t + tol < t_star:
            violations += 1
    dist = math.dist(a, b)
    return {
        "crossing": x_star,
        "time": t_star,
        "bound_speed": dist / t_star,
        "n_paths": n_paths,
        "violations": violations,
        "worst_margin": worst_margin,
    }
