import cmath
import math
import time

import numpy as np
import pytest

from windlab.errors import CapacityError, InvalidInputError
from windlab.paths import SpaceGrid, TimeGrid, free_particle, harmonic_oscillator
from windlab.propagator import (
    analytic_free_particle,
    enumerate_paths,
    per_step_normalization,
    propagator_bruteforce,
    propagator_transfer,
    transfer_matrix,
)


def test_enumerate_one_interior_slice():
    sg = SpaceGrid(0.0, 1.0, 3)
    paths = list(enumerate_paths(sg, 2, 0, 2))
    assert len(paths) == 3
    assert paths == [(0, 0, 2), (0, 1, 2), (0, 2, 2)]


def test_enumerate_no_interior():
    sg = SpaceGrid(0.0, 1.0, 5)
    assert list(enumerate_paths(sg, 1, 1, 3)) == [(1, 3)]


def test_enumerate_count_and_uniqueness():
    sg = SpaceGrid(0.0, 1.0, 4)
    paths = list(enumerate_paths(sg, 4, 0, 3))
    assert len(paths) == 4**3 == 64
    assert len(set(paths)) == 64


def test_enumerate_budget():
    sg = SpaceGrid(0.0, 1.0, 9)
    with pytest.raises(CapacityError):
        list(enumerate_paths(sg, 10, 0, 8, max_paths=1000))


def test_single_step_closed_form():
    L = free_particle(1.0)
    h = 2 * math.pi
    tg = TimeGrid(0.0, 1.0, 1)
    sg = SpaceGrid(0.0, 1.0, 2)
    res = propagator_bruteforce(0, 1, tg, sg, L, h)
    N = per_step_normalization(L, h, 1.0)
    # one path 0 -> 1: m = (1)^2/(2*h)... with hbar = h/2pi the step phase is
    # exp(i * S / hbar), S = 0.5
    expected = N * cmath.exp(1j * 0.5)
    assert res.kernel == pytest.approx(expected, abs=1e-14)
    assert res.paths_summed == 1
    # and the single-step lattice kernel is the analytic kernel exactly
    assert res.kernel == pytest.approx(analytic_free_particle(0, 1, 1, 1, 1), abs=1e-14)


def test_bruteforce_vs_transfer_free():
    L = free_particle(1.0)
    sg = SpaceGrid(-2.0, 2.0, 7)
    tg = TimeGrid(0.0, 1.0, 4)
    bf = propagator_bruteforce(2, 4, tg, sg, L, 1.0).kernel
    tr = propagator_transfer(2, 4, tg, sg, L, 1.0).kernel
    assert bf.real == pytest.approx(tr.real, abs=1e-10)
    assert bf.imag == pytest.approx(tr.imag, abs=1e-10)


def test_bruteforce_vs_transfer_seeded_family():
    rng = np.random.default_rng(314)
    for i in range(20):
        m_sites = int(rng.integers(3, 10))
        k = int(rng.integers(1, 6))
        L = free_particle(float(rng.uniform(0.5, 2.0))) if i % 2 == 0 else harmonic_oscillator(
            float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0))
        )
        sg = SpaceGrid(-2.0, 2.0, m_sites)
        tg = TimeGrid(0.0, float(rng.uniform(0.5, 2.0)), k)
        i_a = int(rng.integers(0, m_sites))
        i_b = int(rng.integers(0, m_sites))
        h = float(rng.uniform(0.5, 4.0))
        bf = propagator_bruteforce(i_a, i_b, tg, sg, L, h).kernel
        tr = propagator_transfer(i_a, i_b, tg, sg, L, h).kernel
        scale = max(1.0, abs(bf))
        assert abs(bf - tr) / scale < 1e-10


def test_constant_lagrangian_shift_is_pure_phase():
    L = free_particle(1.0)
    c = 0.37
    sg = SpaceGrid(-2.0, 2.0, 7)
    tg = TimeGrid(0.0, 1.0, 4)
    h = 1.3
    k0 = propagator_bruteforce(2, 5, tg, sg, L, h).kernel
    k1 = propagator_bruteforce(2, 5, tg, sg, L.shifted(c), h).kernel
    T = tg.t_b - tg.t_a
    assert abs(k1) == pytest.approx(abs(k0), abs=1e-12)
    expected = k0 * cmath.exp(1j * 2 * math.pi * c * T / h)
    assert k1 == pytest.approx(expected, abs=1e-12)


def test_h_scaling_invariance_exact():
    # (L, h) and (L/s, h/s) leave every step increment, and the kernel, unchanged
    L = free_particle(2.0)
    s = 4.0
    sg = SpaceGrid(-1.5, 1.5, 5)
    tg = TimeGrid(0.0, 1.0, 3)
    k_ref = propagator_transfer(1, 3, tg, sg, L, 2.0).kernel
    k_scaled = propagator_transfer(1, 3, tg, sg, L.scaled(1 / s), 2.0 / s).kernel
    assert k_scaled == pytest.approx(k_ref, rel=1e-12)


def test_chapman_kolmogorov_composition():
    L = free_particle(1.0)
    h = 2 * math.pi
    sg = SpaceGrid(-4.0, 4.0, 41)
    k1, k2 = 3, 5
    eps = 0.1
    tg_full = TimeGrid(0.0, eps * (k1 + k2), k1 + k2)
    tg_a = TimeGrid(0.0, eps * k1, k1)
    tg_b = TimeGrid(eps * k1, eps * (k1 + k2), k2)
    i_a, i_b = 15, 28
    full = propagator_transfer(i_a, i_b, tg_full, sg, L, h).kernel
    composed = 0.0 + 0.0j
    for c in range(sg.m_sites):
        composed += (
            propagator_transfer(c, i_b, tg_b, sg, L, h).kernel
            * propagator_transfer(i_a, c, tg_a, sg, L, h).kernel
            * sg.delta_r
        )
    assert composed == pytest.approx(full, rel=1e-12)


def test_transfer_matrix_entry_modulus():
    L = free_particle(1.0)
    tg = TimeGrid(0.0, 1.0, 4)
    sg = SpaceGrid(-2.0, 2.0, 7)
    T = transfer_matrix(L, 1.0, tg, sg)
    N = per_step_normalization(L, 1.0, tg.epsilon)
    assert np.allclose(np.abs(T), abs(N) * sg.delta_r)


def test_raw_normalization_mode():
    L = free_particle(1.0)
    tg = TimeGrid(0.0, 1.0, 2)
    sg = SpaceGrid(-1.0, 1.0, 3)
    res = propagator_bruteforce(0, 2, tg, sg, L, 1.0, norm="raw")
    assert res.normalization_per_step == 1.0 + 0.0j


def test_analytic_free_particle_modulus_and_phase():
    K = analytic_free_particle(0.3, 1.7, 2.0, 1.5, 1.0)
    assert abs(K) == pytest.approx(math.sqrt(1.5 / (2 * math.pi * 2.0)), rel=1e-14)
    # at a=b only the 1/sqrt(i) factor contributes: phase -pi/4
    K0 = analytic_free_particle(0.5, 0.5, 1.0, 1.0, 1.0)
    assert cmath.phase(K0) == pytest.approx(-math.pi / 4, abs=1e-14)


def test_analytic_free_particle_rejects_bad_inputs():
    for bad in [(0, 1, -1, 1, 1), (0, 1, 1, 0, 1), (0, 1, 1, 1, -2)]:
        with pytest.raises(InvalidInputError):
            analytic_free_particle(bad[0], bad[1], bad[2], bad[3], bad[4])


def test_transfer_dense_benchmark():
    # performance regression value: dense route, 401 sites x 256 steps
    L = harmonic_oscillator(1.0, 1.0)
    sg = SpaceGrid(-8.0, 9.0, 401)
    tg = TimeGrid(0.0, 1.0, 256)
    t0 = time.perf_counter()
    propagator_transfer(200, 224, tg, sg, L, 2 * math.pi)
    elapsed = time.perf_counter() - t0
    print(f"dense transfer 401x256: {elapsed:.2f} s")
    assert elapsed < 60.0
