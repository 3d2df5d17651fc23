"""Reduced dynamics: assembly, right-hand side, integrator, exact semigroup."""

import math

import numpy as np
import pytest

from landau_hermite.basis import enumerate_basis
from landau_hermite.evolution import (
    IntegrationError,
    IntegratorConfig,
    assemble_reduced_system,
    exact_semigroup,
    integrate,
    reduced_rhs,
    spectral_radius_bound,
)
from landau_hermite.moments import compute_alpha


def _anisotropic_g0(basis, eps=0.1):
    g = np.zeros(basis.size)
    g[basis.index_of((2, 0))] = eps / math.sqrt(2)
    g[basis.index_of((0, 2))] = -eps / math.sqrt(2)
    return g


def test_assembly_rejects_unbalanced_anisotropies():
    basis = enumerate_basis(2, 6)
    with pytest.raises(ValueError):
        assemble_reduced_system(basis, np.array([0.1, 0.0]))
    assemble_reduced_system(basis, np.array([0.1, -0.1]))  # balanced: fine


def test_autonomous_part_eigenvalues_on_known_modes():
    # degree-2 off-diagonal harmonic decays at rate 4d - 2; the degree-3
    # spherical harmonic at rate 6d (computed from the generator's split into
    # radial and spherical parts)
    for d, rate11 in ((2, 6.0), (3, 10.0)):
        basis = enumerate_basis(d, 6)
        system = assemble_reduced_system(basis, np.zeros(d))
        mode = basis.unit((1, 1) if d == 2 else (0, 1, 1))
        rhs = reduced_rhs(system, 0.0, mode)
        np.testing.assert_allclose(rhs, -rate11 * mode, atol=1e-12)
    basis = enumerate_basis(2, 6)
    system = assemble_reduced_system(basis, np.zeros(2))
    ell3 = 0.5 * basis.unit((3, 0)) - math.sqrt(3.0) / 2.0 * basis.unit((1, 2))
    np.testing.assert_allclose(
        reduced_rhs(system, 0.0, ell3), -12.0 * ell3, atol=1e-12
    )


def test_rhs_drives_anisotropy_at_closed_form_rate():
    # with self-consistent data, d c_{2e_j} / dt at t = 0 must match the
    # derivative of alpha_j(t) / sqrt(2) = alpha_j(0) exp(-4 d t) / sqrt(2)
    basis = enumerate_basis(2, 8)
    g0 = _anisotropic_g0(basis, eps=0.1)
    alpha = compute_alpha(basis, g0)
    system = assemble_reduced_system(basis, alpha)
    rhs = reduced_rhs(system, 0.0, g0)
    expected = -4 * 2 * 0.1 / math.sqrt(2)  # -0.565685424949238
    assert rhs[basis.index_of((2, 0))] == pytest.approx(expected, abs=1e-12)
    assert rhs[basis.index_of((0, 2))] == pytest.approx(-expected, abs=1e-12)


def test_integrator_rejects_unstable_step():
    basis = enumerate_basis(2, 8)
    system = assemble_reduced_system(basis, np.zeros(2))
    lam = spectral_radius_bound(2, 8, 0.0)
    bad = IntegratorConfig(dt=3.0 / lam, t_final=30.0 / lam, output_every=1)
    with pytest.raises(IntegrationError):
        integrate(system, np.zeros(basis.size), bad)


def test_integrator_output_grid():
    basis = enumerate_basis(2, 6)
    system = assemble_reduced_system(basis, np.zeros(2))
    config = IntegratorConfig(dt=1e-2, t_final=0.5, output_every=10)
    trajectory = integrate(system, _anisotropic_g0(basis, 0.05), config)
    assert len(trajectory) == 6
    np.testing.assert_allclose(trajectory.times, np.arange(6) * 0.1, atol=1e-14)
    with pytest.raises(ValueError):
        integrate(system, np.zeros(3), config)
    with pytest.raises(ValueError):
        integrate(
            system,
            np.zeros(basis.size),
            IntegratorConfig(dt=1e-2, t_final=0.5, output_every=7),
        )


def test_integration_is_deterministic():
    basis = enumerate_basis(2, 8)
    g0 = _anisotropic_g0(basis)
    system = assemble_reduced_system(basis, compute_alpha(basis, g0))
    config = IntegratorConfig(dt=5e-3, t_final=0.5, output_every=20)
    a = integrate(system, g0, config)
    b = integrate(system, g0, config)
    assert np.array_equal(a.states, b.states)


def test_truncation_nesting_bitwise_on_low_modes():
    # the level-triangular structure makes coarse and fine truncations agree
    # exactly (not just approximately) on shared low modes
    coarse = enumerate_basis(2, 6)
    fine = enumerate_basis(2, 10)
    g_coarse = _anisotropic_g0(coarse)
    g_fine = _anisotropic_g0(fine)
    config = IntegratorConfig(dt=2e-3, t_final=0.2, output_every=20)
    run_c = integrate(
        assemble_reduced_system(coarse, compute_alpha(coarse, g_coarse)), g_coarse, config
    )
    run_f = integrate(
        assemble_reduced_system(fine, compute_alpha(fine, g_fine)), g_fine, config
    )
    probe_c = run_c.states[:, coarse.index_of((2, 0))]
    probe_f = run_f.states[:, fine.index_of((2, 0))]
    np.testing.assert_allclose(probe_c, probe_f, atol=1e-8)


def test_exact_semigroup_frozen_factors():
    basis = enumerate_basis(2, 4)
    g = basis.unit((1, 1))
    out = exact_semigroup(basis, g, 0.5, s=1.0)
    assert out[basis.index_of((1, 1))] == pytest.approx(0.22313016014842982, abs=1e-16)
    half = exact_semigroup(basis, g, 0.5, s=0.5)
    assert half[basis.index_of((1, 1))] == pytest.approx(0.4206200260541148, abs=1e-15)
    # t = 0 is the identity
    np.testing.assert_array_equal(exact_semigroup(basis, g, 0.0), g)
