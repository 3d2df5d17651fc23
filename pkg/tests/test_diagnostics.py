"""Diagnostics: weighted norms, certified envelope, level-decay fits."""

import math

import numpy as np
import pytest

from landau_hermite.basis import enumerate_basis
from landau_hermite.diagnostics import (
    certify_run,
    fit_level_decay,
    gronwall_envelope,
    weighted_norm,
)
from landau_hermite.evolution import Trajectory, exact_semigroup
from landau_hermite.moments import MomentState


def test_weighted_norm_reduces_to_l2_at_time_zero():
    rng = np.random.default_rng(3)
    basis = enumerate_basis(2, 8)
    g = rng.normal(size=basis.size)
    assert weighted_norm(basis, g, 0.0, 0.7) == pytest.approx(
        float(np.linalg.norm(g)), rel=1e-14
    )


def test_weighted_norm_monotone_and_homogeneous():
    rng = np.random.default_rng(4)
    basis = enumerate_basis(2, 8)
    g = rng.normal(size=basis.size)
    values = [weighted_norm(basis, g, t, 0.5) for t in (0.0, 0.5, 1.0, 2.0)]
    assert all(a < b for a, b in zip(values, values[1:]))
    deltas = [weighted_norm(basis, g, 1.0, d) for d in (0.25, 0.5, 0.99)]
    assert all(a < b for a, b in zip(deltas, deltas[1:]))
    assert weighted_norm(basis, 2.0 * g, 1.0, 0.5) == pytest.approx(
        2.0 * weighted_norm(basis, g, 1.0, 0.5), rel=1e-14
    )


def test_gronwall_envelope_frozen_value():
    assert gronwall_envelope(0.3, 2, 0.0) == pytest.approx(0.3, abs=1e-15)
    assert gronwall_envelope(0.3, 2, 0.25) == pytest.approx(
        2.824343037349928, abs=1e-12
    )
    # vectorized over time
    env = gronwall_envelope(0.3, 2, np.array([0.0, 0.25]))
    np.testing.assert_allclose(env, [0.3, 2.824343037349928], atol=1e-12)


def test_certify_run_accepts_contractive_flow():
    basis = enumerate_basis(2, 10)
    rng = np.random.default_rng(11)
    g0 = rng.normal(size=basis.size) * 0.05
    # strip constraint modes so the data is admissible near equilibrium
    g0[basis.index_of((0, 0))] = 0.0
    g0[basis.index_of((1, 0))] = 0.0
    g0[basis.index_of((0, 1))] = 0.0
    g0[basis.index_of((1, 1))] = 0.0
    trace = g0[basis.index_of((2, 0))] + g0[basis.index_of((0, 2))]
    g0[basis.index_of((2, 0))] -= 0.5 * trace
    g0[basis.index_of((0, 2))] -= 0.5 * trace
    state = MomentState.from_coefficients(basis, g0)
    times = [0.0, 0.25, 0.5]
    states = np.array([exact_semigroup(basis, g0, t) for t in times])
    reports = certify_run(basis, Trajectory(np.array(times), states), state)
    assert all(r.certified for r in reports)
    assert reports[0].value <= reports[0].bound + 1e-12


def test_certify_run_refuses_inadmissible_state():
    basis = enumerate_basis(2, 6)
    g0 = np.zeros(basis.size)
    g0[basis.index_of((2, 0))] = 1.5 / math.sqrt(2)
    g0[basis.index_of((0, 2))] = -1.5 / math.sqrt(2)
    state = MomentState.from_coefficients(basis, g0)
    assert state.delta is None
    trajectory = Trajectory(np.array([0.0]), np.array([g0]))
    with pytest.raises(ValueError):
        certify_run(basis, trajectory, state)


def test_fit_level_decay_recovers_synthetic_slope():
    basis = enumerate_basis(2, 12)
    g = np.zeros(basis.size)
    for k in range(basis.max_degree + 1):
        s = basis.level_slice(k)
        width = s.stop - s.start
        # distribute the level mass evenly so ||P_k g|| = exp(-1.3 k)
        g[s] = math.exp(-1.3 * k) / math.sqrt(width)
    fit = fit_level_decay(basis, g)
    assert fit.slope == pytest.approx(-1.3, abs=1e-12)
    assert fit.residual <= 1e-12
    narrow = fit_level_decay(basis, g, window=(3, 9))
    assert narrow.slope == pytest.approx(-1.3, abs=1e-12)


def test_fit_level_decay_refuses_sparse_data():
    basis = enumerate_basis(2, 12)
    g = basis.unit((2, 0))
    with pytest.raises(ValueError):
        fit_level_decay(basis, g)
    with pytest.raises(ValueError):
        fit_level_decay(basis, g, window=(0, 20))
