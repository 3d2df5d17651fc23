"""Moment pipeline: normalization, diagonalization, anisotropy extraction."""

import math

import numpy as np
import pytest

from landau_hermite.basis import enumerate_basis
from landau_hermite.moments import (
    GaussianComponent,
    GaussianMixtureSpec,
    MomentState,
    admissible_delta,
    compute_alpha,
    diagonalize_second_moments,
    extract_moments,
    normalize_distribution,
    rotate_mixture,
    temperature_closed_form,
)


def _two_component_mixture():
    return GaussianMixtureSpec(
        [
            GaussianComponent(0.7, np.array([0.4, -0.1]), np.diag([1.5, 0.6])),
            GaussianComponent(0.5, np.array([-0.3, 0.2]), np.diag([0.8, 1.1])),
        ]
    )


def test_normalize_hits_unit_mass_zero_mean_energy_d():
    normalized, frame = normalize_distribution(_two_component_mixture())
    assert normalized.mass() == pytest.approx(1.0, abs=1e-14)
    assert np.abs(normalized.mean_velocity()).max() <= 1e-14
    assert np.trace(normalized.second_moment()) == pytest.approx(2.0, abs=1e-12)
    assert frame.dilation > 0


def test_normalize_frame_maps_back_to_original_moments():
    spec = _two_component_mixture()
    normalized, frame = normalize_distribution(spec)
    # v = dilation * w + translation, so the original mean velocity is recovered
    recovered_mean = frame.dilation * normalized.mean_velocity() + frame.translation
    np.testing.assert_allclose(recovered_mean, spec.mean_velocity(), atol=1e-14)
    # and the centered energy scales by dilation^2 (per unit mass)
    recovered_energy = frame.dilation**2 * normalized.centered_energy() * spec.mass()
    assert recovered_energy == pytest.approx(spec.centered_energy(), rel=1e-12)


def test_normalize_rejects_degenerate_input():
    with pytest.raises(ValueError):
        normalize_distribution(
            GaussianMixtureSpec([GaussianComponent(-1.0, np.zeros(2), np.eye(2))])
        )


def test_diagonalize_recovers_rotated_temperatures():
    theta = 0.6
    rot = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    )
    cov = rot @ np.diag([1.3, 0.7]) @ rot.T
    spec = GaussianMixtureSpec([GaussianComponent(1.0, np.zeros(2), cov)])
    rotation, t0 = diagonalize_second_moments(spec)
    np.testing.assert_allclose(t0, [1.3, 0.7], atol=1e-12)
    assert np.linalg.det(rotation) == pytest.approx(1.0, abs=1e-12)
    aligned = rotate_mixture(spec, rotation)
    second = aligned.second_moment()
    assert np.abs(second - np.diag(np.diag(second))).max() <= 1e-12
    np.testing.assert_allclose(np.diag(second), [1.3, 0.7], atol=1e-12)


def test_diagonalize_identity_on_already_diagonal_input():
    spec = GaussianMixtureSpec(
        [GaussianComponent(1.0, np.zeros(2), np.diag([1.2, 0.8]))]
    )
    rotation, t0 = diagonalize_second_moments(spec)
    assert np.array_equal(rotation, np.eye(2))
    np.testing.assert_allclose(t0, [1.2, 0.8])


def test_compute_alpha_reads_diagonal_level_two():
    basis = enumerate_basis(2, 4)
    g = 0.25 / math.sqrt(2) * basis.unit((2, 0)) - 0.25 / math.sqrt(2) * basis.unit(
        (0, 2)
    )
    alpha = compute_alpha(basis, g)
    np.testing.assert_allclose(alpha, [0.25, -0.25], atol=1e-14)


def test_extract_moments_defect_map():
    basis = enumerate_basis(2, 4)
    g = 0.2 * basis.unit((1, 0)) + 0.1 * basis.unit((0, 1))
    defects = extract_moments(basis, g)
    np.testing.assert_allclose(defects.momentum, [0.2, 0.1], atol=1e-14)
    assert defects.mass == 0.0
    assert defects.max_conservation_defect() == pytest.approx(0.2)
    zero = extract_moments(basis, np.zeros(basis.size))
    assert zero.max_conservation_defect() == 0.0


@pytest.mark.parametrize(
    "alpha,dimension,expected",
    [
        (np.array([0.1, -0.1]), 2, 0.891),
        (np.array([0.0, 0.0]), 2, 0.99),
        (np.array([0.5, -0.25, -0.25]), 3, 0.99),
        (np.array([1.0, -1.0]), 2, None),
    ],
)
def test_admissible_delta_rule(alpha, dimension, expected):
    delta = admissible_delta(alpha, dimension)
    if expected is None:
        assert delta is None
    else:
        assert delta == pytest.approx(expected, abs=1e-12)


def test_temperature_closed_form_frozen_values():
    t = temperature_closed_form(np.array([1.2, 0.8]), 2, 0.25)
    np.testing.assert_allclose(
        t, [1.0270670566473226, 0.9729329433526774], atol=1e-15
    )
    # equilibration: late times come back to unit temperature
    late = temperature_closed_form(np.array([1.2, 0.8]), 2, 50.0)
    np.testing.assert_allclose(late, [1.0, 1.0], atol=1e-14)


def test_moment_state_delta_override_validation():
    basis = enumerate_basis(2, 4)
    g = 0.1 / math.sqrt(2) * (basis.unit((2, 0)) - basis.unit((0, 2)))
    state = MomentState.from_coefficients(basis, g)
    assert state.delta == pytest.approx(0.891)
    with pytest.raises(ValueError):
        MomentState.from_coefficients(basis, g, delta_override=0.95)  # > 1 - sup|alpha|
    with pytest.raises(ValueError):
        MomentState.from_coefficients(basis, g, delta_override=1.5)
    pinned = MomentState.from_coefficients(basis, g, delta_override=0.5)
    assert pinned.delta == 0.5
