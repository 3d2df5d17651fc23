"""Acceptance gate: the ten published criteria at their pinned parameters.

Each test runs one criterion, prints its pass/fail line (visible with
``pytest -s`` or in failure reports), and asserts the verdict.  The criteria
share a module-scoped cache, so expensive runs are computed once.
"""

import pytest

from landau_hermite import verify


@pytest.fixture(scope="module")
def cache():
    return {}


def _check(cache, func):
    result = verify._criterion_result(cache, func)
    print(
        f"{result.name}: {result.status} "
        f"(measured {result.measured:.6g} {result.comparator} {result.tolerance:.6g}; "
        f"{result.detail})"
    )
    assert result.passed, f"{result.name}: {result.detail}"


def test_criterion_01_kernel_dimension(cache):
    _check(cache, verify.criterion_01_kernel_dimension)


def test_criterion_02_positivity(cache):
    _check(cache, verify.criterion_02_positivity)


def test_criterion_03_explicit_spectrum(cache):
    _check(cache, verify.criterion_03_explicit_spectrum)


def test_criterion_04_spherical_routes(cache):
    _check(cache, verify.criterion_04_spherical_routes)


def test_criterion_05_moment_law(cache):
    _check(cache, verify.criterion_05_moment_law)


def test_criterion_06_conservation(cache):
    _check(cache, verify.criterion_06_conservation)


def test_criterion_07_gronwall(cache):
    _check(cache, verify.criterion_07_gronwall)


def test_criterion_08_eigenmode_order(cache):
    _check(cache, verify.criterion_08_eigenmode_order)


def test_criterion_09_oracle_equivalence(cache):
    _check(cache, verify.criterion_09_oracle_equivalence)


def test_criterion_10_smoothing_slope(cache):
    _check(cache, verify.criterion_10_smoothing_slope)
