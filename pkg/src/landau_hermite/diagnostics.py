"""Weighted norms, the Gronwall envelope, and smoothing diagnostics.

The certified quantity is the exponentially weighted norm

    ||exp(t delta H) g|| = sqrt( sum_k exp(delta (2k + d) t) ||P_k g||^2 ),

which the reduced flow keeps below the explicit envelope

    sqrt( exp(2 d (d-1) t) ||g_0||^2 + (9/2) (exp(2 d (d-1) t) - 1) )

whenever sup_j |alpha_j| <= d - 1 - delta.  Ultra-analytic smoothing shows up
as geometric decay of the level norms; fit_level_decay measures the log-slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from landau_hermite.basis import BasisTruncation
from landau_hermite.evolution import Trajectory
from landau_hermite.moments import MomentState

__all__ = [
    "WeightedNormReport",
    "DecayFit",
    "weighted_norm",
    "gronwall_envelope",
    "certify_run",
    "fit_level_decay",
]

# Above this exponent the naive weight overflows double precision even though
# the weighted norm itself may be tiny; switch to log-sum-exp.
_EXP_GUARD = 600.0


def weighted_norm(basis: BasisTruncation, coeffs: np.ndarray, t: float, delta: float) -> float:
    """||exp(t delta H) g|| from the level norms of g."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    norms = basis.level_norms(coeffs)
    d = basis.dimension
    exponents = np.array([delta * (2 * k + d) * t for k in range(basis.max_degree + 1)])
    if exponents.max() <= _EXP_GUARD:
        return math.sqrt(float(np.sum(np.exp(exponents) * norms**2)))
    # log-sum-exp over levels with nonzero norm
    mask = norms > 0.0
    if not mask.any():
        return 0.0
    logs = exponents[mask] + 2.0 * np.log(norms[mask])
    m = logs.max()
    return math.exp(0.5 * (m + math.log(float(np.sum(np.exp(logs - m))))))


def gronwall_envelope(g0_norm: float, dimension: int, t) -> np.ndarray | float:
    """Certified envelope sqrt(e^{2d(d-1)t} g0^2 + 4.5 (e^{2d(d-1)t} - 1))."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be nonnegative")
    growth = np.exp(2.0 * dimension * (dimension - 1) * t)
    out = np.sqrt(growth * g0_norm**2 + 4.5 * (growth - 1.0))
    return float(out) if out.ndim == 0 else out


@dataclass
class WeightedNormReport:
    t: float
    delta: float
    value: float
    bound: float
    margin: float  # bound - value
    certified: bool  # margin >= -slack
    level_norms: np.ndarray


def certify_run(
    basis: BasisTruncation,
    trajectory: Trajectory,
    state: MomentState,
    slack: float = 1e-8,
) -> list[WeightedNormReport]:
    """Check the weighted norm against the envelope at every sampled time.

    Refuses inadmissible setups (state.delta is None): the envelope is only
    proved for sup|alpha| <= d - 1 - delta with delta in (0, 1].
    """
    if state.delta is None:
        raise ValueError(
            "certification refused: no admissible delta (sup|alpha| >= d - 1); "
            "the run is dynamics-only"
        )
    delta = state.delta
    d = basis.dimension
    g0_norm = float(np.linalg.norm(trajectory.states[0]))
    reports = []
    for t, coeffs in trajectory:
        value = weighted_norm(basis, coeffs, float(t), delta)
        bound = float(gronwall_envelope(g0_norm, d, float(t)))
        margin = bound - value
        reports.append(
            WeightedNormReport(
                t=float(t),
                delta=delta,
                value=value,
                bound=bound,
                margin=margin,
                certified=margin >= -slack,
                level_norms=basis.level_norms(coeffs),
            )
        )
    return reports


@dataclass
class DecayFit:
    slope: float
    intercept: float
    residual: float
    levels: np.ndarray
    log_norms: np.ndarray


def fit_level_decay(
    basis: BasisTruncation,
    coeffs: np.ndarray,
    window: tuple[int, int] | None = None,
) -> DecayFit:
    """Least-squares slope of log ||P_k g|| against k.

    The window defaults to [2, N-2], dropping the constraint-dominated bottom
    levels and the truncation-polluted top.  Levels with zero norm are skipped;
    fewer than 4 usable levels is an error (no meaningful fit).
    """
    if window is None:
        window = (2, basis.max_degree - 2)
    lo, hi = window
    if not (0 <= lo <= hi <= basis.max_degree):
        raise ValueError(f"window {window} outside [0, {basis.max_degree}]")
    norms = basis.level_norms(coeffs)
    ks, logs = [], []
    for k in range(lo, hi + 1):
        if norms[k] > 1e-300:
            ks.append(float(k))
            logs.append(math.log(norms[k]))
    if len(ks) < 4:
        raise ValueError(
            f"level-decay fit needs at least 4 nonzero levels in window {window}, got {len(ks)}"
        )
    ks_arr = np.array(ks)
    logs_arr = np.array(logs)
    design = np.column_stack([ks_arr, np.ones_like(ks_arr)])
    (slope, intercept), *_ = np.linalg.lstsq(design, logs_arr, rcond=None)
    fitted = slope * ks_arr + intercept
    residual = math.sqrt(float(np.mean((fitted - logs_arr) ** 2)))
    return DecayFit(
        slope=float(slope),
        intercept=float(intercept),
        residual=residual,
        levels=ks_arr,
        log_norms=logs_arr,
    )
