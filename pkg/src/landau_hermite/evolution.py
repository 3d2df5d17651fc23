"""Time integration of the reduced fluctuation equation.

Near equilibrium, with diagonal second moments and trace excess zero, the
fluctuation g of f = mu + sqrt(mu) g obeys the closed non-autonomous system

    dg/dt = -[(d-1)(H - d/2) - D_S] g
            - e^{-4 d t} sum_j alpha_j [ (A_{+,j})^2 g + v_j^2 sqrt(mu) ],

where H is the harmonic oscillator, D_S the spherical Laplacian, and
alpha_j = T_j(0) - 1 the initial diagonal temperature excesses.  In
coefficients, v_j^2 sqrt(mu) = sqrt(2) Psi_{2 e_j} + Psi_0, and the Psi_0
contributions cancel exactly because sum_j alpha_j = 0; only the sqrt(2)
injections at 2 e_j remain.  The autonomous part preserves degree and the
inflow raises it by two, so the truncated system is exactly the equation
satisfied by the degree-<=N projection of the untruncated solution.

The integrator is the classical fixed-step fourth-order Runge-Kutta scheme
with a hard stability cap on the step size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from landau_hermite.basis import BasisTruncation
from landau_hermite.operators import (
    SparseOperator,
    build_harmonic,
    build_ladder,
    build_laplace_beltrami,
)

__all__ = [
    "IntegrationError",
    "ReducedSystem",
    "IntegratorConfig",
    "Trajectory",
    "assemble_reduced_system",
    "reduced_rhs",
    "integrate",
    "exact_semigroup",
    "spectral_radius_bound",
]


class IntegrationError(RuntimeError):
    """Numerical abort: non-finite state or violated stability cap."""


@dataclass
class ReducedSystem:
    """Assembled right-hand side of the reduced fluctuation equation."""

    basis: BasisTruncation
    linear: SparseOperator
    inflow: list[SparseOperator]
    alpha: np.ndarray
    source: np.ndarray
    decay_rate: float
    combined_inflow: sp.csr_matrix = field(repr=False, default=None)


def assemble_reduced_system(basis: BasisTruncation, alpha: np.ndarray) -> ReducedSystem:
    """Build the reduced system for the given temperature excesses.

    Requires max_degree >= 3 so the inflow out of level 2 is representable, and
    |sum alpha_j| <= 1e-8 (the source cancellation at Psi_0 is exact only for
    trace-free excess).
    """
    if basis.max_degree < 3:
        raise ValueError(f"dynamics need max_degree >= 3, got {basis.max_degree}")
    d = basis.dimension
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (d,):
        raise ValueError(f"alpha has shape {alpha.shape}, expected ({d},)")
    if abs(alpha.sum()) > 1e-8:
        raise ValueError(
            f"sum of alpha must vanish (normalized moments), got {alpha.sum():.3e}"
        )
    ident = sp.identity(basis.size, format="csr")
    shifted = build_harmonic(basis).matrix - (d / 2.0) * ident
    autonomous = (d - 1) * shifted - build_laplace_beltrami(basis).matrix
    autonomous.eliminate_zeros()
    linear = SparseOperator(basis, autonomous, symmetric=True, name="reduced_autonomous")
    inflow = []
    for j in range(d):
        ap = build_ladder(basis, j, "+").matrix
        mat = ap @ ap
        mat.eliminate_zeros()
        inflow.append(SparseOperator(basis, mat, symmetric=False, name=f"inflow{j}"))
    source = np.zeros(basis.size)
    for j in range(d):
        two_e_j = tuple(2 if i == j else 0 for i in range(d))
        source[basis.index_of(two_e_j)] = -math.sqrt(2.0) * alpha[j]
    combined = sum(alpha[j] * inflow[j].matrix for j in range(d))
    combined = sp.csr_matrix(combined)
    return ReducedSystem(
        basis=basis,
        linear=linear,
        inflow=inflow,
        alpha=alpha,
        source=source,
        decay_rate=4.0 * d,
        combined_inflow=combined,
    )


def reduced_rhs(system: ReducedSystem, t: float, coeffs: np.ndarray) -> np.ndarray:
    """dg/dt at time t for coefficient state coeffs."""
    w = math.exp(-system.decay_rate * t)
    return -(system.linear.matrix @ coeffs) - w * (system.combined_inflow @ coeffs) + w * system.source


def spectral_radius_bound(dimension: int, max_degree: int, sup_alpha: float) -> float:
    """Bound on the stiffest eigenvalue of the truncated right-hand side."""
    n = max_degree
    d = dimension
    return (
        (d - 1) * n
        + n * (n + d - 2)
        + 4.0 * d * sup_alpha * math.sqrt((n + 1) * (n + 2))
    )


@dataclass
class IntegratorConfig:
    dt: float
    t_final: float
    output_every: int = 1
    safety: float = 2.5

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_final <= 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.output_every < 1:
            raise ValueError(f"output_every must be >= 1, got {self.output_every}")

    def step_count(self) -> int:
        n = round(self.t_final / self.dt)
        if n < 1 or abs(n * self.dt - self.t_final) > 0.5 * self.dt:
            raise ValueError(
                f"t_final = {self.t_final} is not within dt/2 of a multiple of dt = {self.dt}"
            )
        return n


@dataclass
class Trajectory:
    """Sampled states: times[i] pairs with states[i] (one row per sample)."""

    times: np.ndarray
    states: np.ndarray

    def __iter__(self):
        return iter(zip(self.times, self.states))

    def __len__(self):
        return len(self.times)


def integrate(system: ReducedSystem, g0: np.ndarray, config: IntegratorConfig) -> Trajectory:
    """Advance the reduced system with classical RK4 at a fixed step.

    The step must satisfy dt <= safety / lambda_max with the assembled spectral
    radius bound; violations raise IntegrationError before any stepping.  The
    state is checked for finiteness every step and the trajectory is sampled
    every output_every steps (t = 0 included).
    """
    g0 = np.asarray(g0, dtype=float)
    if g0.shape != (system.basis.size,):
        raise ValueError(f"initial state has shape {g0.shape}, expected ({system.basis.size},)")
    nsteps = config.step_count()
    if nsteps % config.output_every != 0:
        raise ValueError(
            f"output_every = {config.output_every} does not divide the step count {nsteps}"
        )
    lam = spectral_radius_bound(
        system.basis.dimension, system.basis.max_degree, float(np.abs(system.alpha).max())
    )
    if config.dt > config.safety / lam:
        raise IntegrationError(
            f"dt = {config.dt} exceeds the stability cap {config.safety / lam:.6g} "
            f"(spectral radius bound {lam:.6g})"
        )
    dt = config.dt
    c = g0.copy()
    times = [0.0]
    states = [c.copy()]
    for step in range(nsteps):
        t = step * dt
        k1 = reduced_rhs(system, t, c)
        k2 = reduced_rhs(system, t + 0.5 * dt, c + 0.5 * dt * k1)
        k3 = reduced_rhs(system, t + 0.5 * dt, c + 0.5 * dt * k2)
        k4 = reduced_rhs(system, t + dt, c + dt * k3)
        c = c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(c)):
            raise IntegrationError(f"non-finite state at step {step + 1} (t = {(step + 1) * dt:.6g})")
        if (step + 1) % config.output_every == 0:
            times.append((step + 1) * dt)
            states.append(c.copy())
    return Trajectory(times=np.array(times), states=np.array(states))


def exact_semigroup(basis: BasisTruncation, coeffs: np.ndarray, t: float, s: float = 1.0) -> np.ndarray:
    """Apply exp(-t H^s) exactly on coefficients: factor exp(-t (d/2 + k)^s) per level.

    s = 1 is the harmonic-oscillator semigroup; s = 1/2 matches the
    Gelfand-Shilov smoothing scale of the flow.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if not 0.0 < s <= 1.0:
        raise ValueError(f"fractional order s must lie in (0, 1], got {s}")
    coeffs = np.asarray(coeffs, dtype=float)
    out = coeffs.copy()
    half_d = basis.dimension / 2.0
    for k in range(basis.max_degree + 1):
        out[basis.level_slice(k)] *= math.exp(-t * (half_d + k) ** s)
    return out
