"""Quadrature oracle: direct evaluation of the collision operator.

This module is the independent route against which the spectral assembly is
checked.  It never touches the ladder matrices: Hermite functions and their
derivatives are evaluated pointwise through the three-term recurrences

    psi_{n+1} = (x psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1)
    psi_n'    = (sqrt(n) psi_{n-1} - sqrt(n+1) psi_{n+1}) / 2
    psi_n''   = (sqrt(n(n-1)) psi_{n-2} - (2n+1) psi_n
                 + sqrt((n+1)(n+2)) psi_{n+2}) / 4

and integrals use tensor Gauss-Hermite quadrature with weight exp(-|v|^2/2)
(every integrand here pairs two exp(-|v|^2/4) factors, so band-limited
integrands are integrated exactly).

The Maxwellian-molecule collision operator

    Q(f, f) = div_v int a(v - w) [ f(w) grad f(v) - grad f(w) f(v) ] dw,
    a(z) = |z|^2 Id - z (x) z,

is evaluated by expanding a(v - w) in powers of v: the w-integrals reduce to
moments of f and grad f against {1, w, |w|^2, w (x) w}, computed once by
quadrature; the outer divergence is then applied analytically via the product
rule.  No numerical differentiation anywhere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.hermite_e as hermite_e

from landau_hermite.basis import BasisTruncation
from landau_hermite.moments import GaussianMixtureSpec

__all__ = [
    "AliasingWarning",
    "OracleConvergenceError",
    "QuadratureGrid",
    "CollisionKernelSpec",
    "hermite_function_tables",
    "synthesize",
    "evaluate_with_derivatives",
    "MixtureDensity",
    "FluctuationDensity",
    "maxwellian",
    "sqrt_maxwellian",
    "hermite_transform",
    "eval_collision_direct",
    "eval_reduced_rhs_grid",
    "compare_spectral_vs_direct",
    "OracleComparison",
]


class AliasingWarning(UserWarning):
    """Transform input carries non-negligible energy at the top degree level."""


class OracleConvergenceError(RuntimeError):
    """Quadrature did not converge (node-count refinement moved the answer)."""


def hermite_function_tables(n_max: int, x: np.ndarray, derivatives: int = 0):
    """psi_n and requested derivatives at the points x, each shape (n_max+1, len(x)).

    Returns [values], [values, d1], or [values, d1, d2].
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if derivatives not in (0, 1, 2):
        raise ValueError("derivatives must be 0, 1, or 2")
    x = np.asarray(x, dtype=float)
    top = n_max + derivatives
    vals = np.empty((top + 1, x.size))
    vals[0] = (2.0 * math.pi) ** (-0.25) * np.exp(-0.25 * x * x)
    if top >= 1:
        vals[1] = x * vals[0]
    for n in range(1, top):
        vals[n + 1] = (x * vals[n] - math.sqrt(n) * vals[n - 1]) / math.sqrt(n + 1)
    out = [vals[: n_max + 1]]
    if derivatives >= 1:
        d1 = np.empty((n_max + 1, x.size))
        for n in range(n_max + 1):
            lower = vals[n - 1] if n >= 1 else 0.0
            d1[n] = 0.5 * (math.sqrt(n) * lower - math.sqrt(n + 1) * vals[n + 1])
        out.append(d1)
    if derivatives == 2:
        d2 = np.empty((n_max + 1, x.size))
        for n in range(n_max + 1):
            lower2 = vals[n - 2] if n >= 2 else 0.0
            d2[n] = 0.25 * (
                math.sqrt(n * (n - 1)) * lower2
                - (2 * n + 1) * vals[n]
                + math.sqrt((n + 1) * (n + 2)) * vals[n + 2]
            )
        out.append(d2)
    return out


def maxwellian(points: np.ndarray) -> np.ndarray:
    """Standard Maxwellian mu(v) = (2 pi)^(-d/2) exp(-|v|^2/2)."""
    points = np.atleast_2d(points)
    d = points.shape[1]
    return (2.0 * math.pi) ** (-d / 2.0) * np.exp(-0.5 * np.sum(points**2, axis=1))


def sqrt_maxwellian(points: np.ndarray) -> np.ndarray:
    """Psi_0(v) = mu(v)^{1/2} = (2 pi)^(-d/4) exp(-|v|^2/4)."""
    points = np.atleast_2d(points)
    d = points.shape[1]
    return (2.0 * math.pi) ** (-d / 4.0) * np.exp(-0.25 * np.sum(points**2, axis=1))


class QuadratureGrid:
    """Tensor Gauss-Hermite rule adapted to the Hermite-function weight.

    Per axis the probabilists' rule is used: sum_q weights[q] p(nodes[q]) equals
    int p(x) exp(-x^2/2) dx exactly for polynomials of degree <= 2Q - 1.  The
    tensor attributes are

        points         (Q^d, d) nodes
        weights        weights for integrands given WITHOUT the Gaussian factor
        plain_weights  weights for raw integrands (their own decay included),
                       i.e. weights * exp(+|v|^2/2)
    """

    def __init__(self, dimension: int, nodes_per_axis: int):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        if nodes_per_axis < 1:
            raise ValueError("nodes_per_axis must be >= 1")
        self.dimension = dimension
        self.nodes_per_axis = nodes_per_axis
        x, w = hermite_e.hermegauss(nodes_per_axis)
        self.axis_nodes = x
        self.axis_weights = w
        w_plain = w * np.exp(0.5 * x * x)
        grids = np.meshgrid(*([x] * dimension), indexing="ij")
        self.points = np.column_stack([g.ravel() for g in grids])
        wg = np.meshgrid(*([w] * dimension), indexing="ij")
        self.weights = np.prod(np.stack([g.ravel() for g in wg]), axis=0)
        wpg = np.meshgrid(*([w_plain] * dimension), indexing="ij")
        self.plain_weights = np.prod(np.stack([g.ravel() for g in wpg]), axis=0)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def integrate(self, values: np.ndarray) -> float:
        """Integral of raw point values (integrand supplies its own decay)."""
        return float(self.plain_weights @ np.asarray(values, dtype=float))


def _axis_tables(basis: BasisTruncation, points: np.ndarray, derivatives: int):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != basis.dimension:
        raise ValueError(f"points have dimension {points.shape[1]}, basis has {basis.dimension}")
    tables = [
        hermite_function_tables(basis.max_degree, points[:, ax], derivatives)
        for ax in range(basis.dimension)
    ]
    return points, tables


def synthesize(basis: BasisTruncation, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Pointwise values of g = sum_alpha c_alpha Psi_alpha."""
    coeffs = np.asarray(coeffs, dtype=float)
    points, tables = _axis_tables(basis, points, derivatives=0)
    out = np.zeros(points.shape[0])
    for pos in np.nonzero(coeffs)[0]:
        alpha = basis.ordering[pos]
        term = coeffs[pos] * tables[0][0][alpha[0]]
        for ax in range(1, basis.dimension):
            term = term * tables[ax][0][alpha[ax]]
        out += term
    return out


def evaluate_with_derivatives(basis: BasisTruncation, coeffs: np.ndarray, points: np.ndarray):
    """Values, gradients, and Hessians of a coefficient field at the points.

    Returns (val (P,), grad (P, d), hess (P, d, d)).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    points, tables = _axis_tables(basis, points, derivatives=2)
    n_pts, d = points.shape
    val = np.zeros(n_pts)
    grad = np.zeros((n_pts, d))
    hess = np.zeros((n_pts, d, d))
    for pos in np.nonzero(coeffs)[0]:
        alpha = basis.ordering[pos]
        c = coeffs[pos]
        axis_vals = [tables[ax][0][alpha[ax]] for ax in range(d)]
        axis_d1 = [tables[ax][1][alpha[ax]] for ax in range(d)]
        axis_d2 = [tables[ax][2][alpha[ax]] for ax in range(d)]
        full = c * np.prod(axis_vals, axis=0)
        val += full
        for j in range(d):
            term = c * axis_d1[j]
            for ax in range(d):
                if ax != j:
                    term = term * axis_vals[ax]
            grad[:, j] += term
            # diagonal second derivative
            term2 = c * axis_d2[j]
            for ax in range(d):
                if ax != j:
                    term2 = term2 * axis_vals[ax]
            hess[:, j, j] += term2
            for k in range(j + 1, d):
                cross = c * axis_d1[j] * axis_d1[k]
                for ax in range(d):
                    if ax not in (j, k):
                        cross = cross * axis_vals[ax]
                hess[:, j, k] += cross
                hess[:, k, j] += cross
    return val, grad, hess


class MixtureDensity:
    """Analytic value/gradient/Hessian of a Gaussian mixture."""

    def __init__(self, spec: GaussianMixtureSpec):
        self.spec = spec
        self.dimension = spec.dimension
        self._params = []
        for comp in spec.components:
            inv = np.linalg.inv(comp.covariance)
            norm = comp.weight * (2.0 * math.pi) ** (-self.dimension / 2.0) / math.sqrt(
                np.linalg.det(comp.covariance)
            )
            self._params.append((comp.mean, inv, norm))

    def _component_values(self, points: np.ndarray):
        points = np.atleast_2d(points)
        for mean, inv, norm in self._params:
            delta = points - mean
            quad = np.einsum("pi,ij,pj->p", delta, inv, delta)
            yield norm * np.exp(-0.5 * quad), delta, inv

    def derivatives(self, points: np.ndarray):
        """(value, gradient, Hessian) in a single pass over the components."""
        points = np.atleast_2d(points)
        n, d = points.shape
        val = np.zeros(n)
        grad = np.zeros((n, d))
        hess = np.zeros((n, d, d))
        for vals, delta, inv in self._component_values(points):
            y = delta @ inv.T
            val += vals
            grad += -vals[:, None] * y
            hess += vals[:, None, None] * (np.einsum("pi,pj->pij", y, y) - inv)
        return val, grad, hess

    def value(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        out = np.zeros(points.shape[0])
        for vals, _, _ in self._component_values(points):
            out += vals
        return out

    def gradient(self, points: np.ndarray) -> np.ndarray:
        return self.derivatives(points)[1]

    def hessian(self, points: np.ndarray) -> np.ndarray:
        return self.derivatives(points)[2]


class FluctuationDensity:
    """Analytic density f = mu + sqrt(mu) g for a band-limited fluctuation g.

    Derivatives come from the factorization f = Psi_0 * (Psi_0 + g): the second
    factor is a finite Hermite series, and Psi_0's derivatives are explicit.
    """

    def __init__(self, basis: BasisTruncation, coeffs: np.ndarray):
        self.basis = basis
        self.dimension = basis.dimension
        self.coeffs = np.asarray(coeffs, dtype=float)
        shifted = self.coeffs.copy()
        shifted[0] += 1.0  # Psi_0 + g
        self._shifted = shifted

    def derivatives(self, points: np.ndarray):
        """(value, gradient, Hessian) from one evaluation of the Hermite tables."""
        pts = np.atleast_2d(points)
        gval, ggrad, ghess = evaluate_with_derivatives(self.basis, self._shifted, pts)
        psi0 = sqrt_maxwellian(pts)
        val = psi0 * gval
        grad = psi0[:, None] * (ggrad - 0.5 * pts * gval[:, None])
        cross = np.einsum("pi,pj->pij", pts, ggrad)
        vv = np.einsum("pi,pj->pij", pts, pts)
        eye = np.eye(pts.shape[1])
        inner = (
            ghess
            - 0.5 * (cross + np.transpose(cross, (0, 2, 1)))
            + (0.25 * vv - 0.5 * eye) * gval[:, None, None]
        )
        hess = psi0[:, None, None] * inner
        return val, grad, hess

    def value(self, points: np.ndarray) -> np.ndarray:
        return self.derivatives(points)[0]

    def gradient(self, points: np.ndarray) -> np.ndarray:
        return self.derivatives(points)[1]

    def hessian(self, points: np.ndarray) -> np.ndarray:
        return self.derivatives(points)[2]


def _as_density(f):
    if isinstance(f, GaussianMixtureSpec):
        return MixtureDensity(f)
    if isinstance(f, (MixtureDensity, FluctuationDensity)):
        return f
    raise TypeError(f"unsupported density input {type(f).__name__}")


def hermite_transform(g, grid: QuadratureGrid, basis: BasisTruncation) -> np.ndarray:
    """Coefficients c_alpha = int g Psi_alpha dv by tensor quadrature.

    g may be an ndarray of fluctuation values at grid.points, a callable
    returning those values, or a GaussianMixtureSpec (whose fluctuation
    (f - mu)/sqrt(mu) is transformed).  Exact for band-limited g with
    degree(g) + max_degree <= 2 * nodes_per_axis - 1.  Warns when the top level
    carries more than 1e-6 of the total energy (truncation is aliasing).
    """
    if grid.dimension != basis.dimension:
        raise ValueError("grid and basis disagree on dimension")
    if grid.nodes_per_axis < basis.max_degree + 1:
        raise ValueError(
            f"nodes_per_axis = {grid.nodes_per_axis} < max_degree + 1 = {basis.max_degree + 1}"
        )
    if isinstance(g, GaussianMixtureSpec):
        dens = MixtureDensity(g)
        values = (dens.value(grid.points) - maxwellian(grid.points)) / sqrt_maxwellian(grid.points)
    elif callable(g):
        values = np.asarray(g(grid.points), dtype=float)
    else:
        values = np.asarray(g, dtype=float)
    if values.shape != (grid.size,):
        raise ValueError(f"grid values have shape {values.shape}, expected ({grid.size},)")

    weighted = grid.plain_weights * values
    _, tables = _axis_tables(basis, grid.points, derivatives=0)
    coeffs = np.empty(basis.size)
    for pos, alpha in enumerate(basis.ordering):
        term = tables[0][0][alpha[0]]
        for ax in range(1, basis.dimension):
            term = term * tables[ax][0][alpha[ax]]
        coeffs[pos] = weighted @ term
    total = float(np.sum(coeffs**2))
    if total > 0:
        top = float(np.sum(coeffs[basis.level_slice(basis.max_degree)] ** 2))
        if top / total > 1e-6:
            warnings.warn(
                f"top degree level carries {top / total:.3e} of the coefficient energy; "
                "the truncation is too small for this input",
                AliasingWarning,
                stacklevel=2,
            )
    return coeffs


@dataclass
class CollisionKernelSpec:
    """Collision kernel a(z) = |z|^gamma (|z|^2 Id - z (x) z); only gamma = 0 is evaluated."""

    gamma: float = 0.0

    def matrix(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        r2 = float(z @ z)
        a = r2 * np.eye(z.size) - np.outer(z, z)
        if self.gamma != 0.0:
            a = r2 ** (self.gamma / 2.0) * a
        return a


def _collision_moments(density, grid: QuadratureGrid):
    """Quadrature moments of f and grad f against {1, w, |w|^2, w (x) w}."""
    pts = grid.points
    wp = grid.plain_weights
    fv, fg, _ = density.derivatives(pts)
    wf = wp * fv
    m0 = float(wf.sum())
    m1 = wf @ pts
    r2 = np.sum(pts**2, axis=1)
    m2 = float(wf @ r2)
    m2mat = np.einsum("p,pi,pj->ij", wf, pts, pts)
    wg = wp[:, None] * fg  # (P, d), column k = weighted d_k f
    g0 = wg.sum(axis=0)  # (d,)
    g1 = np.einsum("pk,pi->ki", wg, pts)  # g1[k, i] = int w_i d_k f
    g2 = r2 @ wg  # (d,)
    g2mat = np.einsum("pk,pi,pj->kij", wg, pts, pts)
    return m0, m1, m2, m2mat, g0, g1, g2, g2mat


def eval_collision_direct(
    f,
    grid: QuadratureGrid,
    points: np.ndarray,
    kernel: CollisionKernelSpec | None = None,
) -> np.ndarray:
    """Q(f, f) at the points, by quadrature moments + analytic divergence.

    With A_ik(v) = int a_ik(v - w) f(w) dw and C_ik(v) = int a_ik(v - w)
    (d_k f)(w) dw, both quadratic polynomials in v with moment coefficients,

        Q(f, f) = sum_k (div A)_k d_k f + sum_ik A_ik d_i d_k f
                - sum_k (div C)_k f     - sum_ik C_ik d_i f,

    where (div A)_k = -(d-1)(m0 v_k - m1_k) and likewise for C.
    """
    if kernel is not None and kernel.gamma != 0.0:
        raise NotImplementedError("only Maxwellian molecules (gamma = 0) are supported")
    density = _as_density(f)
    d = density.dimension
    m0, m1, m2, m2mat, g0, g1, g2, g2mat = _collision_moments(density, grid)

    x = np.atleast_2d(np.asarray(points, dtype=float))
    fv, fg, fh = density.derivatives(x)
    r2 = np.sum(x**2, axis=1)

    out = np.zeros(x.shape[0])
    for k in range(d):
        div_a_k = -(d - 1) * (m0 * x[:, k] - m1[k])
        div_c_k = -(d - 1) * (g0[k] * x[:, k] - g1[k, k])
        out += div_a_k * fg[:, k] - div_c_k * fv
        for i in range(d):
            iso_a = (r2 * m0 - 2.0 * (x @ m1) + m2) if i == k else 0.0
            a_ik = iso_a - (x[:, i] * x[:, k] * m0 - x[:, i] * m1[k] - x[:, k] * m1[i] + m2mat[i, k])
            iso_c = (r2 * g0[k] - 2.0 * (x @ g1[k]) + g2[k]) if i == k else 0.0
            c_ik = iso_c - (
                x[:, i] * x[:, k] * g0[k] - x[:, i] * g1[k, k] - x[:, k] * g1[k, i] + g2mat[k, i, k]
            )
            out += a_ik * fh[:, i, k] - c_ik * fg[:, i]
    return out


def eval_reduced_rhs_grid(f, temperatures: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Reduced form sum_j (d - T_j) d_j^2 f + (d-1) div(v f) + Delta_S f at the points.

    Valid only for unit mass, zero mean, diagonal second moments; a mixture with
    an off-diagonal second moment is rejected.  The spherical Laplacian is
    evaluated analytically as |v|^2 Lap f - v.(Hess f).v - (d-1) v.grad f.
    """
    if isinstance(f, GaussianMixtureSpec):
        second = f.second_moment()
        off = second - np.diag(np.diag(second))
        if np.abs(off).max() > 1e-10:
            raise ValueError(
                f"second moment of f is not diagonal (max off-diagonal {np.abs(off).max():.3e})"
            )
    density = _as_density(f)
    d = density.dimension
    temperatures = np.asarray(temperatures, dtype=float)
    if temperatures.shape != (d,):
        raise ValueError(f"temperatures have shape {temperatures.shape}, expected ({d},)")
    x = np.atleast_2d(np.asarray(points, dtype=float))
    fv, fg, fh = density.derivatives(x)
    r2 = np.sum(x**2, axis=1)
    vdot = np.einsum("pi,pi->p", x, fg)
    lap = np.trace(fh, axis1=1, axis2=2)
    vhv = np.einsum("pi,pij,pj->p", x, fh, x)
    diffusion = sum((d - temperatures[j]) * fh[:, j, j] for j in range(d))
    drift = (d - 1) * (d * fv + vdot)
    spherical = r2 * lap - vhv - (d - 1) * vdot
    return diffusion + drift + spherical


@dataclass
class OracleComparison:
    rel_l2: float
    direct_norm: float
    spectral_norm: float
    convergence_delta: float
    nodes_per_axis: int


def compare_spectral_vs_direct(
    g0: np.ndarray,
    system,
    grid: QuadratureGrid,
    convergence_tol: float = 1e-6,
    refine_by: int = 8,
) -> OracleComparison:
    """Relative L2 gap between the assembled RHS and the direct collision route.

    The spectral side synthesizes dg/dt(t=0) on the grid; the direct side
    evaluates Q(f, f)/sqrt(mu) for f = mu + sqrt(mu) g0.  The inner quadrature
    is re-run with refine_by extra nodes per axis; if that moves the direct
    values beyond convergence_tol (scaled), the comparison aborts as
    non-converged rather than reporting a meaningless gap.
    """
    from landau_hermite.evolution import reduced_rhs

    basis = system.basis
    if grid.dimension != basis.dimension:
        raise ValueError("grid and basis disagree on dimension")
    g0 = np.asarray(g0, dtype=float)
    density = FluctuationDensity(basis, g0)
    pts = grid.points
    sqmu = sqrt_maxwellian(pts)

    direct = eval_collision_direct(density, grid, pts) / sqmu
    finer = QuadratureGrid(grid.dimension, grid.nodes_per_axis + refine_by)
    direct_refined = eval_collision_direct(density, finer, pts) / sqmu
    delta = float(np.abs(direct - direct_refined).max())
    scale = max(1.0, float(np.abs(direct).max()))
    if delta > convergence_tol * scale:
        raise OracleConvergenceError(
            f"inner quadrature not converged: refinement moved values by {delta:.3e}"
        )

    spectral = synthesize(basis, reduced_rhs(system, 0.0, g0), pts)
    wp = grid.plain_weights
    direct_norm = math.sqrt(float(wp @ direct**2))
    diff_norm = math.sqrt(float(wp @ (spectral - direct) ** 2))
    spectral_norm = math.sqrt(float(wp @ spectral**2))
    if max(direct_norm, spectral_norm) <= 1e-12:
        # both routes vanish within quadrature roundoff (e.g. equilibrium
        # data); a ratio of noise levels would be meaningless
        rel = 0.0
    else:
        rel = diff_norm / max(direct_norm, spectral_norm)
    return OracleComparison(
        rel_l2=rel,
        direct_norm=direct_norm,
        spectral_norm=spectral_norm,
        convergence_delta=delta,
        nodes_per_axis=grid.nodes_per_axis,
    )
