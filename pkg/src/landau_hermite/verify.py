"""Verification suite: acceptance criteria and per-module invariant batteries.

Two layers:

* Ten acceptance criteria with pinned sizes and tolerances
  (``ACCEPTANCE_CHECKS``).  These always run at their published parameters and
  are the repository's pass/fail gate.
* Module batteries (``run_suite``): property checks for the basis, operator,
  moment, evolution, diagnostics, and oracle layers, parameterized by the
  suite's dimension / truncation so they can also run at small scale.  Checks
  that need a minimum truncation skip with an explicit reason instead of
  silently shrinking.

``inject_defect("laplace_beltrami_sign")`` flips the sign of the assembled
spherical Laplacian for the duration of a ``with`` block — a negative control
proving the suite catches a broken assembly (positivity, explicit spectrum,
moment law, and oracle comparisons all fail; conservation does not, because it
is enforced structurally by parity and zero rows for constraint-zero data).
"""

from __future__ import annotations

import math
import time
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from landau_hermite import operators
from landau_hermite.basis import BasisTruncation, enumerate_basis
from landau_hermite.diagnostics import certify_run, fit_level_decay, weighted_norm
from landau_hermite.evolution import (
    IntegratorConfig,
    Trajectory,
    assemble_reduced_system,
    exact_semigroup,
    integrate,
)
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
)
from landau_hermite.operators import (
    build_harmonic,
    build_ladder,
    build_laplace_beltrami,
    build_linearized_landau,
    collisional_invariants,
    kernel_basis,
)
from landau_hermite.oracle import (
    CollisionKernelSpec,
    QuadratureGrid,
    compare_spectral_vs_direct,
    eval_collision_direct,
    eval_reduced_rhs_grid,
    evaluate_with_derivatives,
    hermite_transform,
    synthesize,
)

__all__ = [
    "CheckResult",
    "SuiteContext",
    "inject_defect",
    "run_acceptance",
    "run_suite",
    "ACCEPTANCE_CHECKS",
]


@dataclass
class CheckResult:
    """Outcome of one verification check."""

    name: str
    passed: bool
    measured: float
    tolerance: float
    comparator: str  # how measured relates to tolerance when passing, e.g. "<="
    detail: str
    runtime_seconds: float = 0.0
    skipped: bool = False
    reason: str = ""

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "passed": bool(self.passed),
            "skipped": bool(self.skipped),
            "measured": float(self.measured),
            "tolerance": float(self.tolerance),
            "comparator": self.comparator,
            "detail": self.detail,
            "reason": self.reason,
            "runtime_seconds": round(self.runtime_seconds, 6),
        }


class _Skip(Exception):
    """Raised inside a check to skip it with a documented reason."""


@contextmanager
def inject_defect(kind: str | None):
    """Deliberately corrupt an assembly step for negative-control runs."""
    if kind is None:
        yield
        return
    if kind != "laplace_beltrami_sign":
        raise ValueError(f"unknown defect {kind!r}; available: laplace_beltrami_sign")
    saved = operators._spherical_sign
    operators._spherical_sign = -1.0
    try:
        yield
    finally:
        operators._spherical_sign = saved


# ---------------------------------------------------------------------------
# shared construction helpers (cached per cache-dict so repeated checks reuse
# the expensive assemblies and eigendecompositions)
# ---------------------------------------------------------------------------


def _basis(cache: dict, d: int, n: int) -> BasisTruncation:
    return cache.setdefault(("basis", d, n), enumerate_basis(d, n))


def _linearized(cache: dict, d: int, n: int):
    return cache.setdefault(("linearized", d, n), build_linearized_landau(_basis(cache, d, n)))


def _linearized_eig(cache: dict, d: int, n: int):
    key = ("linearized_eig", d, n)
    if key not in cache:
        cache[key] = scipy.linalg.eigh(_linearized(cache, d, n).to_dense())
    return cache[key]


def _ell2_offdiag(basis: BasisTruncation) -> np.ndarray:
    alpha = [0] * basis.dimension
    alpha[0] = alpha[1] = 1
    return basis.unit(tuple(alpha))


def _ell3_mode(basis: BasisTruncation) -> np.ndarray:
    """A degree-3 spherical-harmonic mode (orthogonal to every lower harmonic)."""
    if basis.dimension == 2:
        return 0.5 * basis.unit((3, 0)) - (math.sqrt(3) / 2.0) * basis.unit((1, 2))
    alpha = [0] * basis.dimension
    alpha[0] = alpha[1] = alpha[2] = 1
    return basis.unit(tuple(alpha))


def _anisotropic_g0(basis: BasisTruncation, eps: float) -> np.ndarray:
    """Traceless diagonal level-2 data: alpha = (2 eps, -2 eps, 0, ...)."""
    g0 = np.zeros(basis.size)
    d = basis.dimension
    g0[basis.index_of(tuple(2 if i == 0 else 0 for i in range(d)))] = eps * math.sqrt(2.0)
    g0[basis.index_of(tuple(2 if i == 1 else 0 for i in range(d)))] = -eps * math.sqrt(2.0)
    return g0


def _moment_law_run(cache: dict):
    """The pinned anisotropic run shared by the moment-law, conservation, and
    smoothing-signature criteria: d=2, N=16, eps=0.1, dt=1e-3, t in [0,1]."""
    key = ("moment_law_run",)
    if key not in cache:
        basis = _basis(cache, 2, 16)
        g0 = _anisotropic_g0(basis, 0.1)
        alpha = compute_alpha(basis, g0)
        system = assemble_reduced_system(basis, alpha)
        config = IntegratorConfig(dt=1e-3, t_final=1.0, output_every=100)
        trajectory = integrate(system, g0, config)
        cache[key] = (basis, g0, alpha, trajectory)
    return cache[key]


def _random_admissible(basis: BasisTruncation, rng: np.random.Generator, norm: float) -> np.ndarray:
    """Random coefficients with zero mass/momentum/energy/off-diagonal defects."""
    d = basis.dimension
    g0 = rng.standard_normal(basis.size)
    g0[0] = 0.0
    for j in range(d):
        g0[basis.index_of(tuple(1 if i == j else 0 for i in range(d)))] = 0.0
    for j in range(d):
        for k in range(j + 1, d):
            g0[basis.index_of(tuple(1 if i in (j, k) else 0 for i in range(d)))] = 0.0
    diag_idx = [basis.index_of(tuple(2 if i == j else 0 for i in range(d))) for j in range(d)]
    diag = np.array([g0[i] for i in diag_idx])
    diag -= diag.mean()
    for i, value in zip(diag_idx, diag):
        g0[i] = value
    g0 *= norm / np.linalg.norm(g0)
    return g0


def _rel_l2(weights: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    na = math.sqrt(float(weights @ a**2))
    nb = math.sqrt(float(weights @ b**2))
    nd = math.sqrt(float(weights @ (a - b) ** 2))
    denom = max(na, nb)
    return nd / denom if denom > 0 else 0.0


# ---------------------------------------------------------------------------
# acceptance criteria (pinned parameters)
# ---------------------------------------------------------------------------


def criterion_01_kernel_dimension(cache: dict) -> CheckResult:
    """Kernel of the linearized operator: dimension d+2 and span of the
    collisional invariants, for (d, N) = (2, 12) and (3, 8)."""
    worst_angle = 0.0
    details = []
    ok = True
    for d, n in ((2, 12), (3, 8)):
        basis = _basis(cache, d, n)
        op = _linearized(cache, d, n)
        vectors, eigvals = kernel_basis(op, tol=1e-10)
        kdim = vectors.shape[1]
        invariants = collisional_invariants(basis)
        if kdim != d + 2:
            ok = False
            angle = math.pi / 2.0
        else:
            angle = float(scipy.linalg.subspace_angles(vectors, invariants).max())
        worst_angle = max(worst_angle, angle)
        details.append(f"(d={d},N={n}): kernel dim {kdim} (want {d + 2}), angle {angle:.3e}")
        if angle > 1e-8:
            ok = False
    return CheckResult(
        name="criterion_01_kernel_dimension",
        passed=ok,
        measured=worst_angle,
        tolerance=1e-8,
        comparator="<=",
        detail="; ".join(details),
    )


def criterion_02_positivity(cache: dict) -> CheckResult:
    """Linearized operator positive semidefinite for (2, 12) and (3, 8)."""
    worst = math.inf
    details = []
    for d, n in ((2, 12), (3, 8)):
        eigvals, _ = _linearized_eig(cache, d, n)
        mn = float(eigvals.min())
        worst = min(worst, mn)
        details.append(f"(d={d},N={n}): min eigenvalue {mn:.3e}")
    return CheckResult(
        name="criterion_02_positivity",
        passed=worst >= -1e-10,
        measured=worst,
        tolerance=-1e-10,
        comparator=">=",
        detail="; ".join(details),
    )


def criterion_03_explicit_spectrum(cache: dict) -> CheckResult:
    """Eigenvalue 4d on off-diagonal degree-2 harmonics and 6d on degree-3
    harmonics, as operator-application residuals."""
    worst = 0.0
    details = []
    for d in (2, 3):
        basis = _basis(cache, d, 8)
        op = _linearized(cache, d, 8)
        v2 = _ell2_offdiag(basis)
        r2 = float(np.abs(op.dot(v2) - 4 * d * v2).max())
        v3 = _ell3_mode(basis)
        r3 = float(np.abs(op.dot(v3) - 6 * d * v3).max())
        worst = max(worst, r2, r3)
        details.append(f"d={d}: residual 4d {r2:.3e}, residual 6d {r3:.3e}")
    return CheckResult(
        name="criterion_03_explicit_spectrum",
        passed=worst <= 1e-10,
        measured=worst,
        tolerance=1e-10,
        comparator="<=",
        detail="; ".join(details),
    )


def criterion_04_spherical_routes(cache: dict) -> CheckResult:
    """Ladder-assembled spherical Laplacian vs the analytic-derivative route
    on every basis function of degree <= 8, d = 2 and 3."""
    rng = np.random.default_rng(20260817)
    worst = 0.0
    details = []
    for d in (2, 3):
        basis = _basis(cache, d, 8)
        ds = build_laplace_beltrami(basis)
        points = rng.normal(scale=1.5, size=(60, d))
        r2 = np.sum(points**2, axis=1)
        gap = 0.0
        for pos in range(basis.size):
            unit = np.zeros(basis.size)
            unit[pos] = 1.0
            ladder_vals = synthesize(basis, ds.dot(unit), points)
            val, grad, hess = evaluate_with_derivatives(basis, unit, points)
            vdot = np.einsum("pi,pi->p", points, grad)
            lap = np.trace(hess, axis1=1, axis2=2)
            vhv = np.einsum("pi,pij,pj->p", points, hess, points)
            direct = r2 * lap - vhv - (d - 1) * vdot
            gap = max(gap, float(np.abs(ladder_vals - direct).max()))
        worst = max(worst, gap)
        details.append(f"d={d}: max abs gap {gap:.3e} over {basis.size} functions")
    return CheckResult(
        name="criterion_04_spherical_routes",
        passed=worst <= 1e-8,
        measured=worst,
        tolerance=1e-8,
        comparator="<=",
        detail="; ".join(details),
    )


def criterion_05_moment_law(cache: dict) -> CheckResult:
    """Anisotropy decay alpha_j(t) = alpha_j(0) e^{-4dt} along the pinned
    d=2, N=16, eps=0.1 run, within 1e-6 relative at every output time."""
    basis, _, alpha0, trajectory = _moment_law_run(cache)
    d = basis.dimension
    worst = 0.0
    for t, state in trajectory:
        if t == 0.0:
            continue
        expected = alpha0 * math.exp(-4 * d * t)
        measured = compute_alpha(basis, state)
        worst = max(worst, float(np.abs(measured - expected).max() / np.abs(expected).max()))
    return CheckResult(
        name="criterion_05_moment_law",
        passed=worst <= 1e-6,
        measured=worst,
        tolerance=1e-6,
        comparator="<=",
        detail=f"max relative gap over {len(trajectory.times) - 1} output times",
    )


def criterion_06_conservation(cache: dict) -> CheckResult:
    """Mass/momentum/energy/off-diagonal defects stay below 1e-9 along the
    same anisotropic run."""
    basis, _, _, trajectory = _moment_law_run(cache)
    worst = 0.0
    for _, state in trajectory:
        worst = max(worst, extract_moments(basis, state).max_conservation_defect())
    return CheckResult(
        name="criterion_06_conservation",
        passed=worst <= 1e-9,
        measured=worst,
        tolerance=1e-9,
        comparator="<=",
        detail=f"max defect over {len(trajectory.times)} output times",
    )


def criterion_07_gronwall(cache: dict) -> CheckResult:
    """Weighted-norm growth bound certified on 10 seeded random admissible
    initial conditions (d=2, N=16, norm 0.3, t in [0, 2], slack 1e-8)."""
    basis = _basis(cache, 2, 16)
    rng = np.random.default_rng(731)
    worst_margin = math.inf
    violations = 0
    for _ in range(10):
        g0 = _random_admissible(basis, rng, norm=0.3)
        system = assemble_reduced_system(basis, compute_alpha(basis, g0))
        trajectory = integrate(system, g0, IntegratorConfig(dt=5e-3, t_final=2.0, output_every=20))
        state = MomentState.from_coefficients(basis, g0)
        reports = certify_run(basis, trajectory, state, slack=1e-8)
        worst_margin = min(worst_margin, min(r.margin for r in reports))
        violations += sum(1 for r in reports if not r.certified)
    return CheckResult(
        name="criterion_07_gronwall",
        passed=violations == 0,
        measured=worst_margin,
        tolerance=-1e-8,
        comparator=">=",
        detail=f"{violations} violations across 10 runs x 21 output times; worst margin {worst_margin:.3e}",
    )


def criterion_08_eigenmode_order(cache: dict) -> CheckResult:
    """Degree-3 harmonic mode decays as e^{-12t} in d=2; relative error at
    t=1 below 1e-6 at dt=1e-3 and fourth-order improvement under halving."""
    basis = _basis(cache, 2, 8)
    g0 = _ell3_mode(basis)
    system = assemble_reduced_system(basis, np.zeros(2))
    exact = math.exp(-12.0) * g0

    def error_at(dt: float) -> float:
        traj = integrate(system, g0, IntegratorConfig(dt=dt, t_final=1.0, output_every=round(1.0 / dt)))
        return float(np.linalg.norm(traj.states[-1] - exact) / np.linalg.norm(exact))

    err_coarse = error_at(1e-3)
    err_fine = error_at(5e-4)
    ratio = err_coarse / err_fine if err_fine > 0 else math.inf
    ok = err_coarse <= 1e-6 and 14.0 <= ratio <= 18.0
    return CheckResult(
        name="criterion_08_eigenmode_order",
        passed=ok,
        measured=err_coarse,
        tolerance=1e-6,
        comparator="<=",
        detail=f"relative error {err_coarse:.3e} at dt=1e-3; halving ratio {ratio:.2f} (want within [14, 18])",
    )


def criterion_09_oracle_equivalence(cache: dict) -> CheckResult:
    """Spectral right-hand side vs direct collision quadrature for Gaussian
    data (d=2, N=20, 64 nodes/axis), plus the non-normalized negative control."""
    basis = _basis(cache, 2, 20)
    grid = QuadratureGrid(2, 64)
    mixture = GaussianMixtureSpec(
        [GaussianComponent(1.0, np.zeros(2), np.diag([1.2, 0.8]))]
    )
    g0 = hermite_transform(mixture, grid, basis)
    system = assemble_reduced_system(basis, compute_alpha(basis, g0))
    report = compare_spectral_vs_direct(g0, system, grid)

    control = GaussianMixtureSpec(
        [GaussianComponent(1.0, np.zeros(2), 1.3 * np.eye(2))]
    )
    pts = grid.points
    direct = eval_collision_direct(control, grid, pts)
    reduced = eval_reduced_rhs_grid(control, np.array([1.3, 1.3]), pts)
    control_gap = _rel_l2(grid.plain_weights, direct, reduced)

    ok = report.rel_l2 <= 1e-4 and control_gap > 1e-2
    return CheckResult(
        name="criterion_09_oracle_equivalence",
        passed=ok,
        measured=report.rel_l2,
        tolerance=1e-4,
        comparator="<=",
        detail=(
            f"relative L2 gap {report.rel_l2:.3e} (inner-quadrature shift {report.convergence_delta:.3e}); "
            f"negative control gap {control_gap:.3e} (must exceed 1e-2)"
        ),
    )


def criterion_10_smoothing_slope(cache: dict) -> CheckResult:
    """Level-norm decay slope at t = 0.5 certifies the smoothing gain: the
    fitted slope of log ||P_k g|| vs k must be at most -delta/2 + 0.1."""
    basis, g0, alpha, trajectory = _moment_law_run(cache)
    delta = admissible_delta(alpha, basis.dimension)
    t_target = 0.5
    idx = int(np.argmin(np.abs(np.asarray(trajectory.times) - t_target)))
    t = trajectory.times[idx]
    fit = fit_level_decay(basis, trajectory.states[idx])
    bound = -delta * t + 0.1
    return CheckResult(
        name="criterion_10_smoothing_slope",
        passed=fit.slope <= bound,
        measured=fit.slope,
        tolerance=bound,
        comparator="<=",
        detail=(
            f"slope {fit.slope:.4f} at t={t} over levels {fit.levels[0]}..{fit.levels[-1]} "
            f"(bound {bound:.4f}, delta {delta:.4f}, fit residual {fit.residual:.3f})"
        ),
    )


ACCEPTANCE_CHECKS = [
    criterion_01_kernel_dimension,
    criterion_02_positivity,
    criterion_03_explicit_spectrum,
    criterion_04_spherical_routes,
    criterion_05_moment_law,
    criterion_06_conservation,
    criterion_07_gronwall,
    criterion_08_eigenmode_order,
    criterion_09_oracle_equivalence,
    criterion_10_smoothing_slope,
]


def _criterion_result(cache: dict, func) -> CheckResult:
    """Run a criterion once per cache; reruns share the stored result."""
    key = ("criterion_result", func.__name__)
    if key not in cache:
        cache[key] = func(cache)
    return cache[key]


def run_acceptance(cache: dict | None = None) -> list[CheckResult]:
    """Run the ten acceptance criteria at their pinned parameters."""
    cache = {} if cache is None else cache
    results = []
    for func in ACCEPTANCE_CHECKS:
        start = time.perf_counter()
        try:
            result = replace(_criterion_result(cache, func))
        except Exception as exc:  # a crashed check is a failed check
            result = CheckResult(
                name=func.__name__,
                passed=False,
                measured=math.nan,
                tolerance=math.nan,
                comparator="<=",
                detail=f"raised {type(exc).__name__}: {exc}",
            )
        result.runtime_seconds = time.perf_counter() - start
        results.append(result)
    return results


# ---------------------------------------------------------------------------
# module batteries
# ---------------------------------------------------------------------------


@dataclass
class SuiteContext:
    dimension: int = 2
    max_degree: int = 16
    seed: int = 1234
    cache: dict = field(default_factory=dict)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def basis(self, dimension: int | None = None, max_degree: int | None = None) -> BasisTruncation:
        return _basis(
            self.cache,
            self.dimension if dimension is None else dimension,
            self.max_degree if max_degree is None else max_degree,
        )


def check_basis_ordering_determinism(ctx: SuiteContext) -> CheckResult:
    a = enumerate_basis(ctx.dimension, ctx.max_degree)
    b = enumerate_basis(ctx.dimension, ctx.max_degree)
    same = a.ordering == b.ordering
    return CheckResult(
        name="basis_ordering_determinism",
        passed=same,
        measured=0.0 if same else 1.0,
        tolerance=0.0,
        comparator="<=",
        detail=f"two enumerations of (d={ctx.dimension}, N={ctx.max_degree}) compared elementwise",
    )


def check_basis_parseval(ctx: SuiteContext) -> CheckResult:
    basis = ctx.basis()
    rng = ctx.rng()
    worst = 0.0
    for _ in range(5):
        c = rng.standard_normal(basis.size)
        total = float(np.sum(basis.level_norms(c) ** 2))
        worst = max(worst, abs(total - float(c @ c)) / float(c @ c))
    return CheckResult(
        name="basis_parseval",
        passed=worst <= 1e-14,
        measured=worst,
        tolerance=1e-14,
        comparator="<=",
        detail="sum of level-norm squares vs squared norm, 5 random vectors",
    )


def check_basis_projection_algebra(ctx: SuiteContext) -> CheckResult:
    basis = ctx.basis()
    rng = ctx.rng()
    c = rng.standard_normal(basis.size)
    worst = 0.0
    for j in range(basis.max_degree + 1):
        pj = basis.project_level(c, j)
        for k in range(j + 1, basis.max_degree + 1):
            worst = max(worst, float(np.abs(basis.project_level(pj, k)).max()))
    for n in (0, basis.max_degree // 2, basis.max_degree):
        cumulative = basis.project_cumulative(c, n)
        summed = np.sum([basis.project_level(c, k) for k in range(n + 1)], axis=0)
        worst = max(worst, float(np.abs(cumulative - summed).max()))
    return CheckResult(
        name="basis_projection_algebra",
        passed=worst == 0.0,
        measured=worst,
        tolerance=0.0,
        comparator="<=",
        detail="P_j P_k = 0 for j != k and S_n = sum of P_k, exact in floating point",
    )


def check_ladder_adjointness(ctx: SuiteContext) -> CheckResult:
    basis = ctx.basis()
    interior = basis.level_slice(0).start, basis.level_slice(max(basis.max_degree - 1, 0)).stop
    worst = 0.0
    for axis in range(basis.dimension):
        up = build_ladder(basis, axis, "+").matrix
        down = build_ladder(basis, axis, "-").matrix
        gap = (up.T - down).toarray()[: interior[1], : interior[1]]
        worst = max(worst, float(np.abs(gap).max()))
    return CheckResult(
        name="ladder_adjointness",
        passed=worst <= 1e-14,
        measured=worst,
        tolerance=1e-14,
        comparator="<=",
        detail="raising transpose vs lowering on degrees <= N-1, entrywise",
    )


def check_ladder_commutation(ctx: SuiteContext) -> CheckResult:
    basis = ctx.basis()
    stop = basis.level_slice(max(basis.max_degree - 1, 0)).stop
    worst = 0.0
    details = []
    for axis in range(min(basis.dimension, 2)):
        up = build_ladder(basis, axis, "+").matrix
        down = build_ladder(basis, axis, "-").matrix
        comm = (down @ up - up @ down).toarray()[:stop, :stop] - np.eye(stop)
        worst = max(worst, float(np.abs(comm).max()))
    details.append("[lower_j, raise_j] = Id on degrees <= N-1")
    if basis.dimension >= 2:
        up0 = build_ladder(basis, 0, "+").matrix
        up1 = build_ladder(basis, 1, "+").matrix
        down0 = build_ladder(basis, 0, "-").matrix
        down1 = build_ladder(basis, 1, "-").matrix
        comm_up = up0 @ up1 - up1 @ up0
        comm_down = down0 @ down1 - down1 @ down0
        worst = max(worst, float(np.abs(comm_up).max()) if comm_up.nnz else 0.0)
        worst = max(worst, float(np.abs(comm_down).max()) if comm_down.nnz else 0.0)
        details.append("same-sign cross-axis ladder operators commute everywhere")
    return CheckResult(
        name="ladder_commutation",
        passed=worst <= 1e-14,
        measured=worst,
        tolerance=1e-14,
        comparator="<=",
        detail="; ".join(details),
    )


def check_weight_conjugation(ctx: SuiteContext) -> CheckResult:
    """exp(t delta H) A_plus = e^{t delta} A_plus exp(t delta H), entrywise."""
    basis = ctx.basis()
    harmonic = build_harmonic(basis).matrix.diagonal()
    worst = 0.0
    for t, delta in ((0.3, 0.5), (1.0, 0.99), (2.0, 0.25)):
        w = np.exp(t * delta * harmonic)
        for axis in range(basis.dimension):
            up = build_ladder(basis, axis, "+").matrix.tocoo()
            lhs = w[up.row] * up.data
            rhs = math.exp(t * delta) * up.data * w[up.col]
            scale = np.abs(lhs).max() if lhs.size else 1.0
            worst = max(worst, float(np.abs(lhs - rhs).max() / scale))
    return CheckResult(
        name="weight_conjugation",
        passed=worst <= 1e-12,
        measured=worst,
        tolerance=1e-12,
        comparator="<=",
        detail="sampled (t, delta) in {(0.3,0.5),(1,0.99),(2,0.25)}, all axes, relative entrywise",
    )


def check_linearized_psd(ctx: SuiteContext) -> CheckResult:
    worst = math.inf
    details = []
    for d in (2, 3):
        n = min(ctx.max_degree, 16) if d == 2 else min(ctx.max_degree, 8)
        if n < 2:
            raise _Skip("linearized assembly needs max_degree >= 2")
        eigvals, _ = _linearized_eig(ctx.cache, d, n)
        worst = min(worst, float(eigvals.min()))
        details.append(f"(d={d},N={n}): min eig {float(eigvals.min()):.3e}")
    return CheckResult(
        name="linearized_psd",
        passed=worst >= -1e-10,
        measured=worst,
        tolerance=-1e-10,
        comparator=">=",
        detail="; ".join(details),
    )


def check_harmonic_spherical_commute(ctx: SuiteContext) -> CheckResult:
    basis = ctx.basis()
    h = build_harmonic(basis).matrix
    ds = build_laplace_beltrami(basis).matrix
    comm = h @ ds - ds @ h
    gap = float(np.abs(comm).max()) if comm.nnz else 0.0
    return CheckResult(
        name="harmonic_spherical_commute",
        passed=gap <= 1e-12,
        measured=gap,
        tolerance=1e-12,
        comparator="<=",
        detail="max-abs entry of the commutator",
    )


def check_linearized_spectral_blocks(ctx: SuiteContext) -> CheckResult:
    basis = ctx.basis()
    if basis.max_degree < 2:
        raise _Skip("needs max_degree >= 2 for the degree-2 block")
    lop = _linearized(ctx.cache, basis.dimension, basis.max_degree).to_dense()
    ds = build_laplace_beltrami(basis).to_dense()
    s1 = basis.level_slice(1)
    worst = float(np.abs(lop[s1, s1]).max())
    detail = [f"degree-1 block max-abs {worst:.3e}"]
    s2 = basis.level_slice(2)
    gap2 = float(np.abs(lop[s2, s2] - (-2.0) * ds[s2, s2]).max())
    worst = max(worst, gap2)
    detail.append(f"degree-2 block vs -2 spherical Laplacian gap {gap2:.3e}")
    return CheckResult(
        name="linearized_spectral_blocks",
        passed=worst <= 1e-12,
        measured=worst,
        tolerance=1e-12,
        comparator="<=",
        detail="; ".join(detail),
    )


def _sample_mixture(d: int) -> GaussianMixtureSpec:
    if d == 2:
        return GaussianMixtureSpec(
            [
                GaussianComponent(0.6, np.array([0.4, -0.2]), np.array([[0.9, 0.15], [0.15, 1.1]])),
                GaussianComponent(0.9, np.array([-0.3, 0.1]), np.array([[1.2, -0.1], [-0.1, 0.8]])),
            ]
        )
    means = np.zeros(d)
    cov = np.eye(d)
    comp1 = GaussianComponent(0.7, means + 0.3, cov * 0.9)
    comp2 = GaussianComponent(0.8, means - 0.2, cov * 1.15)
    return GaussianMixtureSpec([comp1, comp2])


def check_normalize_idempotent(ctx: SuiteContext) -> CheckResult:
    spec = _sample_mixture(ctx.dimension)
    once, _ = normalize_distribution(spec)
    twice, frame2 = normalize_distribution(once)
    worst = max(
        abs(frame2.dilation - 1.0),
        float(np.abs(frame2.translation).max()),
        abs(once.mass() - 1.0),
        float(np.abs(once.mean_velocity()).max()),
        abs(once.energy() - ctx.dimension / 2.0),
        abs(twice.mass() - 1.0),
    )
    return CheckResult(
        name="normalize_idempotent",
        passed=worst <= 1e-12,
        measured=worst,
        tolerance=1e-12,
        comparator="<=",
        detail="second normalization is the identity map; moments pinned at (1, 0, d/2)",
    )


def check_moment_extraction_consistency(ctx: SuiteContext) -> CheckResult:
    d = ctx.dimension
    if ctx.max_degree < 2:
        raise _Skip("moment extraction needs max_degree >= 2")
    spec, _ = normalize_distribution(_sample_mixture(d))
    rotation, t0 = diagonalize_second_moments(spec)
    spec = rotate_mixture(spec, rotation)
    basis = ctx.basis()
    grid = QuadratureGrid(d, max(2 * basis.max_degree, 24))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # small truncations alias; moments stay exact
        coeffs = hermite_transform(spec, grid, basis)
    defects = extract_moments(basis, coeffs)
    worst = max(
        defects.max_conservation_defect(),
        float(np.abs(defects.alpha - (t0 - 1.0)).max()),
    )
    return CheckResult(
        name="moment_extraction_consistency",
        passed=worst <= 1e-8,
        measured=worst,
        tolerance=1e-8,
        comparator="<=",
        detail="transform of a normalized diagonalized mixture: defects zero, alpha = T_j - 1",
    )


def check_alpha_admissibility(ctx: SuiteContext) -> CheckResult:
    d = ctx.dimension
    spec, _ = normalize_distribution(_sample_mixture(d))
    rotation, t0 = diagonalize_second_moments(spec)
    alpha = t0 - 1.0
    in_range = bool(np.all(alpha > -1.0) and np.all(alpha < d - 1.0))
    delta = admissible_delta(alpha, d)
    flagged = admissible_delta(np.array([d - 1.0 + 0.05] + [0.0] * (d - 1)), d) is None
    ok = in_range and delta is not None and flagged
    return CheckResult(
        name="alpha_admissibility",
        passed=ok,
        measured=float(np.abs(alpha).max()),
        tolerance=d - 1.0,
        comparator="<=",
        detail=(
            f"alpha from a density in (-1, d-1): {in_range}; delta rule positive: {delta is not None}; "
            f"sup|alpha| >= d-1 flagged as inadmissible: {flagged}"
        ),
    )


def check_delta_rule(ctx: SuiteContext) -> CheckResult:
    d = ctx.dimension
    worst = -math.inf
    ok = True
    for sup in (0.0, 0.3, 0.7, d - 1.001):
        alpha = np.array([sup] + [0.0] * (d - 1))
        delta = admissible_delta(alpha, d)
        if delta is None:
            ok = False
            continue
        slack = min(1.0, d - 1.0 - sup) - delta
        worst = max(worst, -slack)
        if not (0.0 < delta <= min(1.0, d - 1.0 - sup)):
            ok = False
    return CheckResult(
        name="delta_rule",
        passed=ok and worst <= 0.0,
        measured=worst,
        tolerance=0.0,
        comparator="<=",
        detail="delta positive and below min(1, d-1-sup|alpha|) for sampled anisotropies",
    )


def check_conservation_under_flow(ctx: SuiteContext) -> CheckResult:
    worst = 0.0
    details = []
    for d in (2, 3):
        n = min(ctx.max_degree, 16) if d == 2 else min(ctx.max_degree, 8)
        if n < 3:
            raise _Skip("reduced assembly needs max_degree >= 3")
        basis = _basis(ctx.cache, d, n)
        g0 = _anisotropic_g0(basis, 0.08)
        system = assemble_reduced_system(basis, compute_alpha(basis, g0))
        trajectory = integrate(system, g0, IntegratorConfig(dt=5e-3, t_final=2.0, output_every=40))
        run_worst = max(
            extract_moments(basis, state).max_conservation_defect() for _, state in trajectory
        )
        worst = max(worst, run_worst)
        details.append(f"(d={d},N={n}): max defect {run_worst:.3e}")
    return CheckResult(
        name="conservation_under_flow",
        passed=worst <= 1e-9,
        measured=worst,
        tolerance=1e-9,
        comparator="<=",
        detail="; ".join(details),
    )


def check_moment_law(ctx: SuiteContext) -> CheckResult:
    return replace(_criterion_result(ctx.cache, criterion_05_moment_law), name="moment_law")


def check_integrator_order(ctx: SuiteContext) -> CheckResult:
    return replace(_criterion_result(ctx.cache, criterion_08_eigenmode_order), name="integrator_order")


def check_truncation_monotonicity(ctx: SuiteContext) -> CheckResult:
    d = ctx.dimension
    n_hi = ctx.max_degree
    n_lo = n_hi - 4
    if n_lo < 3:
        raise _Skip(f"needs max_degree >= 7 to compare truncations (have {n_hi})")
    worst = 0.0
    runs = {}
    for n in (n_lo, n_hi):
        basis = _basis(ctx.cache, d, n)
        g0 = _anisotropic_g0(basis, 0.05)
        system = assemble_reduced_system(basis, compute_alpha(basis, g0))
        runs[n] = (basis, integrate(system, g0, IntegratorConfig(dt=2e-3, t_final=1.0, output_every=100)))
    basis_lo, traj_lo = runs[n_lo]
    basis_hi, traj_hi = runs[n_hi]
    probe = tuple(2 if i == 0 else 0 for i in range(d))
    i_lo, i_hi = basis_lo.index_of(probe), basis_hi.index_of(probe)
    for (t1, s_lo), (t2, s_hi) in zip(traj_lo, traj_hi):
        worst = max(worst, abs(s_lo[i_lo] - s_hi[i_hi]))
    return CheckResult(
        name="truncation_monotonicity",
        passed=worst <= 1e-8,
        measured=worst,
        tolerance=1e-8,
        comparator="<=",
        detail=(
            f"low-mode trajectory gap between N={n_lo} and N={n_hi} (the level-triangular "
            "structure makes low levels exactly nested)"
        ),
    )


def check_weighted_norm_consistency(ctx: SuiteContext) -> CheckResult:
    basis = ctx.basis()
    rng = ctx.rng()
    worst = 0.0
    for t, delta in ((0.2, 0.5), (1.0, 0.9), (2.0, 0.3)):
        g = rng.standard_normal(basis.size)
        direct = sum(
            math.exp(delta * (2 * k + basis.dimension) * t) * float(n**2)
            for k, n in enumerate(basis.level_norms(g))
        )
        value = weighted_norm(basis, g, t, delta) ** 2
        worst = max(worst, abs(value - direct) / direct)
    return CheckResult(
        name="weighted_norm_consistency",
        passed=worst <= 1e-12,
        measured=worst,
        tolerance=1e-12,
        comparator="<=",
        detail="squared weighted norm vs level-sum formula, sampled (t, delta)",
    )


def check_gronwall_certification(ctx: SuiteContext) -> CheckResult:
    return replace(_criterion_result(ctx.cache, criterion_07_gronwall), name="gronwall_certification")


def check_semigroup_sanity(ctx: SuiteContext) -> CheckResult:
    """Certify states produced by the exact harmonic-oscillator semigroup:
    every margin must match closed-form exponential arithmetic."""
    basis = ctx.basis()
    if basis.max_degree < 2:
        raise _Skip("needs max_degree >= 2 for admissible data")
    g0 = _anisotropic_g0(basis, 0.1)
    if basis.size > 3:
        extra = min(basis.level_slice(basis.max_degree).stop - 1, basis.size - 1)
        g0[extra] += 0.05
    times = [0.0, 0.25, 0.5, 1.0]
    trajectory = Trajectory(
        times=np.array(times), states=np.array([exact_semigroup(basis, g0, t) for t in times])
    )
    state = MomentState.from_coefficients(basis, g0)
    reports = certify_run(basis, trajectory, state, slack=1e-8)
    d = basis.dimension
    delta = state.delta
    worst = 0.0
    for t, report in zip(times, reports):
        level_sq = basis.level_norms(g0) ** 2
        value = math.sqrt(
            sum(
                math.exp(delta * (2 * k + d) * t) * math.exp(-2.0 * t * (d / 2.0 + k)) * float(sq)
                for k, sq in enumerate(level_sq)
            )
        )
        bound = math.sqrt(
            math.exp(2 * d * (d - 1) * t) * float(g0 @ g0)
            + 4.5 * (math.exp(2 * d * (d - 1) * t) - 1.0)
        )
        worst = max(worst, abs(report.margin - (bound - value)) / max(bound, 1.0))
    certified = all(r.certified for r in reports)
    return CheckResult(
        name="semigroup_sanity",
        passed=certified and worst <= 1e-12,
        measured=worst,
        tolerance=1e-12,
        comparator="<=",
        detail="margins under the exact semigroup vs closed-form exponential arithmetic",
    )


def check_weight_monotonicity(ctx: SuiteContext) -> CheckResult:
    basis = ctx.basis()
    rng = ctx.rng()
    g = rng.standard_normal(basis.size)
    delta = 0.8
    values = [weighted_norm(basis, g, t, delta) for t in (0.0, 0.5, 1.0, 1.5, 2.0)]
    increments = np.diff(values)
    worst = float(increments.min())
    return CheckResult(
        name="weight_monotonicity",
        passed=bool(np.all(increments > 0.0)),
        measured=worst,
        tolerance=0.0,
        comparator=">=",
        detail="weighted norm strictly increasing in t for fixed nonzero data",
    )


def check_kernel_matrix_structure(ctx: SuiteContext) -> CheckResult:
    kernel = CollisionKernelSpec()
    rng = ctx.rng()
    worst = 0.0
    min_eig = math.inf
    for _ in range(25):
        v = rng.normal(scale=1.5, size=ctx.dimension)
        a = kernel.matrix(v)
        worst = max(worst, float(np.abs(a @ v).max()))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(a).min()))
    ok = worst <= 1e-12 and min_eig >= -1e-12
    return CheckResult(
        name="kernel_matrix_structure",
        passed=ok,
        measured=worst,
        tolerance=1e-12,
        comparator="<=",
        detail=f"a(v) v = 0 (max {worst:.2e}) and a(v) PSD (min eig {min_eig:.2e}) at 25 sampled v",
    )


def check_quadrature_convergence(ctx: SuiteContext) -> CheckResult:
    d = ctx.dimension
    spec = _sample_mixture(d)
    rng = ctx.rng()
    points = rng.normal(scale=1.2, size=(40, d))
    coarse = eval_collision_direct(spec, QuadratureGrid(d, 24), points)
    fine = eval_collision_direct(spec, QuadratureGrid(d, 48), points)
    worst = float(np.abs(coarse - fine).max())
    return CheckResult(
        name="quadrature_convergence",
        passed=worst <= 1e-8,
        measured=worst,
        tolerance=1e-8,
        comparator="<=",
        detail="doubling nodes per axis (24 -> 48) moves direct collision values by at most this",
    )


def check_reduction_identity(ctx: SuiteContext) -> CheckResult:
    d = ctx.dimension
    temps = np.ones(d)
    temps[0], temps[1] = 1.2, 0.8
    spec = GaussianMixtureSpec([GaussianComponent(1.0, np.zeros(d), np.diag(temps))])
    grid = QuadratureGrid(d, 32)
    pts = grid.points
    direct = eval_collision_direct(spec, grid, pts)
    reduced = eval_reduced_rhs_grid(spec, temps, pts)
    gap = _rel_l2(grid.plain_weights, direct, reduced)

    control = GaussianMixtureSpec([GaussianComponent(1.0, np.zeros(d), 1.3 * np.eye(d))])
    direct_c = eval_collision_direct(control, grid, pts)
    reduced_c = eval_reduced_rhs_grid(control, np.full(d, 1.3), pts)
    control_gap = _rel_l2(grid.plain_weights, direct_c, reduced_c)

    ok = gap <= 1e-6 and control_gap > 1e-2
    return CheckResult(
        name="reduction_identity",
        passed=ok,
        measured=gap,
        tolerance=1e-6,
        comparator="<=",
        detail=(
            f"normalized anisotropic Gaussian: gap {gap:.3e}; "
            f"non-normalized control: gap {control_gap:.3e} (must exceed 1e-2)"
        ),
    )


def check_equilibrium_annihilated(ctx: SuiteContext) -> CheckResult:
    d = ctx.dimension
    spec = GaussianMixtureSpec([GaussianComponent(1.0, np.zeros(d), np.eye(d))])
    grid = QuadratureGrid(d, 32)
    rng = ctx.rng()
    points = rng.normal(scale=1.3, size=(50, d))
    values = eval_collision_direct(spec, grid, points)
    worst = float(np.abs(values).max())
    return CheckResult(
        name="equilibrium_annihilated",
        passed=worst <= 1e-8,
        measured=worst,
        tolerance=1e-8,
        comparator="<=",
        detail="direct collision evaluation on the equilibrium Gaussian vanishes",
    )


def check_spherical_routes(ctx: SuiteContext) -> CheckResult:
    return replace(_criterion_result(ctx.cache, criterion_04_spherical_routes), name="spherical_routes")


def check_spectral_vs_direct(ctx: SuiteContext) -> CheckResult:
    return replace(_criterion_result(ctx.cache, criterion_09_oracle_equivalence), name="spectral_vs_direct")


def check_transform_round_trip(ctx: SuiteContext) -> CheckResult:
    basis = ctx.basis()
    d = basis.dimension
    grid = QuadratureGrid(d, max(2 * basis.max_degree, 24))
    rng = ctx.rng()
    coeffs = rng.standard_normal(basis.size)
    samples = synthesize(basis, coeffs, grid.points)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # full-band random data has top-level energy by design
        back = hermite_transform(samples, grid, basis)
    worst = float(np.abs(back - coeffs).max())
    unit = np.zeros(basis.size)
    unit[basis.index_of(tuple(1 if i == 0 else 0 for i in range(d)))] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        single = hermite_transform(synthesize(basis, unit, grid.points), grid, basis)
    worst = max(worst, float(np.abs(single - unit).max()))
    return CheckResult(
        name="transform_round_trip",
        passed=worst <= 1e-10,
        measured=worst,
        tolerance=1e-10,
        comparator="<=",
        detail="transform(synthesize(c)) = c for band-limited data (quadrature exactness)",
    )


def check_run_determinism(ctx: SuiteContext) -> CheckResult:
    """Identical configs produce byte-identical trajectory/diagnostics files
    and identical summaries outside the metadata block."""
    import json
    import tempfile
    from pathlib import Path

    from landau_hermite import cli
    from landau_hermite.config import RunConfig, IntegratorSettings

    config = RunConfig(
        dimension=2,
        max_degree=8,
        coefficients=[((2, 0), 0.1 * math.sqrt(2.0)), ((0, 2), -0.1 * math.sqrt(2.0))],
        integrator=IntegratorSettings(dt=5e-3, t_final=0.5, output_every=20),
    )
    config.validate()
    payloads = []
    summaries = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in ("a", "b"):
            out = Path(tmp) / run
            cli.run_simulation(config, out)
            payloads.append(
                ((out / "trajectory.csv").read_bytes(), (out / "diagnostics.csv").read_bytes())
            )
            summary = json.loads((out / "summary.json").read_text())
            summary.pop("metadata", None)
            summaries.append(summary)
    same = payloads[0] == payloads[1] and summaries[0] == summaries[1]
    return CheckResult(
        name="run_determinism",
        passed=same,
        measured=0.0 if same else 1.0,
        tolerance=0.0,
        comparator="<=",
        detail="two runs of one config: CSV bytes identical, summaries identical outside metadata",
    )


def check_config_round_trip(ctx: SuiteContext) -> CheckResult:
    """Re-running from a summary's embedded config reproduces the trajectory."""
    import tempfile
    from pathlib import Path

    from landau_hermite import cli
    from landau_hermite.config import RunConfig, IntegratorSettings, load_config

    config = RunConfig(
        dimension=2,
        max_degree=8,
        coefficients=[((2, 0), 0.08 * math.sqrt(2.0)), ((0, 2), -0.08 * math.sqrt(2.0))],
        integrator=IntegratorSettings(dt=5e-3, t_final=0.5, output_every=20),
    )
    config.validate()
    with tempfile.TemporaryDirectory() as tmp:
        first = Path(tmp) / "first"
        cli.run_simulation(config, first)
        reloaded = load_config(first / "summary.json")
        second = Path(tmp) / "second"
        cli.run_simulation(reloaded, second)
        same = (first / "trajectory.csv").read_bytes() == (second / "trajectory.csv").read_bytes()
    return CheckResult(
        name="config_round_trip",
        passed=same,
        measured=0.0 if same else 1.0,
        tolerance=0.0,
        comparator="<=",
        detail="run -> summary.json -> reload config -> re-run gives identical trajectory bytes",
    )


SUITE_CHECKS = [
    check_basis_ordering_determinism,
    check_basis_parseval,
    check_basis_projection_algebra,
    check_ladder_adjointness,
    check_ladder_commutation,
    check_weight_conjugation,
    check_linearized_psd,
    check_harmonic_spherical_commute,
    check_linearized_spectral_blocks,
    check_normalize_idempotent,
    check_moment_extraction_consistency,
    check_alpha_admissibility,
    check_delta_rule,
    check_conservation_under_flow,
    check_moment_law,
    check_integrator_order,
    check_truncation_monotonicity,
    check_weighted_norm_consistency,
    check_gronwall_certification,
    check_semigroup_sanity,
    check_weight_monotonicity,
    check_kernel_matrix_structure,
    check_quadrature_convergence,
    check_reduction_identity,
    check_equilibrium_annihilated,
    check_spherical_routes,
    check_spectral_vs_direct,
    check_transform_round_trip,
    check_run_determinism,
    check_config_round_trip,
]


def run_suite(
    dimension: int = 2,
    max_degree: int = 16,
    seed: int = 1234,
    include_acceptance: bool = True,
    corrupt: str | None = None,
) -> list[CheckResult]:
    """Run the module batteries (and, by default, the acceptance criteria).

    ``corrupt`` installs a deliberate defect for the duration of the suite so
    the negative control can demonstrate that the checks catch it.
    """
    ctx = SuiteContext(dimension=dimension, max_degree=max_degree, seed=seed)
    results: list[CheckResult] = []
    with inject_defect(corrupt):
        if include_acceptance:
            results.extend(run_acceptance(ctx.cache))
        for func in SUITE_CHECKS:
            start = time.perf_counter()
            try:
                result = func(ctx)
            except _Skip as skip:
                result = CheckResult(
                    name=func.__name__.removeprefix("check_"),
                    passed=True,
                    measured=math.nan,
                    tolerance=math.nan,
                    comparator="<=",
                    detail="",
                    skipped=True,
                    reason=str(skip),
                )
            except Exception as exc:
                result = CheckResult(
                    name=func.__name__.removeprefix("check_"),
                    passed=False,
                    measured=math.nan,
                    tolerance=math.nan,
                    comparator="<=",
                    detail=f"raised {type(exc).__name__}: {exc}",
                )
            result.runtime_seconds = time.perf_counter() - start
            results.append(result)
    return results
