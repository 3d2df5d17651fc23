"""Command-line front end: assemble, simulate, verify, oracle.

One command = one process; all state flows through files.

* ``assemble`` writes the operator matrices as triplet text files plus a
  spectra report (kernel dimension, smallest eigenvalues, positivity).
* ``simulate`` runs the full pipeline — normalize, diagonalize, extract
  anisotropies, integrate, diagnose, certify — and writes ``trajectory.csv``,
  ``diagnostics.csv``, and ``summary.json``.
* ``verify`` runs the acceptance criteria and module batteries and writes
  ``verify_report.json``.
* ``oracle`` cross-validates the assembled right-hand side against direct
  collision quadrature and writes ``oracle.json``.

Exit codes: 0 = requested checks pass, 2 = checks ran and failed,
3 = configuration error, 4 = numerical abort (integration or quadrature).

Determinism: data files carry no timestamps and use fixed 17-significant-digit
formatting; identical configs give byte-identical CSV/JSON data.  Timestamps
and wall-clock timings live only in the summary's ``metadata`` block.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from landau_hermite import __version__
from landau_hermite.basis import enumerate_basis
from landau_hermite.config import ConfigError, RunConfig, load_config
from landau_hermite.diagnostics import certify_run, fit_level_decay
from landau_hermite.evolution import (
    IntegrationError,
    IntegratorConfig,
    assemble_reduced_system,
    integrate,
)
from landau_hermite.moments import (
    AffineFrame,
    GaussianComponent,
    GaussianMixtureSpec,
    MomentState,
    compute_alpha,
    diagonalize_second_moments,
    normalize_distribution,
    rotate_mixture,
)
from landau_hermite.operators import (
    build_harmonic,
    build_laplace_beltrami,
    build_linearized_landau,
    collisional_invariants,
    kernel_basis,
)
from landau_hermite.oracle import (
    OracleConvergenceError,
    QuadratureGrid,
    compare_spectral_vs_direct,
    eval_collision_direct,
    eval_reduced_rhs_grid,
    hermite_transform,
)
from landau_hermite import verify as verify_mod

__all__ = ["main", "run_simulation", "run_assembly", "run_oracle"]

EXIT_OK = 0
EXIT_CHECKS_FAILED = 2
EXIT_CONFIG_ERROR = 3
EXIT_NUMERICAL_ABORT = 4


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _column_name(alpha) -> str:
    return "c_" + "_".join(str(a) for a in alpha)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _initial_state(config: RunConfig, basis):
    """Resolve the configured initial condition to (coefficients, frame)."""
    if config.coefficients is not None:
        g0 = np.zeros(basis.size)
        for alpha, value in config.coefficients:
            g0[basis.index_of(alpha)] += value
        return g0, AffineFrame.identity(config.dimension)
    normalized, frame = normalize_distribution(config.mixture)
    rotation, _ = diagonalize_second_moments(normalized)
    aligned = rotate_mixture(normalized, rotation)
    combined = AffineFrame(
        translation=frame.translation, dilation=frame.dilation, rotation=rotation
    )
    nodes = max(config.oracle.nodes_per_axis, config.max_degree + 1)
    grid = QuadratureGrid(config.dimension, nodes)
    g0 = hermite_transform(aligned, grid, basis)
    return g0, combined


def run_simulation(config: RunConfig, out_dir: str | Path) -> dict:
    """Full pipeline; writes trajectory.csv, diagnostics.csv, summary.json.

    Returns the summary dictionary.  Raises ConfigError for precondition
    violations and IntegrationError for numerical aborts.
    """
    timings: dict[str, float] = {}
    start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if config.max_degree < 3:
        raise ConfigError(
            "max_degree: the reduced dynamics needs max_degree >= 3 "
            f"(got {config.max_degree})"
        )
    basis = enumerate_basis(config.dimension, config.max_degree)
    g0, frame = _initial_state(config, basis)

    try:
        state = MomentState.from_coefficients(basis, g0, delta_override=config.delta_override)
    except ValueError as exc:
        raise ConfigError(f"delta_override: {exc}") from exc
    energy_defect = abs(math.fsum(state.alpha))
    if energy_defect > 1e-8:
        raise ConfigError(
            "initial_condition: anisotropies must sum to zero (energy-normalized data); "
            f"got sum {energy_defect:.3e} — normalize the input density first"
        )
    timings["setup"] = time.perf_counter() - start

    t0 = time.perf_counter()
    system = assemble_reduced_system(basis, state.alpha)
    integrator = IntegratorConfig(
        dt=config.integrator.dt,
        t_final=config.integrator.t_final,
        output_every=config.integrator.output_every,
    )
    trajectory = integrate(system, g0, integrator)
    timings["integrate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if state.delta is not None:
        reports = certify_run(basis, trajectory, state)
        verdict = "pass" if all(r.certified for r in reports) else "fail"
        max_violation = max(0.0, -min(r.margin for r in reports))
        not_applicable_reason = None
    else:
        reports = None
        verdict = "not-applicable"
        max_violation = None
        sup = float(np.abs(state.alpha).max())
        not_applicable_reason = (
            f"sup|alpha| = {sup:.6g} leaves no admissible weight rate "
            f"(needs sup|alpha| < d - 1 = {config.dimension - 1})"
        )

    slopes = []
    for _, coeffs in trajectory:
        try:
            slopes.append(fit_level_decay(basis, coeffs).slope)
        except ValueError:
            slopes.append(math.nan)
    timings["diagnostics"] = time.perf_counter() - t0

    _write_trajectory_csv(out / "trajectory.csv", basis, trajectory)
    _write_diagnostics_csv(out / "diagnostics.csv", basis, trajectory, reports, slopes)

    summary = {
        "config": config.as_dict(),
        "moment_state": state.as_dict(),
        "frame": frame.as_dict(),
        "certification": {
            "verdict": verdict,
            "max_margin_violation": max_violation,
            "slack": 1e-8,
            "reason": not_applicable_reason,
        },
        "basis_ordering": basis.ordering_as_lists(),
        "files": {
            "trajectory.csv": _sha256(out / "trajectory.csv"),
            "diagnostics.csv": _sha256(out / "diagnostics.csv"),
        },
        "metadata": {
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "package_version": __version__,
            "timings_seconds": {k: round(v, 6) for k, v in timings.items()},
        },
    }
    _write_json(out / "summary.json", summary)
    return summary


def _write_trajectory_csv(path: Path, basis, trajectory):
    header = ["t"] + [_column_name(alpha) for alpha in basis.ordering]
    lines = [",".join(header)]
    for t, coeffs in trajectory:
        lines.append(",".join([_fmt(t)] + [_fmt(c) for c in coeffs]))
    path.write_text("\n".join(lines) + "\n")


def _write_diagnostics_csv(path: Path, basis, trajectory, reports, slopes):
    levels = [f"level_{k}" for k in range(basis.max_degree + 1)]
    header = ["t", "l2_norm", "weighted_norm", "bound", "margin", "slope"] + levels
    lines = [",".join(header)]
    for i, (t, coeffs) in enumerate(trajectory):
        row = [_fmt(t), _fmt(float(np.linalg.norm(coeffs)))]
        if reports is not None:
            row += [_fmt(reports[i].value), _fmt(reports[i].bound), _fmt(reports[i].margin)]
        else:
            row += ["nan", "nan", "nan"]
        row.append(_fmt(slopes[i]) if math.isfinite(slopes[i]) else "nan")
        row += [_fmt(n) for n in basis.level_norms(coeffs)]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# assemble
# ---------------------------------------------------------------------------


def run_assembly(config: RunConfig, out_dir: str | Path) -> dict:
    """Write operator triplet files and the spectra report; returns the report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    basis = enumerate_basis(config.dimension, config.max_degree)
    try:
        linearized = build_linearized_landau(basis)
    except ValueError as exc:
        raise ConfigError(f"max_degree: {exc}") from exc
    harmonic = build_harmonic(basis)
    spherical = build_laplace_beltrami(basis)

    for op, name in (
        (harmonic, "harmonic.txt"),
        (spherical, "laplace_beltrami.txt"),
        (linearized, "linearized_landau.txt"),
    ):
        op.export_triplets(out / name)

    vectors, eigvals_kernel = kernel_basis(linearized, tol=1e-10)
    import scipy.linalg

    all_eigvals = scipy.linalg.eigvalsh(linearized.to_dense())
    invariants = collisional_invariants(basis)
    if vectors.shape[1] == invariants.shape[1]:
        angle = float(scipy.linalg.subspace_angles(vectors, invariants).max())
    else:
        angle = math.nan
    report = {
        "dimension": config.dimension,
        "max_degree": config.max_degree,
        "basis_size": basis.size,
        "kernel_dimension": int(vectors.shape[1]),
        "expected_kernel_dimension": config.dimension + 2,
        "kernel_vs_invariants_angle": angle,
        "smallest_eigenvalues": [float(v) for v in np.sort(all_eigvals)[:10]],
        "min_eigenvalue": float(all_eigvals.min()),
        "positive_semidefinite": bool(all_eigvals.min() >= -1e-10),
        "files": {
            name: _sha256(out / name)
            for name in ("harmonic.txt", "laplace_beltrami.txt", "linearized_landau.txt")
        },
    }
    _write_json(out / "spectra.json", report)
    return report


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def run_oracle(config: RunConfig, out_dir: str | Path) -> dict:
    """Cross-validate the spectral right-hand side against direct quadrature."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if config.dimension > 3:
        raise ConfigError("dimension: oracle comparisons are cost-bounded to d <= 3")
    basis = enumerate_basis(config.dimension, config.max_degree)
    nodes = max(config.oracle.nodes_per_axis, config.max_degree + 1)
    grid = QuadratureGrid(config.dimension, nodes)

    g0, _ = _initial_state(config, basis)
    alpha = compute_alpha(basis, g0)
    if abs(math.fsum(alpha)) > 1e-8:
        raise ConfigError(
            "initial_condition: anisotropies must sum to zero for the spectral comparison"
        )
    system = assemble_reduced_system(basis, alpha)
    comparison = compare_spectral_vs_direct(
        g0, system, grid, refine_by=config.oracle.refine_by
    )

    # reduction-identity test on an explicitly normalized diagonal Gaussian
    d = config.dimension
    temps = np.ones(d)
    temps[0], temps[1] = 1.2, 0.8
    spec = GaussianMixtureSpec([GaussianComponent(1.0, np.zeros(d), np.diag(temps))])
    ident_grid = QuadratureGrid(d, min(nodes, 32))
    pts = ident_grid.points
    direct = eval_collision_direct(spec, ident_grid, pts)
    reduced = eval_reduced_rhs_grid(spec, temps, pts)
    wp = ident_grid.plain_weights
    denom = max(
        math.sqrt(float(wp @ direct**2)), math.sqrt(float(wp @ reduced**2)), 1e-300
    )
    identity_gap = math.sqrt(float(wp @ (direct - reduced) ** 2)) / denom

    from landau_hermite.evolution import reduced_rhs
    from landau_hermite.oracle import FluctuationDensity, sqrt_maxwellian, synthesize

    stride = max(1, grid.size // config.oracle.comparison_points)
    sample_idx = np.arange(0, grid.size, stride)[: config.oracle.comparison_points]
    sample_pts = grid.points[sample_idx]
    density = FluctuationDensity(basis, g0)
    direct_pts = eval_collision_direct(density, grid, sample_pts) / sqrt_maxwellian(sample_pts)
    spectral_pts = synthesize(basis, reduced_rhs(system, 0.0, g0), sample_pts)

    report = {
        "dimension": config.dimension,
        "max_degree": config.max_degree,
        "nodes_per_axis": comparison.nodes_per_axis,
        "spectral_vs_direct": {
            "relative_l2": comparison.rel_l2,
            "direct_norm": comparison.direct_norm,
            "spectral_norm": comparison.spectral_norm,
            "convergence_delta": comparison.convergence_delta,
            "refine_by": config.oracle.refine_by,
        },
        "reduction_identity": {
            "temperatures": [float(t) for t in temps],
            "relative_l2": identity_gap,
            "nodes_per_axis": ident_grid.nodes_per_axis,
        },
        "pointwise_sample": {
            "count": int(sample_idx.size),
            "points": [[float(x) for x in p] for p in sample_pts],
            "spectral": [float(v) for v in spectral_pts],
            "direct": [float(v) for v in direct_pts],
        },
    }
    _write_json(out / "oracle.json", report)
    return report


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def run_verification(
    dimension: int,
    max_degree: int,
    seed: int,
    out_dir: str | Path | None,
    corrupt: str | None = None,
    quiet: bool = False,
) -> bool:
    results = verify_mod.run_suite(
        dimension=dimension, max_degree=max_degree, seed=seed, corrupt=corrupt
    )
    failed = [r for r in results if not r.skipped and not r.passed]
    skipped = [r for r in results if r.skipped]
    if not quiet:
        width = max(len(r.name) for r in results)
        for r in results:
            if r.skipped:
                print(f"{r.name:<{width}}  SKIP  ({r.reason})")
            else:
                print(
                    f"{r.name:<{width}}  {r.status}  measured {r.measured:.6g} "
                    f"{r.comparator} {r.tolerance:.6g}  [{r.runtime_seconds:.2f}s]"
                )
        print(
            f"\n{len(results) - len(failed) - len(skipped)} passed, "
            f"{len(failed)} failed, {len(skipped)} skipped"
        )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(
            out / "verify_report.json",
            {
                "parameters": {
                    "dimension": dimension,
                    "max_degree": max_degree,
                    "seed": seed,
                    "corrupt": corrupt,
                },
                "passed": not failed,
                "counts": {
                    "passed": len(results) - len(failed) - len(skipped),
                    "failed": len(failed),
                    "skipped": len(skipped),
                },
                "checks": [r.as_dict() for r in results],
            },
        )
    return not failed


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="landau-hermite",
        description=(
            "Hermite spectral solver and verification harness for the spatially "
            "homogeneous Landau equation with Maxwellian molecules near equilibrium."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, config_required: bool = True):
        p.add_argument("--config", required=config_required, help="path to a YAML/JSON run config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")

    common(sub.add_parser("assemble", help="write operator matrices and a spectra report"))
    common(sub.add_parser("simulate", help="integrate the reduced dynamics and certify"))
    p_verify = sub.add_parser("verify", help="run the acceptance criteria and module batteries")
    common(p_verify, config_required=False)
    p_verify.add_argument(
        "--corrupt",
        default=None,
        choices=["laplace_beltrami_sign"],
        help="inject a deliberate assembly defect (negative control; the suite must fail)",
    )
    common(sub.add_parser("oracle", help="cross-validate spectral vs direct collision evaluation"))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            dimension, max_degree, seed = 2, 16, 1234
            if args.config:
                config = load_config(args.config)
                dimension, max_degree, seed = config.dimension, config.max_degree, config.seed
            if args.seed is not None:
                seed = args.seed
            ok = run_verification(
                dimension=dimension,
                max_degree=max_degree,
                seed=seed,
                out_dir=args.out,
                corrupt=args.corrupt,
                quiet=args.quiet,
            )
            return EXIT_OK if ok else EXIT_CHECKS_FAILED

        config = load_config(args.config)
        out_dir = Path(args.out) if args.out else Path(config.output_dir or ".")
        if args.command == "assemble":
            report = run_assembly(config, out_dir)
            if not args.quiet:
                print(
                    f"kernel dimension {report['kernel_dimension']} "
                    f"(expected {report['expected_kernel_dimension']}); "
                    f"min eigenvalue {report['min_eigenvalue']:.3e}; "
                    f"positive semidefinite: {report['positive_semidefinite']}"
                )
            return EXIT_OK
        if args.command == "simulate":
            summary = run_simulation(config, out_dir)
            if not args.quiet:
                cert = summary["certification"]
                print(
                    f"integrated to t = {config.integrator.t_final}; "
                    f"certification: {cert['verdict']}"
                    + (f" ({cert['reason']})" if cert["reason"] else "")
                )
            return EXIT_OK if summary["certification"]["verdict"] != "fail" else EXIT_CHECKS_FAILED
        if args.command == "oracle":
            report = run_oracle(config, out_dir)
            gap = report["spectral_vs_direct"]["relative_l2"]
            identity = report["reduction_identity"]["relative_l2"]
            if not args.quiet:
                print(
                    f"spectral vs direct relative L2 gap {gap:.3e}; "
                    f"reduction identity gap {identity:.3e}"
                )
            return EXIT_OK
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (IntegrationError, OracleConvergenceError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_ABORT


if __name__ == "__main__":
    sys.exit(main())
