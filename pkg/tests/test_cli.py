"""Command-line contract: subcommands, exit codes, determinism, artifacts."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
CONFIGS = REPO / "configs"

MIXTURE_YAML = """\
dimension: 2
max_degree: 10
initial_condition:
  gaussian_mixture:
    components:
      - weight: 1.0
        mean: [0.0, 0.0]
        covariance: [[1.15, 0.0], [0.0, 0.85]]
integrator:
  dt: 2.0e-3
  t_final: 0.2
  output_every: 20
oracle:
  nodes_per_axis: 32
  comparison_points: 50
  refine_by: 8
seed: 0
"""


def _run(*args):
    return subprocess.run(
        [sys.executable, "-m", "landau_hermite.cli", *args],
        capture_output=True,
        text=True,
        cwd=REPO,
    )


@pytest.fixture(scope="module")
def mixture_config(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "mixture.yaml"
    path.write_text(MIXTURE_YAML)
    return path


def test_simulate_writes_artifacts_and_passes(mixture_config, tmp_path):
    out = tmp_path / "run"
    proc = _run("simulate", "--config", str(mixture_config), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    for name in ("trajectory.csv", "diagnostics.csv", "summary.json"):
        assert (out / name).is_file()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["certification"]["verdict"] == "pass"
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header.startswith("t,c_0_0,c_0_1,c_1_0,c_0_2")
    diag_header = (out / "diagnostics.csv").read_text().splitlines()[0]
    assert diag_header.split(",")[:6] == [
        "t",
        "l2_norm",
        "weighted_norm",
        "bound",
        "margin",
        "slope",
    ]


def test_simulate_is_deterministic_across_processes(mixture_config, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert _run("simulate", "--config", str(mixture_config), "--out", str(out1)).returncode == 0
    assert _run("simulate", "--config", str(mixture_config), "--out", str(out2)).returncode == 0
    for name in ("trajectory.csv", "diagnostics.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    s1 = json.loads((out1 / "summary.json").read_text())
    s2 = json.loads((out2 / "summary.json").read_text())
    s1.pop("metadata")
    s2.pop("metadata")
    assert s1 == s2


def test_summary_reproduces_run(mixture_config, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert _run("simulate", "--config", str(mixture_config), "--out", str(out1)).returncode == 0
    # the emitted summary doubles as a config
    proc = _run("simulate", "--config", str(out1 / "summary.json"), "--out", str(out2))
    assert proc.returncode == 0, proc.stderr
    assert (out1 / "trajectory.csv").read_bytes() == (out2 / "trajectory.csv").read_bytes()


def test_assemble_writes_operators_and_spectra(tmp_path):
    out = tmp_path / "ops"
    proc = _run("assemble", "--config", str(CONFIGS / "equilibrium.yaml"), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    spectra = json.loads((out / "spectra.json").read_text())
    assert spectra["kernel_dimension"] == 4
    assert spectra["positive_semidefinite"] is True
    for name in ("harmonic.txt", "laplace_beltrami.txt", "linearized_landau.txt"):
        header = (out / name).read_text().splitlines()[0].split()
        assert header == ["2", "8", "symmetric"]


def test_oracle_reports_agreement(tmp_path):
    out = tmp_path / "oracle"
    proc = _run("oracle", "--config", str(CONFIGS / "oracle_mixture.yaml"), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    report = json.loads((out / "oracle.json").read_text())
    assert report["spectral_vs_direct"]["relative_l2"] <= 1e-4
    assert report["reduction_identity"]["relative_l2"] <= 1e-8
    assert len(report["pointwise_sample"]["spectral"]) == report["pointwise_sample"]["count"]


def test_missing_config_exits_3(tmp_path):
    proc = _run("simulate", "--config", str(tmp_path / "absent.yaml"), "--out", str(tmp_path))
    assert proc.returncode == 3
    assert "configuration error" in proc.stderr


def test_assemble_degree_one_exits_3(tmp_path):
    cfg = tmp_path / "n1.yaml"
    cfg.write_text(
        "dimension: 2\nmax_degree: 1\ninitial_condition:\n  coefficients: []\n"
        "integrator: {dt: 1.0e-2, t_final: 0.1, output_every: 1}\n"
    )
    proc = _run("assemble", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert proc.returncode == 3
    assert "max_degree" in proc.stderr


def test_unbalanced_coefficients_exit_3(tmp_path):
    cfg = tmp_path / "unbalanced.yaml"
    cfg.write_text(
        "dimension: 2\nmax_degree: 6\ninitial_condition:\n  coefficients:\n"
        "    - {index: [2, 0], value: 0.1}\n"
        "integrator: {dt: 1.0e-2, t_final: 0.1, output_every: 1}\n"
    )
    proc = _run("simulate", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert proc.returncode == 3
    assert "sum to zero" in proc.stderr


def test_unstable_step_exits_4(tmp_path):
    cfg = tmp_path / "unstable.yaml"
    cfg.write_text(
        "dimension: 2\nmax_degree: 8\ninitial_condition:\n  coefficients: []\n"
        "integrator: {dt: 0.1, t_final: 0.5, output_every: 1}\n"
    )
    proc = _run("simulate", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert proc.returncode == 4
    assert "numerical abort" in proc.stderr


def test_verify_subcommand_passes_and_reports(tmp_path):
    out = tmp_path / "report"
    proc = _run("verify", "--out", str(out), "--quiet")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    report = json.loads((out / "verify_report.json").read_text())
    assert report["passed"] is True
    assert report["counts"]["failed"] == 0
    assert len(report["checks"]) >= 40


def test_verify_corrupt_negative_control_fails(tmp_path):
    out = tmp_path / "corrupt"
    proc = _run("verify", "--corrupt", "laplace_beltrami_sign", "--quiet", "--out", str(out))
    assert proc.returncode == 2
    report = json.loads((out / "verify_report.json").read_text())
    failed = {c["name"] for c in report["checks"] if not c["skipped"] and not c["passed"]}
    # the sign flip must be caught by the spectral and oracle checks ...
    assert "criterion_02_positivity" in failed
    assert "criterion_03_explicit_spectrum" in failed
    assert "criterion_09_oracle_equivalence" in failed
    # ... while structural conservation is unaffected by it (and must stay green)
    passed = {c["name"] for c in report["checks"] if c["passed"]}
    assert "criterion_06_conservation" in passed


def test_eigenmode_config_decays_at_closed_form_rate(tmp_path):
    out = tmp_path / "mode"
    proc = _run("simulate", "--config", str(CONFIGS / "eigenmode.yaml"), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    lines = (out / "trajectory.csv").read_text().splitlines()
    header = lines[0].split(",")
    col = header.index("c_3_0")
    first = float(lines[1].split(",")[col])
    last_row = lines[-1].split(",")
    t_last = float(last_row[0])
    import math

    expected = first * math.exp(-12.0 * t_last)
    assert float(last_row[col]) == pytest.approx(expected, rel=1e-7)
