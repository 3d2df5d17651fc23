"""Run configuration: schema, validation, and (de)serialization.

A run is described by a single YAML (or JSON — YAML is a superset) document:

    dimension: 2
    max_degree: 16
    initial_condition:
      # exactly one of the two variants
      coefficients:
        - {index: [2, 0], value: 0.141421356237309515}
        - {index: [0, 2], value: -0.141421356237309515}
      # gaussian_mixture:
      #   components:
      #     - {weight: 1.0, mean: [0.0, 0.0], covariance: [[1.2, 0.0], [0.0, 0.8]]}
    integrator:
      dt: 1.0e-3
      t_final: 1.0
      output_every: 10
    delta_override: null        # optional; defaults to the admissibility rule
    oracle:
      nodes_per_axis: 64
      comparison_points: 200
      refine_by: 8
    seed: 1234                  # used only by checks that draw random data
    output_dir: null            # usually supplied via --out on the command line

`load_config` also accepts a previously emitted run summary (JSON with a
"config" key), so a run can be reproduced from its own summary file.

Validation reports the dotted path of the offending field (e.g.
"integrator.dt: must be positive").  All validation happens before any
computation starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from landau_hermite.moments import GaussianComponent, GaussianMixtureSpec

__all__ = [
    "ConfigError",
    "IntegratorSettings",
    "OracleSettings",
    "RunConfig",
    "load_config",
    "config_from_dict",
]


class ConfigError(ValueError):
    """Configuration rejected; the message carries the dotted field path."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _get_number(raw: dict, path: str, key: str, default=None, required=False):
    where = f"{path}.{key}" if path else key
    if key not in raw or raw[key] is None:
        if required:
            _fail(where, "is required")
        return default
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(where, f"must be a number, got {type(value).__name__}")
    return value


def _get_int(raw: dict, path: str, key: str, default=None, required=False):
    value = _get_number(raw, path, key, default=default, required=required)
    if value is None or value is default:
        return default
    where = f"{path}.{key}" if path else key
    if isinstance(value, float) and not value.is_integer():
        _fail(where, f"must be an integer, got {value}")
    return int(value)


@dataclass
class IntegratorSettings:
    dt: float = 1e-3
    t_final: float = 1.0
    output_every: int = 1

    def validate(self, path: str = "integrator"):
        if self.dt <= 0:
            _fail(f"{path}.dt", f"must be positive, got {self.dt}")
        if self.t_final <= 0:
            _fail(f"{path}.t_final", f"must be positive, got {self.t_final}")
        if self.output_every < 1:
            _fail(f"{path}.output_every", f"must be >= 1, got {self.output_every}")
        steps = self.t_final / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, abs(steps)) or round(steps) < 1:
            _fail(f"{path}.t_final", f"must be a positive integer multiple of dt, got {steps} steps")
        if round(steps) * self.output_every > 0 and round(steps) % self.output_every != 0:
            _fail(
                f"{path}.output_every",
                f"must divide the step count {int(round(steps))}, got {self.output_every}",
            )

    def as_dict(self) -> dict:
        return {"dt": self.dt, "t_final": self.t_final, "output_every": self.output_every}


@dataclass
class OracleSettings:
    nodes_per_axis: int = 64
    comparison_points: int = 200
    refine_by: int = 8

    def validate(self, path: str = "oracle"):
        if self.nodes_per_axis < 2:
            _fail(f"{path}.nodes_per_axis", f"must be >= 2, got {self.nodes_per_axis}")
        if self.comparison_points < 1:
            _fail(f"{path}.comparison_points", f"must be >= 1, got {self.comparison_points}")
        if self.refine_by < 1:
            _fail(f"{path}.refine_by", f"must be >= 1, got {self.refine_by}")

    def as_dict(self) -> dict:
        return {
            "nodes_per_axis": self.nodes_per_axis,
            "comparison_points": self.comparison_points,
            "refine_by": self.refine_by,
        }


@dataclass
class RunConfig:
    dimension: int
    max_degree: int
    coefficients: list[tuple[tuple[int, ...], float]] | None = None
    mixture: GaussianMixtureSpec | None = None
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    delta_override: float | None = None
    seed: int = 0
    output_dir: str | None = None

    def validate(self):
        if self.dimension < 2:
            _fail("dimension", f"must be >= 2, got {self.dimension}")
        if self.max_degree < 0:
            _fail("max_degree", f"must be >= 0, got {self.max_degree}")
        given = [name for name, v in (("coefficients", self.coefficients), ("gaussian_mixture", self.mixture)) if v is not None]
        if len(given) != 1:
            _fail(
                "initial_condition",
                f"exactly one of coefficients|gaussian_mixture must be given, got {given or 'neither'}",
            )
        if self.coefficients is not None:
            for pos, (alpha, value) in enumerate(self.coefficients):
                where = f"initial_condition.coefficients[{pos}]"
                if len(alpha) != self.dimension:
                    _fail(f"{where}.index", f"has {len(alpha)} entries, dimension is {self.dimension}")
                if any(a < 0 for a in alpha):
                    _fail(f"{where}.index", f"entries must be >= 0, got {list(alpha)}")
                if sum(alpha) > self.max_degree:
                    _fail(f"{where}.index", f"degree {sum(alpha)} exceeds max_degree {self.max_degree}")
                if not np.isfinite(value):
                    _fail(f"{where}.value", f"must be finite, got {value}")
        if self.mixture is not None and self.mixture.dimension != self.dimension:
            _fail(
                "initial_condition.gaussian_mixture",
                f"components have dimension {self.mixture.dimension}, config says {self.dimension}",
            )
        self.integrator.validate()
        self.oracle.validate()
        if self.delta_override is not None and not (0.0 < self.delta_override <= 1.0):
            _fail("delta_override", f"must lie in (0, 1], got {self.delta_override}")
        if self.seed < 0:
            _fail("seed", f"must be >= 0, got {self.seed}")

    def as_dict(self) -> dict:
        """Fully-resolved plain-data form; loading it back reproduces the run."""
        initial: dict = {}
        if self.coefficients is not None:
            initial["coefficients"] = [
                {"index": [int(a) for a in alpha], "value": float(v)} for alpha, v in self.coefficients
            ]
        if self.mixture is not None:
            initial["gaussian_mixture"] = {
                "components": [
                    {
                        "weight": float(c.weight),
                        "mean": [float(x) for x in c.mean],
                        "covariance": [[float(x) for x in row] for row in c.covariance],
                    }
                    for c in self.mixture.components
                ]
            }
        return {
            "dimension": self.dimension,
            "max_degree": self.max_degree,
            "initial_condition": initial,
            "integrator": self.integrator.as_dict(),
            "oracle": self.oracle.as_dict(),
            "delta_override": self.delta_override,
            "seed": self.seed,
            "output_dir": self.output_dir,
        }


def _parse_coefficients(raw, dimension: int):
    if not isinstance(raw, list):
        _fail("initial_condition.coefficients", f"must be a list, got {type(raw).__name__}")
    out = []
    for pos, entry in enumerate(raw):
        where = f"initial_condition.coefficients[{pos}]"
        if not isinstance(entry, dict):
            _fail(where, f"must be a mapping with index and value, got {type(entry).__name__}")
        unknown = set(entry) - {"index", "value"}
        if unknown:
            _fail(where, f"unknown keys {sorted(unknown)}")
        if "index" not in entry or "value" not in entry:
            _fail(where, "needs both index and value")
        idx = entry["index"]
        if not isinstance(idx, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in idx):
            _fail(f"{where}.index", "must be a list of integers")
        value = entry["value"]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            _fail(f"{where}.value", f"must be a number, got {type(value).__name__}")
        out.append((tuple(idx), float(value)))
    return out


def _parse_mixture(raw):
    where = "initial_condition.gaussian_mixture"
    if not isinstance(raw, dict):
        _fail(where, f"must be a mapping, got {type(raw).__name__}")
    unknown = set(raw) - {"components"}
    if unknown:
        _fail(where, f"unknown keys {sorted(unknown)}")
    comps_raw = raw.get("components")
    if not isinstance(comps_raw, list) or not comps_raw:
        _fail(f"{where}.components", "must be a non-empty list")
    comps = []
    for pos, entry in enumerate(comps_raw):
        cwhere = f"{where}.components[{pos}]"
        if not isinstance(entry, dict):
            _fail(cwhere, f"must be a mapping, got {type(entry).__name__}")
        unknown = set(entry) - {"weight", "mean", "covariance"}
        if unknown:
            _fail(cwhere, f"unknown keys {sorted(unknown)}")
        for key in ("weight", "mean", "covariance"):
            if key not in entry:
                _fail(f"{cwhere}.{key}", "is required")
        try:
            comps.append(
                GaussianComponent(
                    weight=float(entry["weight"]),
                    mean=np.asarray(entry["mean"], dtype=float),
                    covariance=np.asarray(entry["covariance"], dtype=float),
                )
            )
        except (ValueError, TypeError) as exc:
            _fail(cwhere, str(exc))
    return GaussianMixtureSpec(comps)


def config_from_dict(raw: dict) -> RunConfig:
    """Build and validate a RunConfig from plain data (already parsed YAML/JSON)."""
    if not isinstance(raw, dict):
        raise ConfigError(f"top level: must be a mapping, got {type(raw).__name__}")
    if "config" in raw and "dimension" not in raw:
        # a run-summary document; its embedded resolved config drives the re-run
        raw = raw["config"]
        if not isinstance(raw, dict):
            raise ConfigError("config: must be a mapping")
    known = {
        "dimension",
        "max_degree",
        "initial_condition",
        "integrator",
        "oracle",
        "delta_override",
        "seed",
        "output_dir",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"top level: unknown keys {sorted(unknown)}")

    dimension = _get_int(raw, "", "dimension", required=True)
    max_degree = _get_int(raw, "", "max_degree", required=True)

    initial = raw.get("initial_condition")
    coefficients = None
    mixture = None
    if initial is not None:
        if not isinstance(initial, dict):
            _fail("initial_condition", f"must be a mapping, got {type(initial).__name__}")
        unknown = set(initial) - {"coefficients", "gaussian_mixture"}
        if unknown:
            _fail("initial_condition", f"unknown keys {sorted(unknown)}")
        if "coefficients" in initial and initial["coefficients"] is not None:
            coefficients = _parse_coefficients(initial["coefficients"], dimension)
        if "gaussian_mixture" in initial and initial["gaussian_mixture"] is not None:
            mixture = _parse_mixture(initial["gaussian_mixture"])

    integ_raw = raw.get("integrator") or {}
    if not isinstance(integ_raw, dict):
        _fail("integrator", f"must be a mapping, got {type(integ_raw).__name__}")
    unknown = set(integ_raw) - {"dt", "t_final", "output_every"}
    if unknown:
        _fail("integrator", f"unknown keys {sorted(unknown)}")
    integrator = IntegratorSettings(
        dt=float(_get_number(integ_raw, "integrator", "dt", default=1e-3)),
        t_final=float(_get_number(integ_raw, "integrator", "t_final", default=1.0)),
        output_every=_get_int(integ_raw, "integrator", "output_every", default=1),
    )

    oracle_raw = raw.get("oracle") or {}
    if not isinstance(oracle_raw, dict):
        _fail("oracle", f"must be a mapping, got {type(oracle_raw).__name__}")
    unknown = set(oracle_raw) - {"nodes_per_axis", "comparison_points", "refine_by"}
    if unknown:
        _fail("oracle", f"unknown keys {sorted(unknown)}")
    oracle = OracleSettings(
        nodes_per_axis=_get_int(oracle_raw, "oracle", "nodes_per_axis", default=64),
        comparison_points=_get_int(oracle_raw, "oracle", "comparison_points", default=200),
        refine_by=_get_int(oracle_raw, "oracle", "refine_by", default=8),
    )

    delta_override = _get_number(raw, "", "delta_override", default=None)
    if delta_override is not None:
        delta_override = float(delta_override)
    output_dir = raw.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        _fail("output_dir", f"must be a string path, got {type(output_dir).__name__}")

    config = RunConfig(
        dimension=dimension,
        max_degree=max_degree,
        coefficients=coefficients,
        mixture=mixture,
        integrator=integrator,
        oracle=oracle,
        delta_override=delta_override,
        seed=_get_int(raw, "", "seed", default=0),
        output_dir=output_dir,
    )
    config.validate()
    return config


def load_config(path: str | Path) -> RunConfig:
    """Load a config from YAML/JSON, or from a run summary's embedded config."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not parseable: {exc}") from exc
    if raw is None:
        raise ConfigError(f"{path}: file is empty")
    return config_from_dict(raw)
