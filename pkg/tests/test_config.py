"""Configuration schema: parsing, validation, round-trips."""

import json

import pytest
import yaml

from landau_hermite.config import (
    ConfigError,
    IntegratorSettings,
    RunConfig,
    config_from_dict,
    load_config,
)

GOOD = {
    "dimension": 2,
    "max_degree": 8,
    "initial_condition": {
        "coefficients": [
            {"index": [2, 0], "value": 0.07071067811865475},
            {"index": [0, 2], "value": -0.07071067811865475},
        ]
    },
    "integrator": {"dt": 1e-2, "t_final": 0.5, "output_every": 10},
    "seed": 3,
}


def _load(raw_dict):
    return config_from_dict(json.loads(json.dumps(raw_dict)))


def test_good_config_parses():
    config = _load(GOOD)
    assert config.dimension == 2
    assert config.max_degree == 8
    assert config.coefficients == [
        ((2, 0), 0.07071067811865475),
        ((0, 2), -0.07071067811865475),
    ]
    assert config.mixture is None
    assert config.integrator.dt == 1e-2
    assert config.seed == 3


def test_yaml_file_round_trip(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(GOOD))
    config = load_config(path)
    reparsed = config_from_dict(config.as_dict())
    assert reparsed.as_dict() == config.as_dict()


def test_summary_unwrap(tmp_path):
    # a run summary embeds the resolved config under a "config" key
    wrapped = {"config": GOOD, "certification": {"verdict": "pass"}}
    path = tmp_path / "summary.json"
    path.write_text(json.dumps(wrapped))
    config = load_config(path)
    assert config.dimension == 2


def test_mixture_config_parses():
    raw = {
        "dimension": 2,
        "max_degree": 6,
        "initial_condition": {
            "gaussian_mixture": {
                "components": [
                    {
                        "weight": 1.0,
                        "mean": [0.0, 0.0],
                        "covariance": [[1.2, 0.0], [0.0, 0.8]],
                    }
                ]
            }
        },
        "integrator": {"dt": 1e-2, "t_final": 0.1, "output_every": 1},
    }
    config = _load(raw)
    assert config.coefficients is None
    assert config.mixture is not None
    assert config.mixture.components[0].covariance[0][0] == 1.2


@pytest.mark.parametrize(
    "mutate,path_fragment",
    [
        (lambda r: r.pop("dimension"), "dimension"),
        (lambda r: r.update(dimension=1), "dimension"),
        (lambda r: r.update(max_degree=-2), "max_degree"),
        (lambda r: r.update(unknown_key=1), "unknown"),
        (lambda r: r["integrator"].update(dt=0.0), "integrator.dt"),
        (lambda r: r["integrator"].update(t_final=0.503), "t_final"),
        (lambda r: r["integrator"].update(output_every=7), "output_every"),
        (lambda r: r.update(delta_override=1.5), "delta_override"),
        (lambda r: r.update(seed=-1), "seed"),
        (
            lambda r: r["initial_condition"]["coefficients"].append(
                {"index": [1, 2, 3], "value": 0.1}
            ),
            "index",
        ),
        (
            lambda r: r["initial_condition"]["coefficients"].append(
                {"index": [9, 0], "value": 0.1}
            ),
            "degree",
        ),
        (
            lambda r: r["initial_condition"]["coefficients"].append(
                {"index": [1, 0], "value": True}
            ),
            "value",
        ),
        (lambda r: r["initial_condition"].pop("coefficients"), "initial_condition"),
    ],
)
def test_invalid_configs_report_dotted_path(mutate, path_fragment):
    raw = json.loads(json.dumps(GOOD))
    mutate(raw)
    with pytest.raises(ConfigError) as err:
        _load(raw)
    assert path_fragment in str(err.value)


def test_both_initial_condition_variants_rejected():
    raw = json.loads(json.dumps(GOOD))
    raw["initial_condition"]["gaussian_mixture"] = {
        "components": [
            {"weight": 1.0, "mean": [0.0, 0.0], "covariance": [[1.0, 0.0], [0.0, 1.0]]}
        ]
    }
    with pytest.raises(ConfigError):
        _load(raw)


def test_integrator_settings_validation():
    with pytest.raises(ConfigError):
        IntegratorSettings(dt=-1e-3, t_final=1.0, output_every=1).validate()
    with pytest.raises(ConfigError):
        IntegratorSettings(dt=1e-3, t_final=1.0, output_every=3).validate()
    IntegratorSettings(dt=1e-3, t_final=1.0, output_every=100).validate()


def test_run_config_validate_direct_construction():
    config = RunConfig(
        dimension=2,
        max_degree=6,
        coefficients=[((2, 0), 0.1)],
        mixture=None,
        integrator=IntegratorSettings(dt=1e-2, t_final=0.1, output_every=1),
    )
    config.validate()
    bad = RunConfig(
        dimension=2,
        max_degree=6,
        coefficients=None,
        mixture=None,
        integrator=IntegratorSettings(dt=1e-2, t_final=0.1, output_every=1),
    )
    with pytest.raises(ConfigError):
        bad.validate()


def test_load_config_missing_and_malformed(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("dimension: [unclosed")
    with pytest.raises(ConfigError):
        load_config(bad)
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    with pytest.raises(ConfigError):
        load_config(empty)
