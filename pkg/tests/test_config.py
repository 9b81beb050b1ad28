import pytest

from genharnack.config import EXPERIMENTS, ExperimentConfig
from genharnack.errors import ConfigError


def test_round_trip():
    cfg = ExperimentConfig.from_dict({"experiment": "harnack", "drift": {"kind": "homogeneous"},
                                      "tolerances": {"rel": 1e-8}, "params": {"m": 1.0, "M": 2.0}, "seed": 4})
    again = ExperimentConfig.from_json(cfg.to_json())
    assert again == cfg


def test_defaults():
    cfg = ExperimentConfig.from_dict({"experiment": "suite"})
    assert cfg.drift == {"kind": "log_linear", "c": 1.0}
    assert cfg.output == {} and cfg.seed is None
    assert "suite" in EXPERIMENTS


@pytest.mark.parametrize("data", [
    {},
    [],
    {"drift": {"kind": "homogeneous"}},
    {"experiment": "harnack", "colour": "blue"},
    {"experiment": "nope"},
    {"experiment": "harnack", "tolerances": {"rel": -1.0}},
    {"experiment": "harnack", "tolerances": {"rel": float("inf")}},
    {"experiment": "harnack", "params": [1, 2]},
    {"experiment": "harnack", "seed": 1.5},
    {"experiment": "harnack", "drift": {"kind": "power"}},
    {"experiment": "harnack", "drift": {"kind": "unknown"}},
])
def test_invalid_configs(data):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(data)


def test_invalid_json_and_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "missing.json")
