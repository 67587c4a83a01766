"""Tests for experiment configuration."""

from pathlib import Path

import pytest
import yaml

from src.config import ExperimentConfig
from src.errors import ConfigError
from src.solvers.kernel import AbsorbMode
from src.walk.coin import CoinMode

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


def write_config(tmp_path, data, geometry=None):
    if geometry is not None:
        (tmp_path / "geometry.yaml").write_text(yaml.safe_dump(geometry), encoding="utf-8")
    path = tmp_path / "experiment.yaml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


def test_shipped_experiment_config():
    config = ExperimentConfig(CONFIG_DIR / "experiment.yaml")
    config.validate()
    assert config.geometry.shape == (8, 8)
    assert config.geometry.cell_size == pytest.approx(1.25)
    assert config.source.cell == (0, 4)
    assert config.solvers == ["mc", "fd", "walk-measured"]
    assert config.absorb_mode is AbsorbMode.SELF_LOOP
    assert config.coin_mode is CoinMode.FAST


def test_shipped_small_config():
    config = ExperimentConfig(CONFIG_DIR / "small.yaml")
    config.validate()
    assert config.geometry.shape == (4, 4)
    assert config.detector.cells == frozenset({(0, 0)})


def test_defaults(tmp_path):
    path = write_config(tmp_path, {"geometry": "geometry.yaml"}, {"grid": {"n_x": 2}})
    config = ExperimentConfig(path)
    assert config.seed == 12345
    assert config.steps == 10
    assert config.shots == 1000
    assert config.swap_shots == 1000
    assert config.grover_k == "auto"
    assert config.fd_iterations is None
    assert config.slice_axis == "x"


def test_overrides_skip_none(tmp_path):
    path = write_config(
        tmp_path, {"geometry": "geometry.yaml", "walk": {"steps": 4}}, {"grid": {"n_x": 2}}
    )
    config = ExperimentConfig(path, overrides={"seed": 3})
    config.override(steps=None, shots=50, grover_k=2)
    assert config.seed == 3
    assert config.steps == 4
    assert config.shots == 50
    assert config.swap_shots == 50
    assert config.grover_k == 2


def test_inline_geometry():
    config = ExperimentConfig.from_dict(
        {"geometry": {"grid": {"n_x": 2}}, "solvers": ["fd"]}
    )
    config.validate()
    assert config.geometry.shape == (4, 4)


def test_validate_requires_solver(tmp_path):
    path = write_config(tmp_path, {"geometry": "geometry.yaml"}, {"grid": {"n_x": 2}})
    with pytest.raises(ConfigError, match="no solver"):
        ExperimentConfig(path).validate()


def test_validate_rejects_unknown_solver():
    config = ExperimentConfig.from_dict({"geometry": {"grid": {"n_x": 2}}, "solvers": ["mcnp"]})
    with pytest.raises(ConfigError, match="mcnp"):
        config.validate()


def test_bad_enum_values():
    config = ExperimentConfig.from_dict(
        {"walk": {"absorb_mode": "bounce", "coin_mode": "magic"}, "amplified": {"k": "lots"}}
    )
    with pytest.raises(ConfigError):
        _ = config.absorb_mode
    with pytest.raises(ConfigError):
        _ = config.coin_mode
    with pytest.raises(ConfigError):
        _ = config.grover_k


def test_missing_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        ExperimentConfig(tmp_path / "nope.yaml")
    path = write_config(tmp_path, {"geometry": "missing.yaml", "solvers": ["fd"]})
    with pytest.raises(FileNotFoundError):
        ExperimentConfig(path).validate()


def test_geometry_errors_name_the_file(tmp_path):
    path = write_config(
        tmp_path, {"geometry": "geometry.yaml", "solvers": ["fd"]}, {"layout": {"preset": "x"}}
    )
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig(path).validate()
    assert excinfo.value.path.endswith("geometry.yaml")


def test_to_dict_is_yaml_safe(tmp_path):
    config = ExperimentConfig(CONFIG_DIR / "experiment.yaml")
    data = yaml.safe_load(yaml.safe_dump(config.to_dict()))
    assert data["walk"]["absorb_mode"] == "self-loop"
    assert data["amplified"]["k"] == "auto"


def test_validate_rejects_slice_outside_domain():
    config = ExperimentConfig.from_dict(
        {"geometry": {"grid": {"n_x": 2, "cell_size": 1.0}}, "solvers": ["fd"]}
    )
    with pytest.raises(ConfigError, match="outside the domain"):
        config.validate()
    edge = ExperimentConfig.from_dict(
        {
            "geometry": {"grid": {"n_x": 2, "cell_size": 1.0}},
            "solvers": ["fd"],
            "slice": {"axis": "y", "coordinate": 4.0},
        }
    )
    edge.validate()


def test_trace_setting(tmp_path):
    path = write_config(tmp_path, {"geometry": "geometry.yaml"}, {"grid": {"n_x": 2}})
    assert ExperimentConfig(path).trace_particles == 0
    assert ExperimentConfig(path, overrides={"trace_particles": 3}).trace_particles == 3
    config = ExperimentConfig.from_dict({"mc": {"trace": -1}})
    with pytest.raises(ConfigError, match="trace"):
        _ = config.trace_particles
