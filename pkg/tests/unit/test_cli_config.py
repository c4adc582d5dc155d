"""Tests for run configuration parsing and validation."""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.cli.main import build_parser, load_config_file, resolve_config
from src.config import settings as settings_module
from src.models.schemas import RunConfig
from src.utils.exceptions import ConfigurationError


def _resolve(*argv: str) -> RunConfig:
    return resolve_config(build_parser().parse_args(list(argv)))


class TestRunConfig:
    """RunConfig validation."""

    def test_defaults(self) -> None:
        """Test the documented defaults."""
        config = RunConfig(command="simulate")
        assert (config.n, config.reps, config.seed, config.trees) == (500, 50, 1, 1000)
        assert (config.beta, config.alpha, config.k, config.pi, config.min_arm) == (
            0.8, 0.2, 10, 0.8, 3
        )
        assert config.lasso_lambda == 2.605

    def test_environment_defaults(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that FPLS_DEFAULT_SEED and FPLS_OUTPUT_DIR supply unset seed and out."""
        monkeypatch.setenv("FPLS_DEFAULT_SEED", "42")
        monkeypatch.setenv("FPLS_OUTPUT_DIR", "runs/today")
        monkeypatch.setattr(settings_module, "settings", settings_module.get_settings())
        config = _resolve("simulate")
        assert config.seed == 42
        assert config.out == Path("runs/today")
        assert _resolve("simulate", "--seed", "3", "--out", "x").seed == 3

    def test_unknown_field(self) -> None:
        """Test that unknown keys are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="simulate", trees_count=10)

    @pytest.mark.parametrize(
        "kwargs", [{"n": 10}, {"beta": 1.0}, {"alpha": 0.7}, {"ci_level": 1.0}, {"design": "x"}]
    )
    def test_ranges(self, kwargs: dict) -> None:
        """Test that out-of-range values are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="simulate", **kwargs)

    def test_analyze_requires_data(self) -> None:
        """Test that analyze needs a data file and a schema source."""
        with pytest.raises(ValidationError, match="requires --data"):
            RunConfig(command="analyze", preset="penn")
        with pytest.raises(ValidationError, match="--preset penn or --schema"):
            RunConfig(command="analyze", data=Path("x.csv"))

    def test_components_raise_max(self) -> None:
        """Test that a fixed component count above max_components raises the cap."""
        config = RunConfig(command="simulate", components=8, max_components=6)
        assert config.max_components == 8


class TestResolveConfig:
    """Merging YAML files and CLI flags."""

    def test_flags(self) -> None:
        """Test that flags map onto RunConfig fields."""
        config = _resolve("compare", "--design", "iv", "--n", "300", "--lambda", "1.5")
        assert config.command == "compare"
        assert config.design == "iv"
        assert config.n == 300
        assert config.lasso_lambda == 1.5

    def test_yaml_then_flags(self, tmp_path: Path) -> None:
        """Test that YAML values load and explicit flags win."""
        path = tmp_path / "run.yaml"
        path.write_text("design: nbd\nn: 800\ntrees: 50\n")
        config = _resolve("simulate", "--config", str(path), "--n", "400")
        assert (config.design, config.n, config.trees) == ("nbd", 400, 50)

    def test_schema_flag_renamed(self) -> None:
        """Test that --schema fills schema_path."""
        config = _resolve("analyze", "--data", "d.csv", "--schema", "s.json", "--no-scale")
        assert config.schema_path == Path("s.json")
        assert config.scale is False

    def test_unknown_yaml_key(self, tmp_path: Path) -> None:
        """Test that an unknown YAML key is a configuration error."""
        path = tmp_path / "run.yaml"
        path.write_text("design: rct\nshrinkage: 3\n")
        with pytest.raises(ConfigurationError):
            _resolve("simulate", "--config", str(path))

    def test_yaml_not_mapping(self, tmp_path: Path) -> None:
        """Test that a YAML list is rejected."""
        path = tmp_path / "run.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigurationError):
            load_config_file(path)

    def test_missing_yaml(self, tmp_path: Path) -> None:
        """Test that a missing config file is a configuration error."""
        with pytest.raises(ConfigurationError):
            load_config_file(tmp_path / "absent.yaml")

    def test_invalid_value(self) -> None:
        """Test that validation failures become configuration errors."""
        with pytest.raises(ConfigurationError):
            _resolve("simulate", "--n", "5")


class TestShippedConfigs:
    """Run configurations under config/."""

    CONFIG_DIR = Path(__file__).parents[2] / "config"

    @pytest.mark.parametrize(
        "name,command", [("simulate_rct", "simulate"), ("compare_rct", "compare")]
    )
    def test_simulation_configs(self, name: str, command: str) -> None:
        """Test that the shipped study configs validate."""
        config = _resolve(command, "--config", str(self.CONFIG_DIR / f"{name}.yaml"))
        assert config.design == "rct"

    def test_penn_config(self) -> None:
        """Test that the Penn config validates once a data file is given."""
        config = _resolve(
            "analyze", "--config", str(self.CONFIG_DIR / "analyze_penn.yaml"), "--data", "penn.dat"
        )
        assert config.preset == "penn"
        assert config.scale is True
