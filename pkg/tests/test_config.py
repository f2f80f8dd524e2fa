"""Tests for run configuration resolution."""

from fractions import Fraction
from pathlib import Path

import pytest

from flowcat import ConfigError, ErrorCode, OutputFormat, Ring, RunConfig
from flowcat.config import load_config_file, resolve_config


def write_ini(tmp_path, body: str):
    path = tmp_path / "flowcat.ini"
    path.write_text(body, encoding="utf-8")
    return path


def test_defaults():
    config = resolve_config(environ={})

    assert config == RunConfig()
    assert config.ring == Ring.Z
    assert config.epsilon == Fraction(1, 2)
    assert config.output_format == OutputFormat.JSON


class TestPrecedence:
    """Arguments override the environment, which overrides the file."""

    def test_file_values_are_read(self, tmp_path):
        path = write_ini(tmp_path, "[flowcat]\nring = Z/2\nmax_codim = 5\n")

        config = resolve_config(config_path=path, environ={})

        assert config.ring == Ring.Z2
        assert config.max_codim == 5

    def test_environment_overrides_file(self, tmp_path):
        path = write_ini(tmp_path, "[flowcat]\nepsilon = 1/3\nthreads = 2\n")

        config = resolve_config(
            config_path=path, environ={"FLOWCAT_EPSILON": "1/4"}
        )

        assert config.epsilon == Fraction(1, 4)
        assert config.threads == 2

    def test_overrides_win(self, tmp_path):
        path = write_ini(tmp_path, "[flowcat]\nring = Z/2\n")

        config = resolve_config(
            {"ring": "Z", "threads": None},
            config_path=path,
            environ={"FLOWCAT_RING": "Z/2", "FLOWCAT_THREADS": "3"},
        )

        assert config.ring == Ring.Z
        assert config.threads == 3


class TestInvalidConfiguration:
    @pytest.mark.parametrize("epsilon", ["0", "1", "3/2", "-1/2"])
    def test_epsilon_out_of_range(self, epsilon):
        with pytest.raises(ConfigError) as exc_info:
            resolve_config({"epsilon": epsilon}, environ={})

        assert exc_info.value.code == ErrorCode.CONFIG_INVALID

    def test_unknown_key_is_rejected(self, tmp_path):
        path = write_ini(tmp_path, "[flowcat]\ncolour = blue\n")

        with pytest.raises(ConfigError):
            resolve_config(config_path=path, environ={})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError) as exc_info:
            load_config_file(tmp_path / "absent.ini")

        assert exc_info.value.code == ErrorCode.CONFIG_INVALID

    def test_file_without_section_is_empty(self, tmp_path, caplog):
        path = write_ini(tmp_path, "[other]\nring = Z\n")

        assert load_config_file(path) == {}
        assert "No [flowcat] section" in caplog.text


def test_example_config_is_valid():
    example = Path(__file__).resolve().parents[1] / "util" / "flowcat.example.ini"

    config = resolve_config(config_path=example, environ={})

    assert config.max_codim == 3
    assert config.grid_steps == 4
