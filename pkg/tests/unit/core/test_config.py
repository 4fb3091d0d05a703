"""
Unit tests for hsthermo configuration
"""

import math
import os
from pathlib import Path
from unittest.mock import patch

import pytest

from hsthermo.core.config import ThermoConfig, parse_float_list, parse_n_grid
from hsthermo.core.errors import InvalidParameterError
from hsthermo.core.types import OutputFormat, SweepMode


class TestGridParsing:
    """N grid and number list formats"""

    def test_explicit_list(self):
        assert parse_n_grid("1,10,100") == [1, 10, 100]

    def test_inclusive_range(self):
        assert parse_n_grid("1:5") == [1, 2, 3, 4, 5]

    def test_logspace(self):
        values = parse_n_grid("logspace:1:1000:60")
        assert values[0] == 1
        assert values[-1] == 1000
        assert values == sorted(set(values))
        assert len(values) <= 60

    @pytest.mark.parametrize("text", ["0,1", "a,b", "logspace:1:10", ""])
    def test_invalid_n_grid(self, text):
        with pytest.raises(InvalidParameterError):
            parse_n_grid(text)

    def test_float_list_accepts_inf(self):
        values = parse_float_list("100, 400,inf")
        assert values[:2] == [100.0, 400.0]
        assert math.isinf(values[2])

    def test_invalid_float_list(self):
        with pytest.raises(InvalidParameterError):
            parse_float_list("1,two")


class TestThermoConfig:
    """Defaults, environment variables and validation"""

    def test_default_config(self):
        config = ThermoConfig()
        assert config.model.theta == 2.0
        assert config.model.xi == 400.0
        assert config.model.eta == 0.1
        assert config.nmax.tau is None
        assert config.output.format == "csv"
        assert config.output.threads == 1

    def test_config_from_env(self):
        env_vars = {
            'THERMO_MODEL_THETA': '3.5',
            'THERMO_MODEL_XI': 'inf',
            'THERMO_SWEEP_N': '1:10',
            'THERMO_SWEEP_MODE': 'ideal',
            'THERMO_NMAX_TAU': '0.5',
            'THERMO_NMAX_RULE': 'peak',
            'THERMO_OUTPUT_FORMAT': 'json',
            'THERMO_OUTPUT_THREADS': '4',
            'THERMO_OUTPUT_PATH': 'out/sweep.json',
        }
        with patch.dict(os.environ, env_vars):
            config = ThermoConfig.from_env()

        assert config.model.theta == 3.5
        assert math.isinf(config.model.xi)
        assert config.nmax.tau == 0.5
        assert config.nmax.rule == 'peak'
        assert config.output.threads == 4
        spec = config.to_sweep_spec()
        assert spec.mode is SweepMode.IDEAL
        assert spec.output_format is OutputFormat.JSON
        assert spec.n_values == list(range(1, 11))
        assert spec.output_path == 'out/sweep.json'

    @pytest.mark.parametrize("key, value", [
        ('THERMO_OUTPUT_FORMAT', 'xml'),
        ('THERMO_SWEEP_MODE', 'fast'),
        ('THERMO_NMAX_RULE', 'median'),
        ('THERMO_NMAX_TAU', '1.5'),
        ('THERMO_OUTPUT_THREADS', 'many'),
        ('THERMO_OUTPUT_THREADS', '0'),
        ('THERMO_MODEL_THETA', 'hot'),
        ('THERMO_MODEL_ETA', '-1'),
    ])
    def test_invalid_environment(self, key, value):
        with patch.dict(os.environ, {key: value}):
            with pytest.raises(InvalidParameterError):
                ThermoConfig.from_env()

    def test_to_model(self):
        model = ThermoConfig().to_model()
        assert (model.theta, model.xi, model.eta) == (2.0, 400.0, 0.1)


class TestYamlConfig:
    """dotyaml-backed configuration file"""

    def test_missing_default_file_is_fine(self, original_load_yaml):
        assert ThermoConfig.load_yaml_config() is False

    def test_missing_explicit_file(self, original_load_yaml):
        with pytest.raises(InvalidParameterError):
            ThermoConfig.load_yaml_config('does-not-exist.yml')

    def test_yaml_values_and_env_precedence(self, original_load_yaml, tmp_path):
        config_file = Path(tmp_path) / 'thermo.yml'
        config_file.write_text("model:\n  theta: 3.0\n  eta: 0.2\n")
        with patch.dict(os.environ, {'THERMO_MODEL_ETA': '0.3'}):
            config = ThermoConfig.from_env(str(config_file))
        assert config.model.theta == 3.0
        assert config.model.eta == 0.3
