"""Pytest configuration and shared fixtures for hsthermo tests."""

import os
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

# Add the project root to Python path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Patch config loading BEFORE any hsthermo modules are used
# This prevents .hsthermo/config.yml from overriding test environment variables
from hsthermo.core.config import ThermoConfig
_original_load_yaml = ThermoConfig.load_yaml_config
ThermoConfig.load_yaml_config = staticmethod(lambda config_path=None: False)

from hsthermo.core.models import QubitThermalModel


def setup_subprocess_environment(env=None):
    """Environment for subprocess tests, with the project root on PYTHONPATH"""
    if env is None:
        env = os.environ.copy()
    current_pythonpath = env.get('PYTHONPATH', '')
    if current_pythonpath:
        env['PYTHONPATH'] = f"{project_root}{os.pathsep}{current_pythonpath}"
    else:
        env['PYTHONPATH'] = str(project_root)
    return env


@pytest.fixture
def original_load_yaml():
    """The unpatched YAML loader, for tests of the config file itself"""
    with patch.object(ThermoConfig, 'load_yaml_config', staticmethod(_original_load_yaml)):
        yield _original_load_yaml


@pytest.fixture
def example_model():
    """Worked example: theta = 2, xi = 400, eta = 0.1"""
    return QubitThermalModel(theta=2.0, xi=400.0, eta=0.1)


@pytest.fixture
def fast_model():
    """Fast thermalization, close to the instant limit"""
    return QubitThermalModel(theta=2.0, xi=1e6, eta=0.1)


@pytest.fixture(autouse=True)
def setup_test_environment(monkeypatch, tmp_path):
    """Isolate every test from THERMO_* variables, .env files and the working directory"""
    for key in list(os.environ):
        if key.startswith('THERMO_'):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)
    with patch('dotenv.load_dotenv', return_value=False):
        yield
