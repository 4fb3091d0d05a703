"""
Integration Test Configuration

Shared fixtures for tests that run hsthermo in a separate process.
"""

import subprocess
import sys

import pytest

from tests.conftest import setup_subprocess_environment


@pytest.fixture
def run_hsthermo(tmp_path):
    """Run `python -m hsthermo.cli` in tmp_path and return the CompletedProcess"""

    def _run(*arguments, env=None, timeout=300):
        return subprocess.run(
            [sys.executable, "-m", "hsthermo.cli", *arguments],
            capture_output=True,
            text=True,
            timeout=timeout,
            env=setup_subprocess_environment(env),
            cwd=str(tmp_path),
        )

    return _run
