"""Shared test fixtures and configuration."""

import os
import sys

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from spacetime_qc.config import reset_config  # noqa: E402


@pytest.fixture
def rng():
    """Fixed-seed random stream."""
    return np.random.default_rng(20240601)


@pytest.fixture
def clean_env(monkeypatch):
    """Clean environment variables for testing."""
    env_vars = [
        "QSIM_MAX_DENSE_QUBITS",
        "QSIM_VALIDATE_GATES",
        "QSIM_UNITARITY_TOL",
        "QSIM_NORM_TOL",
        "QSIM_WORKERS",
        "QSIM_RESULTS_DIR",
        "QSIM_SAMPLE_CHUNK",
        "LOG_LEVEL",
        "LOG_FORMAT",
        "LOG_FILE_PATH",
    ]
    for var in env_vars:
        monkeypatch.delenv(var, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture
def results_dir(tmp_path, monkeypatch, clean_env):
    """Point the results directory at a temporary path."""
    monkeypatch.setenv("QSIM_RESULTS_DIR", str(tmp_path / "results"))
    reset_config()
    return tmp_path / "results"


# Markers
def pytest_configure(config):
    config.addinivalue_line("markers", "unit: Unit tests (fast, no large sampling)")
    config.addinivalue_line("markers", "integration: Acceptance-scale experiment runs")
