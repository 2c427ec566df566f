"""Shared fixtures for loop-squeezer tests."""

import copy
import os
import sys
from pathlib import Path
from typing import Any, Dict, Generator

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "scripts"))

from loop_squeezer.constants import DEFAULT_CONFIG  # noqa: E402


@pytest.fixture
def temp_dir(tmp_path: Path) -> Generator[Path, None, None]:
    """Create a temporary directory for tests."""
    original_cwd = os.getcwd()
    os.chdir(tmp_path)
    yield tmp_path
    os.chdir(original_cwd)


@pytest.fixture
def sample_config() -> Dict[str, Any]:
    """Small phase-space config with one published single-step program."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    config.update(
        {
            "name": "sample",
            "engine": "phase_space",
            "programs": [
                {
                    "label": "x r=0.26",
                    "target_r": [0.26],
                    "steps": [{"R": 0.40, "phi_deg": 90.0, "g": -0.82}],
                }
            ],
            "wigner_grid": {"extent": 3.0, "points": 7},
            "runtime": {"parallel": False, "parallel_workers": 1},
        }
    )
    return config


@pytest.fixture
def fock_config(sample_config: Dict[str, Any]) -> Dict[str, Any]:
    """Fock-engine variant using the single-mode channel at a small cutoff."""
    config = copy.deepcopy(sample_config)
    config.update(
        {
            "name": "sample_fock",
            "engine": "fock",
            "fock_method": "channel",
            "cutoff": 15,
            "programs": [{"label": "x r=0.2", "r": [0.2]}],
        }
    )
    return config


@pytest.fixture
def clean_threads_env(monkeypatch: Any) -> None:
    """Make sure LOOP_SQUEEZER_THREADS from the shell does not leak into tests."""
    monkeypatch.delenv("LOOP_SQUEEZER_THREADS", raising=False)
