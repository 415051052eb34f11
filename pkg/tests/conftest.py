import json
import random
from pathlib import Path

import pytest

from settings import reset_settings

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    monkeypatch.setenv("ARTIFACTS_DIR", str(tmp_path / "artifacts"))
    monkeypatch.setenv("CALIBRATION_FILE", str(tmp_path / "artifacts" / "calibration.json"))
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng():
    return random.Random(20240101)


@pytest.fixture
def golden_a2():
    return json.loads((GOLDEN_DIR / "qmatrix_A2.json").read_text(encoding="utf-8"))


@pytest.fixture
def golden_b2():
    return json.loads((GOLDEN_DIR / "qmatrix_B2.json").read_text(encoding="utf-8"))
