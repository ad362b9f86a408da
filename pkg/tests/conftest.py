import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.norms import ScanSpec  # noqa: E402


@pytest.fixture
def quick_scan():
    """A lighter scan for tests that sweep many functions."""
    return ScanSpec(levels=16, min_angular_exp=8, max_angular_exp=11)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
