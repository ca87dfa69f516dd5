import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tworabi import ModelParams  # noqa: E402


@pytest.fixture
def fig_params():
    """Omega = 0.1, omega = 1 (the reference parameter set), J = 0.2, g = 1."""
    return ModelParams(omega=1.0, Omega=0.1, g=1.0, J=0.2)
