import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mccatch import DatasetHandle
from mccatch._backend import HAVE_NUMBA, backend

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=["numba", "numpy"])
def each_backend(request):
    if request.param == "numba" and not HAVE_NUMBA:
        pytest.skip("numba not installed")
    with backend(request.param):
        yield request.param


def toy_scene():
    """Gaussian inliers plus the five archetypes: inlier A, halo point B, mc core C,
    mc halo D and isolate E. Returns the handle and their ids."""
    rng = np.random.Generator(np.random.PCG64(3))
    blob = rng.standard_normal((1500, 2))
    blob[0] = 0.0
    mc = np.array([20.0, 0.0]) + rng.standard_normal((6, 2)) * 0.05
    mc[0] = [20.0, 0.0]
    X = np.vstack([blob, [[4.2, 0.0]], mc, [[20.0, 0.9]], [[0.0, -25.0]]])
    return DatasetHandle.from_vectors(X), dict(A=0, B=1500, C=1501, D=1507, E=1508)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
