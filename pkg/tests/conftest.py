import numpy as np
import pytest

from eberhard import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger any jit compilation up front so timed tests measure the
    algorithms, not the compiler."""
    _kernels.j_per_n(0.5, 0.3, 0.6, 0.9, 0.9, 0.0)
    nodes = np.array([-0.001, 0.001])
    weights = np.array([0.5, 0.5])
    _kernels.quad_stats(0.5, 0.3, 0.6, 0.9, 0.9, 0.0, nodes, weights)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
