import numpy as np
import pytest

from semg import Distribution, JointTable


@pytest.fixture
def j2():
    """The 2x2 workhorse joint: m = [[1.6, .4], [.4, 1.6]], MI = 0.27807."""
    return JointTable.from_weights(
        np.array([[0.4, 0.1], [0.1, 0.4]]), ("x1", "x2"), ("y1", "y2"))


@pytest.fixture
def half_half():
    return Distribution(("x1", "x2"), np.array([0.5, 0.5]))


def random_joint(rng, nx, ny):
    cells = rng.random((nx, ny)) + 0.05
    return JointTable.from_weights(cells / cells.sum(),
                                   tuple(f"x{i}" for i in range(nx)),
                                   tuple(f"y{j}" for j in range(ny)))
