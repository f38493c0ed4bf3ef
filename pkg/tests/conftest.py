import numpy as np
import pytest

from ellipsephic import LatticeSet, OptimizerConfig


def set1d(*xs):
    return LatticeSet.from_integers(xs)


@pytest.fixture
def fast_cfg():
    """Smaller restart battery for tests that do not probe global optimality."""
    return OptimizerConfig(restarts=4)


def assert_unit_nonneg(values, tol=1e-12):
    arr = np.asarray(values)
    assert np.all(arr >= 0.0)
    assert abs(np.linalg.norm(arr) - 1.0) <= tol
