import numpy as np
import pytest

from qfsverify.boolfn import BooleanFunction


@pytest.fixture
def and2():
    """f = x1 AND x2 on two bits; spectrum {00: .5, 01: .5, 10: .5, 11: -.5}."""
    return BooleanFunction.dense(2, [0, 0, 0, 1])


@pytest.fixture
def and2_at16():
    """AND of coordinates 3 and 5 embedded in width 16; p0 = 1/4 on four strings."""
    return BooleanFunction.junta(16, (3, 5), [0, 0, 0, 1])


def tv_distance(emp_counts: np.ndarray, exact: np.ndarray) -> float:
    emp = emp_counts / emp_counts.sum()
    return 0.5 * float(np.abs(emp - exact).sum())


def empirical_counts(samples: np.ndarray, n: int) -> np.ndarray:
    return np.bincount(samples.astype(np.int64), minlength=1 << n)
