import numpy as np
import pytest

from coulomb_chain import ForceSpec, Harmonic


@pytest.fixture
def sine_force():
    """Zero-mean single-harmonic force 0.5*sin(2*pi*x) on the unit circle."""
    return ForceSpec(L=1.0, a0=0.0, harmonics=(Harmonic(1, 0.0, 0.5),))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def assert_columns_close(actual, desired, rtol, floor_rtol=None):
    """Column-wise comparison of coefficient arrays.

    Entries are compared relatively, with an absolute floor per column at
    ``floor_rtol`` (default rtol*1e-2) times the column's max magnitude:
    near-zero entries produced by cancellation only carry rounding-level
    information and cannot be held to a relative tolerance.
    """
    actual = np.asarray(actual)
    desired = np.asarray(desired)
    assert actual.shape == desired.shape
    if floor_rtol is None:
        floor_rtol = rtol * 1e-2
    for j in range(actual.shape[1]):
        col_scale = max(np.max(np.abs(desired[:, j])), 1e-300)
        np.testing.assert_allclose(
            actual[:, j],
            desired[:, j],
            rtol=rtol,
            atol=floor_rtol * col_scale,
            err_msg=f"column {j} mismatch",
        )
