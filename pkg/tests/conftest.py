import numpy as np
import pytest

from mdskit.structural import energy_lower_bound


def assert_energy_bound(stress_value, n, diameter, r):
    """Global harness hook: no layout may undercut the universal
    stress lower bound when the low-diameter hypothesis holds."""
    bound = energy_lower_bound(n, diameter, r)
    if bound is not None:
        assert stress_value >= bound * (1 - 1e-9), (
            f"stress {stress_value} below lower bound {bound} (n={n}, D={diameter}, r={r})"
        )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
