import numpy as np
import pytest

from delvol import GridFunction, GridSpec

SEED = 20250808


def random_piecewise_linear(rng, spec, lo=0.0, hi=2.0, knots=None):
    """Nonnegative piecewise-linear function sampled on the horizon nodes."""
    k = knots if knots is not None else int(rng.integers(3, 9))
    xs = np.linspace(0.0, spec.t_end, k)
    ys = rng.uniform(lo, hi, size=k)
    t = spec.times[spec.delay_steps :]
    return GridFunction.from_horizon_values(spec, np.interp(t, xs, ys))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
