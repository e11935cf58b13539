import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delvol import (
    DomainError,
    GridFunction,
    GridSpec,
    ParameterError,
    StructuralError,
    lp_norm,
    shift_by_delay,
)


def test_spec_validation():
    with pytest.raises(ParameterError):
        GridSpec(t_end=-1.0, n_points=10)
    with pytest.raises(ParameterError):
        GridSpec(t_end=1.0, n_points=1)
    with pytest.raises(ParameterError):
        GridSpec(t_end=1.0, n_points=10, h=-0.5)
    with pytest.raises(ParameterError):
        # 0.3 is not a multiple of dt = 0.1... within rounding it is 3 steps
        GridSpec(t_end=1.0, n_points=10, h=0.15)
    with pytest.raises(ParameterError):
        GridSpec(t_end=1.0, n_points=10, h=0.5, t_start=-0.4)
    spec = GridSpec(t_end=1.0, n_points=10, h=0.5)
    assert spec.t_start == -0.5
    assert spec.delay_steps == 5
    assert spec.n_nodes == 16
    assert spec.times[spec.delay_steps] == 0.0


def test_prehistory_enforced():
    spec = GridSpec(t_end=1.0, n_points=4, h=0.5)
    vals = np.ones(spec.n_nodes)
    with pytest.raises(StructuralError):
        GridFunction(spec, vals)
    ok = np.ones(spec.n_nodes)
    ok[: spec.delay_steps] = 0.0
    GridFunction(spec, ok)


def test_lp_norm_constant_one():
    spec = GridSpec(t_end=1.0, n_points=256)
    f = GridFunction.constant(spec, 1.0)
    assert lp_norm(f, 2) == pytest.approx(1.0, rel=1e-13)
    assert lp_norm(f, math.inf) == 1.0


def test_lp_norm_linear_closed_form():
    spec = GridSpec(t_end=1.0, n_points=512)
    f = GridFunction.from_callable(spec, lambda t: t)
    assert lp_norm(f, 2) == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-5)


def test_lp_norm_window_and_errors():
    spec = GridSpec(t_end=1.0, n_points=100, h=0.5)
    f = GridFunction.constant(spec, 2.0)
    assert lp_norm(f, 1, window=(0.0, 0.5)) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ParameterError):
        lp_norm(f, 0.5)
    with pytest.raises(DomainError):
        lp_norm(f, 2, window=(0.0, 2.0))
    with pytest.raises(DomainError):
        lp_norm(f, 2, window=(-1.0, 0.5))


def test_lp_norm_window_monotone(rng):
    spec = GridSpec(t_end=1.0, n_points=128)
    vals = rng.uniform(0.0, 3.0, spec.n_nodes)
    f = GridFunction(spec, vals)
    inner = lp_norm(f, 3, window=(0.25, 0.75))
    outer = lp_norm(f, 3, window=(0.0, 1.0))
    assert inner <= outer + 1e-14


@given(alpha=st.floats(-10.0, 10.0, allow_nan=False))
@settings(max_examples=50, deadline=None)
def test_lp_norm_homogeneous(alpha):
    spec = GridSpec(t_end=1.0, n_points=64)
    base = np.zeros(spec.n_nodes)
    base[spec.delay_steps :] = np.sin(np.linspace(0.0, 5.0, spec.n_points + 1)) + 2.0
    f = GridFunction(spec, base)
    g = GridFunction(spec, alpha * base)
    assert lp_norm(g, 2) == pytest.approx(abs(alpha) * lp_norm(f, 2), abs=1e-12)


def test_lp_norm_refinement_second_order():
    closed = math.sqrt(0.5 + math.sin(2.0) / 4.0)
    errs = []
    for n in (64, 128, 256):
        spec = GridSpec(t_end=1.0, n_points=n)
        f = GridFunction.from_callable(spec, np.cos)
        errs.append(abs(lp_norm(f, 2) - closed))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.3)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.3)


def test_shift_identity_and_total_lag():
    spec0 = GridSpec(t_end=1.0, n_points=16, h=0.0)
    f0 = GridFunction.from_callable(spec0, lambda t: t + 1.0)
    assert shift_by_delay(f0) is f0

    spec = GridSpec(t_end=1.0, n_points=16, h=1.0)
    f = GridFunction.from_callable(spec, lambda t: t + 1.0)
    g = shift_by_delay(f)
    assert np.all(g.horizon_values[:-1] == 0.0)
    assert g.at_time(1.0) == f.at_time(0.0)


def test_shift_ramp():
    spec = GridSpec(t_end=1.0, n_points=64, h=0.5)
    f = GridFunction.from_callable(spec, lambda t: t)
    g = shift_by_delay(f)
    t = spec.times
    expect = np.where(t >= 0.5, t - 0.5, 0.0)
    expect[t < 0] = 0.0
    assert np.allclose(g.values, expect, atol=1e-14)


def test_shift_linear(rng):
    spec = GridSpec(t_end=1.0, n_points=64, h=0.25)
    m = spec.delay_steps

    def rand_fn():
        vals = np.zeros(spec.n_nodes)
        vals[m:] = rng.normal(size=spec.n_points + 1)
        return GridFunction(spec, vals)

    f, g = rand_fn(), rand_fn()
    a, b = 1.7, -0.3
    lhs = shift_by_delay(GridFunction(spec, a * f.values + b * g.values))
    rhs = a * shift_by_delay(f).values + b * shift_by_delay(g).values
    assert np.array_equal(lhs.values, rhs)


def test_csv_round_trip(tmp_path, rng):
    spec = GridSpec(t_end=1.0, n_points=32, h=0.25)
    vals = np.zeros(spec.n_nodes)
    vals[spec.delay_steps :] = rng.normal(size=spec.n_points + 1)
    f = GridFunction(spec, vals)
    path = tmp_path / "f.csv"
    f.to_csv(path)
    g = GridFunction.read_csv(path, spec)
    assert np.array_equal(f.values, g.values)
    header = path.read_text().splitlines()[0]
    assert header == "t,value"


def test_csv_vector_header(tmp_path):
    spec = GridSpec(t_end=1.0, n_points=8)
    f = GridFunction(spec, np.ones((spec.n_nodes, 2)))
    path = tmp_path / "vec.csv"
    f.to_csv(path)
    assert path.read_text().splitlines()[0] == "t,xi_1,xi_2"
    g = GridFunction.read_csv(path, spec)
    assert np.array_equal(f.values, g.values)


def test_values_immutable():
    spec = GridSpec(t_end=1.0, n_points=8)
    f = GridFunction.constant(spec, 1.0)
    with pytest.raises(ValueError):
        f.values[0] = 3.0
