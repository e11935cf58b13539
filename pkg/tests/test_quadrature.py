import math

import numpy as np
import pytest
from scipy import integrate

from delvol import (
    GridFunction,
    GridSpec,
    ParameterError,
    StructuralError,
    beta,
    build_singular_weights,
    delayed_product_convolution,
    delayed_singular_convolution,
    shift_by_delay,
    singular_convolution,
)
from conftest import random_piecewise_linear


def horizon_times(spec):
    return spec.times[spec.delay_steps :]


@pytest.mark.parametrize("nu", [0.3, 0.5, 0.8])
def test_row_identities(nu):
    spec = GridSpec(t_end=2.0, n_points=128, h=0.5)
    W = build_singular_weights(spec, nu)
    t = horizon_times(spec)
    for i in (1, 2, 17, 64, 128):
        row = W.row(i)
        assert np.all(row >= 0.0)
        assert row.sum() == pytest.approx(t[i] ** nu / nu, rel=1e-12)
        moment = float(np.dot(row, t[: i + 1]))
        assert moment == pytest.approx(
            t[i] ** (nu + 1.0) * beta(2.0, nu), rel=1e-10
        )


def test_single_cell_row_sum():
    # unit step: row 1 on a dt = 1 grid reproduces the one-cell identity
    spec = GridSpec(t_end=2.0, n_points=2)
    W = build_singular_weights(spec, 0.3)
    assert W.row(1).sum() == pytest.approx(1.0 / 0.3, rel=1e-13)


def test_invalid_exponent():
    spec = GridSpec(t_end=1.0, n_points=8)
    for nu in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ParameterError):
            build_singular_weights(spec, nu)


def test_convolution_constant_closed_form():
    spec = GridSpec(t_end=1.0, n_points=256, h=0.25)
    W = build_singular_weights(spec, 0.5)
    f = GridFunction.constant(spec, 1.0)
    g = singular_convolution(f, W)
    t = horizon_times(spec)
    assert np.allclose(g.horizon_values, 2.0 * np.sqrt(t), rtol=1e-12, atol=1e-14)


def test_convolution_zero():
    spec = GridSpec(t_end=1.0, n_points=64)
    W = build_singular_weights(spec, 0.7)
    z = GridFunction.zeros(spec)
    assert np.array_equal(singular_convolution(z, W).values, z.values)


def test_convolution_spec_mismatch():
    spec = GridSpec(t_end=1.0, n_points=64)
    other = GridSpec(t_end=1.0, n_points=32)
    W = build_singular_weights(spec, 0.5)
    with pytest.raises(StructuralError):
        singular_convolution(GridFunction.constant(other, 1.0), W)


def test_convolution_against_adaptive_reference():
    # f(s) = 1/(1+s), nu = 0.7, value at t = 1
    nu = 0.7
    spec = GridSpec(t_end=1.0, n_points=512)
    W = build_singular_weights(spec, nu)
    f = GridFunction.from_callable(spec, lambda t: 1.0 / (1.0 + t))
    got = singular_convolution(f, W).at_time(1.0)
    ref, _ = integrate.quad(
        lambda s: 1.0 / (1.0 + s), 0.0, 1.0, weight="alg", wvar=(0.0, nu - 1.0)
    )
    assert got == pytest.approx(ref, rel=1e-4)


def test_convolution_linear(rng):
    spec = GridSpec(t_end=1.0, n_points=128)
    W = build_singular_weights(spec, 0.4)
    f = random_piecewise_linear(rng, spec)
    g = random_piecewise_linear(rng, spec)
    a, b = 2.2, -0.7
    combo = GridFunction(spec, a * f.values + b * g.values)
    lhs = singular_convolution(combo, W).values
    rhs = a * singular_convolution(f, W).values + b * singular_convolution(g, W).values
    scale = np.max(np.abs(rhs)) + 1.0
    assert np.max(np.abs(lhs - rhs)) < 1e-13 * scale


def test_convolution_monotone(rng):
    spec = GridSpec(t_end=1.0, n_points=128)
    W = build_singular_weights(spec, 0.6)
    f = random_piecewise_linear(rng, spec, lo=0.0, hi=3.0)
    assert np.all(singular_convolution(f, W).values >= 0.0)


def test_exact_on_piecewise_linear():
    # exact moments of a hat function against the kernel, independent reference
    nu = 0.45
    spec = GridSpec(t_end=1.0, n_points=16)
    W = build_singular_weights(spec, nu)
    t = horizon_times(spec)
    hat = np.maximum(0.0, 1.0 - np.abs(t - 0.5) / 0.25)
    f = GridFunction.from_horizon_values(spec, hat)
    got = singular_convolution(f, W)
    interp = lambda s: np.interp(s, t, hat)
    for i in (6, 10, 16):
        ref, _ = integrate.quad(
            interp, 0.0, t[i], weight="alg", wvar=(0.0, nu - 1.0), limit=200
        )
        assert got.horizon_values[i] == pytest.approx(ref, rel=1e-9)


def test_second_order_convergence():
    # Richardson reference from the finest grid
    nu = 0.5
    vals = {}
    for n in (128, 256, 512):
        spec = GridSpec(t_end=1.0, n_points=n)
        W = build_singular_weights(spec, nu)
        f = GridFunction.from_callable(spec, np.cos)
        vals[n] = singular_convolution(f, W).at_time(1.0)
    ref = vals[512] + (vals[512] - vals[256]) / 3.0
    e1, e2 = abs(vals[128] - ref), abs(vals[256] - ref)
    assert e1 / e2 == pytest.approx(4.0, rel=0.3)


def test_delayed_conv_total_lag():
    spec = GridSpec(t_end=1.0, n_points=32, h=2.0)
    W = build_singular_weights(spec, 0.5)
    f = GridFunction.constant(spec, 3.0)
    g = delayed_singular_convolution(f, W)
    assert np.all(g.values == 0.0)


def test_delayed_conv_zero_lag():
    spec = GridSpec(t_end=1.0, n_points=32, h=0.0)
    W = build_singular_weights(spec, 0.5)
    f = GridFunction.from_callable(spec, lambda t: 1.0 + t)
    a = delayed_singular_convolution(f, W)
    b = singular_convolution(f, W)
    assert np.array_equal(a.values, b.values)


def test_delayed_conv_indicator_closed_form():
    # f == 1, so f(s-h) is the unit step at h: integral is 2 sqrt((t-h)+)
    spec = GridSpec(t_end=1.0, n_points=128, h=0.25)
    W = build_singular_weights(spec, 0.5)
    f = GridFunction.constant(spec, 1.0)
    g = delayed_singular_convolution(f, W)
    t = horizon_times(spec)
    expect = 2.0 * np.sqrt(np.maximum(t - 0.25, 0.0))
    assert np.allclose(g.horizon_values, expect, rtol=1e-12, atol=1e-14)


def test_delayed_conv_matches_shift_composition_on_vanishing_start(rng):
    # when f(0) = 0 the delayed trace has no jump and the two routes agree
    spec = GridSpec(t_end=1.0, n_points=64, h=0.25)
    W = build_singular_weights(spec, 0.6)
    f = GridFunction.from_callable(spec, lambda t: t * (1.0 - t))
    direct = delayed_singular_convolution(f, W)
    composed = singular_convolution(shift_by_delay(f), W)
    assert np.allclose(direct.values, composed.values, atol=1e-13)


def test_delayed_product_convolution_closed_form():
    # weight 1, f = 1: int_h^t (t-s)^(nu-1) ds with nu = 1/2
    spec = GridSpec(t_end=1.0, n_points=64, h=0.5)
    W = build_singular_weights(spec, 0.5)
    one = GridFunction.constant(spec, 1.0)
    g = delayed_product_convolution(one, one, W)
    t = horizon_times(spec)
    expect = 2.0 * np.sqrt(np.maximum(t - 0.5, 0.0))
    assert np.allclose(g.horizon_values, expect, rtol=1e-12, atol=1e-14)


def test_matrix_consistent_with_apply(rng):
    spec = GridSpec(t_end=1.0, n_points=48)
    W = build_singular_weights(spec, 0.35)
    f = random_piecewise_linear(rng, spec)
    dense = W.matrix() @ f.horizon_values
    fast = W.apply_horizon(f.horizon_values)
    assert np.allclose(dense, fast, rtol=1e-13, atol=1e-15)
