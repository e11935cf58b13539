"""Product-integration discretization of the weakly singular convolution.

The operator f -> int_0^t f(s) (t - s)^(nu - 1) ds is discretized by
integrating the power kernel exactly against the piecewise-linear interpolant
of f.  Cell moments have closed forms, so the weights are exact on
piecewise-linear integrands and no kernel value is ever taken at s = t.

Weights on a uniform grid depend only on the node distance d = i - j, so the
full lower-triangular array is represented by two stencil vectors:
``w_left[d]`` (left endpoint of the cell at distance d) and ``w_right[d]``
(right endpoint).  Rows are materialized on demand; convolutions run through
an FFT-based linear convolution plus a rank-one boundary correction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError, StructuralError
from .grid import GridFunction, GridSpec, shift_by_delay

__all__ = [
    "SingularWeights",
    "build_singular_weights",
    "singular_convolution",
    "delayed_singular_convolution",
    "delayed_product_convolution",
]


def _power_diff(d: np.ndarray, a: float) -> np.ndarray:
    """d^a - (d-1)^a for integer d >= 1, computed without cancellation."""
    d = np.asarray(d, dtype=float)
    out = np.empty_like(d)
    first = d <= 1.0
    out[first] = 1.0
    rest = ~first
    dr = d[rest]
    out[rest] = -(dr**a) * np.expm1(a * np.log1p(-1.0 / dr))
    return out


def _linear_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full linear convolution; FFT path for long inputs."""
    n = len(a) + len(b) - 1
    if n < 512:
        return np.convolve(a, b)
    nfft = 1 << (n - 1).bit_length()
    return np.fft.irfft(np.fft.rfft(a, nfft) * np.fft.rfft(b, nfft), nfft)[:n]


@dataclass(frozen=True)
class SingularWeights:
    """Lower-triangular weights approximating int_0^{t_i} f(s) (t_i - s)^(nu-1) ds.

    Stored as distance stencils; ``row(i)`` and ``matrix()`` materialize the
    conventional array.  All weights are nonnegative, rows sum to t_i^nu / nu,
    and first moments match the exact Beta-function value.
    """

    spec: GridSpec
    nu: float
    w_left: np.ndarray  # index d = 1 .. n_points + 1 (0 unused)
    w_right: np.ndarray

    @cached_property
    def _kernel(self) -> np.ndarray:
        """Convolution stencil: k[0] = w_right[1], k[d] = w_left[d] + w_right[d+1]."""
        n = self.spec.n_points
        k = np.empty(n + 1)
        k[0] = self.w_right[1]
        k[1:] = self.w_left[1 : n + 1] + self.w_right[2 : n + 2]
        k.flags.writeable = False
        return k

    @cached_property
    def _edge(self) -> np.ndarray:
        """Correction column: w_right[d+1] subtracted from the j = 0 weight."""
        e = self.w_right[1 : self.spec.n_points + 2].copy()
        e.flags.writeable = False
        return e

    def row(self, i: int) -> np.ndarray:
        """Weights w[i][0..i] of the i-th horizon node (i = 0 row is empty)."""
        if i == 0:
            return np.zeros(1)
        r = np.empty(i + 1)
        r[0] = self.w_left[i]
        r[1:i] = self._kernel[1:i][::-1]
        r[i] = self.w_right[1]
        return r

    def matrix(self) -> np.ndarray:
        """Dense (n+1) x (n+1) lower-triangular weight array."""
        n = self.spec.n_points
        out = np.zeros((n + 1, n + 1))
        for i in range(1, n + 1):
            out[i, : i + 1] = self.row(i)
        return out

    def apply_horizon(self, f: np.ndarray) -> np.ndarray:
        """Convolve horizon values f[0..n]: g[i] = sum_{j<=i} w[i][j] f[j]."""
        n = self.spec.n_points
        if f.ndim == 1:
            g = _linear_convolve(f, self._kernel)[: n + 1]
            g -= f[0] * self._edge
            g[0] = 0.0
            return g
        return np.stack(
            [self.apply_horizon(f[:, k]) for k in range(f.shape[1])], axis=1
        )


def build_singular_weights(spec: GridSpec, nu: float) -> SingularWeights:
    """Exact piecewise-linear product-integration weights for exponent nu."""
    if not 0.0 < nu < 1.0:
        raise ParameterError(f"exponent nu must lie in (0, 1), got {nu}")
    n = spec.n_points
    d = np.arange(0, n + 2, dtype=float)
    d[0] = 1.0  # placeholder, index 0 never used
    a = _power_diff(d, nu) / nu
    b = _power_diff(d, nu + 1.0) / (nu + 1.0)
    scale = spec.dt**nu
    w_left = scale * (b - (d - 1.0) * a)
    w_right = scale * (d * a - b)
    w_left[0] = w_right[0] = 0.0
    w_left.flags.writeable = False
    w_right.flags.writeable = False
    return SingularWeights(spec=spec, nu=nu, w_left=w_left, w_right=w_right)


def _check_same_spec(f: GridFunction, weights: SingularWeights):
    if f.spec != weights.spec:
        raise StructuralError("grid function and weights use different grids")


def singular_convolution(f: GridFunction, weights: SingularWeights) -> GridFunction:
    """g(t_i) = sum_{j<=i} w[i][j] f(t_j) on [0, T]; prehistory zero."""
    _check_same_spec(f, weights)
    g = weights.apply_horizon(f.horizon_values)
    return GridFunction.from_horizon_values(f.spec, g)


def delayed_singular_convolution(
    f: GridFunction, weights: SingularWeights
) -> GridFunction:
    """Approximation of int_0^t f(s - h) (t - s)^(nu-1) ds.

    The delayed integrand vanishes on [0, h), so the quadrature runs on the
    shifted horizon: the result at t is the plain convolution of f evaluated
    at t - h.  This keeps the scheme exact for piecewise-linear f even though
    f(. - h) jumps at s = h, and is identical to convolving shift_by_delay(f)
    except for that jump cell.
    """
    _check_same_spec(f, weights)
    m = f.spec.delay_steps
    if m == 0:
        return singular_convolution(f, weights)
    conv = weights.apply_horizon(f.horizon_values)
    g = np.zeros_like(conv)
    g[m:] = conv[:-m]
    return GridFunction.from_horizon_values(f.spec, g)


def delayed_product_convolution(
    weight_fn: GridFunction, f: GridFunction, weights: SingularWeights
) -> GridFunction:
    """Approximation of int_0^t weight_fn(s) f(s - h) (t - s)^(nu-1) ds.

    Substituting s = h + u turns the integral into a plain singular
    convolution of u -> weight_fn(u + h) f(u) over [0, t - h], evaluated on
    the shifted horizon with the same stencil.
    """
    _check_same_spec(f, weights)
    _check_same_spec(weight_fn, weights)
    m = f.spec.delay_steps
    if m == 0:
        return singular_convolution(weight_fn * f, weights)
    n = f.spec.n_points
    w_shift = weight_fn.horizon_values[m:]
    prod = np.zeros(n + 1)
    prod[: n + 1 - m] = w_shift * f.horizon_values[: n + 1 - m]
    conv = weights.apply_horizon(prod)
    g = np.zeros(n + 1)
    g[m:] = conv[:-m]
    return GridFunction.from_horizon_values(f.spec, g)
