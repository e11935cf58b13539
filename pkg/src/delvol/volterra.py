"""Windowed contraction solver for the delayed weakly singular state equation.

Solves

    xi(t) = zeta(t) + int_0^t kappa(t, s, xi(s), xi(s-h), u(s)) (t-s)^(nu-1) ds,
    xi(t) = 0 on [-h, 0],

by Picard iteration over contraction windows.  The generator kappa carries its
growth and Lipschitz envelopes (L0, L, u0, omega) so the well-posedness
estimates can be evaluated against the certified comparison machinery.

Kernel callables must be vectorizable over the s-arguments:
``kappa(t, s, xi, xi_h, u)`` receives a scalar t and same-length arrays for
the rest, and returns an array of matching length (or (len, n) for vector
states).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    EvaluationError,
    HypothesisError,
    ParameterError,
    StructuralError,
)
from .grid import GridFunction, GridSpec, lp_norm
from .gronwall import GronwallProblem, certify
from .quadrature import SingularWeights, build_singular_weights, singular_convolution
from .reports import CheckRecord

__all__ = [
    "GeneratorKernel",
    "VolterraProblem",
    "SolverConfig",
    "contraction_window",
    "choose_epsilon",
    "picard_solve",
    "apply_state_operator",
    "fixed_point_residual",
    "apriori_check",
    "stability_check",
    "difference_forcing",
    "difference_problem",
    "check_generator_hypotheses",
]

_DEFAULT_Q_FACTOR = 2.0  # q = 2/nu for derived comparison problems


@dataclass(frozen=True)
class GeneratorKernel:
    """Generator kappa with its declared growth and Lipschitz envelopes.

    L0 bounds |kappa(t, s, 0, 0, u0)|; L is the Lipschitz rate in
    (xi, xi_h, u); omega is a modulus of continuity for the t-argument.
    """

    kappa: object
    L0: GridFunction
    L: GridFunction
    u0: np.ndarray
    omega: object = staticmethod(lambda r: r)
    dim_state: int = 1
    dim_control: int = 1

    def __post_init__(self):
        object.__setattr__(self, "u0", np.atleast_1d(np.asarray(self.u0, dtype=float)))
        if np.any(self.L0.values < 0.0) or np.any(self.L.values < 0.0):
            raise ParameterError("L0 and L must be node-wise nonnegative")


@dataclass(frozen=True)
class VolterraProblem:
    """State-equation data: free term, generator, control, exponents, grid."""

    zeta: GridFunction
    kernel: GeneratorKernel
    control: GridFunction
    nu: float
    h: float
    p: float
    spec: GridSpec

    def __post_init__(self):
        if not 0.0 < self.nu < 1.0:
            raise ParameterError(f"nu must lie in (0, 1), got {self.nu}")
        if self.p < 1.0:
            raise HypothesisError(f"solution exponent p must be >= 1, got {self.p}")
        for g, label in (
            (self.zeta, "zeta"),
            (self.control, "control"),
            (self.kernel.L0, "L0"),
            (self.kernel.L, "L"),
        ):
            if g.spec != self.spec:
                raise StructuralError(f"{label} does not live on the problem grid")
        if abs(self.h - self.spec.h) > 1e-12 * max(1.0, self.h):
            raise StructuralError("problem delay differs from the grid delay")
        if not np.all(np.isfinite(self.control_distance().values)):
            raise ParameterError("control must be finite-distance from u0")

    def control_distance(self) -> GridFunction:
        """d(u(t), u0) sampled on the grid."""
        diff = self.control.values - (
            self.kernel.u0 if self.control.values.ndim == 2 else self.kernel.u0[0]
        )
        if diff.ndim == 2:
            dist = np.linalg.norm(diff, axis=1)
        else:
            dist = np.abs(diff)
        dist = dist.copy()
        dist[: self.spec.delay_steps] = 0.0
        return GridFunction(self.spec, dist)


@dataclass(frozen=True)
class SolverConfig:
    """Contraction parameters and Picard controls.

    ``delta`` is the window length; when None it is derived from
    ``contraction_window``.  ``force_delta`` acknowledges a delta larger than
    the certified window (plain Picard still converges on the grid, only the
    norm-contraction guarantee is waived).  Windows are additionally split
    into chunks of at most ``chunk_nodes`` nodes, which refines the certified
    window and never hurts.
    """

    epsilon: float = 0.0
    q_aux: float | None = None
    delta: float | None = None
    picard_tol: float = 1e-10
    max_iter: int = 500
    force_delta: bool = False
    chunk_nodes: int = 256

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.picard_tol <= 0.0:
            raise ParameterError("picard_tol must be positive")
        if self.max_iter < 1 or self.chunk_nodes < 1:
            raise ParameterError("max_iter and chunk_nodes must be >= 1")

    @classmethod
    def auto(cls, prob: VolterraProblem, **overrides) -> "SolverConfig":
        eps, q_aux, _ = choose_epsilon(
            prob.p, prob.nu, prob.kernel.L, prob.spec
        )
        delta = contraction_window(
            prob.kernel.L, prob.nu, prob.p, eps, prob.spec.t_end
        )
        base = dict(epsilon=eps, q_aux=q_aux, delta=delta)
        base.update(overrides)
        return cls(**base)


def _norm_exponent(p: float, epsilon: float) -> tuple[float, float]:
    """(q, r) with 1/p + 1 = 1/q + 1/(1+eps) and r = pq/(p-q); r = inf at eps = 0."""
    inv_q = 1.0 / p + 1.0 - 1.0 / (1.0 + epsilon)
    if inv_q > 1.0 + 1e-12:
        raise HypothesisError(
            f"epsilon={epsilon} gives q < 1 for p={p} (needs epsilon <= p - 1)"
        )
    q = 1.0 / inv_q
    if abs(p - q) < 1e-12 * p:
        return q, math.inf
    return q, p * q / (p - q)


def contraction_window(
    L: GridFunction, nu: float, p: float, epsilon: float, T: float
) -> float:
    """Largest delta <= T with 2 (delta^e1 / e1)^(1/(1+eps)) ||L|| <= 0.99.

    Here e1 = 1 - (1+eps)(1-nu) and the norm exponent is pq/(p-q) from the
    exponent relation (sup norm when p = q).  The left side increases in
    delta, so monotone bisection applies.
    """
    e1 = 1.0 - (1.0 + epsilon) * (1.0 - nu)
    if e1 <= 0.0:
        raise HypothesisError(
            f"(1+epsilon)(1-nu) must stay below 1; epsilon={epsilon}, nu={nu}"
        )
    _, r = _norm_exponent(p, epsilon)
    norm = lp_norm(L, r)
    if not math.isfinite(norm):
        raise HypothesisError(f"||L|| with exponent {r} is not finite")

    def gain(delta: float) -> float:
        return 2.0 * (delta**e1 / e1) ** (1.0 / (1.0 + epsilon)) * norm

    target = 0.99
    if gain(T) <= target:
        return T
    lo, hi = 0.0, T
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gain(mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo


def choose_epsilon(
    p: float, nu: float, L: GridFunction, spec: GridSpec
) -> tuple[float, float, int]:
    """Pick epsilon by the three-case analysis, maximizing the window length.

    Case 1 (p > 1/(1-nu)): scan epsilon in (0, nu/(1-nu)).
    Case 2 (1 < p <= 1/(1-nu)): scan epsilon in (0, p-1).
    Case 3 (p = 1): epsilon = 0 and the sup norm of L.
    Returns (epsilon, q, case_id).
    """
    if p < 1.0:
        raise HypothesisError(f"p must be >= 1, got {p}")
    T = spec.t_end
    if abs(p - 1.0) < 1e-12:
        q, _ = _norm_exponent(1.0, 0.0)
        return 0.0, q, 3
    if p > 1.0 / (1.0 - nu):
        hi, case = nu / (1.0 - nu), 1
    else:
        hi, case = p - 1.0, 2
    best = None
    for k in range(1, 21):
        eps = hi * k / 21.0
        try:
            delta = contraction_window(L, nu, p, eps, T)
        except HypothesisError:
            continue
        if best is None or delta > best[1]:
            best = (eps, delta)
    if best is None:
        raise HypothesisError(
            f"no admissible epsilon found in case {case} for p={p}, nu={nu}"
        )
    q, _ = _norm_exponent(p, best[0])
    return best[0], q, case


# -- core row assembly -------------------------------------------------------


class _RowEngine:
    """Corrected quadrature rows for kappa(t_i, ., z, z(.-h), u).

    The delayed trace z(. - h) jumps at s = h when z(0) != 0; the jump cell is
    split so the piecewise-linear moment integrals see one-sided limits.  The
    corrected row equals the shifted-horizon discretization of the delayed
    term, which the comparison operators use.
    """

    def __init__(self, prob: VolterraProblem, weights: SingularWeights):
        self.prob = prob
        self.spec = prob.spec
        self.m = self.spec.delay_steps
        self.n = self.spec.n_points
        self.t = self.spec.times[self.m :]
        self.kappa = prob.kernel.kappa
        self.u = prob.control.horizon_values
        wl, wr = weights.w_left, weights.w_right
        self.wl, self.wr = wl, wr
        kc = np.empty(self.n + 1)
        kc[0] = wr[1]
        kc[1:] = wl[1 : self.n + 1] + wr[2 : self.n + 2]
        self.kc = kc

    def lagged(self, z: np.ndarray) -> np.ndarray:
        """z(. - h) on the horizon nodes (zero where the shift leaves [0, T])."""
        zh = np.zeros_like(z)
        if self.m == 0:
            return z.copy()
        if self.m <= self.n:
            zh[self.m :] = z[: self.n + 1 - self.m]
        return zh

    def _eval(self, i: int, js: slice, z, zh):
        t_i = self.t[i]
        vals = self.kappa(t_i, self.t[js], z[js], zh[js], self.u[js])
        return np.asarray(vals, dtype=float)

    def _weights_segment(self, i: int, lo: int) -> np.ndarray:
        """Row weights w[i][lo+1 .. i] (lo >= 0, so index 0 never appears)."""
        return self.kc[: i - lo][::-1]

    def jump_correction(self, i: int, z: np.ndarray):
        """Replace the naive node-m term by its split-cell value."""
        m = self.m
        if m == 0 or m > min(i, self.n):
            return 0.0
        if not np.any(np.atleast_1d(z[0]) != 0.0):
            return 0.0
        t_i = self.t[i]
        s = self.t[m : m + 1]
        zm = z[m : m + 1]
        um = self.u[m : m + 1]
        left = np.asarray(self.kappa(t_i, s, zm, zm * 0.0, um), dtype=float)
        right = np.asarray(self.kappa(t_i, s, zm, z[0:1], um), dtype=float)
        return self.wr[i - m + 1] * (left[0] - right[0])

    def frozen_part(self, rows: range, hi: int, z, zh) -> np.ndarray:
        """Contributions of nodes j in [0, hi] to each row in ``rows``."""
        shape = (len(rows),) if z.ndim == 1 else (len(rows), z.shape[1])
        out = np.zeros(shape)
        for k, i in enumerate(rows):
            if hi < 0 or i == 0:
                continue
            stop = min(hi, i)
            vals = self._eval(i, slice(0, stop + 1), z, zh)
            w = np.empty(stop + 1)
            w[0] = self.wl[i]
            if stop >= 1:
                seg = self.kc[i - stop : i][::-1]
                w[1 : stop + 1] = seg
            if stop == i:
                w[i] = self.wr[1]
            out[k] = w @ vals if vals.ndim == 2 else np.dot(w, vals)
            if 0 < self.m <= stop:
                out[k] += self.jump_correction(i, z)
        return out

    def window_part(self, i: int, lo: int, z, zh):
        """Contributions of nodes j in (lo, i] plus in-window jump correction."""
        if i <= lo:
            return 0.0
        vals = self._eval(i, slice(lo + 1, i + 1), z, zh)
        w = self._weights_segment(i, lo)
        acc = w @ vals if vals.ndim == 2 else np.dot(w, vals)
        if lo < self.m <= i:
            acc = acc + self.jump_correction(i, z)
        return acc

    def locate_bad_eval(self, i: int, z, zh):
        """Time s of the first non-finite kernel value in row i, if any."""
        vals = np.atleast_1d(self._eval(i, slice(0, i + 1), z, zh))
        flat = vals if vals.ndim == 1 else vals.sum(axis=tuple(range(1, vals.ndim)))
        bad = np.argwhere(~np.isfinite(flat))
        return float(self.t[int(bad[0][0])]) if bad.size else None


def _window_blocks(n: int, step: int):
    blocks = []
    lo = 0
    while lo < n:
        hi = min(lo + step, n)
        blocks.append((lo, hi))
        lo = hi
    return blocks


def picard_solve(prob: VolterraProblem, config: SolverConfig | None = None) -> GridFunction:
    """Solve the state equation window by window; returns xi on [-h, T].

    On each window the map z -> zeta + integral(kappa(., z, z(.-h), u)) is
    iterated with the already-solved history frozen, until the sup-norm
    increment falls below picard_tol relative to the iterate size.
    """
    cfg = config if config is not None else SolverConfig.auto(prob)
    spec = prob.spec
    if cfg.delta is None:
        delta = contraction_window(
            prob.kernel.L, prob.nu, prob.p, cfg.epsilon, spec.t_end
        )
    else:
        delta = cfg.delta
        if not cfg.force_delta:
            certified = contraction_window(
                prob.kernel.L, prob.nu, prob.p, cfg.epsilon, spec.t_end
            )
            if delta > certified * (1.0 + 1e-9):
                raise ParameterError(
                    f"delta={delta} exceeds the certified window {certified}; "
                    "set force_delta=True to override"
                )
    if not 0.0 < delta:
        raise ParameterError(f"window length delta must be positive, got {delta}")
    step = max(1, min(int(delta / spec.dt), cfg.chunk_nodes))

    weights = build_singular_weights(spec, prob.nu)
    engine = _RowEngine(prob, weights)
    n = spec.n_points
    zeta = prob.zeta.horizon_values
    z = zeta.copy()

    for w_idx, (lo, hi) in enumerate(_window_blocks(n, step)):
        rows = range(lo + 1, hi + 1)
        zh = engine.lagged(z)
        frozen = engine.frozen_part(rows, lo, z, zh)
        increments = []
        for _ in range(cfg.max_iter):
            zh = engine.lagged(z)
            new_vals = []
            for k, i in enumerate(rows):
                val = zeta[i] + frozen[k] + engine.window_part(i, lo, z, zh)
                new_vals.append(val)
            new_seg = np.asarray(new_vals)
            if not np.all(np.isfinite(new_seg)):
                per_row = (
                    new_seg if new_seg.ndim == 1 else new_seg.sum(axis=tuple(range(1, new_seg.ndim)))
                )
                bad = int(np.argmax(~np.isfinite(per_row)))
                t_bad = float(engine.t[lo + 1 + bad])
                s_bad = engine.locate_bad_eval(lo + 1 + bad, z, zh)
                raise EvaluationError(
                    f"kernel produced a non-finite value at (t, s) = ({t_bad}, {s_bad})",
                    t=t_bad,
                    s=s_bad,
                )
            inc = float(np.max(np.abs(new_seg - z[lo + 1 : hi + 1])))
            z[lo + 1 : hi + 1] = new_seg
            increments.append(inc)
            scale = 1.0 + float(np.max(np.abs(new_seg)))
            if inc < cfg.picard_tol * scale:
                break
        else:
            raise ConvergenceError(
                f"Picard iteration cap reached in window {w_idx}",
                history=increments,
                window=w_idx,
            )
    return GridFunction.from_horizon_values(spec, z)


def apply_state_operator(prob: VolterraProblem, z: GridFunction) -> GridFunction:
    """One full application zeta + integral(kappa(., z, z(.-h), u))."""
    if z.spec != prob.spec:
        raise StructuralError("iterate does not live on the problem grid")
    weights = build_singular_weights(prob.spec, prob.nu)
    engine = _RowEngine(prob, weights)
    vals = z.horizon_values
    zh = engine.lagged(vals)
    n = prob.spec.n_points
    out = prob.zeta.horizon_values.copy()
    frozen = engine.frozen_part(range(1, n + 1), n, vals, zh)
    out[1:] += frozen
    return GridFunction.from_horizon_values(prob.spec, out)


def fixed_point_residual(prob: VolterraProblem, xi: GridFunction) -> float:
    """Sup-node magnitude of xi minus one operator application."""
    image = apply_state_operator(prob, xi)
    return float(np.max((xi - image).magnitude().values))


# -- well-posedness checks ----------------------------------------------------


def _default_q(nu: float) -> float:
    return _DEFAULT_Q_FACTOR / nu


def _induced_forcing(prob: VolterraProblem, weights: SingularWeights) -> GridFunction:
    """|zeta| + int (L0 + L d(u, u0)) (t-s)^(nu-1) ds, the growth forcing."""
    drive = prob.kernel.L0 + prob.kernel.L * prob.control_distance()
    return prob.zeta.magnitude() + singular_convolution(drive, weights)


def apriori_check(
    prob: VolterraProblem, xi: GridFunction, K: float | None = None
) -> CheckRecord:
    """Check ||xi||_p <= ||zeta||_p + K (1 + ||d(u, u0)||_p).

    With K omitted, the constant is derived from the certified comparison
    bound of the induced growth inequality, which dominates |xi| node-wise.
    """
    weights = build_singular_weights(prob.spec, prob.nu)
    lhs = lp_norm(xi, prob.p, window=(prob.spec.t_start, prob.spec.t_end))
    zeta_norm = lp_norm(prob.zeta, prob.p, window=(prob.spec.t_start, prob.spec.t_end))
    control_norm = lp_norm(prob.control_distance(), prob.p)
    constants = {}
    if K is None:
        forcing = _induced_forcing(prob, weights)
        comparison = GronwallProblem.build(
            prob.kernel.L, forcing, prob.nu, _default_q(prob.nu)
        )
        cert = certify(comparison)
        bound_norm = lp_norm(
            cert.report.bound, prob.p, window=(prob.spec.t_start, prob.spec.t_end)
        )
        K = max(0.0, bound_norm - zeta_norm) / (1.0 + control_norm)
        constants["gronwall_K"] = cert.report.K
        constants["certified_margin"] = cert.min_margin
    rhs = zeta_norm + K * (1.0 + control_norm)
    constants.update({"K": K, "zeta_norm": zeta_norm, "control_norm": control_norm})
    return CheckRecord(
        name="apriori",
        lhs=lhs,
        rhs=rhs,
        passed=lhs <= rhs + 1e-10,
        constants=constants,
    )


def _kappa_difference_curve(
    prob1: VolterraProblem,
    prob2: VolterraProblem,
    xi1: GridFunction,
    xi2: GridFunction,
) -> GridFunction:
    """t -> int_0^t |kappa(t,s,xi1,...) - kappa(t,s,xi2,...)| (t-s)^(nu-1) ds."""
    weights = build_singular_weights(prob1.spec, prob1.nu)
    eng1 = _RowEngine(prob1, weights)
    eng2 = _RowEngine(prob2, weights)
    z1, z2 = xi1.horizon_values, xi2.horizon_values
    zh1, zh2 = eng1.lagged(z1), eng2.lagged(z2)
    n = prob1.spec.n_points
    m = prob1.spec.delay_steps
    out = np.zeros(n + 1)
    for i in range(1, n + 1):
        v1 = eng1._eval(i, slice(0, i + 1), z1, zh1)
        v2 = eng2._eval(i, slice(0, i + 1), z2, zh2)
        diff = np.abs(v1 - v2) if v1.ndim == 1 else np.linalg.norm(v1 - v2, axis=1)
        w = np.empty(i + 1)
        w[0] = eng1.wl[i]
        w[1:i] = eng1.kc[1:i][::-1]
        w[i] = eng1.wr[1]
        acc = float(np.dot(w, diff))
        if 0 < m <= i:
            # split the jump cell of both delayed traces at s = h
            t_i = eng1.t[i]
            s = eng1.t[m : m + 1]
            a_l = np.asarray(eng1.kappa(t_i, s, z1[m : m + 1], z1[0:1] * 0.0, eng1.u[m : m + 1]))
            a_r = np.asarray(eng1.kappa(t_i, s, z1[m : m + 1], z1[0:1], eng1.u[m : m + 1]))
            b_l = np.asarray(eng2.kappa(t_i, s, z2[m : m + 1], z2[0:1] * 0.0, eng2.u[m : m + 1]))
            b_r = np.asarray(eng2.kappa(t_i, s, z2[m : m + 1], z2[0:1], eng2.u[m : m + 1]))
            d_l = np.linalg.norm(np.atleast_1d(a_l - b_l))
            d_r = np.linalg.norm(np.atleast_1d(a_r - b_r))
            acc += eng1.wr[i - m + 1] * (d_l - d_r)
        out[i] = acc
    return GridFunction.from_horizon_values(prob1.spec, out)


def _check_shared_structure(prob1: VolterraProblem, prob2: VolterraProblem):
    same = (
        prob1.kernel is prob2.kernel
        and prob1.nu == prob2.nu
        and prob1.h == prob2.h
        and prob1.p == prob2.p
        and prob1.spec == prob2.spec
    )
    if not same:
        raise StructuralError(
            "stability comparison requires shared (kernel, nu, h, p, spec)"
        )


def difference_forcing(
    prob1: VolterraProblem,
    prob2: VolterraProblem,
    xi1: GridFunction,
    xi2: GridFunction,
) -> GridFunction:
    """|zeta1 - zeta2| + the kappa-difference convolution; forcing for |xi1 - xi2|."""
    _check_shared_structure(prob1, prob2)
    return (prob1.zeta - prob2.zeta).magnitude() + _kappa_difference_curve(
        prob1, prob2, xi1, xi2
    )


def difference_problem(
    prob1: VolterraProblem,
    prob2: VolterraProblem,
    xi1: GridFunction,
    xi2: GridFunction,
    q: float | None = None,
) -> GronwallProblem:
    """Comparison problem satisfied by |xi1 - xi2| on the grid."""
    theta = difference_forcing(prob1, prob2, xi1, xi2)
    return GronwallProblem.build(
        prob1.kernel.L, theta, prob1.nu, q if q is not None else _default_q(prob1.nu)
    )


def stability_check(
    prob1: VolterraProblem,
    prob2: VolterraProblem,
    xi1: GridFunction,
    xi2: GridFunction,
    K: float | None = None,
) -> CheckRecord:
    """Check ||xi1 - xi2||_p <= K { ||zeta1 - zeta2||_p + [kappa-difference term] }."""
    _check_shared_structure(prob1, prob2)
    spec = prob1.spec
    window = (spec.t_start, spec.t_end)
    lhs = lp_norm(xi1 - xi2, prob1.p, window=window)
    zeta_diff = lp_norm(prob1.zeta - prob2.zeta, prob1.p, window=window)
    kappa_curve = _kappa_difference_curve(prob1, prob2, xi1, xi2)
    bracket = lp_norm(kappa_curve, prob1.p)
    brace = zeta_diff + bracket
    constants = {"zeta_diff_norm": zeta_diff, "kappa_bracket": bracket}
    if K is None:
        if brace == 0.0:
            K = 0.0
        else:
            comparison = GronwallProblem.build(
                prob1.kernel.L,
                (prob1.zeta - prob2.zeta).magnitude() + kappa_curve,
                prob1.nu,
                _default_q(prob1.nu),
            )
            cert = certify(comparison)
            K = lp_norm(cert.report.bound, prob1.p, window=window) / brace
            constants["gronwall_K"] = cert.report.K
            constants["certified_margin"] = cert.min_margin
    rhs = K * brace
    constants["K"] = K
    return CheckRecord(
        name="stability",
        lhs=lhs,
        rhs=rhs,
        passed=lhs <= rhs + 1e-10 * (1.0 + rhs),
        constants=constants,
    )


def check_generator_hypotheses(
    prob: VolterraProblem, samples: int = 100, rng=None
) -> dict:
    """Spot-check the declared envelopes at sampled tuples.

    Returns worst-case slack for the growth bound, the Lipschitz bound, the
    combined growth bound, and the t-continuity ratio (negative slack means a
    violation).
    """
    rng = np.random.default_rng(rng)
    spec = prob.spec
    kernel = prob.kernel
    if kernel.dim_state != 1:
        raise StructuralError("hypothesis spot-check supports scalar state only")
    t_pos = spec.times[spec.delay_steps :]
    n = len(t_pos)
    u0 = kernel.u0 if kernel.dim_control > 1 else kernel.u0[0]
    growth_slack = math.inf
    lipschitz_slack = math.inf
    combined_slack = math.inf
    t_ratio = 0.0
    for _ in range(samples):
        j = int(rng.integers(1, n))
        i = int(rng.integers(j, n))
        t, s = float(t_pos[i]), float(t_pos[j])
        sv = np.array([s])
        L0s = kernel.L0.horizon_values[j]
        Ls = kernel.L.horizon_values[j]
        xi, xi_p = rng.uniform(-2.0, 2.0, size=2)
        xih, xih_p = rng.uniform(-2.0, 2.0, size=2)
        uv = np.array([u0]) if np.ndim(u0) == 0 else u0[None, :]
        k00 = float(np.atleast_1d(kernel.kappa(t, sv, np.array([0.0]), np.array([0.0]), uv))[0])
        growth_slack = min(growth_slack, L0s - abs(k00))
        ka = float(np.atleast_1d(kernel.kappa(t, sv, np.array([xi]), np.array([xih]), uv))[0])
        kb = float(np.atleast_1d(kernel.kappa(t, sv, np.array([xi_p]), np.array([xih_p]), uv))[0])
        lip_rhs = Ls * (abs(xi - xi_p) + abs(xih - xih_p))
        lipschitz_slack = min(lipschitz_slack, lip_rhs - abs(ka - kb))
        comb_rhs = L0s + Ls * (abs(xi) + abs(xih))
        combined_slack = min(combined_slack, comb_rhs - abs(ka))
        t2 = float(t_pos[int(rng.integers(j, n))])
        kc = float(np.atleast_1d(kernel.kappa(t2, sv, np.array([xi]), np.array([xih]), uv))[0])
        denom = kernel.omega(abs(t - t2)) * (1.0 + abs(xi) + abs(xih))
        if denom > 0.0:
            t_ratio = max(t_ratio, abs(ka - kc) / denom)
    return {
        "growth_slack": growth_slack,
        "lipschitz_slack": lipschitz_slack,
        "combined_slack": combined_slack,
        "t_continuity_ratio": t_ratio,
    }
