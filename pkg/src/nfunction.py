#!/usr/bin/env python3
"""
N-Function Toolkit - φ(t) = log(1+|t|^q)|t|^(p-2)t and Φ(t) = ∫₀ᵗ φ

Features:
- φ, φ⁻¹, Φ (adaptive and tabulated), Φ⁻¹
- Young conjugate Φ̄ (= ∫₀ˢ φ⁻¹, the complementary N-function)
- Orlicz-Sobolev conjugate Φ⋆ through Φ⋆⁻¹(t) = ∫₀ᵗ Φ⁻¹(s)/s^((N+1)/N) ds
- Growth diagnostics: p⁰ = sup tφ/Φ, Δ₂ constant
"""

import logging
import math
import warnings
from functools import lru_cache
from typing import Callable, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq
from scipy.special import roots_legendre

from errors import InadmissibleExponents, NonConvergence, QuadratureFailure
from settings import SolverConfig

ArrayLike = Union[float, np.ndarray]

# Φ at |t| above this uses the closed term plus the analytic tail of the remainder
HUGE_T = 1e12

# Lattice of the tabulated remainder integral
TABLE_T_MIN = 1e-6
TABLE_RATIO = 1.2

# Gauss-Legendre orders: panel totals / partial panels
PANEL_ORDER = 16
PARTIAL_ORDER = 10

BRACKET_BUDGET = 2000

# log Φ⁻¹(s) uses the small-s asymptote below this log s
LOG_S_ASYMPTOTIC = math.log(1e-150)

# log Φ(e^u) uses the large-t asymptote above this u
LOG_T_ASYMPTOTIC = 40.0

# Φ⋆⁻¹ table bounds in z = log s; the top is cut where the integrand nears overflow
SOBOLEV_Z_MIN = -690.0
SOBOLEV_Z_CAP = 4000.0
SOBOLEV_LOG_INTEGRAND_MAX = 600.0


class NFunctionParams(BaseModel):
    """Exponents (p, q) of φ(t) = log(1+|t|^q)|t|^(p-2)t.

    p > 1 and q >= 1 keep φ an N-function; q > 1 is an admissibility
    hypothesis checked separately.
    """

    model_config = ConfigDict(frozen=True)

    p: float
    q: float

    @field_validator("p")
    @classmethod
    def _p_above_one(cls, value: float) -> float:
        if not value > 1.0:
            raise ValueError(f"p must be > 1, got {value}")
        return float(value)

    @field_validator("q")
    @classmethod
    def _q_at_least_one(cls, value: float) -> float:
        if not value >= 1.0:
            raise ValueError(f"q must be >= 1, got {value}")
        return float(value)

    @property
    def p_zero(self) -> float:
        return self.p + self.q


def _scalar_or_array(values: np.ndarray, like) -> ArrayLike:
    if np.ndim(like) == 0:
        return float(values)
    return values


def _log1p_pow(a: np.ndarray, q: float) -> np.ndarray:
    """log(1 + a^q) for a >= 0 without overflowing a^q."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        small = np.log1p(np.minimum(a, 1.0) ** q)
        large = q * np.log(np.maximum(a, 1.0)) + np.log1p(np.maximum(a, 1.0) ** (-q))
    return np.where(a <= 1.0, small, large)


def phi(params: NFunctionParams, t: ArrayLike) -> ArrayLike:
    """φ(t); odd, strictly increasing, φ(0) = 0."""
    t_arr = np.asarray(t, dtype=float)
    a = np.abs(t_arr)
    value = np.sign(t_arr) * _log1p_pow(a, params.q) * a ** (params.p - 1.0)
    return _scalar_or_array(value, t)


def phi_over_t(params: NFunctionParams, t: ArrayLike) -> ArrayLike:
    """φ(t)/t = log(1+|t|^q)|t|^(p-2), extended by 0 at t = 0."""
    a = np.abs(np.asarray(t, dtype=float))
    positive = a > 0
    safe = np.where(positive, a, 1.0)
    value = np.where(positive, _log1p_pow(safe, params.q) * safe ** (params.p - 2.0), 0.0)
    return _scalar_or_array(value, t)


def phi_derivative(params: NFunctionParams, t: ArrayLike) -> ArrayLike:
    """φ'(t) = |t|^(p-2) ((p-1) log(1+|t|^q) + q/(1+|t|^-q)); φ'(0) = 0 since p+q > 2."""
    a = np.abs(np.asarray(t, dtype=float))
    p, q = params.p, params.q
    safe = np.where(a > 0, a, 1.0)
    value = safe ** (p - 2.0) * ((p - 1.0) * _log1p_pow(safe, q) + q / (1.0 + safe ** (-q)))
    return _scalar_or_array(np.where(a > 0, value, 0.0), t)


# ---------------------------------------------------------------------------
# Remainder integral R(t) = ∫₀ᵗ s^(p+q-1)/(1+s^q) ds, so that
# Φ(t) = (1/p) log(1+t^q) t^p - (q/p) R(t)
# ---------------------------------------------------------------------------


def _remainder_integrand(params: NFunctionParams, s: ArrayLike) -> ArrayLike:
    p, q = params.p, params.q
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        low = np.minimum(s, 1.0)
        high = np.maximum(s, 1.0)
        value = np.where(
            s <= 1.0,
            low ** (p + q - 1.0) / (1.0 + low**q),
            high ** (p - 1.0) / (1.0 + high ** (-q)),
        )
    return value


def _power_integral(a: ArrayLike, b: ArrayLike, e: float) -> ArrayLike:
    """∫_a^b s^(e-1) ds."""
    if e == 0.0:
        return np.log(b) - np.log(a)
    return (np.power(b, e) - np.power(a, e)) / e


def _remainder_series(params: NFunctionParams, t: ArrayLike) -> ArrayLike:
    """Small-t expansion of R: Σ_k (-1)^k t^(p+(k+1)q)/(p+(k+1)q), three terms."""
    p, q = params.p, params.q
    return sum(
        (-1.0) ** k * np.power(t, p + (k + 1) * q) / (p + (k + 1) * q) for k in range(3)
    )


def _remainder_tail(params: NFunctionParams, a: float, t: ArrayLike) -> ArrayLike:
    """∫_a^t s^(p-1)(1 - s^-q + s^-2q) ds, the large-s expansion of the integrand."""
    p, q = params.p, params.q
    return (
        _power_integral(a, t, p)
        - _power_integral(a, t, p - q)
        + _power_integral(a, t, p - 2.0 * q)
    )


class RemainderTable:
    """R(t) tabulated at geometric panel edges, completed by a partial panel.

    Each panel [a, 1.2a] is integrated with Gauss-Legendre; the integrand is
    analytic there, so the panel totals are exact to rounding.
    """

    def __init__(self, params: NFunctionParams):
        self.params = params
        n_panels = int(math.ceil(math.log(HUGE_T / TABLE_T_MIN) / math.log(TABLE_RATIO)))
        self.edges = TABLE_T_MIN * TABLE_RATIO ** np.arange(n_panels + 1)
        self.edges[-1] = HUGE_T

        nodes, weights = roots_legendre(PANEL_ORDER)
        left, right = self.edges[:-1, None], self.edges[1:, None]
        half = 0.5 * (right - left)
        points = left + half * (nodes[None, :] + 1.0)
        panel_totals = np.sum(
            half * weights[None, :] * _remainder_integrand(params, points), axis=1
        )
        self.cumulative = np.concatenate(
            [[_remainder_series(params, TABLE_T_MIN)], panel_totals]
        ).cumsum()
        self.partial_nodes, self.partial_weights = roots_legendre(PARTIAL_ORDER)

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)

        small = t < TABLE_T_MIN
        huge = t > HUGE_T
        mid = ~(small | huge)

        out[small] = _remainder_series(self.params, t[small])
        out[huge] = self.cumulative[-1] + _remainder_tail(self.params, HUGE_T, t[huge])

        if np.any(mid):
            tm = t[mid]
            k = np.clip(np.searchsorted(self.edges, tm, side="right") - 1, 0, len(self.edges) - 2)
            left = self.edges[k]
            half = 0.5 * (tm - left)
            points = left[:, None] + half[:, None] * (self.partial_nodes[None, :] + 1.0)
            partial = np.sum(
                half[:, None]
                * self.partial_weights[None, :]
                * _remainder_integrand(self.params, points),
                axis=1,
            )
            out[mid] = self.cumulative[k] + partial
        return out


@lru_cache(maxsize=32)
def remainder_table(params: NFunctionParams) -> RemainderTable:
    logging.debug(f"Building remainder table for p={params.p}, q={params.q}")
    return RemainderTable(params)


def _closed_term(params: NFunctionParams, a: ArrayLike) -> ArrayLike:
    return _log1p_pow(np.asarray(a, dtype=float), params.q) * np.power(a, params.p) / params.p


def capital_phi_array(params: NFunctionParams, t: ArrayLike) -> ArrayLike:
    """Vectorized Φ(t) from the tabulated remainder; used for all field work."""
    a = np.abs(np.asarray(t, dtype=float))
    with np.errstate(over="ignore", invalid="ignore"):
        value = _closed_term(params, a) - (params.q / params.p) * remainder_table(params)(
            np.atleast_1d(a)
        ).reshape(a.shape)
    value = np.where(a > 0, np.maximum(value, 0.0), 0.0)
    return _scalar_or_array(value, t)


# ---------------------------------------------------------------------------
# Adaptive quadrature (scalar reference implementations)
# ---------------------------------------------------------------------------


def _adaptive_quad(func: Callable[[float], float], a: float, b: float, epsabs: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad(
                func,
                a,
                b,
                epsabs=epsabs,
                epsrel=1e-13,
                limit=SolverConfig.QUAD_MAX_SUBINTERVALS,
            )
        except IntegrationWarning as e:
            raise QuadratureFailure(f"Quadrature on [{a}, {b}] stalled: {e}") from e
    return value


def _adaptive_remainder(params: NFunctionParams, a: float, epsabs: float) -> float:
    """R(a) by adaptive quadrature; [1, a] is integrated in log s."""
    head = _adaptive_quad(lambda s: float(_remainder_integrand(params, s)), 0.0, min(a, 1.0), epsabs)
    if a <= 1.0:
        return head
    tail = _adaptive_quad(
        lambda v: float(_remainder_integrand(params, math.exp(v)) * math.exp(v)),
        0.0,
        math.log(a),
        epsabs,
    )
    return head + tail


@lru_cache(maxsize=32)
def _remainder_at_huge(params: NFunctionParams) -> float:
    epsabs = SolverConfig.QUAD_ABS_TOLERANCE * float(_closed_term(params, HUGE_T))
    return _adaptive_remainder(params, HUGE_T, epsabs)


def capital_phi(params: NFunctionParams, t: float) -> float:
    """Φ(t) = closed term minus adaptive quadrature of the smooth remainder.

    Raises QuadratureFailure if the adaptive refinement stalls.
    """
    a = abs(float(t))
    if a == 0.0:
        return 0.0
    closed = float(_closed_term(params, a))
    if a > HUGE_T:
        remainder = _remainder_at_huge(params) + float(_remainder_tail(params, HUGE_T, a))
    else:
        remainder = _adaptive_remainder(params, a, SolverConfig.QUAD_ABS_TOLERANCE * closed)
    return max(closed - (params.q / params.p) * remainder, 0.0)


# ---------------------------------------------------------------------------
# Inverses
# ---------------------------------------------------------------------------


def _bracket(func: Callable[[float], float], target: float, guess: float) -> Tuple[float, float]:
    """Grow [lo, hi] geometrically around guess until func(lo) < target <= func(hi)."""
    lo = hi = guess
    for _ in range(BRACKET_BUDGET):
        value = func(hi)
        if not math.isfinite(value):
            raise NonConvergence(f"Bracket overflowed at {hi} looking for {target}")
        if value >= target:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NonConvergence(f"No upper bracket for {target}")

    for _ in range(BRACKET_BUDGET):
        if func(lo) < target:
            return lo, hi
        hi, lo = lo, lo * 0.5
    raise NonConvergence(f"No lower bracket for {target}")


def _solve_increasing(func: Callable[[float], float], target: float, guess: float) -> float:
    lo, hi = _bracket(func, target, guess)
    root, info = brentq(
        lambda x: func(x) - target,
        lo,
        hi,
        xtol=np.finfo(float).tiny,
        rtol=4.0 * np.finfo(float).eps,
        maxiter=SolverConfig.ROOT_MAX_ITERATIONS,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise NonConvergence(f"Root search for {target} stopped after {info.iterations} iterations")
    return float(root)


def phi_inverse(params: NFunctionParams, s: float) -> float:
    """Unique t with φ(t) = s; odd in s."""
    s = float(s)
    if s == 0.0:
        return 0.0
    if s < 0.0:
        return -phi_inverse(params, -s)
    exponent = params.p + params.q - 1.0 if s < 1.0 else params.p - 1.0
    guess = s ** (1.0 / exponent)
    return _solve_increasing(lambda t: float(phi(params, t)), s, guess)


def _log_l(params: NFunctionParams, u: np.ndarray) -> np.ndarray:
    """log log(1 + e^(qu)) without forming e^u."""
    q = params.q
    with np.errstate(under="ignore"):
        x = np.exp(q * np.minimum(u, 0.0))
        log1p_over_x = np.where(x < 1e-8, 1.0 - 0.5 * x, np.log1p(x) / np.where(x > 0, x, 1.0))
        positive = np.maximum(u, 0.0)
        large = q * positive + np.log1p(np.exp(-q * positive))
    return np.where(u <= 0.0, q * u + np.log(log1p_over_x), np.log(large))


def _log_capital_phi(params: NFunctionParams, u: np.ndarray) -> np.ndarray:
    """log Φ(e^u), stable at both ends.

    Small t: Φ(t) = t^(p+q)/(p+q) · (1 - (p+q)x/(2(p+2q)) + (p+q)x²/(3(p+3q))), x = t^q.
    Large t: Φ(t) = t^p (log(1+t^q) - q/p)/p up to a relative O(t^-q).
    """
    p, q = params.p, params.q
    u = np.asarray(u, dtype=float)
    small = u < math.log(TABLE_T_MIN)
    large = u > LOG_T_ASYMPTOTIC
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        x = np.exp(q * np.minimum(u, 0.0))
        series = (p + q) * u - math.log(p + q) + np.log1p(
            -(p + q) / (2.0 * (p + 2.0 * q)) * x + (p + q) / (3.0 * (p + 3.0 * q)) * x**2
        )
        asymptotic = p * u - math.log(p) + np.log(np.exp(_log_l(params, u)) - q / p)
        inner = np.clip(u, math.log(TABLE_T_MIN), LOG_T_ASYMPTOTIC)
        direct = np.log(np.atleast_1d(capital_phi_array(params, np.exp(inner)))).reshape(u.shape)
    return np.select([small, large], [series, asymptotic], direct)


def _ratio_at_log(params: NFunctionParams, u: np.ndarray) -> np.ndarray:
    """tφ(t)/Φ(t) at t = e^u."""
    return np.exp(params.p * u + _log_l(params, u) - _log_capital_phi(params, u))


def phi_ratio(params: NFunctionParams, t: ArrayLike) -> ArrayLike:
    """tφ(t)/Φ(t) for t > 0; lies in [p, p+q]."""
    u = np.log(np.asarray(t, dtype=float))
    return _scalar_or_array(_ratio_at_log(params, u), t)


def log_capital_phi_inverse(params: NFunctionParams, log_y: ArrayLike) -> ArrayLike:
    """log Φ⁻¹(e^log_y) by Newton in log-log coordinates.

    d log Φ / d log t = tφ/Φ lies in [p, p+q], so the iteration is globally
    convergent from the small-t asymptote.
    """
    p, q = params.p, params.q
    log_y_arr = np.atleast_1d(np.asarray(log_y, dtype=float)).ravel()
    u = np.where(
        log_y_arr < 0.0,
        (math.log(p + q) + log_y_arr) / (p + q),
        (math.log(p) + log_y_arr) / p,
    )
    # below LOG_S_ASYMPTOTIC the starting point is already exact to rounding
    active = log_y_arr >= LOG_S_ASYMPTOTIC
    for _ in range(SolverConfig.ROOT_MAX_ITERATIONS):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        ua = u[idx]
        step = (_log_capital_phi(params, ua) - log_y_arr[idx]) / _ratio_at_log(params, ua)
        u[idx] = ua - step
        active[idx[np.abs(step) <= 1e-14 * np.maximum(1.0, np.abs(ua))]] = False
    if active.any():
        raise NonConvergence("Newton iteration for Φ⁻¹ exceeded its budget")
    return _scalar_or_array(u.reshape(np.shape(log_y)), log_y)


def capital_phi_inverse(params: NFunctionParams, y: ArrayLike) -> ArrayLike:
    """Unique t >= 0 with Φ(t) = y."""
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < 0):
        raise ValueError("Φ⁻¹ is defined for y >= 0")
    positive = y_arr > 0
    with np.errstate(divide="ignore"):
        log_y = np.log(np.where(positive, y_arr, 1.0))
    value = np.where(positive, np.exp(np.asarray(log_capital_phi_inverse(params, log_y))), 0.0)
    return _scalar_or_array(value, y)


# ---------------------------------------------------------------------------
# Conjugates
# ---------------------------------------------------------------------------


def young_conjugate(params: NFunctionParams, s: float) -> float:
    """Φ̄(s) = ∫₀ˢ φ⁻¹(σ) dσ, the complementary N-function (even in s).

    Integrated after the change of variable σ = φ(τ), which turns the
    integrand into τφ'(τ) on [0, φ⁻¹(s)] and avoids a root search per node.
    """
    s = abs(float(s))
    if s == 0.0:
        return 0.0
    t_s = phi_inverse(params, s)
    epsabs = SolverConfig.QUAD_ABS_TOLERANCE * s * t_s

    def integrand(tau: float) -> float:
        return tau * float(phi_derivative(params, tau))

    head = _adaptive_quad(integrand, 0.0, min(t_s, 1.0), epsabs)
    if t_s <= 1.0:
        return head
    # [1, t_s] in log τ
    tail = _adaptive_quad(lambda v: integrand(math.exp(v)) * math.exp(v), 0.0, math.log(t_s), epsabs)
    return head + tail


def _sobolev_exponents(params: NFunctionParams, N: int) -> Tuple[float, int]:
    if not params.p + params.q < N:
        raise InadmissibleExponents(
            f"Φ⋆ requires p+q < N (p+q={params.p + params.q}, N={N})"
        )
    delta = 1.0 / (params.p + params.q) - 1.0 / N
    m = max(math.ceil(2.0 * (params.p + params.q)), math.ceil(2.0 / delta))
    return delta, m


def sobolev_conjugate_inverse(params: NFunctionParams, N: int, t: float) -> float:
    """Φ⋆⁻¹(t) = ∫₀ᵗ Φ⁻¹(s)/s^((N+1)/N) ds.

    On [0, min(t,1)] the substitution s = σ^m with m(1/(p+q) - 1/N) >= 2
    leaves an integrand vanishing linearly at 0; [1, t] is integrated in log s.
    """
    _, m = _sobolev_exponents(params, N)
    t = float(t)
    if t < 0:
        raise ValueError("Φ⋆⁻¹ is defined for t >= 0")
    if t == 0.0:
        return 0.0

    def lower(sigma: float) -> float:
        if sigma <= 0.0:
            return 0.0
        log_sigma = math.log(sigma)
        return m * math.exp(
            float(log_capital_phi_inverse(params, m * log_sigma)) - (m / N + 1.0) * log_sigma
        )

    b = min(t, 1.0)
    sigma_max = b ** (1.0 / m)
    scale = sigma_max * lower(sigma_max)
    value = _adaptive_quad(lower, 0.0, sigma_max, SolverConfig.QUAD_ABS_TOLERANCE * scale)
    if t > 1.0:

        def upper(v: float) -> float:
            return math.exp(float(log_capital_phi_inverse(params, v)) - v / N)

        value += _adaptive_quad(upper, 0.0, math.log(t), SolverConfig.QUAD_ABS_TOLERANCE * value)
    return value


class SobolevConjugateTable:
    """Φ⋆⁻¹ at z = log s on a unit-spaced lattice, for inverting Φ⋆⁻¹.

    Below the first node Φ⋆⁻¹(s) = (p+q)^(1/(p+q)) s^δ/δ to within s^(q/(p+q)).
    """

    def __init__(self, params: NFunctionParams, N: int):
        self.params = params
        self.N = N
        self.delta, _ = _sobolev_exponents(params, N)
        # log of the integrand grows like z(1/p - 1/N)
        slope = 1.0 / params.p - 1.0 / N
        z_max = min(SOBOLEV_Z_CAP, math.floor(SOBOLEV_LOG_INTEGRAND_MAX / slope))
        self.z = np.arange(SOBOLEV_Z_MIN, z_max + 1.0)
        nodes, weights = roots_legendre(PANEL_ORDER)
        self.nodes, self.weights = nodes, weights

        left, right = self.z[:-1, None], self.z[1:, None]
        half = 0.5 * (right - left)
        v = left + half * (nodes[None, :] + 1.0)
        totals = np.sum(half * weights[None, :] * self._integrand(v), axis=1)
        p0 = params.p + params.q
        start = p0 ** (1.0 / p0) * math.exp(self.delta * SOBOLEV_Z_MIN) / self.delta
        self.values = np.concatenate([[start], totals]).cumsum()

    def _integrand(self, v: np.ndarray) -> np.ndarray:
        """Φ⁻¹(e^v) e^(-v/N), the integrand in v = log s."""
        shape = v.shape
        log_inv = np.asarray(log_capital_phi_inverse(self.params, v.ravel())).reshape(shape)
        return np.exp(log_inv - v / self.N)

    def _value_at(self, z: float) -> float:
        k = int(np.clip(np.searchsorted(self.z, z, side="right") - 1, 0, len(self.z) - 2))
        half = 0.5 * (z - self.z[k])
        v = self.z[k] + half * (self.nodes + 1.0)
        return float(self.values[k] + np.sum(half * self.weights * self._integrand(v)))

    def log_inverse(self, y: float) -> float:
        """z = log s such that Φ⋆⁻¹(s) = y."""
        if y <= self.values[0]:
            return SOBOLEV_Z_MIN + math.log(y / self.values[0]) / self.delta
        if y > self.values[-1]:
            raise NonConvergence(f"Φ⋆({y}) exceeds the representable range")
        k = int(np.searchsorted(self.values, y, side="left")) - 1
        return float(
            brentq(
                lambda z: self._value_at(z) - y,
                self.z[k],
                self.z[k + 1],
                xtol=1e-13,
                maxiter=SolverConfig.ROOT_MAX_ITERATIONS,
            )
        )


@lru_cache(maxsize=16)
def sobolev_conjugate_table(params: NFunctionParams, N: int) -> SobolevConjugateTable:
    return SobolevConjugateTable(params, N)


def log_sobolev_conjugate(params: NFunctionParams, N: int, y: float) -> float:
    """log Φ⋆(y); Φ⋆ spans hundreds of decades, so only its logarithm is returned."""
    if y <= 0:
        raise ValueError("log Φ⋆ is defined for y > 0")
    return sobolev_conjugate_table(params, N).log_inverse(float(y))


# ---------------------------------------------------------------------------
# Growth diagnostics
# ---------------------------------------------------------------------------


def p_zero_estimate(params: NFunctionParams) -> float:
    """sup tφ(t)/Φ(t) over 2000 log-spaced points in [1e-8, 1e8] (→ p+q)."""
    t = np.logspace(-8.0, 8.0, 2000)
    return float(np.max(phi_ratio(params, t)))


def asymptotic_ratio(params: NFunctionParams, t: ArrayLike) -> ArrayLike:
    """First-order large-t value of tφ/Φ: p / (1 - q/(p log(1+t^q)))."""
    log_term = _log1p_pow(np.asarray(t, dtype=float), params.q)
    return _scalar_or_array(params.p / (1.0 - params.q / (params.p * log_term)), t)


def delta2_constant(params: NFunctionParams, t: np.ndarray) -> float:
    """sup Φ(2t)/Φ(t) over the sample points; at most 2^(p+q)."""
    t = np.asarray(t, dtype=float)
    return float(np.max(capital_phi_array(params, 2.0 * t) / capital_phi_array(params, t)))
