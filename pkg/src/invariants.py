#!/usr/bin/env python3
"""
Invariant Suites - seeded property checks behind `orlicz_cli.py verify`

Every check reports a signed slack (>= -tolerance means pass). Suites are
deterministic for a given seed, so two runs produce identical summaries.
Tolerances can be overridden by name, which is how the failure path is
exercised.
"""

import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from admissibility import ExponentSet
from errors import OrliczError
from field import (
    CellGradientField,
    Grid,
    ScalarField,
    embedding_ratio,
    gradient,
    gradient_norm,
    luxemburg_norm,
    modular,
    random_field,
)
from functionals import (
    i_energy,
    i_residual,
    j_energy,
    j_residual,
    power_gap_bound,
    power_gap_maximum,
)
from nfunction import (
    asymptotic_ratio,
    capital_phi,
    capital_phi_array,
    capital_phi_inverse,
    delta2_constant,
    log_sobolev_conjugate,
    p_zero_estimate,
    phi,
    phi_ratio,
    sobolev_conjugate_inverse,
    young_conjugate,
)
from solvers import (
    BumpSpec,
    DescentOptions,
    MountainPassConfig,
    bump_field,
    bump_lambda_bound,
    estimate_lambda_star,
    minimize_i,
    mountain_pass,
    symmetric_partner,
    verify_ridge,
)

REFERENCE_EXPONENTS = ExponentSet(N=3, p=1.9, q=1.05, r=3.5, lam=1.0)
VERIFY_GRID = Grid((9, 9, 9), (1.0, 1.0, 1.0))
MOUNTAIN_PASS_SEED = 42
RIDGE_ETA = 0.5
SUITES = ("nfunction", "field", "functionals", "solvers")

# 1D oracle lattice: 121 levels covering [-3, 3] in steps of 0.05
LATTICE_LEVELS = np.round(np.linspace(-3.0, 3.0, 121), 12)


class InvariantResult(BaseModel):
    suite: str
    name: str
    passed: bool
    slack: Optional[float] = None
    measured: Optional[float] = None
    detail: Optional[str] = None


class VerifySummary(BaseModel):
    seed: int
    suites: List[str]
    passed: bool
    invariants: List[InvariantResult]

    @property
    def failures(self) -> List[str]:
        return [f"{r.suite}/{r.name}" for r in self.invariants if not r.passed]


class _Recorder:
    def __init__(self, suite: str, tolerances: Dict[str, float]):
        self.suite = suite
        self.tolerances = tolerances
        self.results: List[InvariantResult] = []

    def check(self, name: str, slack: float, tolerance: float = 0.0, measured: Optional[float] = None):
        tolerance = self.tolerances.get(name, tolerance)
        slack = float(slack)
        passed = math.isfinite(slack) and slack >= -tolerance
        self.results.append(
            InvariantResult(
                suite=self.suite,
                name=name,
                passed=passed,
                slack=slack if math.isfinite(slack) else None,
                measured=measured if measured is None or math.isfinite(measured) else None,
            )
        )
        status = "✅" if passed else "❌"
        logging.info(f"{status} {self.suite}/{name}: slack={slack:.3e}")

    def guard(self, name: str, run: Callable[[], None]) -> None:
        """Run a check; a library error becomes a failed entry."""
        try:
            run()
        except OrliczError as e:
            logging.error(f"❌ {self.suite}/{name}: {type(e).__name__}: {e}")
            self.results.append(
                InvariantResult(suite=self.suite, name=name, passed=False, detail=f"{type(e).__name__}: {e}")
            )

    def after(self, name: str, run: Callable[[], None], found: Dict[str, Any], *needs: str) -> None:
        """Guarded check that depends on earlier results; missing inputs fail the entry."""
        missing = [need for need in needs if need not in found]
        if missing:
            logging.error(f"❌ {self.suite}/{name}: no {', '.join(missing)} result")
            self.results.append(
                InvariantResult(suite=self.suite, name=name, passed=False, detail=f"missing {', '.join(missing)}")
            )
            return
        self.guard(name, run)


def _relative(gap: np.ndarray, scale: np.ndarray) -> float:
    return float(np.min(gap / np.maximum(1.0, np.abs(scale))))


# ---------------------------------------------------------------------------
# 1D lattice oracle
# ---------------------------------------------------------------------------


def lattice_minimum(
    e: ExponentSet, grid: Grid, levels: np.ndarray = LATTICE_LEVELS
) -> Tuple[float, ScalarField]:
    """Exact minimum of the discrete I_λ over levels^n on a 1D grid.

    The 1D energy is a chain: node terms plus one Φ term per cell coupling
    neighbours, so min-sum dynamic programming visits every lattice point
    implicitly in O(n · levels²).
    """
    if grid.N != 1:
        raise ValueError("lattice_minimum works on 1D grids only")
    h = grid.spacing[0]
    vol = grid.cell_volume
    levels = np.asarray(levels, dtype=float)

    node_cost = vol * (-e.lam / e.p * np.abs(levels) ** e.p + np.abs(levels) ** e.r / e.r)
    pair_cost = vol * capital_phi_array(e.params, np.abs(levels[None, :] - levels[:, None]) / h)
    boundary_cost = vol * capital_phi_array(e.params, np.abs(levels) / h)

    value = boundary_cost + node_cost
    choices = []
    for _ in range(grid.dims[0] - 1):
        total = value[:, None] + pair_cost
        choices.append(np.argmin(total, axis=0))
        value = total[choices[-1], np.arange(len(levels))] + node_cost
    value = value + boundary_cost

    index = int(np.argmin(value))
    path = [index]
    for choice in reversed(choices):
        index = int(choice[index])
        path.append(index)
    minimizer = ScalarField(grid, levels[np.array(path[::-1])])
    return float(np.min(value)), minimizer


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def nfunction_suite(rec: _Recorder, rng: np.random.Generator, e: ExponentSet) -> None:
    params = e.params
    p, q, p0 = params.p, params.q, params.p_zero

    t = rng.uniform(-50.0, 50.0, 500)
    rec.check("phi_oddness", -float(np.max(np.abs(phi(params, -t) + phi(params, t)))))

    grid_t = np.sort(rng.uniform(0.0, 100.0, 1000))
    rec.check("phi_monotone", float(np.min(np.diff(phi(params, grid_t)))))

    a, b = rng.uniform(0.0, 100.0, (2, 1000))
    mid = capital_phi_array(params, 0.5 * (a + b))
    mean = 0.5 * (capital_phi_array(params, a) + capital_phi_array(params, b))
    rec.check("capital_phi_convexity", _relative(mean - mid, mean), 1e-12)

    log_grid = np.logspace(-8.0, 8.0, 2000)
    ratio = phi_ratio(params, log_grid)
    rec.check("ratio_bounds", min(float(np.min(ratio - p)), float(np.min(p0 - ratio))), 1e-6)

    estimate = p_zero_estimate(params)
    rec.check("p_zero_identity", 1e-3 - abs(estimate - p0), measured=estimate)
    rec.check(
        "ratio_large_t_asymptote",
        1e-3 - abs(float(ratio[-1]) - asymptotic_ratio(params, log_grid[-1])),
        measured=float(ratio[-1]),
    )
    rec.check("ratio_limit_p", 1e-2 - abs(phi_ratio(params, 1e50) - p))

    small = capital_phi(params, 1e-4) / 1e-4**p0
    rec.check("small_t_growth", 0.01 - abs(small * p0 - 1.0), measured=small)
    big = capital_phi(params, 1e6) / (1e6**p * math.log1p(1e6**q))
    first_order = (1.0 - q / (p * math.log1p(1e6**q))) / p
    rec.check("large_t_growth", 1e-3 - abs(big / first_order - 1.0), measured=big)
    huge = capital_phi(params, 1e40) / (1e40**p * q * math.log(1e40))
    rec.check("large_t_limit", 0.01 - abs(huge * p - 1.0), measured=huge)

    t = np.exp(rng.uniform(math.log(1e-3), math.log(1e2), 500))
    tau = rng.uniform(1e-3, 1.0, 500)
    lhs = capital_phi_array(params, t)
    rhs = tau**p0 * capital_phi_array(params, t / tau)
    rec.check("scaling_down_bound", _relative(lhs - rhs, lhs), 1e-10)

    sigma = rng.uniform(1.0, 10.0, 500)
    lhs = capital_phi_array(params, sigma * t)
    rhs = sigma**p0 * capital_phi_array(params, t)
    rec.check("scaling_up_bound", _relative(rhs - lhs, rhs), 1e-10)

    d2 = delta2_constant(params, log_grid)
    rec.check("delta2_bound", 2.0**p0 - d2, 1e-9, measured=d2)

    def young() -> None:
        ts = rng.uniform(1e-6, 10.0, (500, 2))
        gaps = [
            capital_phi(params, t_) + young_conjugate(params, s_) - t_ * s_ for t_, s_ in ts
        ]
        rec.check("young_inequality", min(gaps), 1e-10)
        t_eq = float(rng.uniform(0.1, 10.0))
        s_eq = phi(params, t_eq)
        gap = capital_phi(params, t_eq) + young_conjugate(params, s_eq) - t_eq * s_eq
        rec.check("young_equality", 1e-8 - abs(gap) / max(1.0, t_eq * s_eq))

    rec.guard("young_inequality", young)

    def inverses() -> None:
        y = rng.uniform(0.0, 1e3, 200)
        back = capital_phi_array(params, capital_phi_inverse(params, y))
        rec.check("capital_phi_inverse_round_trip", -_relative(np.abs(back - y), y), 1e-9)

    rec.guard("capital_phi_inverse_round_trip", inverses)

    if p0 < e.N:

        def sobolev() -> None:
            values = np.array([sobolev_conjugate_inverse(params, e.N, 10.0**k) for k in range(1, 7)])
            increments = np.diff(values)
            rec.check("sobolev_inverse_increasing", float(np.min(increments)))
            rec.check("sobolev_inverse_divergent", float(np.min(np.diff(increments))))

            t_seq = 10.0 ** np.arange(1, 6)
            slack = []
            for k in (0.5, 1.0, 2.0):
                log_ratio = np.array(
                    [(e.r) * math.log(t_) - log_sobolev_conjugate(params, e.N, k * t_) for t_ in t_seq]
                )
                slack.append(log_ratio[0] - math.log(10.0) - log_ratio[-1])
                slack.append(log_ratio[-2] - log_ratio[-1])
            rec.check("embedding_decay", min(slack))

        rec.guard("sobolev_inverse_increasing", sobolev)


def field_suite(rec: _Recorder, rng: np.random.Generator, e: ExponentSet, grid: Grid) -> None:
    params = e.params
    unit = Grid(grid.dims, tuple(1.0 for _ in grid.dims))

    c = float(rng.uniform(0.1, 10.0))
    vectors = np.zeros(unit.cell_shape + (unit.N,))
    vectors[..., 0] = c
    expected = c / capital_phi_inverse(params, 1.0)
    measured = luxemburg_norm(CellGradientField(unit, vectors), params)
    rec.check("constant_gradient_norm", 1e-8 - abs(measured / expected - 1.0), measured=measured)

    errors, homogeneity = [], []
    for _ in range(100):
        g = gradient(random_field(grid, rng) * float(rng.uniform(0.01, 100.0)))
        k = luxemburg_norm(g, params)
        errors.append(abs(modular(g / k, params) - 1.0))
        factor = float(rng.uniform(-5.0, 5.0))
        homogeneity.append(abs(luxemburg_norm(g * factor, params) - abs(factor) * k) / (abs(factor) * k))
    rec.check("luxemburg_definition", -max(errors), 1e-9)
    rec.check("luxemburg_homogeneity", -max(homogeneity), 1e-10)

    below, above, above_p = [], [], []
    for target in rng.uniform(0.05, 0.95, 100):
        u = random_field(grid, rng, params, target_norm=target)
        k = gradient_norm(u, params)
        below.append(modular(gradient(u), params) - k**params.p_zero)
    for target in rng.uniform(1.05, 5.0, 100):
        u = random_field(grid, rng, params, target_norm=target)
        k = gradient_norm(u, params)
        m = modular(gradient(u), params)
        above.append((k**params.p_zero - m) / k**params.p_zero)
        above_p.append((m - k**params.p) / k**params.p)
    rec.check("modular_lower_bound_small_norm", min(below), 1e-9)
    rec.check("modular_upper_bound_large_norm", min(above), 1e-9)
    rec.check("modular_lower_bound_large_norm", min(above_p), 1e-9)

    ratios = [embedding_ratio(random_field(grid, rng), params, e.r) for _ in range(200)]
    worst = max(ratios)
    rec.check("embedding_ratio_finite", 0.0 if math.isfinite(worst) else -math.inf, measured=worst)


def _ray_minimum(energy_of: Callable[[float], float], doublings: int = 20) -> float:
    return min(energy_of(2.0**k) for k in range(doublings + 1))


def functionals_suite(rec: _Recorder, rng: np.random.Generator, e: ExponentSet, grid: Grid) -> None:
    params = e.params
    zero = ScalarField.zeros(grid)
    rec.check("zero_energy", -abs(j_energy(e, zero).total) - abs(i_energy(e, zero).total))

    even, odd = [], []
    for _ in range(50):
        u = random_field(grid, rng, params, target_norm=float(rng.uniform(0.1, 3.0)))
        even.append(abs(j_energy(e, -u).total - j_energy(e, u).total))
        odd.append(float(np.max(np.abs(j_residual(e, -u).values + j_residual(e, u).values))))
    rec.check("j_even", -max(even))
    rec.check("j_residual_odd", -max(odd))

    h = 1e-6
    for name, energy_fn, residual_fn in (("j", j_energy, j_residual), ("i", i_energy, i_residual)):
        errors = []
        for _ in range(20):
            u = random_field(grid, rng, params, target_norm=float(rng.uniform(0.2, 2.0)))
            v = random_field(grid, rng, params, target_norm=0.1)
            exact = residual_fn(e, u).pair(v)
            fd = (energy_fn(e, u + v * h).total - energy_fn(e, u - v * h).total) / (2.0 * h)
            errors.append(abs(fd - exact) / max(abs(exact), 1e-300))
        rec.check(f"{name}_gradient_consistency", 1e-5 - max(errors), measured=max(errors))

    ray_j, ray_i = [], []
    for _ in range(20):
        v = random_field(grid, rng, params, target_norm=1.0)
        ray_j.append(_ray_minimum(lambda t: j_energy(e, v * t).total))
        low, high = i_energy(e, v * 2.0**10).total, i_energy(e, v * 2.0**20).total
        ray_i.append(min(high - low, low))
    rec.check("j_ray_negativity", -max(ray_j))
    rec.check("i_ray_coercivity", min(ray_i))

    lam = rng.uniform(0.1, 5.0, 50)
    t = np.linspace(0.0, 10.0, 1000)
    gaps, sampled = [], []
    for l_ in lam:
        peak = power_gap_maximum(l_ / e.p, 1.0 / e.r, e.p, e.r)
        gaps.append(power_gap_bound(l_ / e.p, 1.0 / e.r, e.p, e.r) - peak)
        sampled.append(peak - float(np.max(l_ / e.p * t**e.p - t**e.r / e.r)))
    rec.check("scalar_power_gap_bound", min(gaps), 1e-10)
    rec.check("scalar_gap_maximum", min(sampled), 1e-10)


def solvers_suite(rec: _Recorder, rng: np.random.Generator, e: ExponentSet, grid: Grid, seed: int) -> None:
    bump = BumpSpec()

    def lambda_star() -> None:
        lambda_hat = estimate_lambda_star(e, grid, bump)
        rec.check("lambda_hat_positive", lambda_hat if math.isfinite(lambda_hat) else -math.inf, measured=lambda_hat)
        u1 = bump_field(grid, bump)
        at_root = i_energy(e.with_lambda(lambda_hat), u1).total
        rec.check("lambda_hat_root", -abs(at_root), 1e-9)
        values = [i_energy(e.with_lambda(f * lambda_hat), u1).total for f in (0.5, 1.0, 2.0)]
        rec.check("lambda_monotone", min(values[0] - values[1], values[1] - values[2]))
        rec.check("plateau_bound", bump_lambda_bound(e, grid, bump) - lambda_hat)

        result = minimize_i(e.with_lambda(2.0 * lambda_hat), grid, bump=bump)
        rec.check("minimizer_negative_energy", -1e-6 - result.energy, measured=result.energy)
        rec.check("minimizer_nontrivial", result.luxemburg_norm, measured=result.luxemburg_norm)
        residual = i_residual(e.with_lambda(2.0 * lambda_hat), result.u)
        weak = []
        for _ in range(10):
            v = random_field(grid, rng)
            bound = result.u.grid.cell_volume ** -0.5 * DescentOptions().residual_tolerance * np.linalg.norm(v.flat)
            weak.append(bound - abs(residual.pair(v)))
        rec.check("minimizer_weak_form", min(weak))
        rec.check("minimizer_descent", -float(np.max(np.diff(result.history), initial=0.0)))

    rec.guard("lambda_hat_positive", lambda_star)

    def zero_lambda() -> None:
        result = minimize_i(e.with_lambda(0.0), grid, bump=bump)
        rec.check("zero_lambda_minimum", -abs(result.energy), 1e-12)

    rec.guard("zero_lambda_minimum", zero_lambda)

    found: Dict[str, Any] = {}

    def mountain() -> None:
        result = mountain_pass(e, grid, MountainPassConfig(), seed=MOUNTAIN_PASS_SEED)
        found["mountain"] = result
        rec.check("mountain_pass_positive_energy", result.energy, measured=result.energy)

    rec.guard("mountain_pass_positive_energy", mountain)

    def ridge() -> None:
        report = verify_ridge(e, grid, eta=RIDGE_ETA, samples=50, seed=seed)
        found["ridge"] = report
        rec.check("ridge_positive", report.min_energy, measured=report.min_energy)
        rec.check("ridge_lower_bound", report.lower_bound_slack, 1e-9)

    rec.guard("ridge_positive", ridge)

    def partner() -> None:
        result = found["mountain"]
        twin = symmetric_partner(e, result)
        rec.check("mountain_pass_partner_residual", -abs(twin.residual - result.residual), 1e-15)

    def distinct() -> None:
        minimum = minimize_i(e, grid, bump=bump)
        rec.check("mountain_pass_distinct_branch", found["mountain"].energy - max(minimum.energy, 0.0))

    def above_ridge() -> None:
        norm = found["mountain"].luxemburg_norm
        rec.check("mountain_pass_above_ridge", norm - found["ridge"].eta, measured=norm)

    rec.after("mountain_pass_partner_residual", partner, found, "mountain")
    rec.after("mountain_pass_distinct_branch", distinct, found, "mountain")
    rec.after("mountain_pass_above_ridge", above_ridge, found, "mountain", "ridge")

    def oracle() -> None:
        line = Grid((5,), (6.0,))
        e1 = e.model_copy(update={"N": 1})
        lam = 2.0 * estimate_lambda_star(e1, line, bump)
        e1 = e1.with_lambda(lam)
        best, _ = lattice_minimum(e1, line)
        result = minimize_i(e1, line, bump=bump, force=True)
        rec.check("lattice_oracle", best - result.energy, 1e-3, measured=best)

    rec.guard("lattice_oracle", oracle)


def run_suites(
    suites: Sequence[str],
    seed: int = 0,
    exponents: ExponentSet = REFERENCE_EXPONENTS,
    grid: Grid = VERIFY_GRID,
    tolerances: Optional[Dict[str, float]] = None,
) -> VerifySummary:
    tolerances = tolerances or {}
    selected = list(SUITES) if "all" in suites else list(suites)
    unknown = [s for s in selected if s not in SUITES]
    if unknown:
        raise ValueError(f"Unknown suite(s): {unknown}")

    results: List[InvariantResult] = []
    for suite in selected:
        logging.info(f"🔍 Running suite: {suite} (seed {seed})")
        rec = _Recorder(suite, tolerances)
        rng = np.random.default_rng(seed)
        if suite == "nfunction":
            nfunction_suite(rec, rng, exponents)
        elif suite == "field":
            field_suite(rec, rng, exponents, grid)
        elif suite == "functionals":
            functionals_suite(rec, rng, exponents, grid)
        else:
            solvers_suite(rec, rng, exponents, grid, seed)
        results.extend(rec.results)

    summary = VerifySummary(
        seed=seed,
        suites=selected,
        passed=all(r.passed for r in results),
        invariants=results,
    )
    if summary.passed:
        logging.info(f"✅ All {len(results)} invariants passed")
    else:
        logging.error(f"❌ Failed invariants: {', '.join(summary.failures)}")
    return summary
