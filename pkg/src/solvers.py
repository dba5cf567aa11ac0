#!/usr/bin/env python3
"""
Variational Solvers - global minimizer of I_λ and mountain-pass point of J_λ

Features:
- Armijo gradient descent with Barzilai-Borwein trial steps
- Multi-start minimization of I_λ (init, 0, rescaled bump u₁)
- λ̂ estimate from the bump u₁ and the plateau bound
- Path-deformation mountain pass on J_λ with arc-length reparametrization
- Newton-Krylov polish near a critical point
- Sampled ridge check of J_λ on the sphere ‖u‖ = η
- Optional per-iteration JSON Lines traces
"""

import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import jsonlines
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import NoConvergence, minimize_scalar, newton_krylov

from admissibility import ExponentSet, require_admissible
from errors import BudgetExhausted, DegenerateBump, GeometryFailure
from field import Grid, ScalarField, gradient, gradient_norm, lebesgue_integral, modular, random_field
from functionals import (
    FUNCTIONALS,
    EnergyFn,
    ResidualFn,
    i_energy,
    j_energy,
    j_residual,
    residual_norm,
)
from nfunction import NFunctionParams
from settings import SolverConfig

# scaling factors s tried for the bump start s·u₁
BUMP_SCALES = np.linspace(0.05, 4.0, 80)
# amplitude bound of the seeded second-mode terms in the mountain-pass start direction
DIRECTION_PERTURBATION = 0.25


# ---------------------------------------------------------------------------
# Options and results
# ---------------------------------------------------------------------------


class DescentOptions(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    residual_tolerance: float = Field(default=SolverConfig.RESIDUAL_TOLERANCE, gt=0, alias="residualTolerance")
    max_iterations: int = Field(default=SolverConfig.DESCENT_MAX_ITERATIONS, ge=1, alias="maxIterations")
    step_tolerance: float = Field(default=SolverConfig.STEP_TOLERANCE, gt=0, alias="stepTolerance")
    armijo_constant: float = Field(default=SolverConfig.ARMIJO_CONSTANT, gt=0, lt=1, alias="armijoConstant")
    backtrack_factor: float = Field(default=SolverConfig.BACKTRACK_FACTOR, gt=0, lt=1, alias="backtrackFactor")
    polish_threshold: float = Field(default=SolverConfig.POLISH_THRESHOLD, ge=0, alias="polishThreshold")


class MountainPassConfig(DescentOptions):
    path_points: int = Field(default=SolverConfig.PATH_POINTS, ge=3, alias="pathPoints")
    max_iterations: int = Field(default=SolverConfig.PATH_MAX_ITERATIONS, ge=1, alias="maxIterations")
    doubling_budget: int = Field(default=SolverConfig.DOUBLING_BUDGET, ge=0, alias="doublingBudget")


class BumpSpec(BaseModel):
    """Plateau t0 on a centered box Ω₁, smoothstep down to 0 on the boundary."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    t0: float = Field(default=SolverConfig.BUMP_T0, gt=1.0)
    inner_fraction: float = Field(default=SolverConfig.BUMP_INNER_FRACTION, gt=0.0, lt=1.0, alias="innerFraction")


@dataclass(frozen=True)
class SolveResult:
    u: ScalarField
    energy: float
    residual: float
    iterations: int
    luxemburg_norm: float
    converged: bool
    forced: bool = False
    problem: str = "min"
    history: Tuple[float, ...] = field(default=(), repr=False)

    def diagnostics(self) -> Dict[str, float]:
        return {
            "energy": self.energy,
            "residual": self.residual,
            "iterations": self.iterations,
            "norm": self.luxemburg_norm,
        }

    def raise_for_status(self) -> "SolveResult":
        if not self.converged:
            raise BudgetExhausted(
                f"{self.problem} solve stopped at residual {self.residual:.3e} after {self.iterations} iterations",
                result=self,
            )
        return self


class RidgeReport(BaseModel):
    eta: float
    samples: int
    seed: int
    min_energy: float
    mean_energy: float
    empirical_c1: float
    lower_bound_slack: float  # min over samples of J - (η^(p+q) - (C₁/r)η^r)
    energies: List[float]

    @property
    def passed(self) -> bool:
        return self.min_energy > 0.0


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


class _Trace:
    """Per-iteration JSON Lines writer; a no-op without a path."""

    def __init__(self, path: Optional[Union[str, Path]], problem: str):
        if path is None and SolverConfig.WRITE_TRACES:
            path = Path(SolverConfig.LOG_DIR) / f"{problem}_trace.jsonl"
        self.path = Path(path) if path is not None else None
        self.writer = None

    def __enter__(self) -> "_Trace":
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.writer = jsonlines.open(self.path, mode="w")
        return self

    def __exit__(self, *exc):
        if self.writer is not None:
            self.writer.close()
            logging.info(f"📝 Trace written to: {self.path}")

    def write(self, iteration: int, energy: float, residual: float, step: float) -> None:
        if self.writer is not None:
            self.writer.write({"iteration": iteration, "energy": energy, "residual": residual, "step": step})


# ---------------------------------------------------------------------------
# Shared pieces
# ---------------------------------------------------------------------------


class _Problem:
    """Energy and residual of one functional as functions of flat nodal vectors."""

    def __init__(self, e: ExponentSet, grid: Grid, energy_fn: EnergyFn, residual_fn: ResidualFn):
        self.e = e
        self.grid = grid
        self.energy_fn = energy_fn
        self.residual_fn = residual_fn
        self.scale = np.sqrt(grid.cell_volume)

    def field(self, x: np.ndarray) -> ScalarField:
        return ScalarField(self.grid, x)

    def energy(self, x: np.ndarray) -> float:
        return self.energy_fn(self.e, self.field(x)).total

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.residual_fn(self.e, self.field(x)).values.ravel()

    def residual(self, g: np.ndarray) -> float:
        return float(np.linalg.norm(g) * self.scale)


def _armijo(
    problem: _Problem,
    x: np.ndarray,
    energy: float,
    direction: np.ndarray,
    slope: float,
    alpha: float,
    opts: DescentOptions,
) -> Tuple[Optional[float], float]:
    """Backtrack from `alpha` until E(x + αd) <= E(x) + c α slope; (None, E) if α underflows."""
    while alpha >= opts.step_tolerance:
        trial = problem.energy(x + alpha * direction)
        if trial <= energy + opts.armijo_constant * alpha * slope:
            return alpha, trial
        alpha *= opts.backtrack_factor
    return None, energy


def _polish(problem: _Problem, x: np.ndarray, tolerance: float) -> Optional[np.ndarray]:
    """Newton-Krylov solve of E'(x) = 0 from x; None when it does not reach `tolerance`."""
    try:
        root = newton_krylov(
            problem.gradient,
            x,
            f_tol=0.5 * tolerance,
            tol_norm=problem.residual,
            maxiter=50,
        )
    except (NoConvergence, ValueError, FloatingPointError) as e:
        logging.debug(f"Newton-Krylov polish failed: {e}")
        return None
    root = np.asarray(root, dtype=float)
    if problem.residual(problem.gradient(root)) >= tolerance:
        return None
    return root


def _result(problem: _Problem, x, iterations, converged, forced, name, history) -> SolveResult:
    u = problem.field(x)
    return SolveResult(
        u=u,
        energy=problem.energy(x),
        residual=problem.residual(problem.gradient(x)),
        iterations=iterations,
        luxemburg_norm=gradient_norm(u, problem.e.params),
        converged=converged,
        forced=forced,
        problem=name,
        history=tuple(history),
    )


def descend(
    problem: _Problem,
    x0: np.ndarray,
    opts: DescentOptions,
    trace: _Trace,
) -> Tuple[np.ndarray, int, bool, List[float]]:
    """Monotone gradient descent; returns (x, iterations, converged, energy history)."""
    x = np.array(x0, dtype=float)
    energy = problem.energy(x)
    g = problem.gradient(x)
    residual = problem.residual(g)
    history = [energy]
    trace.write(0, energy, residual, 0.0)

    g_max = float(np.max(np.abs(g)))
    step = max(float(np.max(np.abs(x))), 1.0) / g_max if g_max > 0 else 1.0
    polish_below = opts.polish_threshold

    iteration = 0
    while residual >= opts.residual_tolerance:
        if iteration >= opts.max_iterations:
            logging.warning(f"⚠️  Descent budget exhausted at residual {residual:.3e}")
            return x, iteration, False, history

        if residual < polish_below:
            polished = _polish(problem, x, opts.residual_tolerance)
            if polished is not None and problem.energy(polished) <= energy + 1e-12 * max(1.0, abs(energy)):
                logging.info(f"🎯 Newton-Krylov polish accepted at iteration {iteration}")
                x = polished
                energy = problem.energy(x)
                history.append(energy)
                return x, iteration, True, history
            polish_below = residual / 10.0

        alpha, new_energy = _armijo(problem, x, energy, -g, -float(g @ g), step, opts)
        if alpha is None:
            logging.warning(f"⚠️  Line search stalled at residual {residual:.3e} (iteration {iteration})")
            return x, iteration, False, history

        x_new = x - alpha * g
        g_new = problem.gradient(x_new)
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        # Barzilai-Borwein trial step for the next iteration
        step = float(s @ s) / sy if sy > 0 else 2.0 * alpha

        x, g, energy = x_new, g_new, new_energy
        residual = problem.residual(g)
        iteration += 1
        history.append(energy)
        trace.write(iteration, energy, residual, alpha)
        if iteration % 1000 == 0:
            logging.debug(f"Descent iteration {iteration}: E={energy:.6e}, residual={residual:.3e}")

    return x, iteration, True, history


# ---------------------------------------------------------------------------
# Bump u₁ and λ̂
# ---------------------------------------------------------------------------


def _axis_profile(x: np.ndarray, length: float, inner_fraction: float) -> np.ndarray:
    half = 0.5 * length
    plateau = inner_fraction * half
    distance = np.abs(x - half)
    s = np.clip((half - distance) / (half - plateau), 0.0, 1.0)
    return np.where(distance <= plateau, 1.0, 3.0 * s**2 - 2.0 * s**3)


def bump_field(grid: Grid, bump: BumpSpec) -> ScalarField:
    """u₁ = t0 · Π_i smoothstep profile along axis i; equals t0 on Ω₁."""
    profiles = [
        _axis_profile(grid.axis_coordinates(i), grid.lengths[i], bump.inner_fraction)
        for i in range(grid.N)
    ]
    values = bump.t0 * np.ones(())
    for profile in profiles:
        values = np.multiply.outer(values, profile)
    return ScalarField(grid, values)


def _bump_terms(e: ExponentSet, grid: Grid, bump: BumpSpec) -> Tuple[ScalarField, float, float]:
    u1 = bump_field(grid, bump)
    p_integral = lebesgue_integral(u1, e.p)
    if p_integral == 0.0:
        raise DegenerateBump("∫|u₁|^p vanishes on this grid")
    positive = modular(gradient(u1), e.params) + lebesgue_integral(u1, e.r) / e.r
    return u1, positive, p_integral


def estimate_lambda_star(e: ExponentSet, grid: Grid, bump: Optional[BumpSpec] = None) -> float:
    """λ̂ = p (∫Φ(|∇u₁|) + (1/r)∫|u₁|^r) / ∫|u₁|^p, the zero of λ ↦ I_λ(u₁).

    λ in `e` is ignored.
    """
    _, positive, p_integral = _bump_terms(e, grid, bump or BumpSpec())
    lambda_hat = e.p * positive / p_integral
    logging.info(f"λ̂ = {lambda_hat:.10g} (grid {grid.dims}, p={e.p}, q={e.q}, r={e.r})")
    return lambda_hat


def bump_lambda_bound(e: ExponentSet, grid: Grid, bump: Optional[BumpSpec] = None) -> float:
    """p L / (t0^p |Ω₁|) with |Ω₁| the nodal measure of the plateau; always >= λ̂."""
    bump = bump or BumpSpec()
    u1, positive, _ = _bump_terms(e, grid, bump)
    plateau_nodes = int(np.count_nonzero(u1.values >= bump.t0))
    if plateau_nodes == 0:
        raise DegenerateBump("the plateau Ω₁ contains no grid node")
    return e.p * positive / (bump.t0**e.p * plateau_nodes * grid.cell_volume)


# ---------------------------------------------------------------------------
# Global minimization of I_λ
# ---------------------------------------------------------------------------


def _scaled_bump(e: ExponentSet, grid: Grid, bump: BumpSpec) -> Optional[ScalarField]:
    u1 = bump_field(grid, bump)
    energies = [i_energy(e, u1 * s).total for s in BUMP_SCALES]
    best = int(np.argmin(energies))
    if energies[best] >= 0.0:
        logging.debug("Bump ray never goes below I(0) = 0, skipping bump start")
        return None
    return u1 * float(BUMP_SCALES[best])


def minimize_i(
    e: ExponentSet,
    grid: Grid,
    init: Optional[ScalarField] = None,
    opts: Optional[DescentOptions] = None,
    bump: Optional[BumpSpec] = None,
    force: bool = False,
    trace_path: Optional[Union[str, Path]] = None,
) -> SolveResult:
    """Lowest-energy descent result over the starts init, 0 and the rescaled bump.

    Raises BudgetExhausted (carrying the result) when the winner did not converge.
    """
    forced = require_admissible(e, force)
    opts = opts or DescentOptions()
    problem = _Problem(e, grid, *FUNCTIONALS["min"])

    starts: List[Tuple[str, ScalarField]] = []
    if init is not None:
        starts.append(("init", init))
    starts.append(("zero", ScalarField.zeros(grid)))
    scaled = _scaled_bump(e, grid, bump or BumpSpec())
    if scaled is not None:
        starts.append(("bump", scaled))

    logging.info(f"🚀 Minimizing I_λ (λ={e.lam}) on grid {grid.dims} from {len(starts)} start(s)")
    best: Optional[SolveResult] = None
    with _Trace(trace_path, "min") as trace:
        for name, start in starts:
            x, iterations, converged, history = descend(problem, start.flat, opts, trace)
            result = _result(problem, x, iterations, converged, forced, "min", history)
            logging.info(
                f"   start={name}: E={result.energy:.10g}, residual={result.residual:.3e}, "
                f"iterations={iterations}, converged={converged}"
            )
            if best is None or (result.energy, not result.converged) < (best.energy, not best.converged):
                best = result

    logging.info(f"✅ I_λ minimum {best.energy:.10g} (‖u‖={best.luxemburg_norm:.6g})")
    return best.raise_for_status()


# ---------------------------------------------------------------------------
# Mountain pass on J_λ
# ---------------------------------------------------------------------------


def seeded_direction(grid: Grid, rng: np.random.Generator, params: NFunctionParams) -> ScalarField:
    """Lowest sine mode plus seeded second-mode perturbations, scaled to ‖v‖ = 1."""
    values = np.zeros(grid.dims)
    for modes in itertools.product((1, 2), repeat=grid.N):
        if all(m == 1 for m in modes):
            weight = 1.0
        else:
            weight = rng.uniform(-DIRECTION_PERTURBATION, DIRECTION_PERTURBATION)
        profile = np.ones(())
        for axis, m in enumerate(modes):
            x = grid.axis_coordinates(axis)
            profile = np.multiply.outer(profile, np.sin(m * np.pi * x / grid.lengths[axis]))
        values = values + weight * profile
    v = ScalarField(grid, values)
    return v / gradient_norm(v, params)


def _far_endpoint(problem: _Problem, rng: np.random.Generator, budget: int) -> np.ndarray:
    v = seeded_direction(problem.grid, rng, problem.e.params).flat
    t = 1.0
    for _ in range(budget + 1):
        if problem.energy(t * v) < 0.0:
            logging.info(f"Far endpoint found at t={t:g} (J={problem.energy(t * v):.6g})")
            return t * v
        t *= 2.0
    raise GeometryFailure(f"J stays non-negative along the sampled ray up to t={t / 2.0:g}")


def reparametrize(path: np.ndarray) -> np.ndarray:
    """Redistribute path vertices to equal Euclidean arc length, endpoints fixed."""
    lengths = np.linalg.norm(np.diff(path, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(lengths)])
    if arc[-1] == 0.0:
        return path.copy()
    targets = np.linspace(0.0, arc[-1], len(path))
    k = np.clip(np.searchsorted(arc, targets, side="right") - 1, 0, len(path) - 2)
    width = np.where(lengths[k] > 0, lengths[k], 1.0)
    w = np.clip((targets - arc[k]) / width, 0.0, 1.0)[:, None]
    out = (1.0 - w) * path[k] + w * path[k + 1]
    out[0], out[-1] = path[0], path[-1]
    return out


def _refine_maximum(problem: _Problem, path: np.ndarray, k: int) -> np.ndarray:
    """Maximize J along the two polyline segments adjacent to vertex k."""
    before, here, after = path[k - 1], path[k], path[k + 1]

    def point(s: float) -> np.ndarray:
        return here + s * (before - here) if s < 0 else here + s * (after - here)

    found = minimize_scalar(lambda s: -problem.energy(point(s)), bounds=(-1.0, 1.0), method="bounded")
    candidate = point(float(found.x))
    return candidate if problem.energy(candidate) > problem.energy(here) else here


def _path_energies(problem: _Problem, path: np.ndarray) -> np.ndarray:
    return np.array([problem.energy(x) for x in path[1:-1]])


def _deform(
    problem: _Problem,
    path: np.ndarray,
    k: int,
    energy: float,
    direction: np.ndarray,
    alpha: float,
    opts: DescentOptions,
) -> Tuple[Optional[float], np.ndarray, np.ndarray]:
    """Move vertex k along `direction` with Armijo backtracking.

    A move is accepted only if the reparametrized path still climbs above J = 0;
    (None, path, energies) when α underflows first.
    """
    slope = -float(direction @ direction)
    while alpha >= opts.step_tolerance:
        moved = path[k] + alpha * direction
        if problem.energy(moved) <= energy + opts.armijo_constant * alpha * slope:
            candidate = path.copy()
            candidate[k] = moved
            candidate = reparametrize(candidate)
            energies = _path_energies(problem, candidate)
            if np.all(np.isfinite(energies)) and float(np.max(energies)) > 0.0:
                return alpha, candidate, energies
        alpha *= opts.backtrack_factor
    return None, path, _path_energies(problem, path)


def mountain_pass(
    e: ExponentSet,
    grid: Grid,
    config: Optional[MountainPassConfig] = None,
    seed: int = 0,
    force: bool = False,
    trace_path: Optional[Union[str, Path]] = None,
) -> SolveResult:
    """Critical point of J_λ at the mountain-pass level between 0 and a far endpoint."""
    forced = require_admissible(e, force)
    config = config or MountainPassConfig()
    problem = _Problem(e, grid, *FUNCTIONALS["mp"])
    rng = np.random.default_rng(seed)

    endpoint = _far_endpoint(problem, rng, config.doubling_budget)
    weights = np.linspace(0.0, 1.0, config.path_points)[:, None]
    path = weights * endpoint[None, :]
    logging.info(f"🚀 Mountain pass on grid {grid.dims}, {config.path_points} path points, seed {seed}")

    history: List[float] = []
    polish_below = config.polish_threshold
    peak = path[1]
    energies = _path_energies(problem, path)
    if not float(np.max(energies)) > 0.0:
        raise GeometryFailure(f"initial path never climbs above J = 0 with {config.path_points} points")
    last_alpha: Optional[float] = None
    alpha = 0.0
    iteration = 0
    converged = False
    with _Trace(trace_path, "mp") as trace:
        while iteration < config.max_iterations:
            k = 1 + int(np.argmax(energies))
            peak = _refine_maximum(problem, path, k)
            path[k] = peak

            energy = problem.energy(peak)
            g = problem.gradient(peak)
            residual = problem.residual(g)
            if not (np.isfinite(energy) and np.isfinite(residual)):
                logging.error(f"❌ Non-finite path maximum at iteration {iteration}")
                break
            history.append(energy)
            trace.write(iteration, energy, residual, alpha)

            if residual < config.residual_tolerance:
                converged = True
                break

            if residual < polish_below:
                polished = _polish(problem, peak, config.residual_tolerance)
                if polished is not None and problem.energy(polished) > 0.0:
                    logging.info(f"🎯 Newton-Krylov polish accepted at iteration {iteration}")
                    peak = polished
                    history.append(problem.energy(peak))
                    converged = True
                    break
                polish_below = residual / 10.0

            tangent = path[k + 1] - path[k - 1]
            tangent /= np.linalg.norm(tangent)
            direction = -(g - float(g @ tangent) * tangent)
            # the vertex moves at most one adjacent segment length per iteration
            reach = min(np.linalg.norm(path[k] - path[k - 1]), np.linalg.norm(path[k + 1] - path[k]))
            step = float(reach) / max(float(np.linalg.norm(direction)), 1e-300)
            if last_alpha is not None:
                step = min(step, 2.0 * last_alpha)
            step_taken, path, energies = _deform(problem, path, k, energy, direction, step, config)
            if step_taken is None:
                logging.warning(f"⚠️  Path step stalled at residual {residual:.3e} (iteration {iteration})")
                break
            alpha = last_alpha = step_taken
            iteration += 1
            if iteration % 100 == 0:
                logging.debug(f"Path iteration {iteration}: max J={energy:.6e}, residual={residual:.3e}")

    result = _result(problem, peak, iteration, converged, forced, "mp", history)
    if converged:
        logging.info(f"✅ Mountain-pass point: J={result.energy:.10g}, ‖u‖={result.luxemburg_norm:.6g}")
    else:
        logging.warning(f"⚠️  Mountain pass stopped at residual {result.residual:.3e}")
    return result.raise_for_status()


# ---------------------------------------------------------------------------
# Ridge check
# ---------------------------------------------------------------------------


def verify_ridge(e: ExponentSet, grid: Grid, eta: float, samples: int = 50, seed: int = 0) -> RidgeReport:
    """Sample J_λ on ‖u‖ = η; a positive minimum is the finite surrogate for the ridge level."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    rng = np.random.default_rng(seed)
    fields = [random_field(grid, rng, e.params, target_norm=eta) for _ in range(samples)]

    energies = [j_energy(e, u).total for u in fields]
    ratios = [lebesgue_integral(u, e.r) / eta**e.r for u in fields]
    c1 = max(ratios)
    floor = eta ** (e.p + e.q) - c1 / e.r * eta**e.r

    return RidgeReport(
        eta=eta,
        samples=samples,
        seed=seed,
        min_energy=min(energies),
        mean_energy=float(np.mean(energies)),
        empirical_c1=c1,
        lower_bound_slack=min(energies) - floor,
        energies=energies,
    )


def solve(
    problem: str,
    e: ExponentSet,
    grid: Grid,
    seed: int = 0,
    opts: Optional[Dict] = None,
    bump: Optional[BumpSpec] = None,
    force: bool = False,
    trace_path: Optional[Union[str, Path]] = None,
) -> SolveResult:
    """Dispatch on the problem name used by run configurations ("min" or "mp")."""
    runners: Dict[str, Callable[[], SolveResult]] = {
        "min": lambda: minimize_i(
            e, grid, opts=DescentOptions(**(opts or {})), bump=bump, force=force, trace_path=trace_path
        ),
        "mp": lambda: mountain_pass(
            e, grid, MountainPassConfig(**(opts or {})), seed=seed, force=force, trace_path=trace_path
        ),
    }
    if problem not in runners:
        raise ValueError(f"Unknown problem: {problem} (expected one of {sorted(runners)})")
    return runners[problem]()


def symmetric_partner(e: ExponentSet, result: SolveResult) -> SolveResult:
    """-u for a mountain-pass point u; J is even so -u is critical at the same level."""
    u = -result.u
    return SolveResult(
        u=u,
        energy=j_energy(e, u).total,
        residual=residual_norm(j_residual(e, u)),
        iterations=result.iterations,
        luxemburg_norm=result.luxemburg_norm,
        converged=result.converged,
        forced=result.forced,
        problem=result.problem,
    )
