#!/usr/bin/env python3
"""
Orlicz Solver CLI - batch front end for checks, tables, solves and invariant suites

Commands:
- check        Exponent hypotheses report (exit 0 admissible, 1 not)
- tabulate     CSV of t, φ, Φ, Φ̄∘φ, tφ/Φ over a logarithmic grid
- solve        Minimizer of I_λ (min) or mountain-pass point of J_λ (mp) to a JSON solution file
- lambda-star  λ̂ from the bump u₁
- verify       Seeded invariant suites

Exit codes: 0 success, 1 admissibility rejection, 2 convergence failure, 3 input error.
JSON and CSV go to stdout or files; logs go to stderr and the log directory.
"""

import argparse
import configparser
import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from admissibility import ExponentSet, check_admissible
from errors import (
    BudgetExhausted,
    ConfigError,
    DegenerateBump,
    GeometryFailure,
    InadmissibleExponents,
    NonConvergence,
    QuadratureFailure,
)
from field import Grid, write_solution_file
from nfunction import NFunctionParams, capital_phi, phi, phi_ratio, young_conjugate
from settings import setup_logging
from solvers import BumpSpec, bump_lambda_bound, estimate_lambda_star, solve

EXIT_OK = 0
EXIT_INADMISSIBLE = 1
EXIT_NOT_CONVERGED = 2
EXIT_INPUT = 3
EXIT_INVARIANT_FAILURE = 1

RUN_SECTION = "run"


class RunConfig(BaseModel):
    """Flat key=value run file; keys are exactly the aliases below."""

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    N: int = Field(ge=1)
    p: float
    q: float
    r: float
    lam: float = Field(default=0.0, ge=0.0, alias="lambda")
    dims: List[int]
    lengths: List[float]
    problem: str = "min"
    bump_t0: Optional[float] = Field(default=None, alias="bump.t0")
    bump_inner_fraction: Optional[float] = Field(default=None, alias="bump.innerFraction")
    seed: int = 0
    residual_tol: Optional[float] = Field(default=None, gt=0, alias="residualTol")
    max_iter: Optional[int] = Field(default=None, ge=1, alias="maxIter")
    path_points: Optional[int] = Field(default=None, ge=3, alias="pathPoints")
    force: bool = False

    @field_validator("dims", "lengths", mode="before")
    @classmethod
    def _split_list(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("problem")
    @classmethod
    def _known_problem(cls, value: str) -> str:
        if value not in ("min", "mp"):
            raise ValueError(f"problem must be 'min' or 'mp', got {value!r}")
        return value

    @model_validator(mode="after")
    def _grid_matches_dimension(self) -> "RunConfig":
        if len(self.dims) != self.N or len(self.lengths) != self.N:
            raise ValueError(f"dims and lengths need N={self.N} entries each")
        Grid(tuple(self.dims), tuple(self.lengths))
        return self

    @property
    def exponents(self) -> ExponentSet:
        return ExponentSet(N=self.N, p=self.p, q=self.q, r=self.r, lam=self.lam)

    @property
    def grid(self) -> Grid:
        return Grid(tuple(self.dims), tuple(self.lengths))

    @property
    def bump(self) -> BumpSpec:
        values = {"t0": self.bump_t0, "inner_fraction": self.bump_inner_fraction}
        return BumpSpec(**{k: v for k, v in values.items() if v is not None})

    @property
    def solver_options(self) -> Dict[str, float]:
        values = {
            "residual_tolerance": self.residual_tol,
            "max_iterations": self.max_iter,
            "path_points": self.path_points,
        }
        return {k: v for k, v in values.items() if v is not None}


def load_run_config(path: str) -> RunConfig:
    """Parse a flat key=value file; raises ConfigError on any malformed or unknown key."""
    config_file = Path(path)
    if not config_file.exists():
        raise ConfigError(f"Config file not found: {config_file}")

    parser = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(f"[{RUN_SECTION}]\n" + config_file.read_text(encoding="utf-8"))
    except configparser.Error as e:
        raise ConfigError(f"Malformed config {config_file}: {e}") from e

    try:
        run = RunConfig.model_validate(dict(parser.items(RUN_SECTION)))
    except ValidationError as e:
        raise ConfigError(f"Invalid config {config_file}: {e}") from e
    logging.info(f"✅ Loaded run config from: {config_file}")
    return run


class _Parser(argparse.ArgumentParser):
    """argparse with the input-error exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"❌ {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def _emit(document) -> None:
    # json uses repr for floats: shortest round-trip form, at most 17 significant digits
    print(json.dumps(document, indent=2, allow_nan=False))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    e = ExponentSet(N=args.N, p=args.p, q=args.q, r=args.r, lam=args.lam)
    report = check_admissible(e)
    document = report.model_dump(by_alias=True)
    document["violations"] = report.violations
    _emit(document)
    if not report.admissible:
        logging.warning(f"⚠️  Inadmissible: {', '.join(report.violations)}")
        return EXIT_INADMISSIBLE
    return EXIT_OK


def cmd_tabulate(args) -> int:
    if not 0.0 < args.t_min < args.t_max:
        raise ConfigError(f"need 0 < t-min < t-max (got {args.t_min}, {args.t_max})")
    if args.points < 2:
        raise ConfigError(f"need at least 2 points (got {args.points})")
    params = NFunctionParams(p=args.p, q=args.q)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t", "phi", "Phi", "PhiConjAtPhi", "ratio"])
        for t in np.geomspace(args.t_min, args.t_max, args.points):
            t = float(t)
            s = phi(params, t)
            row = [t, s, capital_phi(params, t), young_conjugate(params, s), phi_ratio(params, t)]
            writer.writerow([f"{value:.17g}" for value in row])
    logging.info(f"💾 Table with {args.points} rows saved to: {out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    run = load_run_config(args.config)
    problem = args.problem or run.problem
    if args.problem and args.problem != run.problem:
        logging.warning(f"⚠️  --problem {args.problem} overrides problem={run.problem} from the config")
    force = args.force or run.force
    e, grid = run.exponents, run.grid

    try:
        result = solve(
            problem, e, grid, seed=run.seed, opts=run.solver_options, bump=run.bump, force=force, trace_path=args.trace
        )
        code = EXIT_OK
    except BudgetExhausted as exc:
        logging.error(f"❌ {exc}")
        if exc.result is None:
            return EXIT_NOT_CONVERGED
        result = exc.result
        code = EXIT_NOT_CONVERGED

    diagnostics = result.diagnostics()
    if not (all(math.isfinite(v) for v in diagnostics.values()) and np.all(np.isfinite(result.u.values))):
        logging.error(f"❌ Non-finite {problem} result, no solution file written")
        _emit(
            {
                "out": None,
                "problem": problem,
                "converged": False,
                **{k: (v if math.isfinite(v) else None) for k, v in diagnostics.items()},
            }
        )
        return EXIT_NOT_CONVERGED

    write_solution_file(
        args.out,
        e.to_dict(),
        problem,
        result.u,
        diagnostics,
        extra={"forced": result.forced, "converged": result.converged, "seed": run.seed},
    )
    _emit({"out": str(args.out), "problem": problem, "converged": result.converged, **diagnostics})
    return code


def cmd_lambda_star(args) -> int:
    run = load_run_config(args.config)
    e, grid, bump = run.exponents, run.grid, run.bump
    lambda_hat = estimate_lambda_star(e, grid, bump)
    document = {"lambdaHat": lambda_hat}
    try:
        document["plateauBound"] = bump_lambda_bound(e, grid, bump)
    except DegenerateBump as exc:
        logging.warning(f"⚠️  Plateau bound unavailable: {exc}")
    _emit(document)
    return EXIT_OK


def _parse_tolerances(items: List[str]) -> Dict[str, float]:
    tolerances = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tolerance expects NAME=VALUE, got {item!r}")
        try:
            tolerances[name.strip()] = float(value)
        except ValueError as e:
            raise ConfigError(f"--tolerance value for {name!r} is not a number") from e
    return tolerances


def cmd_verify(args) -> int:
    # imported here: the suites pull in every solver module
    from invariants import run_suites

    summary = run_suites([args.suite], seed=args.seed, tolerances=_parse_tolerances(args.tolerance))
    document = summary.model_dump()
    document["failures"] = summary.failures
    _emit(document)
    return EXIT_OK if summary.passed else EXIT_INVARIANT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(description="Orlicz-Sobolev solver for -div(log(1+|∇u|^q)|∇u|^(p-2)∇u)")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = commands.add_parser("check", help="Check the exponent hypotheses")
    check.add_argument("--N", type=int, required=True, help="Spatial dimension")
    check.add_argument("--p", type=float, required=True)
    check.add_argument("--q", type=float, required=True)
    check.add_argument("--r", type=float, required=True)
    check.add_argument("--lambda", dest="lam", type=float, default=0.0, help="λ (default: 0)")
    check.set_defaults(handler=cmd_check)

    tabulate = commands.add_parser("tabulate", help="Tabulate the N-function to CSV")
    tabulate.add_argument("--p", type=float, required=True)
    tabulate.add_argument("--q", type=float, required=True)
    tabulate.add_argument("--t-min", type=float, required=True)
    tabulate.add_argument("--t-max", type=float, required=True)
    tabulate.add_argument("--points", type=int, required=True)
    tabulate.add_argument("--out", required=True, help="Output CSV file")
    tabulate.set_defaults(handler=cmd_tabulate)

    solve_cmd = commands.add_parser("solve", help="Solve the configured problem")
    solve_cmd.add_argument("--problem", choices=["min", "mp"], help="Overrides problem= in the config")
    solve_cmd.add_argument("--config", required=True, help="Flat key=value run file")
    solve_cmd.add_argument("--out", required=True, help="Output JSON solution file")
    solve_cmd.add_argument("--force", action="store_true", help="Solve even with inadmissible exponents")
    solve_cmd.add_argument("--trace", help="Optional JSON Lines iteration trace")
    solve_cmd.set_defaults(handler=cmd_solve)

    lambda_star = commands.add_parser("lambda-star", help="Estimate λ̂ from the bump u₁")
    lambda_star.add_argument("--config", required=True, help="Flat key=value run file")
    lambda_star.set_defaults(handler=cmd_lambda_star)

    verify = commands.add_parser("verify", help="Run invariant suites")
    verify.add_argument(
        "--suite", choices=["nfunction", "field", "functionals", "solvers", "all"], default="all"
    )
    verify.add_argument("--seed", type=int, default=0, help="PRNG seed (default: 0)")
    verify.add_argument(
        "--tolerance",
        action="append",
        metavar="NAME=VALUE",
        help="Override the tolerance of one invariant (repeatable)",
    )
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging("orlicz_cli")

    try:
        return args.handler(args)
    except InadmissibleExponents as e:
        print(f"❌ Inadmissible exponents: {e}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except (GeometryFailure, NonConvergence, QuadratureFailure) as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (ConfigError, ValidationError, ValueError) as e:
        print(f"❌ Input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
