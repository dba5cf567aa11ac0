#!/usr/bin/env python3
"""
CLI Tests
Exit codes, JSON/CSV outputs and run-file validation of orlicz_cli
"""

import csv
import json
import math
import sys

import pytest

import orlicz_cli
from errors import ConfigError
from field import Grid, ScalarField, read_solution_file
from orlicz_cli import EXIT_INADMISSIBLE, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, load_run_config, main
from solvers import SolveResult

BASE_CONFIG = """\
N = 3
p = 1.9
q = 1.05
r = 3.5
dims = 5,5,5
lengths = 1,1,1
bump.t0 = 2.0
bump.innerFraction = 0.5
seed = 42
"""


@pytest.fixture(autouse=True)
def log_dir(tmp_path, monkeypatch):
    """Keep log files inside the test's temporary directory."""
    monkeypatch.chdir(tmp_path)


def write_config(tmp_path, extra: str = "", base: str = BASE_CONFIG):
    path = tmp_path / "run.cfg"
    path.write_text(base + extra)
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_check_admissible(capsys):
    code, report = run_json(capsys, ["check", "--N", "3", "--p", "1.9", "--q", "1.05", "--r", "3.5"])
    assert code == EXIT_OK
    assert report["admissible"] is True
    assert report["violations"] == []


def test_check_growth_above_dimension(capsys):
    code, report = run_json(capsys, ["check", "--N", "2", "--p", "1.5", "--q", "1.5", "--r", "3.5"])
    assert code == EXIT_INADMISSIBLE
    assert "p+q<N" in report["violations"]


def test_check_p_above_dimension(capsys):
    code, report = run_json(capsys, ["check", "--N", "3", "--p", "3.5", "--q", "1.1", "--r", "5"])
    assert code == EXIT_INADMISSIBLE
    assert "N>p" in report["violations"]
    assert report["critical"] is None


def test_malformed_flags_exit_3(capsys):
    with pytest.raises(SystemExit) as raised:
        main(["check", "--N", "3", "--p", "1.9"])
    assert raised.value.code == EXIT_INPUT
    with pytest.raises(SystemExit) as raised:
        main(["check", "--N", "three", "--p", "1.9", "--q", "1.05", "--r", "3.5"])
    assert raised.value.code == EXIT_INPUT


def tabulate(tmp_path, name, t_min="1e-5", t_max="1e8", points="60"):
    out = tmp_path / name
    argv = ["tabulate", "--p", "1.9", "--q", "1.05", "--t-min", t_min, "--t-max", t_max, "--points", points]
    return main(argv + ["--out", str(out)]), out


def test_tabulate_columns_and_bounds(tmp_path):
    code, out = tabulate(tmp_path, "table.csv")
    assert code == EXIT_OK
    with open(out, newline="") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == ["t", "phi", "Phi", "PhiConjAtPhi", "ratio"]
    assert len(rows) == 60
    for row in rows:
        assert 1.9 - 1e-6 <= float(row["ratio"]) <= 2.95 + 1e-6
    first = rows[0]
    assert float(first["t"]) == pytest.approx(1e-5)
    assert float(first["Phi"]) / 1e-5**2.95 == pytest.approx(1.0 / 2.95, rel=0.01)


def test_tabulate_is_deterministic(tmp_path):
    _, first = tabulate(tmp_path, "a.csv")
    _, second = tabulate(tmp_path, "b.csv")
    assert first.read_bytes() == second.read_bytes()


def test_tabulate_bad_range(tmp_path, capsys):
    code, _ = tabulate(tmp_path, "bad.csv", t_min="10", t_max="1")
    assert code == EXIT_INPUT
    code, _ = tabulate(tmp_path, "bad.csv", points="1")
    assert code == EXIT_INPUT


def test_lambda_star(tmp_path, capsys):
    code, document = run_json(capsys, ["lambda-star", "--config", write_config(tmp_path)])
    assert code == EXIT_OK
    assert document["lambdaHat"] > 0.0
    assert document["plateauBound"] >= document["lambdaHat"]


def test_solve_min_above_lambda_hat(tmp_path, capsys):
    _, document = run_json(capsys, ["lambda-star", "--config", write_config(tmp_path)])
    config = write_config(tmp_path, f"lambda = {2.0 * document['lambdaHat']!r}\nproblem = min\n")
    out = tmp_path / "min.json"
    code, summary = run_json(capsys, ["solve", "--config", config, "--out", str(out)])
    assert code == EXIT_OK
    assert summary["energy"] < 0.0

    solution = read_solution_file(out)
    assert solution["problem"] == "min"
    assert solution["converged"] is True and solution["forced"] is False
    assert solution["diagnostics"]["energy"] < 0.0
    assert solution["exponents"]["lambda"] == pytest.approx(2.0 * document["lambdaHat"])


def test_solve_mountain_pass(tmp_path, capsys):
    config = write_config(tmp_path, "lambda = 1\n")
    out = tmp_path / "mp.json"
    code, summary = run_json(capsys, ["solve", "--problem", "mp", "--config", config, "--out", str(out)])
    assert code == EXIT_OK
    assert summary["energy"] > 0.0
    assert read_solution_file(out)["seed"] == 42


def test_solve_non_finite_result_is_not_converged(tmp_path, capsys, monkeypatch):
    def diverged(problem, e, grid, **kwargs):
        u = ScalarField.zeros(Grid((5, 5, 5), (1.0, 1.0, 1.0)))
        return SolveResult(u, -math.inf, math.inf, 7, 0.0, True, problem="mp")

    monkeypatch.setattr(orlicz_cli, "solve", diverged)
    config = write_config(tmp_path, "lambda = 1\n")
    out = tmp_path / "mp.json"
    code, summary = run_json(capsys, ["solve", "--problem", "mp", "--config", config, "--out", str(out)])
    assert code == EXIT_NOT_CONVERGED
    assert summary["converged"] is False
    assert summary["energy"] is None and summary["residual"] is None
    assert not out.exists()


def test_solve_inadmissible_gate(tmp_path, capsys):
    config = write_config(tmp_path, "lambda = 0\n", base=BASE_CONFIG.replace("r = 3.5", "r = 4.5"))
    out = tmp_path / "gated.json"
    assert main(["solve", "--config", config, "--out", str(out)]) == EXIT_INADMISSIBLE
    assert not out.exists()

    code, _ = run_json(capsys, ["solve", "--config", config, "--out", str(out), "--force"])
    assert code == EXIT_OK
    assert read_solution_file(out)["forced"] is True


@pytest.mark.parametrize(
    "extra, base",
    [
        ("colour = blue\n", BASE_CONFIG),
        ("problem = max\n", BASE_CONFIG),
        ("", BASE_CONFIG.replace("dims = 5,5,5", "dims = 5,5")),
        ("", BASE_CONFIG.replace("p = 1.9", "p = fast")),
        ("not a key value line\n", BASE_CONFIG),
        ("bump.t0 = 0.5\n", BASE_CONFIG.replace("bump.t0 = 2.0\n", "")),
    ],
)
def test_config_errors_exit_3(tmp_path, capsys, extra, base):
    config = write_config(tmp_path, extra, base=base)
    assert main(["lambda-star", "--config", config]) == EXIT_INPUT


def test_missing_config(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(str(tmp_path / "missing.cfg"))
    assert main(["lambda-star", "--config", str(tmp_path / "missing.cfg")]) == EXIT_INPUT


def test_run_config_fields(tmp_path):
    run = load_run_config(write_config(tmp_path, "residualTol = 1e-8\nmaxIter = 10\npathPoints = 5\n"))
    assert run.grid.dims == (5, 5, 5)
    assert run.exponents.lam == 0.0
    assert run.bump.inner_fraction == 0.5
    assert run.solver_options == {"residual_tolerance": 1e-8, "max_iterations": 10, "path_points": 5}


def test_verify_nfunction_suite(capsys):
    code, summary = run_json(capsys, ["verify", "--suite", "nfunction", "--seed", "1"])
    assert code == EXIT_OK
    assert summary["passed"] is True
    assert summary["failures"] == []
    assert all("slack" in item for item in summary["invariants"])


def test_verify_is_deterministic(capsys):
    main(["verify", "--suite", "functionals", "--seed", "1"])
    first = capsys.readouterr().out
    main(["verify", "--suite", "functionals", "--seed", "1"])
    assert capsys.readouterr().out == first


def test_verify_all_suites_are_deterministic(capsys):
    first_code = main(["verify", "--suite", "all", "--seed", "1"])
    first = capsys.readouterr().out
    second_code = main(["verify", "--suite", "all", "--seed", "1"])
    assert first_code == second_code == EXIT_OK
    assert capsys.readouterr().out == first
    assert json.loads(first)["failures"] == []


def test_verify_tampered_tolerance(capsys):
    code, summary = run_json(
        capsys, ["verify", "--suite", "nfunction", "--seed", "1", "--tolerance", "p_zero_identity=-1"]
    )
    assert code == orlicz_cli.EXIT_INVARIANT_FAILURE
    assert summary["failures"] == ["nfunction/p_zero_identity"]


def test_verify_bad_tolerance_syntax():
    assert main(["verify", "--suite", "nfunction", "--tolerance", "p_zero_identity"]) == EXIT_INPUT


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
