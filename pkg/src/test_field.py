#!/usr/bin/env python3
"""
Field Tests
Gradient operator, modular, Luxemburg norm and the solution file
"""

import json
import sys

import numpy as np
import pytest

from field import (
    CellGradientField,
    Grid,
    ScalarField,
    embedding_ratio,
    gradient,
    gradient_norm,
    gradient_transpose,
    luxemburg_norm,
    modular,
    random_field,
    read_solution_file,
    sobolev_norm,
    write_solution_file,
)
from nfunction import NFunctionParams, capital_phi, capital_phi_inverse

REFERENCE = NFunctionParams(p=1.9, q=1.05)
UNIT_CUBE = Grid((9, 9, 9), (1.0, 1.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1)


def constant_gradient(grid: Grid, c: float) -> CellGradientField:
    vectors = np.zeros(grid.cell_shape + (grid.N,))
    vectors[..., 0] = c
    return CellGradientField(grid, vectors)


def test_grid_geometry():
    grid = Grid((3, 4), (2.0, 5.0))
    assert grid.N == 2
    assert grid.spacing == (0.5, 1.0)
    assert grid.cell_shape == (4, 5)
    assert grid.node_count == 12
    assert grid.cell_volume * np.prod(grid.cell_shape) == pytest.approx(grid.volume)
    np.testing.assert_allclose(grid.axis_coordinates(0), [0.5, 1.0, 1.5])


def test_grid_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Grid((3, 3), (1.0,))
    with pytest.raises(ValueError):
        Grid((1,), (1.0,))
    with pytest.raises(ValueError):
        Grid((3,), (0.0,))


def test_fields_are_immutable():
    u = ScalarField.zeros(Grid((3,), (4.0,)))
    with pytest.raises(ValueError):
        u.values[0] = 1.0


def test_gradient_of_zero():
    g = gradient(ScalarField.zeros(UNIT_CUBE))
    assert g.vectors.shape == (10, 10, 10, 3)
    assert not np.any(g.vectors)


def test_one_dimensional_slopes():
    u = ScalarField(Grid((3,), (4.0,)), [1.0, 2.0, 1.0])
    np.testing.assert_array_equal(gradient(u).vectors[:, 0], [1.0, 1.0, -1.0, -1.0])


def test_two_dimensional_cell_average():
    # corner node at height 1, spacing 1: adjacent cells see ±1/2 per axis
    u = ScalarField(Grid((2, 2), (3.0, 3.0)), [[1.0, 0.0], [0.0, 0.0]])
    g = gradient(u).vectors
    np.testing.assert_allclose(g[0, 0], [0.5, 0.5])
    np.testing.assert_allclose(g[1, 1], [-0.5, -0.5])
    np.testing.assert_allclose(g[2, 2], [0.0, 0.0])


def test_gradient_is_linear(rng):
    u = random_field(UNIT_CUBE, rng)
    w = random_field(UNIT_CUBE, rng)
    combined = gradient(u * 2.5 + w * -0.75).vectors
    expected = 2.5 * gradient(u).vectors - 0.75 * gradient(w).vectors
    np.testing.assert_allclose(combined, expected, atol=1e-12)


def test_gradient_transpose_is_adjoint(rng):
    grid = Grid((4, 5, 3), (1.0, 2.0, 0.5))
    u = random_field(grid, rng)
    flux = rng.normal(size=grid.cell_shape + (grid.N,))
    lhs = float(np.sum(gradient(u).vectors * flux))
    rhs = float(np.sum(u.values * gradient_transpose(grid, flux)))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_modular_of_constant_gradient():
    assert modular(constant_gradient(UNIT_CUBE, 0.0), REFERENCE) == 0.0
    assert modular(constant_gradient(UNIT_CUBE, 1.7), REFERENCE) == pytest.approx(capital_phi(REFERENCE, 1.7), rel=1e-10)


def test_modular_grows_with_scaling(rng):
    u = random_field(UNIT_CUBE, rng)
    assert modular(gradient(u * 2.0), REFERENCE) > modular(gradient(u), REFERENCE)
    assert modular(u * 2.0, REFERENCE) > modular(u, REFERENCE)


def test_luxemburg_norm_closed_form():
    assert luxemburg_norm(constant_gradient(UNIT_CUBE, 0.0), REFERENCE) == 0.0
    c = 3.0
    expected = c / capital_phi_inverse(REFERENCE, 1.0)
    assert luxemburg_norm(constant_gradient(UNIT_CUBE, c), REFERENCE) == pytest.approx(expected, rel=1e-8)


def test_luxemburg_norm_homogeneous_and_definitional(rng):
    for _ in range(10):
        g = gradient(random_field(UNIT_CUBE, rng))
        norm = luxemburg_norm(g, REFERENCE)
        assert modular(g / norm, REFERENCE) == pytest.approx(1.0, abs=1e-9)
        for c in (0.01, 7.0, 300.0):
            assert luxemburg_norm(g * c, REFERENCE) == pytest.approx(c * norm, rel=1e-10)


def test_modular_norm_inequalities(rng):
    p0 = REFERENCE.p_zero
    for target in (0.1, 0.4, 0.9):
        u = random_field(UNIT_CUBE, rng, REFERENCE, target)
        norm = gradient_norm(u, REFERENCE)
        assert norm == pytest.approx(target, rel=1e-10)
        assert modular(gradient(u), REFERENCE) >= norm**p0 - 1e-9
    for target in (1.5, 4.0, 20.0):
        u = random_field(UNIT_CUBE, rng, REFERENCE, target)
        rho = modular(gradient(u), REFERENCE)
        assert rho <= target**p0 + 1e-9
        assert rho >= target**REFERENCE.p - 1e-9


def test_random_field_is_seeded():
    a = random_field(UNIT_CUBE, np.random.default_rng(5))
    b = random_field(UNIT_CUBE, np.random.default_rng(5))
    np.testing.assert_array_equal(a.values, b.values)
    with pytest.raises(ValueError):
        random_field(UNIT_CUBE, np.random.default_rng(5), target_norm=1.0)


def test_sobolev_norm_and_embedding_ratio(rng):
    u = random_field(UNIT_CUBE, rng, REFERENCE, 1.0)
    assert sobolev_norm(u, REFERENCE) > gradient_norm(u, REFERENCE)
    ratio = embedding_ratio(u, REFERENCE, 3.5)
    assert np.isfinite(ratio) and ratio > 0
    # scale invariant: both sides are 1-homogeneous
    assert embedding_ratio(u * 3.0, REFERENCE, 3.5) == pytest.approx(ratio, rel=1e-9)


def test_solution_file_round_trip(tmp_path, rng):
    u = random_field(Grid((3, 4), (1.0, 2.0)), rng)
    path = tmp_path / "nested" / "solution.json"
    exponents = {"N": 2, "p": 1.9, "q": 1.05, "r": 3.5, "lambda": 1.0}
    diagnostics = {"energy": -0.5, "residual": 1e-7, "iterations": 12, "norm": 0.8}
    write_solution_file(path, exponents, "min", u, diagnostics, extra={"seed": 3})

    raw = json.loads(path.read_text())
    assert raw["version"] == 1
    assert raw["grid"] == {"dims": [3, 4], "lengths": [1.0, 2.0]}
    assert raw["values"] == u.flat.tolist()
    assert raw["seed"] == 3

    loaded = read_solution_file(path)
    assert loaded["problem"] == "min"
    assert loaded["diagnostics"] == diagnostics
    np.testing.assert_array_equal(loaded["field"].values, u.values)


def test_solution_file_refuses_non_finite_diagnostics(tmp_path):
    u = ScalarField.zeros(Grid((2,), (1.0,)))
    with pytest.raises(ValueError):
        write_solution_file(tmp_path / "bad.json", {"N": 1}, "mp", u, {"energy": float("-inf")})
    assert not (tmp_path / "bad.json").exists()


def test_solution_file_rejects_unknown_version(tmp_path):
    path = tmp_path / "old.json"
    path.write_text(json.dumps({"version": 7}))
    with pytest.raises(ValueError):
        read_solution_file(path)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
