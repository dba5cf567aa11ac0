#!/usr/bin/env python3
"""
Discrete Fields - nodal values on an N-dimensional box with u = 0 on the boundary

Features:
- Grid / ScalarField / CellGradientField value types
- Cell-center gradient of the multilinear interpolant and its exact adjoint
- Modular ∫Φ, Luxemburg norm, full Orlicz-Sobolev norm
- Seeded random fields and the JSON solution file format
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from errors import NonConvergence
from nfunction import NFunctionParams, capital_phi_array
from settings import SolverConfig

SOLUTION_FILE_VERSION = 1


@dataclass(frozen=True)
class Grid:
    """Axis-aligned box [0, L_1] x ... x [0, L_N] with dims_i interior nodes per axis."""

    dims: Tuple[int, ...]
    lengths: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        if len(self.dims) == 0 or len(self.dims) != len(self.lengths):
            raise ValueError(f"dims {self.dims} and lengths {self.lengths} must match in length")
        if any(d < 2 for d in self.dims):
            raise ValueError(f"every axis needs at least 2 interior nodes, got {self.dims}")
        if any(not x > 0 for x in self.lengths):
            raise ValueError(f"box lengths must be positive, got {self.lengths}")

    @property
    def N(self) -> int:
        return len(self.dims)

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(L / (d + 1) for L, d in zip(self.lengths, self.dims))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def cell_shape(self) -> Tuple[int, ...]:
        return tuple(d + 1 for d in self.dims)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.dims))

    def axis_coordinates(self, axis: int) -> np.ndarray:
        """Coordinates of the interior nodes along one axis."""
        return self.spacing[axis] * np.arange(1, self.dims[axis] + 1)

    def to_dict(self) -> Dict[str, Any]:
        return {"dims": list(self.dims), "lengths": list(self.lengths)}


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class ScalarField:
    """Interior nodal values (C order, last axis fastest); boundary values are 0."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(self.grid.dims)
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.dims))

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def __add__(self, other: "ScalarField") -> "ScalarField":
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, factor: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * factor)

    __rmul__ = __mul__

    def __truediv__(self, factor: float) -> "ScalarField":
        return ScalarField(self.grid, self.values / factor)

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)


@dataclass(frozen=True)
class CellGradientField:
    """One N-vector per cell, evaluated at the cell center."""

    grid: Grid
    vectors: np.ndarray

    def __post_init__(self):
        expected = self.grid.cell_shape + (self.grid.N,)
        vectors = np.asarray(self.vectors, dtype=float)
        if vectors.shape != expected:
            raise ValueError(f"gradient field shape {vectors.shape} != {expected}")
        object.__setattr__(self, "vectors", _frozen(vectors))

    @property
    def magnitudes(self) -> np.ndarray:
        return np.sqrt(np.sum(self.vectors**2, axis=-1))

    def __mul__(self, factor: float) -> "CellGradientField":
        return CellGradientField(self.grid, self.vectors * factor)

    __rmul__ = __mul__

    def __truediv__(self, factor: float) -> "CellGradientField":
        return CellGradientField(self.grid, self.vectors / factor)

    def __add__(self, other: "CellGradientField") -> "CellGradientField":
        return CellGradientField(self.grid, self.vectors + other.vectors)


AnyField = Union[ScalarField, CellGradientField]


# ---------------------------------------------------------------------------
# Gradient operator and its adjoint
# ---------------------------------------------------------------------------


def _axis_slice(ndim: int, axis: int, part: slice) -> Tuple[slice, ...]:
    index = [slice(None)] * ndim
    index[axis] = part
    return tuple(index)


def _average_adjacent(a: np.ndarray, axis: int) -> np.ndarray:
    lo = a[_axis_slice(a.ndim, axis, slice(None, -1))]
    hi = a[_axis_slice(a.ndim, axis, slice(1, None))]
    return 0.5 * (lo + hi)


def _average_adjacent_adjoint(a: np.ndarray, axis: int) -> np.ndarray:
    shape = list(a.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    out[_axis_slice(a.ndim, axis, slice(None, -1))] += 0.5 * a
    out[_axis_slice(a.ndim, axis, slice(1, None))] += 0.5 * a
    return out


def _difference_adjoint(a: np.ndarray, axis: int, h: float) -> np.ndarray:
    shape = list(a.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    out[_axis_slice(a.ndim, axis, slice(1, None))] += a / h
    out[_axis_slice(a.ndim, axis, slice(None, -1))] -= a / h
    return out


def gradient(u: ScalarField) -> CellGradientField:
    """Gradient of the multilinear interpolant at every cell center.

    Along axis i this is the edge difference quotient averaged over the
    2^(N-1) edges of the cell parallel to that axis.
    """
    grid = u.grid
    padded = np.pad(u.values, 1)
    components = []
    for i, h in enumerate(grid.spacing):
        d = np.diff(padded, axis=i) / h
        for j in range(grid.N):
            if j != i:
                d = _average_adjacent(d, j)
        components.append(d)
    return CellGradientField(grid, np.stack(components, axis=-1))


def gradient_transpose(grid: Grid, flux: np.ndarray) -> np.ndarray:
    """Adjoint of `gradient`: maps per-cell vectors to interior nodal values."""
    interior = tuple(slice(1, -1) for _ in range(grid.N))
    out = np.zeros(tuple(d + 2 for d in grid.dims))
    for i, h in enumerate(grid.spacing):
        d = flux[..., i]
        for j in reversed(range(grid.N)):
            if j != i:
                d = _average_adjacent_adjoint(d, j)
        out += _difference_adjoint(d, i, h)
    return out[interior]


# ---------------------------------------------------------------------------
# Modulars and norms
# ---------------------------------------------------------------------------


def _magnitudes(g: AnyField) -> np.ndarray:
    if isinstance(g, CellGradientField):
        return g.magnitudes
    return np.abs(g.values)


def modular(g: AnyField, params: NFunctionParams) -> float:
    """Σ (Π h_i) Φ(|g|): per cell for gradient fields, per interior node for scalar fields."""
    return g.grid.cell_volume * float(np.sum(capital_phi_array(params, _magnitudes(g))))


def luxemburg_norm(g: AnyField, params: NFunctionParams) -> float:
    """inf{k > 0 : modular(g/k) <= 1}, attained at the root of modular(g/k) = 1."""
    magnitudes = _magnitudes(g)
    peak = float(np.max(magnitudes))
    if peak == 0.0:
        return 0.0
    volume = g.grid.cell_volume

    def excess(k: float) -> float:
        return volume * float(np.sum(capital_phi_array(params, magnitudes / k))) - 1.0

    lo = hi = peak
    for _ in range(SolverConfig.ROOT_MAX_ITERATIONS):
        if excess(hi) <= 0.0:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NonConvergence(f"No upper bracket for the Luxemburg norm (peak {peak})")
    for _ in range(SolverConfig.ROOT_MAX_ITERATIONS):
        if excess(lo) > 0.0:
            break
        hi, lo = lo, lo * 0.5
    else:
        raise NonConvergence(f"No lower bracket for the Luxemburg norm (peak {peak})")

    if excess(hi) == 0.0:
        return hi
    return float(
        brentq(
            excess,
            lo,
            hi,
            xtol=np.finfo(float).tiny,
            rtol=SolverConfig.NORM_RELATIVE_TOLERANCE,
            maxiter=SolverConfig.ROOT_MAX_ITERATIONS,
        )
    )


def gradient_norm(u: ScalarField, params: NFunctionParams) -> float:
    """‖u‖ := ‖|∇u|‖_Φ, the norm used on W₀¹LΦ."""
    return luxemburg_norm(gradient(u), params)


def sobolev_norm(u: ScalarField, params: NFunctionParams) -> float:
    """‖u‖_{1,Φ} = ‖u‖_Φ + ‖|∇u|‖_Φ."""
    return luxemburg_norm(u, params) + gradient_norm(u, params)


def lebesgue_integral(u: ScalarField, exponent: float) -> float:
    """Nodal quadrature of ∫|u|^exponent."""
    return u.grid.cell_volume * float(np.sum(np.abs(u.values) ** exponent))


def embedding_ratio(u: ScalarField, params: NFunctionParams, r: float) -> float:
    """(∫|u|^r)^(1/r) / ‖u‖."""
    return lebesgue_integral(u, r) ** (1.0 / r) / gradient_norm(u, params)


def random_field(
    grid: Grid,
    rng: np.random.Generator,
    params: Optional[NFunctionParams] = None,
    target_norm: Optional[float] = None,
) -> ScalarField:
    """i.i.d. uniform(-1, 1) nodal values, optionally rescaled to ‖u‖ = target_norm."""
    u = ScalarField(grid, rng.uniform(-1.0, 1.0, size=grid.dims))
    if target_norm is None:
        return u
    if params is None:
        raise ValueError("rescaling to a target norm needs NFunctionParams")
    return u * (target_norm / gradient_norm(u, params))


# ---------------------------------------------------------------------------
# Solution files
# ---------------------------------------------------------------------------


def write_solution_file(
    path: Union[str, Path],
    exponents: Dict[str, float],
    problem: str,
    u: ScalarField,
    diagnostics: Dict[str, float],
    extra: Optional[Dict[str, Any]] = None,
) -> None:
    document = {
        "version": SOLUTION_FILE_VERSION,
        "exponents": exponents,
        "grid": u.grid.to_dict(),
        "problem": problem,
        "values": u.flat.tolist(),
        "diagnostics": diagnostics,
    }
    document.update(extra or {})

    # serialized first so a non-finite value leaves no partial file
    text = json.dumps(document, indent=2, allow_nan=False)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logging.info(f"💾 Solution saved to: {path}")


def read_solution_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Load a solution file; `field` holds the reconstructed ScalarField."""
    with open(path, "r", encoding="utf-8") as f:
        document = json.load(f)
    if document.get("version") != SOLUTION_FILE_VERSION:
        raise ValueError(f"Unsupported solution file version: {document.get('version')}")
    grid = Grid(tuple(document["grid"]["dims"]), tuple(document["grid"]["lengths"]))
    document["field"] = ScalarField(grid, np.asarray(document["values"], dtype=float))
    return document
