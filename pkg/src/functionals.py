#!/usr/bin/env python3
"""
Energy Functionals - J_λ and I_λ on discrete fields and their exact gradients

    J_λ(u) = ∫Φ(|∇u|) + (λ/p)∫|u|^p - (1/r)∫|u|^r
    I_λ(u) = ∫Φ(|∇u|) - (λ/p)∫|u|^p + (1/r)∫|u|^r

The gradient term uses the cell-center quadrature of `field.modular`; the
power terms use nodal quadrature. Residual component i is the exact partial
derivative of the discrete energy with respect to nodal value i.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np

from admissibility import ExponentSet
from field import Grid, ScalarField, gradient, gradient_transpose, lebesgue_integral, modular
from nfunction import phi_over_t


@dataclass(frozen=True)
class EnergyBreakdown:
    phi_term: float
    p_term: float
    r_term: float
    total: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "phiTerm": self.phi_term,
            "pTerm": self.p_term,
            "rTerm": self.r_term,
            "total": self.total,
        }


@dataclass(frozen=True)
class ResidualField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(self.grid.dims)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __mul__(self, factor: float) -> "ResidualField":
        return ResidualField(self.grid, self.values * factor)

    __rmul__ = __mul__

    def __neg__(self) -> "ResidualField":
        return ResidualField(self.grid, -self.values)

    def pair(self, v: ScalarField) -> float:
        """⟨E'(u), v⟩ = Σ_i r_i v_i."""
        return float(np.sum(self.values * v.values))


def _signed_power(values: np.ndarray, exponent: float) -> np.ndarray:
    """|x|^(exponent-1) x, which is 0 at x = 0 for exponent > 1."""
    return np.sign(values) * np.abs(values) ** (exponent - 1.0)


def _terms(e: ExponentSet, u: ScalarField) -> Tuple[float, float, float]:
    phi_term = modular(gradient(u), e.params)
    p_term = e.lam / e.p * lebesgue_integral(u, e.p)
    r_term = lebesgue_integral(u, e.r) / e.r
    return phi_term, p_term, r_term


def j_energy(e: ExponentSet, u: ScalarField) -> EnergyBreakdown:
    phi_term, p_term, r_term = _terms(e, u)
    return EnergyBreakdown(phi_term, p_term, r_term, phi_term + p_term - r_term)


def i_energy(e: ExponentSet, u: ScalarField) -> EnergyBreakdown:
    phi_term, p_term, r_term = _terms(e, u)
    return EnergyBreakdown(phi_term, p_term, r_term, phi_term - p_term + r_term)


def _principal_part(e: ExponentSet, u: ScalarField) -> np.ndarray:
    """Gᵀ(vol · φ(|∇u|)/|∇u| · ∇u), the derivative of the Φ term."""
    g = gradient(u)
    weight = phi_over_t(e.params, g.magnitudes)
    flux = u.grid.cell_volume * weight[..., np.newaxis] * g.vectors
    return gradient_transpose(u.grid, flux)


def j_residual(e: ExponentSet, u: ScalarField) -> ResidualField:
    lower = e.lam * _signed_power(u.values, e.p) - _signed_power(u.values, e.r)
    return ResidualField(u.grid, _principal_part(e, u) + u.grid.cell_volume * lower)


def i_residual(e: ExponentSet, u: ScalarField) -> ResidualField:
    lower = -e.lam * _signed_power(u.values, e.p) + _signed_power(u.values, e.r)
    return ResidualField(u.grid, _principal_part(e, u) + u.grid.cell_volume * lower)


def residual_norm(r: ResidualField) -> float:
    """‖r‖₂ · (Π h_i)^(1/2); a stopping criterion, not a dual norm."""
    return float(np.linalg.norm(r.values.ravel()) * np.sqrt(r.grid.cell_volume))


EnergyFn = Callable[[ExponentSet, ScalarField], EnergyBreakdown]
ResidualFn = Callable[[ExponentSet, ScalarField], ResidualField]

# problem name -> (energy, residual)
FUNCTIONALS: Dict[str, Tuple[EnergyFn, ResidualFn]] = {
    "min": (i_energy, i_residual),
    "mp": (j_energy, j_residual),
}


def power_gap_maximum(b: float, d: float, k: float, l: float) -> float:
    """max over t >= 0 of b t^k - d t^l for b, d > 0 and l > k > 0."""
    t_star = (b * k / (d * l)) ** (1.0 / (l - k))
    return b * t_star**k - d * t_star**l


def power_gap_bound(b: float, d: float, k: float, l: float) -> float:
    """b (b/d)^(k/(l-k)), an upper bound for b t^k - d t^l on t >= 0.

    With b = λ/p, d = 1/r, k = p, l = r this is (λ/p)(λr/p)^(p/(r-p)).
    """
    if not (b > 0 and d > 0 and l > k > 0):
        raise ValueError(f"power_gap_bound needs b, d > 0 and l > k > 0 (got {b}, {d}, {k}, {l})")
    return b * (b / d) ** (k / (l - k))
