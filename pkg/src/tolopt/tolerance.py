"""Tolerance field sigma(s): B-spline representation, budget, comparison."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .splines import KnotVector, basis_matrix, eval_spline
from .geometry import BladeSurface


@dataclass(frozen=True, eq=False)
class ToleranceField:
    """B-spline tolerance field with coefficient box [0, sigma_max].

    The coefficient box is a sufficient condition for 0 <= sigma(s) <=
    sigma_max pointwise (basis nonnegativity and partition of unity), which
    keeps the optimizer's constraint set a simple box.
    """

    coeffs: np.ndarray
    kv: KnotVector
    sigma_max: float

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        object.__setattr__(self, "coeffs", coeffs)
        if coeffs.shape != (self.kv.n_basis,):
            raise ValueError(f"expected {self.kv.n_basis} coefficients, got {coeffs.shape}")
        if self.sigma_max <= 0.0:
            raise ValueError("sigma_max must be positive")
        tol = 1e-12 * self.sigma_max
        if np.any(coeffs < -tol) or np.any(coeffs > self.sigma_max + tol):
            raise ValueError("coefficients violate the box [0, sigma_max]")

    def values(self, s) -> np.ndarray:
        return eval_spline(self.coeffs, self.kv, s)

    @classmethod
    def uniform(cls, value: float, kv: KnotVector, sigma_max: float) -> "ToleranceField":
        return cls(np.full(kv.n_basis, float(value)), kv, sigma_max)


def variability_coefficients(kv: KnotVector, surface: BladeSurface) -> np.ndarray:
    """Vector a with V(sigma) = a . coeffs: a_i = sum_j w_j B_i(s_j)."""
    return surface.quad_weights @ basis_matrix(kv, surface.s)


def total_variability(tol: ToleranceField, surface: BladeSurface) -> float:
    """Variability budget V = integral of sigma over the surface (chord units)."""
    return float(variability_coefficients(tol.kv, surface) @ tol.coeffs)


def scheme_error(tol_a: ToleranceField, tol_b: ToleranceField,
                 surface: BladeSurface) -> float:
    """Normalized integrated difference between two tolerance schemes.

    e = int |sigma_b - sigma_a| ds / int [(sigma_max - sigma_a) + (sigma_max - sigma_b)] ds,
    in [0, 1] when both fields respect the shared bound; undefined (raises)
    when both fields are identically sigma_max.
    """
    if tol_a.sigma_max != tol_b.sigma_max:
        raise ValueError("tolerance schemes must share sigma_max")
    sa = tol_a.values(surface.s)
    sb = tol_b.values(surface.s)
    w = surface.quad_weights
    num = float(w @ np.abs(sa - sb))
    den = float(w @ ((tol_a.sigma_max - sa) + (tol_b.sigma_max - sb)))
    if den <= 1e-300:
        raise ValueError("scheme comparison undefined: both fields equal sigma_max")
    return num / den
