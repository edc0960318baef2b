"""Clamped cubic B-spline basis with optional leading-edge knot refinement.

The tolerance field sigma(s) is a linear combination of cubic B-splines on
the normalized surface coordinate s (s = 0 at the leading edge). Knot
spacing can be densified inside a window around the leading edge so the
basis resolves short-wavelength tolerance variations where they matter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEGREE = 3


@dataclass(frozen=True, eq=False)
class KnotVector:
    """Clamped cubic knot vector on [s_min, s_max]."""

    knots: np.ndarray
    degree: int = DEGREE
    n_basis: int = field(default=0)

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "n_basis", len(knots) - self.degree - 1)
        if self.degree != DEGREE:
            raise ValueError("only cubic (degree 3) splines are supported")
        if self.n_basis < self.degree + 1:
            raise ValueError("knot vector too short for a cubic basis")
        if np.any(np.diff(knots) < 0):
            raise ValueError("knots must be nondecreasing")
        p = self.degree
        if not (np.allclose(knots[: p + 1], knots[0]) and np.allclose(knots[-p - 1 :], knots[-1])):
            raise ValueError("knot vector must be clamped (ends repeated degree+1 times)")
        if knots[0] >= knots[-1]:
            raise ValueError("degenerate knot domain")

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])


def make_knots(domain, n_basis: int, refinement=None) -> KnotVector:
    """Build a clamped cubic knot vector, optionally refined near a point.

    ``refinement`` is ``None`` (uniform) or a ``(center, radius, density_ratio)``
    tuple / mapping: interior-knot density inside ``|s - center| < radius`` is
    ``density_ratio`` times the density outside. Interior knots are placed by
    inverting the cumulative density, which is piecewise linear.
    """
    s_min, s_max = float(domain[0]), float(domain[1])
    if s_min >= s_max:
        raise ValueError(f"degenerate domain [{s_min}, {s_max}]")
    n_interior = n_basis - DEGREE - 1
    if n_interior < 0:
        raise ValueError(f"n_basis={n_basis} too small; need at least {DEGREE + 1}")

    if refinement is not None:
        if isinstance(refinement, dict):
            center = float(refinement["center"])
            radius = float(refinement["radius"])
            ratio = float(refinement.get("density_ratio", refinement.get("ratio", 1.0)))
        else:
            center, radius, ratio = (float(v) for v in refinement)
        if radius <= 0:
            raise ValueError("refinement radius must be positive")
        if ratio < 1:
            raise ValueError("density_ratio must be >= 1")
        if not (s_min < center < s_max):
            raise ValueError("refinement center must lie inside the domain")
    else:
        center, radius, ratio = 0.5 * (s_min + s_max), 1.0, 1.0

    if n_interior == 0:
        interior = np.empty(0)
    elif ratio == 1.0:
        interior = np.linspace(s_min, s_max, n_interior + 2)[1:-1]
    else:
        # Breakpoints of the piecewise-constant density, clipped to the domain.
        lo = max(s_min, center - radius)
        hi = min(s_max, center + radius)
        brk = np.unique([s_min, lo, hi, s_max])
        dens = np.where((brk[:-1] >= lo) & (brk[1:] <= hi), ratio, 1.0)
        cum = np.concatenate([[0.0], np.cumsum(dens * np.diff(brk))])
        targets = np.linspace(0.0, cum[-1], n_interior + 2)[1:-1]
        interior = np.interp(targets, cum, brk)

    knots = np.concatenate([np.full(DEGREE + 1, s_min), interior, np.full(DEGREE + 1, s_max)])
    return KnotVector(knots)


def _find_span(kv: KnotVector, s: float) -> int:
    """Index i of the knot span [knots[i], knots[i+1]) containing s."""
    knots, p = kv.knots, kv.degree
    n = kv.n_basis
    if s >= knots[n]:  # right end: use the last non-degenerate span
        return n - 1
    if s <= knots[p]:
        return p
    return int(np.searchsorted(knots, s, side="right") - 1)


def _nonzero_basis(kv: KnotVector, s: float):
    """Cox-de Boor triangle: the degree+1 basis values active at s."""
    knots, p = kv.knots, kv.degree
    i = _find_span(kv, s)
    vals = np.zeros(p + 1)
    vals[0] = 1.0
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    for j in range(1, p + 1):
        left[j] = s - knots[i + 1 - j]
        right[j] = knots[i + j] - s
        saved = 0.0
        for r in range(j):
            denom = right[r + 1] + left[j - r]
            term = vals[r] / denom if denom != 0.0 else 0.0
            vals[r] = saved + right[r + 1] * term
            saved = left[j - r] * term
        vals[j] = saved
    return i, vals


def _check_in_domain(kv: KnotVector, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    lo, hi = kv.domain
    tol = 1e-12 * max(1.0, abs(lo), abs(hi))
    if np.any(s < lo - tol) or np.any(s > hi + tol):
        raise ValueError(f"evaluation point outside spline domain [{lo}, {hi}]")
    return np.clip(s, lo, hi)


def basis_value(kv: KnotVector, i: int, s: float) -> float:
    """Value of basis function B_i at s (0 outside its local support)."""
    if not 0 <= i < kv.n_basis:
        raise IndexError(f"basis index {i} out of range [0, {kv.n_basis})")
    s = float(_check_in_domain(kv, s))
    span, vals = _nonzero_basis(kv, s)
    offset = i - (span - kv.degree)
    if 0 <= offset <= kv.degree:
        return float(vals[offset])
    return 0.0


def basis_matrix(kv: KnotVector, s) -> np.ndarray:
    """All basis values at the points s, as an (len(s), n_basis) matrix."""
    s = np.atleast_1d(_check_in_domain(kv, s))
    out = np.zeros((len(s), kv.n_basis))
    for row, sj in enumerate(s):
        span, vals = _nonzero_basis(kv, float(sj))
        out[row, span - kv.degree : span + 1] = vals
    return out


def eval_spline(coeffs, kv: KnotVector, s):
    """Evaluate sum_i coeffs[i] * B_i(s); s may be scalar or array."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (kv.n_basis,):
        raise ValueError(f"expected {kv.n_basis} coefficients, got {coeffs.shape}")
    scalar = np.isscalar(s) or np.ndim(s) == 0
    values = basis_matrix(kv, s) @ coeffs
    return float(values[0]) if scalar else values
