"""Non-stationary Gaussian error-field model and its Karhunen-Loeve basis.

The manufacturing error e(s) is zero-mean Gaussian with a squared
exponential correlation whose length scale shrinks near the leading edge.
The K-L decomposition is performed on the unit-variance correlation
operator (not the covariance), so the basis does not depend on the
tolerance field sigma: realizations factor exactly as e = sigma * e~,
which is what makes the pathwise sigma-sensitivities cheap.

Distances are measured along the surface in physical (chord-normalized)
arc units, without wrapping across the trailing-edge seam, so the two
sides decorrelate around the seam.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .splines import KnotVector, basis_matrix
from .geometry import BladeSurface


@dataclass(frozen=True)
class CorrelationSpec:
    """Squared-exponential correlation with a leading-edge length reduction."""

    L0: float          # correlation length far from the LE, chord units
    L_LE: float        # correlation length at the LE
    w: float           # width of the LE region, nominally the LE radius

    def __post_init__(self):
        if not (0.0 < self.L_LE <= self.L0):
            raise ValueError(f"need 0 < L_LE <= L0, got L_LE={self.L_LE}, L0={self.L0}")
        if self.w <= 0.0:
            raise ValueError("width parameter w must be positive")


def correlation_length(spec: CorrelationSpec, s):
    """Local correlation length L~(s) = L0 + (L_LE - L0) exp(-s^2/w^2)."""
    s = np.asarray(s, dtype=float)
    out = spec.L0 + (spec.L_LE - spec.L0) * np.exp(-(s**2) / spec.w**2)
    return float(out) if out.ndim == 0 else out


def correlation(spec: CorrelationSpec, s, s2):
    """rho(s, s') = exp(-|s - s'|^2 / (2 L~(s) L~(s')))."""
    s = np.asarray(s, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    l2 = correlation_length(spec, s) * correlation_length(spec, s2)
    out = np.exp(-((s - s2) ** 2) / (2.0 * l2))
    return float(out) if np.ndim(out) == 0 else out


def correlation_matrix(spec: CorrelationSpec, coords: np.ndarray) -> np.ndarray:
    return correlation(spec, coords[:, None], coords[None, :])


@dataclass(frozen=True, eq=False)
class KLBasis:
    """Truncated spectral basis of the unit-variance correlation operator."""

    eigenvalues: np.ndarray    # (m,), nonincreasing, >= 0
    eigenfunctions: np.ndarray  # (m, M) on the surface grid
    grid: BladeSurface
    energy_fraction: float
    total_trace: float
    modes: np.ndarray = field(init=False)  # (m, M): sqrt(lambda_i) phi_i

    def __post_init__(self):
        object.__setattr__(
            self, "modes", np.sqrt(self.eigenvalues)[:, None] * self.eigenfunctions
        )

    @property
    def n_modes(self) -> int:
        return len(self.eigenvalues)


def kl_decompose(surface: BladeSurface, spec: CorrelationSpec,
                 energy_fraction: float = 0.99) -> KLBasis:
    """Weighted Galerkin eigendecomposition of the correlation operator.

    Solves the symmetric problem W^(1/2) rho W^(1/2) v = lambda v with the
    surface quadrature weights W, rescales eigenvectors by W^(-1/2) so the
    eigenfunctions are orthonormal under the weighted inner product, and
    truncates at the smallest mode count whose eigenvalue sum reaches
    ``energy_fraction`` of the total trace. Tiny negative eigenvalues are
    numerical noise and are clamped to zero.
    """
    if surface.n_points < 2:
        raise ValueError("need at least 2 grid points")
    if not 0.0 < energy_fraction <= 1.0:
        raise ValueError("energy_fraction must be in (0, 1]")

    rho = correlation_matrix(spec, surface.arc)
    if not np.all(np.isfinite(rho)):
        raise ValueError("correlation matrix contains non-finite entries")
    sqw = np.sqrt(surface.quad_weights)
    sym = rho * sqw[:, None] * sqw[None, :]
    sym = 0.5 * (sym + sym.T)
    try:
        lam, vec = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"eigendecomposition failed: {exc}") from exc

    order = np.argsort(lam)[::-1]
    lam = lam[order]
    vec = vec[:, order]
    if lam[0] <= 0.0:
        raise ValueError("correlation operator has no positive eigenvalues")
    if lam[-1] < -1e-10 * lam[0]:
        raise ValueError("correlation operator is significantly indefinite")
    keep = lam > 0.0
    lam = lam[keep]
    vec = vec[:, keep]

    total = float(np.sum(lam))
    cum = np.cumsum(lam)
    m = int(np.searchsorted(cum, energy_fraction * total - 1e-14 * total) + 1)
    m = min(m, len(lam))

    phi = (vec[:, :m] / sqw[:, None]).T
    return KLBasis(eigenvalues=lam[:m], eigenfunctions=phi, grid=surface,
                   energy_fraction=energy_fraction, total_trace=total)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Fixed matrix of standard-normal K-L coefficients, shared by all SAA calls."""

    xi: np.ndarray  # (N, n_modes)
    seed: int

    @property
    def n_samples(self) -> int:
        return self.xi.shape[0]

    @property
    def n_modes(self) -> int:
        return self.xi.shape[1]


def draw_samples(n_samples: int, n_modes: int, seed: int) -> SampleSet:
    if n_samples < 1:
        raise ValueError("need at least one sample")
    xi = np.random.default_rng(seed).standard_normal((n_samples, n_modes))
    return SampleSet(xi=xi, seed=seed)


def _cache_name(seed: int, n_samples: int, n_modes: int) -> str:
    return f"samples_seed{seed}_N{n_samples}_m{n_modes}.npz"


def load_or_draw_samples(n_samples: int, n_modes: int, seed: int,
                         cache_dir=None) -> SampleSet:
    """Draw a sample set, reusing a cache file keyed by (seed, N, modes)."""
    if cache_dir is None:
        return draw_samples(n_samples, n_modes, seed)
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, _cache_name(seed, n_samples, n_modes))
    if os.path.exists(path):
        with np.load(path) as data:
            return SampleSet(xi=data["xi"], seed=seed)
    ss = draw_samples(n_samples, n_modes, seed)
    np.savez(path, xi=ss.xi)
    return ss


def sample_unit_field(kl: KLBasis, xi_row) -> np.ndarray:
    """One realization of the unit-variance field: sum_i sqrt(lambda_i) phi_i xi_i."""
    xi_row = np.asarray(xi_row, dtype=float)
    if xi_row.shape != (kl.n_modes,):
        raise ValueError(f"expected {kl.n_modes} coefficients, got {xi_row.shape}")
    return xi_row @ kl.modes


def scale_field(e_tilde: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Scale a unit-variance realization by the tolerance field: e = sigma * e~."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0.0):
        raise ValueError("sigma must be nonnegative on the grid")
    return np.asarray(e_tilde, dtype=float) * sigma


def pathwise_sigma_sensitivity(e_tilde, kv: KnotVector, i: int, s) -> np.ndarray:
    """Sample-path derivative of e = sigma * e~ w.r.t. coefficient sigma_i: e~ B_i(s)."""
    if not 0 <= i < kv.n_basis:
        raise IndexError(f"basis index {i} out of range [0, {kv.n_basis})")
    return np.asarray(e_tilde, dtype=float) * basis_matrix(kv, s)[:, i]
