"""Cascade performance models: loss and turning for a realized blade.

The real flow solver is replaced by an analytic surrogate that reproduces
the loss mechanisms that drive tolerance design: an incidence loss bucket,
a leading-edge separation switch triggered when the realized LE curvature
crosses a critical value (amplified when extra material on one side meets
same-signed effective incidence), and a roughness penalty concentrated at
the leading edge. The exact surrogate formula, with all constants read
from :class:`SurrogateCascadeConfig`, is::

    a_e   = alpha - alpha_opt . [cheb, stagger]
    kappa = Gaussian-weighted mean discrete curvature near the LE (realized)
    asym  = suction-window mean chord-normal offset + pressure-window mean
    S     = 1 / (1 + exp(-(kappa - kappa_crit) / tau))
    side  = 1 + softplus(asym_gain * asym * a_e; asym_smooth)
    pen   = rough_scale * sum_j w_j exp(-s_j^2 / (2 le_weight_width^2)) e_j^2
    loss  = omega0 + c_alpha * a_e^2 + omega_sep * S * side + pen
    turning = turn0 + turning_coeffs . [cheb, stagger]          (e-independent)

The softplus (scale ``asym_smooth``) smooths the side-asymmetry rectifier
so the loss is C^1 in the error field; window averages use smooth Gaussian
weights in s for the same reason. Shape sensitivities are second-order
central finite differences of the model outputs.
"""

from __future__ import annotations

import weakref
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import BladeSurface, DesignVector, apply_design, chord_frame


class PerfResult(NamedTuple):
    loss: float
    turning: float


class PerformanceModel(ABC):
    """Deterministic map (nominal surface, error field, design, incidence) -> loss/turning."""

    @abstractmethod
    def evaluate(self, nominal: BladeSurface, e, d: DesignVector, alpha: float) -> PerfResult:
        ...

    def loss_batch(self, nominal: BladeSurface, E, d: DesignVector, alpha: float) -> np.ndarray:
        """Loss for each row of E (a batch of error fields). Default: loop."""
        E = np.atleast_2d(np.asarray(E, dtype=float))
        return np.array([self.evaluate(nominal, row, d, alpha).loss for row in E])

    def turning_batch(self, nominal: BladeSurface, E, d: DesignVector) -> np.ndarray:
        E = np.atleast_2d(np.asarray(E, dtype=float))
        return np.array([self.evaluate(nominal, row, d, 0.0).turning for row in E])


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=float)))


def _softplus(x, scale: float):
    return scale * np.logaddexp(0.0, np.asarray(x, dtype=float) / scale)


@dataclass(frozen=True)
class SurrogateCascadeConfig:
    """Constants of the surrogate loss model; see the module docstring.

    Angles are radians; curvatures are 1/chord; the design coefficient
    vectors are ordered [chebyshev modes..., stagger]. The defaults are
    calibrated for the bundled vane fixture and are configuration, not
    physics.
    """

    omega0: float = 2.2e-2
    c_alpha: float = 1.8
    alpha_opt_coeffs: tuple = (0.3, -0.2, 0.1, -0.05, 0.02, 1.0)
    kappa_crit: float = 75.0
    omega_sep: float = 0.11
    tau: float = 4.0
    turning_coeffs: tuple = (2.0, 0.8, 0.3, 0.1, 0.05, -1.2)
    turn0: float = 0.35
    le_weight_width: float = 0.08
    rough_scale: float = 1.5e4
    asym_gain: float = 4.0e4
    asym_smooth: float = 0.05
    kappa_window: float = 0.04
    asym_window: float = 0.15
    metric_cutoff: float = 4.0   # window support radius, in units of the Gaussian width

    def __post_init__(self):
        if self.tau <= 0.0 or self.asym_smooth <= 0.0:
            raise ValueError("switch smoothness parameters must be positive")
        if self.omega_sep < 0.0 or self.rough_scale < 0.0:
            raise ValueError("loss increments must be nonnegative")
        for name in ("alpha_opt_coeffs", "turning_coeffs"):
            vals = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, tuple(vals))


class _SurfaceContext:
    """Static per-nominal-surface arrays used by the surrogate."""

    def __init__(self, surface: BladeSurface, cfg: SurrogateCascadeConfig):
        self.points = surface.points
        self.normals = surface.normals
        self.le_index = surface.le_index
        s, w = surface.s, surface.quad_weights
        m = surface.n_points

        self.rough_w = cfg.rough_scale * w * np.exp(-(s**2) / (2.0 * cfg.le_weight_width**2))

        cut = cfg.metric_cutoff
        kap_idx = np.flatnonzero(np.abs(s) < cut * cfg.kappa_window)
        if len(kap_idx) < 3:
            raise ValueError("curvature window contains fewer than 3 points")
        kw = w[kap_idx] * np.exp(-(s[kap_idx] ** 2) / (2.0 * cfg.kappa_window**2))
        self.kap_prev = (kap_idx - 1) % m
        self.kap_mid = kap_idx
        self.kap_next = (kap_idx + 1) % m
        self.kap_w = kw / np.sum(kw)

        gauss = np.exp(-(s**2) / (2.0 * cfg.asym_window**2))
        ws = np.where((s > 0) & (np.abs(s) < cut * cfg.asym_window), w * gauss, 0.0)
        wp = np.where((s < 0) & (np.abs(s) < cut * cfg.asym_window), w * gauss, 0.0)
        if ws.sum() <= 0.0 or wp.sum() <= 0.0:
            raise ValueError("asymmetry window must cover both sides of the LE")
        self.suction_w = ws / ws.sum()
        self.pressure_w = wp / wp.sum()

        # orientation of the chord-normal so suction-side offsets are positive
        _, c_hat, p_hat = chord_frame(surface)
        raw = np.array([-c_hat[1], c_hat[0]])
        self.nu_sign = 1.0 if float(p_hat @ raw) > 0 else -1.0


class SurrogateCascade(PerformanceModel):
    """Analytic surrogate cascade model; see the module docstring for the formula."""

    name = "surrogate"

    def __init__(self, config: SurrogateCascadeConfig | None = None):
        self.config = config or SurrogateCascadeConfig()
        self._ctx_cache = weakref.WeakKeyDictionary()

    def _ctx(self, surface: BladeSurface) -> "_SurfaceContext":
        ctx = self._ctx_cache.get(surface)
        if ctx is None:
            ctx = _SurfaceContext(surface, self.config)
            self._ctx_cache[surface] = ctx
        return ctx

    def alpha_opt(self, d: DesignVector) -> float:
        coeffs = np.asarray(self.config.alpha_opt_coeffs)
        x = d.as_array()
        if len(coeffs) != len(x):
            raise ValueError("alpha_opt_coeffs length does not match the design vector")
        return float(coeffs @ x)

    def turning(self, d: DesignVector) -> float:
        coeffs = np.asarray(self.config.turning_coeffs)
        x = d.as_array()
        if len(coeffs) != len(x):
            raise ValueError("turning_coeffs length does not match the design vector")
        return self.config.turn0 + float(coeffs @ x)

    def _metrics(self, ctx: "_SurfaceContext", E: np.ndarray):
        """Batched (kappa_le, asym) of the realized surfaces nominal + E * normals."""
        P = ctx.points[None, :, :] + E[:, :, None] * ctx.normals[None, :, :]

        a = P[:, ctx.kap_prev]
        b = P[:, ctx.kap_mid]
        c = P[:, ctx.kap_next]
        ab = b - a
        bc = c - b
        ca = a - c
        cross = ab[..., 0] * bc[..., 1] - ab[..., 1] * bc[..., 0]
        lens = (np.hypot(ab[..., 0], ab[..., 1]) * np.hypot(bc[..., 0], bc[..., 1])
                * np.hypot(ca[..., 0], ca[..., 1]))
        kappa = (2.0 * np.abs(cross) / lens) @ ctx.kap_w

        le = P[:, ctx.le_index]
        chord = P[:, 0] - le
        chord /= np.hypot(chord[:, 0], chord[:, 1])[:, None]
        rel = P - le[:, None, :]
        nu = ctx.nu_sign * (chord[:, 0, None] * rel[..., 1] - chord[:, 1, None] * rel[..., 0])
        asym = nu @ ctx.suction_w + nu @ ctx.pressure_w
        return kappa, asym

    def loss_batch(self, nominal, E, d, alpha):
        cfg = self.config
        ctx = self._ctx(nominal)
        E = np.atleast_2d(np.asarray(E, dtype=float))
        if E.shape[1] != nominal.n_points:
            raise ValueError("error-field length does not match the surface grid")
        kappa, asym = self._metrics(ctx, E)
        if not (np.all(np.isfinite(kappa)) and np.all(np.isfinite(asym))):
            raise ValueError("non-finite geometry metrics")
        a_e = alpha - self.alpha_opt(d)
        switch = _sigmoid((kappa - cfg.kappa_crit) / cfg.tau)
        side = 1.0 + _softplus(cfg.asym_gain * asym * a_e, cfg.asym_smooth)
        pen = (E * E) @ ctx.rough_w
        return cfg.omega0 + cfg.c_alpha * a_e**2 + cfg.omega_sep * switch * side + pen

    def turning_batch(self, nominal, E, d):
        E = np.atleast_2d(np.asarray(E, dtype=float))
        return np.full(E.shape[0], self.turning(d))

    def evaluate(self, nominal, e, d, alpha):
        loss = self.loss_batch(nominal, np.asarray(e, dtype=float)[None, :], d, alpha)[0]
        return PerfResult(loss=float(loss), turning=self.turning(d))


@dataclass
class QuadraticModel(PerformanceModel):
    """Analytic oracle model: loss = omega0 + c_alpha (alpha - a_opt.d)^2 + sum_j a_j e_j^2.

    Exists for closed-form expectation and KKT oracle tests; node weights
    may be negative (they are test artifacts, not physics).
    """

    node_weights: np.ndarray | float = 1.0
    omega0: float = 0.0
    c_alpha: float = 0.0
    alpha_opt_coeffs: tuple = ()
    turn0: float = 0.0
    turning_coeffs: tuple = ()

    def _weights(self, n: int) -> np.ndarray:
        a = np.asarray(self.node_weights, dtype=float)
        return np.full(n, float(a)) if a.ndim == 0 else a

    def alpha_opt(self, d: DesignVector) -> float:
        if not len(self.alpha_opt_coeffs):
            return 0.0
        return float(np.asarray(self.alpha_opt_coeffs) @ d.as_array())

    def turning(self, d: DesignVector) -> float:
        if not len(self.turning_coeffs):
            return self.turn0
        return self.turn0 + float(np.asarray(self.turning_coeffs) @ d.as_array())

    def loss_batch(self, nominal, E, d, alpha):
        E = np.atleast_2d(np.asarray(E, dtype=float))
        a = self._weights(nominal.n_points)
        a_e = alpha - self.alpha_opt(d)
        return self.omega0 + self.c_alpha * a_e**2 + (E * E) @ a

    def turning_batch(self, nominal, E, d):
        E = np.atleast_2d(np.asarray(E, dtype=float))
        return np.full(E.shape[0], self.turning(d))

    def evaluate(self, nominal, e, d, alpha):
        loss = self.loss_batch(nominal, np.asarray(e, dtype=float)[None, :], d, alpha)[0]
        return PerfResult(loss=float(loss), turning=self.turning(d))


MODEL_REGISTRY = {"surrogate": SurrogateCascade, "quadratic": QuadraticModel}


def loss_field_sensitivity(model: PerformanceModel, nominal: BladeSurface, e,
                           d: DesignVector, alpha: float, delta: float = 1e-6) -> np.ndarray:
    """Central-difference sensitivity of the loss to each nodal error value.

    Returns dloss/de_j per surface node, from second-order differences
    loss(e + delta 1_j) - loss(e - delta 1_j) over 2 delta.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    e = np.asarray(e, dtype=float)
    m = nominal.n_points
    eye = np.eye(m) * delta
    plus = model.loss_batch(nominal, e[None, :] + eye, d, alpha)
    minus = model.loss_batch(nominal, e[None, :] - eye, d, alpha)
    if not (np.all(np.isfinite(plus)) and np.all(np.isfinite(minus))):
        raise ValueError("model returned non-finite loss at a perturbed state")
    return (plus - minus) / (2.0 * delta)


def loss_design_sensitivity(model: PerformanceModel, base: BladeSurface,
                            d: DesignVector, e, alpha: float,
                            delta: float = 1e-6) -> np.ndarray:
    """Central-difference sensitivity of the loss to each design variable."""
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    x = d.as_array()
    grad = np.zeros(len(x))
    for k in range(len(x)):
        for sign in (+1.0, -1.0):
            xk = x.copy()
            xk[k] += sign * delta
            dk = DesignVector.from_array(xk)
            loss = model.evaluate(apply_design(base, dk), e, dk, alpha).loss
            if not np.isfinite(loss):
                raise ValueError("model returned non-finite loss at a perturbed design")
            grad[k] += sign * loss
    return grad / (2.0 * delta)


def turning_design_sensitivity(model: PerformanceModel, base: BladeSurface,
                               d: DesignVector, delta: float = 1e-6) -> np.ndarray:
    """Central-difference sensitivity of the turning to each design variable."""
    x = d.as_array()
    zero = np.zeros(base.n_points)
    grad = np.zeros(len(x))
    for k in range(len(x)):
        for sign in (+1.0, -1.0):
            xk = x.copy()
            xk[k] += sign * delta
            dk = DesignVector.from_array(xk)
            grad[k] += sign * model.evaluate(apply_design(base, dk), zero, dk, 0.0).turning
    return grad / (2.0 * delta)
