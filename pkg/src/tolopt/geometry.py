"""Discretized blade-surface geometry.

A blade is a closed planar curve stored in a canonical order: starting at
the trailing-edge seam (index 0) and walking the pressure side first, so
that the surface coordinate s increases monotonically. Conventions:

* ``s``   -- arc length from the leading edge normalized by half the total
  perimeter, so s is roughly in [-1, 1]; s < 0 on the pressure side, s > 0
  on the suction side, s = 0 at the leading edge.
* ``arc`` -- the same coordinate in physical (chord-normalized) units,
  arc = s * perimeter / 2. Correlation lengths are expressed in these units.

Manufactured-surface realizations displace each point along its outward
normal; the parameterization (s, normals, quadrature weights) of the
nominal surface is retained because the displacements are small and the
sensitivity analysis assumes a fixed material coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

MIN_POINTS = 32


@dataclass(frozen=True, eq=False)
class BladeSurface:
    """Closed blade curve with arc-length parameterization and normals."""

    points: np.ndarray       # (M, 2), canonical order, seam first
    s: np.ndarray            # (M,), normalized surface coordinate
    arc: np.ndarray          # (M,), signed arc length from the LE, chord units
    normals: np.ndarray      # (M, 2), unit outward normals
    quad_weights: np.ndarray  # (M,), trapezoidal arc-length weights
    le_index: int
    perimeter: float

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def chord(self) -> float:
        """Straight-line distance from the leading edge to the seam."""
        return float(np.hypot(*(self.points[0] - self.points[self.le_index])))


@dataclass(frozen=True)
class DesignVector:
    """Nominal-geometry design variables: camber-mode amplitudes + stagger."""

    chebyshev: np.ndarray
    stagger: float = 0.0

    def __post_init__(self):
        cheb = np.atleast_1d(np.asarray(self.chebyshev, dtype=float))
        object.__setattr__(self, "chebyshev", cheb)
        if not (np.all(np.isfinite(cheb)) and np.isfinite(self.stagger)):
            raise ValueError("design vector entries must be finite")

    @classmethod
    def zero(cls, n_cheb: int = 5) -> "DesignVector":
        return cls(np.zeros(n_cheb), 0.0)

    @classmethod
    def from_array(cls, x) -> "DesignVector":
        x = np.asarray(x, dtype=float)
        return cls(x[:-1].copy(), float(x[-1]))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.chebyshev, [self.stagger]])

    @property
    def size(self) -> int:
        return len(self.chebyshev) + 1


class LeMetrics(NamedTuple):
    kappa_le: float
    asym: float


def _shoelace_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _has_self_intersection(pts: np.ndarray) -> bool:
    """Proper-crossing test over all non-adjacent segment pairs of the closed polyline."""
    m = len(pts)
    a = pts
    d = np.roll(pts, -1, axis=0) - pts
    ax, ay = a[:, 0], a[:, 1]
    dx, dy = d[:, 0], d[:, 1]
    # orientation of endpoint q of segment j relative to segment i
    rx = ax[None, :] - ax[:, None]
    ry = ay[None, :] - ay[:, None]
    o1 = dx[:, None] * ry - dy[:, None] * rx                       # start of j vs i
    o2 = dx[:, None] * (ry + dy[None, :]) - dy[:, None] * (rx + dx[None, :])  # end of j vs i
    straddle = (o1 * o2 < 0) & (o1.T * o2.T < 0)
    idx = np.arange(m)
    gap = np.abs(idx[:, None] - idx[None, :])
    adjacent = (gap <= 1) | (gap == m - 1)
    return bool(np.any(straddle & ~adjacent))


def _leading_edge_arc(pts: np.ndarray, cum: np.ndarray, perimeter: float):
    """Index and sub-grid arc position of the point farthest from the seam."""
    dist = np.hypot(pts[:, 0] - pts[0, 0], pts[:, 1] - pts[0, 1])
    i = int(np.argmax(dist))
    im, ip = i - 1, i + 1
    u = np.array([cum[im], cum[i], cum[ip] if ip < len(pts) else perimeter])
    f = np.array([dist[im], dist[i], dist[ip % len(pts)]])
    # parabolic refinement keeps the LE anchor continuous under small shape changes
    denom = (u[0] - u[1]) * (u[0] - u[2]) * (u[1] - u[2])
    if denom == 0.0:
        return i, cum[i]
    a = (u[2] * (f[1] - f[0]) + u[1] * (f[0] - f[2]) + u[0] * (f[2] - f[1])) / denom
    b = (u[2] ** 2 * (f[0] - f[1]) + u[1] ** 2 * (f[2] - f[0]) + u[0] ** 2 * (f[1] - f[0])) / denom
    if a >= 0.0:  # not a maximum; keep the vertex sample
        return i, cum[i]
    return i, float(np.clip(-b / (2 * a), u[0], u[2]))


def parameterize(points) -> BladeSurface:
    """Build a BladeSurface from an ordered closed list of (x, y) points.

    Accepts either orientation; points are reordered (keeping the seam at
    index 0) so the pressure side is traversed first. The leading edge is
    the point farthest from the seam, refined to sub-grid accuracy so the
    s = 0 anchor varies continuously under small shape changes.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (M, 2) array")
    if len(pts) < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} points, got {len(pts)}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite values")

    seg = np.roll(pts, -1, axis=0) - pts
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    scale = float(np.max(np.abs(pts - pts.mean(axis=0))))
    if np.any(seg_len < 1e-12 * max(scale, 1.0)):
        raise ValueError("duplicate consecutive points")

    # canonical order: clockwise, so the arc walked first carries s < 0
    if _shoelace_area(pts) > 0:
        pts = pts[np.r_[0, np.arange(len(pts) - 1, 0, -1)]]
        seg = np.roll(pts, -1, axis=0) - pts
        seg_len = np.hypot(seg[:, 0], seg[:, 1])

    if _has_self_intersection(pts):
        raise ValueError("surface is self-intersecting")

    perimeter = float(np.sum(seg_len))
    cum = np.concatenate([[0.0], np.cumsum(seg_len[:-1])])
    le_index, le_arc = _leading_edge_arc(pts, cum, perimeter)
    arc = cum - le_arc
    s = arc / (perimeter / 2.0)

    tangent = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
    tangent /= np.hypot(tangent[:, 0], tangent[:, 1])[:, None]
    normals = np.column_stack([-tangent[:, 1], tangent[:, 0]])  # outward for clockwise order

    quad_weights = 0.5 * (seg_len + np.roll(seg_len, 1))

    return BladeSurface(
        points=pts, s=s, arc=arc, normals=normals,
        quad_weights=quad_weights, le_index=le_index, perimeter=perimeter,
    )


def chord_frame(surface: BladeSurface):
    """Chord unit vector (LE to seam) and the perpendicular pointing to s > 0."""
    le = surface.points[surface.le_index]
    v = surface.points[0] - le
    c_hat = v / np.hypot(*v)
    p_hat = np.array([-c_hat[1], c_hat[0]])
    rel = surface.points - le
    side = rel @ p_hat
    if np.sum(surface.quad_weights[surface.s > 0] * side[surface.s > 0]) < 0:
        p_hat = -p_hat
    return le, c_hat, p_hat


def apply_design(base: BladeSurface, d: DesignVector) -> BladeSurface:
    """Perturb the nominal geometry: Chebyshev camber modes, then stagger.

    Each camber mode T_k(2t - 1) (t = chordwise coordinate from projecting
    onto the chord line) displaces paired pressure/suction points by the
    same chord-normal vector, which changes camber while preserving the
    local thickness; the stagger mode rotates the blade about the leading
    edge. The perturbed surface is re-parameterized.
    """
    amps = d.chebyshev
    if not np.any(amps != 0.0) and d.stagger == 0.0:
        return base

    le, c_hat, p_hat = chord_frame(base)
    chord_len = np.hypot(*(base.points[0] - le))
    t = np.clip(((base.points - le) @ c_hat) / chord_len, 0.0, 1.0)
    disp = np.polynomial.chebyshev.chebval(2.0 * t - 1.0, amps)
    pts = base.points + disp[:, None] * p_hat[None, :]

    if d.stagger != 0.0:
        center = pts[base.le_index]
        ca, sa = np.cos(d.stagger), np.sin(d.stagger)
        rot = np.array([[ca, -sa], [sa, ca]])
        pts = center + (pts - center) @ rot.T

    return parameterize(pts)


def apply_error(nominal: BladeSurface, e, sanity_bound: float = 0.05) -> BladeSurface:
    """Realize a manufactured surface x_m = x_d + e * n_hat.

    The parameterization (s, arc, normals, quadrature weights, seam/LE
    indices) is inherited from the nominal surface: perturbations are small
    by construction and the pathwise sensitivity math relies on a fixed
    material coordinate.
    """
    e = np.asarray(e, dtype=float)
    if e.shape != (nominal.n_points,):
        raise ValueError(f"error field has {e.shape}, surface has {nominal.n_points} points")
    if not np.all(np.isfinite(e)):
        raise ValueError("error field contains non-finite values")
    limit = sanity_bound * nominal.chord
    if np.any(np.abs(e) > limit):
        raise ValueError(f"|e| exceeds sanity bound {limit:.3g} (corrupt input?)")
    return replace(nominal, points=nominal.points + e[:, None] * nominal.normals)


def discrete_curvature(pts: np.ndarray, idx) -> np.ndarray:
    """Three-point circumradius reciprocal at the given vertex indices."""
    m = len(pts)
    idx = np.asarray(idx)
    a = pts[(idx - 1) % m]
    b = pts[idx]
    c = pts[(idx + 1) % m]
    ab = b - a
    bc = c - b
    ca = a - c
    cross = ab[:, 0] * bc[:, 1] - ab[:, 1] * bc[:, 0]
    lens = (np.hypot(ab[:, 0], ab[:, 1]) * np.hypot(bc[:, 0], bc[:, 1])
            * np.hypot(ca[:, 0], ca[:, 1]))
    return 2.0 * np.abs(cross) / lens


def le_shape_metrics(surface: BladeSurface, window: float = 0.05) -> LeMetrics:
    """Leading-edge curvature and side-asymmetry metrics.

    ``kappa_le`` is the quadrature-weighted mean discrete curvature over
    points with |s| < window. ``asym`` is the weighted mean signed
    chord-normal offset over the suction window plus that over the pressure
    window (positive when the suction side carries extra material).
    """
    in_window = np.abs(surface.s) < window
    if np.count_nonzero(in_window) < 3:
        raise ValueError(f"window |s| < {window} contains fewer than 3 points")
    idx = np.flatnonzero(in_window)
    w = surface.quad_weights[idx]
    kappa = float(np.sum(w * discrete_curvature(surface.points, idx)) / np.sum(w))

    le, c_hat, p_hat = chord_frame(surface)
    nu = (surface.points - le) @ p_hat
    suction = in_window & (surface.s > 0)
    pressure = in_window & (surface.s < 0)
    if not (np.any(suction) and np.any(pressure)):
        raise ValueError("window must contain points on both sides of the leading edge")
    ws = surface.quad_weights[suction]
    wp = surface.quad_weights[pressure]
    asym = float(np.sum(ws * nu[suction]) / np.sum(ws)
                 + np.sum(wp * nu[pressure]) / np.sum(wp))
    return LeMetrics(kappa_le=kappa, asym=asym)


def load_blade(path) -> np.ndarray:
    """Read a blade point file: one "x y" pair per line, '#' comments."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'x y', got {line!r}")
            rows.append((float(parts[0]), float(parts[1])))
    return np.asarray(rows, dtype=float)


def write_blade(path, points, comment: str = "") -> None:
    pts = np.asarray(points, dtype=float)
    with open(path, "w") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for x, y in pts:
            fh.write(f"{x:.16e} {y:.16e}\n")
