"""Bundled test blade and accessors for packaged data files."""

from __future__ import annotations

from importlib import resources

import numpy as np


def naca_vane(n_half: int = 100, thickness: float = 0.10, camber: float = 0.05) -> np.ndarray:
    """Cambered NACA-4-digit-style vane, counterclockwise from the trailing edge.

    Cosine-spaced stations shared by both sides (so pressure/suction points
    pair up at equal chordwise t), closed sharp trailing edge, unit chord.
    Returns 2*n_half points.
    """
    theta = np.linspace(0.0, np.pi, n_half + 1)
    t = 0.5 * (1.0 - np.cos(theta))  # 0 at LE, 1 at TE
    # closed-TE thickness polynomial; LE radius ~= 1.1019 * thickness^2
    yt = 5.0 * thickness * (0.2969 * np.sqrt(t) - 0.1260 * t - 0.3516 * t**2
                            + 0.2843 * t**3 - 0.1036 * t**4)
    yc = 4.0 * camber * t * (1.0 - t)
    slope = 4.0 * camber * (1.0 - 2.0 * t)
    ang = np.arctan(slope)
    upper = np.column_stack([t - yt * np.sin(ang), yc + yt * np.cos(ang)])
    lower = np.column_stack([t + yt * np.sin(ang), yc - yt * np.cos(ang)])
    # TE -> LE along the upper (suction) side, then LE -> TE along the lower
    return np.vstack([upper[::-1], lower[1:-1]])


def circle(n: int = 256, radius: float = 1.0) -> np.ndarray:
    ang = 2.0 * np.pi * np.arange(n) / n
    return radius * np.column_stack([np.cos(ang), np.sin(ang)])


def data_path(name: str):
    """Filesystem path of a packaged data file (blade or config fixture)."""
    return resources.files("tolopt") / "data" / name
