"""Independent reference computations used by the tests.

Nothing here imports the library: orbits are followed in exact rational
arithmetic and the surface geometry is searched on dense grids.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

ONE = Fraction(1)


def tent_exact(x: Fraction) -> Fraction:
    return 1 - abs(1 - 2 * x)


def doubling_exact(x: Fraction) -> Fraction:
    y = 2 * x
    return y - math.floor(y)


def three_branch_exact(x: Fraction) -> Fraction:
    third = Fraction(1, 3)
    return 3 * ((x - third) - abs(x - third) + abs(x - 2 * third))


def arc(a: Fraction, b: Fraction) -> Fraction:
    t = abs(a - b)
    return min(t, 1 - t)


def orbit(step, x: Fraction, n: int) -> list:
    out = [x]
    for _ in range(n):
        x = step(x)
        out.append(x)
    return out


def separation(step, dist, x: Fraction, y: Fraction, horizon: int, start: int = 0) -> Fraction:
    """Exact ``max_{start <= n <= horizon} dist(f^n x, f^n y)``."""
    ox, oy = orbit(step, x, horizon), orbit(step, y, horizon)
    return max(dist(a, b) for a, b in list(zip(ox, oy))[start:])


def surface_point(r, phi):
    r = np.asarray(r, dtype=float)
    return np.stack([r * np.cos(phi), r * np.sin(phi), 8.0 * r * (1.0 - r)], axis=-1)


def surface_grid_diameter(n: int = 2001) -> tuple:
    """Largest distance between two surface points, with its witness radii.

    For fixed radii the distance is largest at opposite angles, so the
    search runs over an ``n x n`` grid of radius pairs.
    """
    r = np.linspace(0.0, 1.0, n)
    h = 8.0 * r * (1.0 - r)
    d = np.sqrt((r[:, None] + r[None, :]) ** 2 + (h[:, None] - h[None, :]) ** 2)
    i, j = np.unravel_index(np.argmax(d), d.shape)
    return float(d[i, j]), float(r[i]), float(r[j])


def surface_grid_diameter_all_angles(n_r: int = 201, n_phi: int = 181) -> float:
    """Coarser search that also varies the angle difference."""
    r = np.linspace(0.0, 1.0, n_r)
    phi = np.linspace(0.0, math.pi, n_phi)
    a = surface_point(r, 0.0)
    best = 0.0
    for p in phi:
        b = surface_point(r, p)
        d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=-1))
        best = max(best, float(d.max()))
    return best


def surface_max_from_origin(n: int = 200001) -> float:
    r = np.linspace(0.0, 1.0, n)
    return float(np.sqrt(r * r + (8.0 * r * (1.0 - r)) ** 2).max())


def shift_metric(u, v) -> Fraction:
    for i, (a, b) in enumerate(zip(u, v)):
        if a != b:
            return Fraction(1, 2 ** i)
    return Fraction(0)
