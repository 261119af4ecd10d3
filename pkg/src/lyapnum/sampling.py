"""Closed-ball sampling in chart coordinates."""

from __future__ import annotations

from typing import Callable

import numpy as np

_MAX_HALVINGS = 64
_MAX_BISECT = 80


def chart_ball(
    rng: np.random.Generator,
    center: np.ndarray,
    half_widths: np.ndarray,
    count: int,
    delta: float,
    dist: Callable[[np.ndarray], np.ndarray],
    project: Callable[[np.ndarray], np.ndarray],
    boundary: bool = True,
) -> np.ndarray:
    """Draw ``count`` chart points within metric distance ``delta`` of ``center``.

    Candidates are uniform in the box ``center +- half_widths``; any
    candidate farther than ``delta`` has its offset halved until it fits
    (after 64 halvings it collapses onto the center). When ``boundary`` is
    set, row 0 is replaced by a point at distance in ``[delta/2, delta]``
    found by bisection along a random direction, if one exists.

    ``dist`` maps an ``(n, dim)`` array of chart points to their distances
    from ``center``; ``project`` folds chart points back into the domain.
    """
    center = np.asarray(center, dtype=float).reshape(-1)
    dim = center.shape[0]
    offsets = rng.uniform(-1.0, 1.0, size=(count, dim)) * half_widths
    direction = rng.uniform(-1.0, 1.0, size=dim) * half_widths
    pts = project(center + offsets)
    d = dist(pts)
    bad = d > delta
    for _ in range(_MAX_HALVINGS):
        if not bad.any():
            break
        offsets[bad] *= 0.5
        pts[bad] = project(center + offsets[bad])
        d[bad] = dist(pts[bad])
        bad = d > delta
    if bad.any():
        pts[bad] = center

    if boundary and count > 0:
        edge = _boundary_point(center, direction, delta, dist, project)
        if edge is not None:
            pts[0] = edge
    return pts


def _boundary_point(center, direction, delta, dist, project):
    if not np.any(direction):
        return None

    def at(t):
        p = project((center + t * direction)[None, :])
        return p[0], float(dist(p)[0])

    lo, hi = 0.0, 1.0
    p, d = at(hi)
    grow = 0
    while d < 0.5 * delta and grow < 30:
        hi *= 2.0
        q, dq = at(hi)
        if dq <= d:
            # the domain stops the ray; nothing farther along it
            break
        p, d = q, dq
        grow += 1
    if 0.5 * delta <= d <= delta:
        return p
    if d < 0.5 * delta:
        return None
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        p, d = at(mid)
        if d > delta:
            hi = mid
        elif d < 0.5 * delta:
            lo = mid
        else:
            return p
    return None
