"""Points, metrics and finite-horizon orbit separation.

A *batch* is the unit every system works on: either a numpy array whose
rows are points, or a tuple of batches sharing the same number of rows
(used by product spaces and by the binary-expansion representations in
:mod:`lyapnum.expansions`). A single point is a batch with one row.
Metrics are evaluated row-wise and broadcast a one-row batch against a
batch of any size.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np

Batch = Union[np.ndarray, tuple]
MapFn = Callable[[Batch], Batch]
MetricFn = Callable[[Batch, Batch], np.ndarray]
PairMetricFn = Callable[[Batch, np.ndarray, np.ndarray], np.ndarray]
UniformSampler = Callable[[np.random.Generator, int], Batch]
BallSampler = Callable[[np.random.Generator, Batch, float, int], Batch]

TRIANGLE_TOL = 1e-9


# --------------------------------------------------------------------------
# batch helpers
# --------------------------------------------------------------------------


def _rebuild(batch: tuple, parts: Sequence[Any]) -> tuple:
    if hasattr(batch, "_fields"):
        return type(batch)(*parts)
    return tuple(parts)


def n_rows(batch: Batch) -> int:
    """Number of points in ``batch``."""
    if isinstance(batch, tuple):
        return n_rows(batch[0])
    return int(np.shape(batch)[0])


def take(batch: Batch, idx) -> Batch:
    """Row gather, applied to every leaf array of ``batch``."""
    if isinstance(batch, tuple):
        return _rebuild(batch, [take(part, idx) for part in batch])
    return batch[idx]


def concat(batches: Sequence[Batch]) -> Batch:
    """Stack batches of the same layout along the row axis."""
    first = batches[0]
    if isinstance(first, tuple):
        return _rebuild(first, [concat([b[i] for b in batches]) for i in range(len(first))])
    return np.concatenate(batches, axis=0)


def rows_equal(a: Batch, b: Batch) -> np.ndarray:
    """Exact coordinate equality, row by row (with broadcasting)."""
    if isinstance(a, tuple):
        out = rows_equal(a[0], b[0])
        for pa, pb in zip(a[1:], b[1:]):
            out = out & rows_equal(pa, pb)
        return out
    eq = np.asarray(a) == np.asarray(b)
    if eq.ndim > 1:
        eq = eq.reshape(eq.shape[0], -1).all(axis=1)
    return eq


def _leaves(batch: Batch):
    if isinstance(batch, tuple):
        for part in batch:
            yield from _leaves(part)
    else:
        yield np.asarray(batch)


# --------------------------------------------------------------------------
# the system container
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricSystem:
    """A compact metric space with a continuous self-map.

    ``ball_sampler(rng, center, radius, count)`` receives its radius in
    *length units*: the returned points lie within metric distance
    ``radius * length_unit`` of ``center``. Every zoo system has
    ``length_unit == 1``; :func:`scale_metric` multiplies it so that a
    rescaled copy draws bit-identical samples. Use :meth:`sample_ball` for
    radii in metric units.

    The classification flags are declared, never computed: ``True``,
    ``False`` or ``None`` for unknown.
    """

    name: str
    map_eval: MapFn
    metric: MetricFn
    uniform_sampler: UniformSampler
    ball_sampler: BallSampler
    known_diameter: Optional[float] = None
    is_transitive: Optional[bool] = None
    is_minimal: Optional[bool] = None
    is_weakly_mixing: Optional[bool] = None
    is_sensitive: Optional[bool] = None
    pair_metric: Optional[PairMetricFn] = None
    encode: Optional[Callable[[Any], Batch]] = None
    decode: Optional[Callable[[Batch], np.ndarray]] = None
    validate: Optional[Callable[[Batch], None]] = None
    length_unit: float = 1.0
    max_horizon: Optional[int] = None

    def point(self, coords) -> Batch:
        """Encode chart coordinates (or a symbol word) as a one-row batch."""
        if self.encode is not None:
            return self.encode(coords)
        arr = np.atleast_1d(np.asarray(coords, dtype=float))
        return arr.reshape(1, -1)

    def coords(self, batch: Batch) -> np.ndarray:
        """Human-readable coordinates of every row, shape ``(n, dim)``."""
        if self.decode is not None:
            return self.decode(batch)
        return np.asarray(batch, dtype=float).reshape(n_rows(batch), -1)

    def pair_distances(self, batch: Batch, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """``metric(batch[i], batch[j])`` without materialising both gathers
        when the system knows a cheaper route."""
        if self.pair_metric is not None:
            return self.pair_metric(batch, i, j)
        return self.metric(take(batch, i), take(batch, j))

    def sample_ball(self, rng: np.random.Generator, center: Batch, radius: float, count: int) -> Batch:
        return self.ball_sampler(rng, center, radius / self.length_unit, count)

    def check_points(self, batch: Batch) -> None:
        """Raise ``ValueError`` if ``batch`` holds points outside the space."""
        if self.validate is not None:
            self.validate(batch)
            return
        for leaf in _leaves(batch):
            if leaf.dtype.kind == "f" and not np.all(np.isfinite(leaf)):
                raise ValueError(f"{self.name}: non-finite coordinates")

    @property
    def flags(self) -> dict[str, Optional[bool]]:
        return {
            "transitive": self.is_transitive,
            "minimal": self.is_minimal,
            "weakly_mixing": self.is_weakly_mixing,
            "sensitive": self.is_sensitive,
        }


def scale_metric(system: MetricSystem, c: float) -> MetricSystem:
    """Copy of ``system`` whose metric is ``c`` times the original.

    Samplers are shared, so with the same seed every separation computed on
    the copy is exactly ``c`` times (in floating point, ``fl(c * d)``) the
    original.
    """
    if not c > 0:
        raise ValueError("scale factor must be positive")
    metric = system.metric
    pair = system.pair_metric

    def scaled_metric(a, b):
        return c * metric(a, b)

    scaled_pair = None
    if pair is not None:
        def scaled_pair(batch, i, j):
            return c * pair(batch, i, j)

    diam = None if system.known_diameter is None else c * system.known_diameter
    return dataclasses.replace(
        system,
        name=f"{system.name}*{c!r}",
        metric=scaled_metric,
        pair_metric=scaled_pair,
        known_diameter=diam,
        length_unit=c * system.length_unit,
    )


def check_metric_axioms(system: MetricSystem, rng: np.random.Generator, count: int = 1000,
                        ball_radius: float = 0.05) -> None:
    """Assert symmetry, identity, triangle inequality, ball containment and
    the diameter bound on randomly sampled points."""
    xs = system.uniform_sampler(rng, count)
    ys = system.uniform_sampler(rng, count)
    zs = system.uniform_sampler(rng, count)
    system.check_points(xs)
    dxy = system.metric(xs, ys)
    if not np.array_equal(dxy, system.metric(ys, xs)):
        raise AssertionError(f"{system.name}: metric not symmetric")
    if np.any(system.metric(xs, xs) != 0):
        raise AssertionError(f"{system.name}: metric(x, x) != 0")
    if np.any(dxy < 0):
        raise AssertionError(f"{system.name}: negative distance")
    lhs = system.metric(xs, zs)
    rhs = dxy + system.metric(ys, zs)
    if np.any(lhs > rhs + TRIANGLE_TOL):
        raise AssertionError(f"{system.name}: triangle inequality violated")
    if system.known_diameter is not None:
        if np.any(dxy > system.known_diameter + TRIANGLE_TOL):
            raise AssertionError(f"{system.name}: distance exceeds declared diameter")
    for k in range(min(count, 20)):
        center = take(xs, [k])
        ball = system.sample_ball(rng, center, ball_radius, 50)
        system.check_points(ball)
        if np.any(system.metric(center, ball) > ball_radius):
            raise AssertionError(f"{system.name}: ball sample outside radius")


# --------------------------------------------------------------------------
# orbit operations
# --------------------------------------------------------------------------


def _check_horizon(system: MetricSystem, n: int) -> None:
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    if system.max_horizon is not None and n > system.max_horizon:
        raise ValueError(
            f"{system.name}: horizon {n} exceeds the stored expansion length "
            f"(max_horizon={system.max_horizon})"
        )


def iterate(system: MetricSystem, x: Batch, n: int) -> Batch:
    """``f^n`` applied to every row of ``x``."""
    _check_horizon(system, n)
    for _ in range(n):
        x = system.map_eval(x)
    return x


def orbit_segment(system: MetricSystem, x: Batch, n_max: int) -> list:
    """``[x, f(x), ..., f^n_max(x)]``."""
    _check_horizon(system, n_max)
    out = [x]
    for _ in range(n_max):
        x = system.map_eval(x)
        out.append(x)
    return out


def _separation(system: MetricSystem, x: Batch, y: Batch, horizon: int, start: int) -> np.ndarray:
    _check_horizon(system, horizon)
    same = rows_equal(x, y)
    best = np.zeros(np.shape(same), dtype=float)
    if np.all(same):
        return best
    for n in range(horizon + 1):
        if n >= start:
            np.maximum(best, system.metric(x, y), out=best)
        if n < horizon:
            x = system.map_eval(x)
            y = system.map_eval(y)
    best[same] = 0.0
    return best


def d_f_finite(system: MetricSystem, x: Batch, y: Batch, horizon: int) -> np.ndarray:
    """``max_{0 <= n <= horizon} d(f^n x, f^n y)`` row-wise."""
    return _separation(system, x, y, horizon, 0)


def tail_start(horizon: int, tau: float) -> int:
    """First index of the tail window ``[ceil(tau * N), N]``."""
    return int(math.ceil(tau * horizon))


def tail_sep(system: MetricSystem, x: Batch, y: Batch, horizon: int, tau: float = 0.5) -> np.ndarray:
    """Tail-window maximum of ``d(f^n x, f^n y)``, a finite stand-in for the
    limsup of the orbit distance."""
    if horizon < 1:
        raise ValueError("tail separation needs horizon >= 1")
    if not 0 < tau < 1:
        raise ValueError("tail fraction must lie in (0, 1)")
    return _separation(system, x, y, horizon, tail_start(horizon, tau))


def diam_estimate(system: MetricSystem, sample_count: int, rng_seed: int, block: int = 256) -> float:
    """Largest pairwise distance among ``sample_count`` uniform samples."""
    if sample_count < 2:
        raise ValueError("need at least two samples")
    pts = system.uniform_sampler(np.random.default_rng([rng_seed, 7]), sample_count)
    m = n_rows(pts)
    if m < 2:
        raise ValueError(f"{system.name}: sampler returned fewer than 2 points")
    best = 0.0
    idx = np.arange(m)
    for lo in range(0, m, block):
        rows = idx[lo:lo + block]
        # all pairs (r, s) with s > r for the rows in this block
        ii = np.repeat(rows, m)
        jj = np.tile(idx, len(rows))
        keep = jj > ii
        if np.any(keep):
            d = system.pair_distances(pts, ii[keep], jj[keep])
            best = max(best, float(d.max()))
    return best


def radius_f_finite(system: MetricSystem, x: Batch, delta: float, horizon: int,
                    nbhd_count: int, rng_seed: int) -> float:
    """Largest ``d_f_finite(x, y)`` over ``nbhd_count`` samples ``y`` of the
    closed ball ``B(x, delta)`` (``delta`` in metric units)."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if nbhd_count < 1:
        raise ValueError("nbhd_count must be >= 1")
    ys = system.sample_ball(np.random.default_rng([rng_seed, 11]), x, delta, nbhd_count)
    return float(d_f_finite(system, x, ys, horizon).max())
