"""Concrete systems: the worked examples plus standard test maps.

Classification flags on every system come from the literature and are
trusted, not verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from . import expansions as ex
from .metric_core import Batch, MetricSystem, concat, n_rows, scale_metric, take
from .sampling import chart_ball

TWO_PI = 2.0 * math.pi
DEFAULT_HORIZON = 1024
SHIFT_MARGIN = 64


@dataclass(frozen=True)
class SystemSpec:
    """A named system together with its distinguished points.

    ``hard_points`` are force-included as base centers by the estimators:
    fixed points and endpoints where the infimum over centers tends to sit.
    """

    name: str
    system: MetricSystem
    params: dict = field(default_factory=dict)
    hard_points: Optional[Batch] = None

    @property
    def flags(self) -> dict:
        return self.system.flags


# --------------------------------------------------------------------------
# real-coordinate helpers
# --------------------------------------------------------------------------


def _interval_metric(a, b):
    return np.abs(np.asarray(a)[:, 0] - np.asarray(b)[:, 0])


def _interval_pair(batch, i, j):
    col = batch[:, 0]
    return np.abs(col[i] - col[j])


def _circle_metric(a, b):
    t = np.abs(np.asarray(a)[:, 0] - np.asarray(b)[:, 0])
    return np.minimum(t, 1.0 - t)


def _circle_pair(batch, i, j):
    col = batch[:, 0]
    t = np.abs(col[i] - col[j])
    return np.minimum(t, 1.0 - t)


def _check_unit(batch):
    b = np.asarray(batch)
    if b.ndim != 2 or b.shape[1] != 1:
        raise ValueError("points must have shape (n, 1)")
    if not np.all(np.isfinite(b)) or np.any(b < 0) or np.any(b > 1):
        raise ValueError("points must lie in [0, 1]")


def _uniform_unit(rng, count):
    return rng.uniform(0.0, 1.0, size=(count, 1))


def _ball_interval(rng, center, delta, count):
    c = float(np.asarray(center)[0, 0])

    def dist(p):
        return np.abs(p[:, 0] - c)
    return chart_ball(rng, np.array([c]), np.array([min(delta, 1.0)]), count, delta, dist,
                      lambda p: np.clip(p, 0.0, 1.0))


def _ball_circle(rng, center, delta, count):
    c = float(np.asarray(center)[0, 0])

    def dist(p):
        t = np.abs(p[:, 0] - c)
        return np.minimum(t, 1.0 - t)
    return chart_ball(rng, np.array([c]), np.array([min(delta, 0.5)]), count, delta, dist,
                      lambda p: np.mod(p, 1.0))


def _unit_points(values) -> np.ndarray:
    return np.asarray(values, dtype=float).reshape(-1, 1)


# --------------------------------------------------------------------------
# interval and circle maps
# --------------------------------------------------------------------------


def three_branch_map(x: np.ndarray) -> np.ndarray:
    """Piecewise-linear map with slopes +3, -3, +3 on the thirds of [0, 1];
    equal to ``3((x - 1/3) - |x - 1/3| + |x - 2/3|)``."""
    x = np.asarray(x, dtype=float)
    y = np.where(x < 1.0 / 3.0, 3.0 * x, np.where(x < 2.0 / 3.0, 2.0 - 3.0 * x, 3.0 * x - 2.0))
    return np.clip(y, 0.0, 1.0)


def make_three_branch() -> SystemSpec:
    system = MetricSystem(
        name="three_branch",
        map_eval=three_branch_map,
        metric=_interval_metric,
        pair_metric=_interval_pair,
        uniform_sampler=_uniform_unit,
        ball_sampler=_ball_interval,
        known_diameter=1.0,
        is_transitive=True,
        is_minimal=False,
        is_weakly_mixing=True,
        is_sensitive=True,
        validate=_check_unit,
    )
    hard = _unit_points([0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0])
    return SystemSpec("three_branch", system, {}, hard)


def make_identity() -> SystemSpec:
    system = MetricSystem(
        name="identity",
        map_eval=lambda x: x,
        metric=_interval_metric,
        pair_metric=_interval_pair,
        uniform_sampler=_uniform_unit,
        ball_sampler=_ball_interval,
        known_diameter=1.0,
        is_transitive=False,
        is_minimal=False,
        is_weakly_mixing=False,
        is_sensitive=False,
        validate=_check_unit,
    )
    return SystemSpec("identity", system, {}, _unit_points([0.0, 0.5, 1.0]))


def make_rotation(alpha: float) -> SystemSpec:
    """Rotation ``x -> x + alpha mod 1`` of the circle with the arc metric."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError("rotation angle must lie in (0, 1)")

    def rotate(x):
        y = np.asarray(x) + alpha
        # y < 2, so y - 1 is exact and equals y mod 1
        return np.where(y >= 1.0, y - 1.0, y)

    def check(batch):
        _check_unit(batch)
        if np.any(np.asarray(batch) >= 1.0):
            raise ValueError("circle points must lie in [0, 1)")

    system = MetricSystem(
        name=f"rotation:{alpha!r}",
        map_eval=rotate,
        metric=_circle_metric,
        pair_metric=_circle_pair,
        uniform_sampler=_uniform_unit,
        ball_sampler=_ball_circle,
        known_diameter=0.5,
        is_transitive=True,
        is_minimal=True,
        is_weakly_mixing=False,
        is_sensitive=False,
        validate=check,
    )
    return SystemSpec(system.name, system, {"alpha": alpha}, _unit_points([0.0]))


def _binary_system(name: str, step, circle: bool, horizon: int, **flags) -> MetricSystem:
    bits = int(horizon) + SHIFT_MARGIN

    def encode(x):
        return ex.encode_binary(x, bits)

    return MetricSystem(
        name=name,
        map_eval=step,
        metric=ex.circle_metric if circle else ex.interval_metric,
        pair_metric=ex.circle_pair_metric if circle else ex.interval_pair_metric,
        uniform_sampler=lambda rng, count: ex.uniform_binary(rng, count, bits),
        ball_sampler=lambda rng, c, delta, count: ex.ball_binary(rng, c, delta, count, bits, circle),
        known_diameter=0.5 if circle else 1.0,
        encode=encode,
        decode=ex.decode_binary,
        validate=ex.validate_binary,
        max_horizon=bits,
        **flags,
    )


def make_tent(horizon: int = DEFAULT_HORIZON) -> SystemSpec:
    """Tent map ``1 - |1 - 2x|`` on [0, 1], iterated exactly on binary
    expansions good for ``horizon`` steps."""
    system = _binary_system("tent", ex.tent_step, False, horizon, is_transitive=True,
                            is_minimal=False, is_weakly_mixing=True, is_sensitive=True)
    hard = concat([system.point(0), system.point(Fraction(2, 3))])
    return SystemSpec("tent", system, {"horizon": horizon}, hard)


def make_doubling_circle(horizon: int = DEFAULT_HORIZON) -> SystemSpec:
    """Doubling map ``2x mod 1`` on the circle of circumference 1."""
    system = _binary_system("doubling", ex.doubling_step, True, horizon, is_transitive=True,
                            is_minimal=False, is_weakly_mixing=True, is_sensitive=True)
    return SystemSpec("doubling", system, {"horizon": horizon}, system.point(0))


# --------------------------------------------------------------------------
# the surface of revolution
# --------------------------------------------------------------------------


def surface_height(r):
    return 8.0 * r * (1.0 - r)


def surface_radial(r):
    """``g(r) = 2r - r**2``; note ``1 - g(r) = (1 - r)**2``."""
    return 2.0 * r - r * r


def surface_embed(chart: np.ndarray) -> np.ndarray:
    """(r, phi) chart coordinates to points of R^3."""
    chart = np.asarray(chart, dtype=float)
    r = chart[:, 0]
    phi = chart[:, 1]
    return np.stack([r * np.cos(phi), r * np.sin(phi), surface_height(r)], axis=1)


def _euclid3(p, q):
    d0 = p[:, 0] - q[:, 0]
    d1 = p[:, 1] - q[:, 1]
    d2 = p[:, 2] - q[:, 2]
    return np.sqrt(d0 * d0 + d1 * d1 + d2 * d2)


def _surface_map(chart):
    chart = np.asarray(chart)
    phi = 2.0 * chart[:, 1]
    # phi < 2 * TWO_PI, so the subtraction is exact and equals phi mod TWO_PI
    return np.stack([surface_radial(chart[:, 0]), np.where(phi >= TWO_PI, phi - TWO_PI, phi)], axis=1)


def _surface_metric(a, b):
    return _euclid3(surface_embed(a), surface_embed(b))


def _surface_pair(batch, i, j):
    # per-axis 1-d takes are much cheaper than row gathers from an (n, 3) array
    r, phi = batch[:, 0], batch[:, 1]
    x, y, z = r * np.cos(phi), r * np.sin(phi), surface_height(r)
    d0 = x.take(i) - x.take(j)
    d1 = y.take(i) - y.take(j)
    d2 = z.take(i) - z.take(j)
    return np.sqrt(d0 * d0 + d1 * d1 + d2 * d2)


def _surface_uniform(rng, count):
    return np.stack([rng.uniform(0.0, 1.0, count), rng.uniform(0.0, TWO_PI, count)], axis=1)


def _surface_project(p):
    return np.stack([np.clip(p[:, 0], 0.0, 1.0), np.mod(p[:, 1], TWO_PI)], axis=1)


def _surface_ball(rng, center, delta, count):
    c = np.asarray(center, dtype=float)[0]
    amb = surface_embed(c[None, :])
    r0 = c[0]
    slope = 8.0 - 16.0 * r0
    dr = delta / math.sqrt(1.0 + slope * slope)
    dphi = math.pi if r0 <= delta else min(math.pi, delta / (r0 - 0.5 * delta))

    def dist(p):
        return _euclid3(surface_embed(p), amb)
    return chart_ball(rng, c, np.array([dr, dphi]), count, delta, dist, _surface_project)


def _surface_check(batch):
    b = np.asarray(batch)
    if b.ndim != 2 or b.shape[1] != 2 or not np.all(np.isfinite(b)):
        raise ValueError("surface points are finite (r, phi) rows")
    if np.any(b[:, 0] < 0) or np.any(b[:, 0] > 1):
        raise ValueError("surface radius must lie in [0, 1]")


def make_surface_prop51() -> SystemSpec:
    """Disk-like surface ``{(r cos phi, r sin phi, 8r(1-r))}`` in R^3 with
    ``(r, phi) -> (2r - r**2, 2 phi)`` and the ambient Euclidean metric.

    States are stored in chart coordinates; the angle is reduced mod 2 pi.
    No diameter is declared: estimators fall back to sampling.
    """
    system = MetricSystem(
        name="surface_prop51",
        map_eval=_surface_map,
        metric=_surface_metric,
        pair_metric=_surface_pair,
        uniform_sampler=_surface_uniform,
        ball_sampler=_surface_ball,
        known_diameter=None,
        is_transitive=False,
        is_minimal=False,
        is_weakly_mixing=False,
        is_sensitive=True,
        decode=lambda b: np.asarray(b, dtype=float),
        validate=_surface_check,
    )
    hard = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]])
    return SystemSpec("surface_prop51", system, {}, hard)


# --------------------------------------------------------------------------
# full shift and products
# --------------------------------------------------------------------------


def make_full_shift(k: int = 2, word_length: Optional[int] = None, horizon: int = DEFAULT_HORIZON,
                    margin: int = SHIFT_MARGIN) -> SystemSpec:
    """One-sided full shift on ``k`` symbols, ``d(x, y) = 2**-i`` with ``i``
    the first index where the words differ.

    Points are words of ``word_length`` symbols (default ``horizon +
    margin``); each step consumes one symbol, and the system refuses
    horizons that would leave fewer than ``margin`` stored symbols.
    """
    if k < 2:
        raise ValueError("alphabet size must be >= 2")
    if horizon < 0 or margin < 1:
        raise ValueError("horizon must be >= 0 and margin >= 1")
    if word_length is None:
        word_length = horizon + margin
    if word_length < horizon + margin:
        raise ValueError(f"word length {word_length} < horizon {horizon} + margin {margin}")
    codec = ex.ShiftCodec(k, word_length)

    def encode(word):
        word = np.asarray(word, dtype=np.uint8)
        if word.shape[-1] != word_length:
            raise ValueError(f"shift points need exactly {word_length} symbols")
        pts = codec.pack(word)
        codec.validate(pts)
        return pts

    system = MetricSystem(
        name=f"full_shift:{k}",
        map_eval=codec.step,
        metric=codec.metric,
        pair_metric=codec.pair_metric,
        uniform_sampler=codec.uniform,
        ball_sampler=codec.ball,
        known_diameter=1.0,
        is_transitive=True,
        is_minimal=False,
        is_weakly_mixing=True,
        is_sensitive=True,
        encode=encode,
        decode=codec.unpack,
        validate=codec.validate,
        max_horizon=min(word_length - margin, codec.tail_len),
    )
    hard = concat([encode(np.full(word_length, s, dtype=np.uint8)) for s in (0, k - 1)])
    params = {"k": k, "word_length": word_length, "margin": margin}
    return SystemSpec(system.name, system, params, hard)


def make_product(a: SystemSpec, b: SystemSpec) -> SystemSpec:
    """``(X x Y, f x g)`` with the max metric."""
    sa, sb = a.system, b.system

    def step(p):
        return (sa.map_eval(p[0]), sb.map_eval(p[1]))

    def metric(p, q):
        return np.maximum(sa.metric(p[0], q[0]), sb.metric(p[1], q[1]))

    def pair(p, i, j):
        return np.maximum(sa.pair_distances(p[0], i, j), sb.pair_distances(p[1], i, j))

    def uniform(rng, count):
        return (sa.uniform_sampler(rng, count), sb.uniform_sampler(rng, count))

    def ball(rng, c, delta, count):
        return (sa.ball_sampler(rng, c[0], delta, count), sb.ball_sampler(rng, c[1], delta, count))

    def encode(coords):
        return (sa.point(coords[0]), sb.point(coords[1]))

    def decode(p):
        return np.concatenate([sa.coords(p[0]), sb.coords(p[1])], axis=1)

    def validate(p):
        sa.check_points(p[0])
        sb.check_points(p[1])

    diam = None
    if sa.known_diameter is not None and sb.known_diameter is not None:
        diam = max(sa.known_diameter, sb.known_diameter)
    both_wm = sa.is_weakly_mixing is True and sb.is_weakly_mixing is True
    horizons = [h for h in (sa.max_horizon, sb.max_horizon) if h is not None]
    name = f"product:{a.name},{b.name}"
    system = MetricSystem(
        name=name,
        map_eval=step,
        metric=metric,
        pair_metric=pair,
        uniform_sampler=uniform,
        ball_sampler=ball,
        known_diameter=diam,
        is_transitive=True if both_wm else None,
        is_minimal=None,
        is_weakly_mixing=True if both_wm else None,
        is_sensitive=True if both_wm else None,
        encode=encode,
        decode=decode,
        validate=validate,
        length_unit=1.0,
        max_horizon=min(horizons) if horizons else None,
    )
    hard = None
    if a.hard_points is not None and b.hard_points is not None:
        na, nb = n_rows(a.hard_points), n_rows(b.hard_points)
        ia = np.repeat(np.arange(na), nb)
        ib = np.tile(np.arange(nb), na)
        hard = (take(a.hard_points, ia), take(b.hard_points, ib))
    return SystemSpec(name, system, {"factors": [a.name, b.name]}, hard)


def make_scaled(spec: SystemSpec, c: float) -> SystemSpec:
    """``spec`` with its metric multiplied by ``c``; same points and samples."""
    system = scale_metric(spec.system, c)
    return SystemSpec(system.name, system, {**spec.params, "scale": c}, spec.hard_points)


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

DEFAULT_REGISTRY = (
    "three_branch",
    "surface_prop51",
    "tent",
    "doubling",
    "rotation:0.381966",
    "full_shift:2",
    "identity",
    "product:tent,tent",
)


def resolve(name: str, horizon: Optional[int] = None) -> SystemSpec:
    """Build the system registered under ``name``.

    ``horizon`` sizes the stored expansions of the symbolic systems; it is
    ignored by systems with float coordinates.
    """
    hz = DEFAULT_HORIZON if horizon is None else int(horizon)
    name = name.strip()
    if name.startswith("product:"):
        parts = name[len("product:"):].split(",")
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"product needs two factors: {name!r}")
        return make_product(resolve(parts[0], horizon), resolve(parts[1], horizon))
    base, _, arg = name.partition(":")
    if base == "rotation":
        if not arg:
            raise ValueError("rotation needs an angle, e.g. rotation:0.381966")
        return make_rotation(float(arg))
    if base == "full_shift":
        try:
            k = int(arg) if arg else 2
        except ValueError:
            raise ValueError(f"bad alphabet size in {name!r}") from None
        return make_full_shift(k, horizon=hz)
    if arg:
        raise ValueError(f"system {base!r} takes no parameters")
    builders: dict[str, Any] = {
        "three_branch": make_three_branch,
        "surface_prop51": make_surface_prop51,
        "identity": make_identity,
        "tent": lambda: make_tent(hz),
        "doubling": lambda: make_doubling_circle(hz),
    }
    if base not in builders:
        raise ValueError(f"unknown system {name!r}")
    return builders[base]()


def registry(pattern: str = "") -> list[SystemSpec]:
    """Default registry entries whose name contains ``pattern``."""
    return [resolve(n) for n in DEFAULT_REGISTRY if pattern in n]
