"""Multi-scale estimates of the four Lyapunov numbers.

Every estimate comes out of one streaming sweep. For each delta level and
each base center ``x`` a pool is drawn: the center itself plus ``M``
points of the closed ball ``B(x, delta)``. The candidate pairs of the pool
are the ``M`` pairs ``(x, y_j)`` plus ``P`` random pairs. All pools are
iterated together for ``N`` steps while the running maximum and the
tail-window maximum of every pair distance are kept. From those:

* ``L1`` (radius form): max over the center pairs, then min over centers;
* ``L2`` (diameter form): max over all pairs, then min over centers;
* ``L3``, ``L4``: the same with the tail-window maximum.

Because the pair set of ``L2`` contains that of ``L1`` and the full-range
maximum dominates the tail maximum, ``L2 >= L4``, ``L2 >= L1`` and
``L1 >= L3`` hold exactly for every report (unless ``strict_paper_n``
drops ``n = 0`` from the diameter forms).
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .metric_core import (
    Batch,
    MetricSystem,
    concat,
    diam_estimate,
    n_rows,
    tail_start,
    take,
)
from .zoo import SystemSpec

NUMBER_IDS = ("L1", "L2", "L3", "L4")
DEFAULT_SLACK_FRACTION = 0.05
_CHUNK_BYTES = 48 * 2 ** 20
_CHUNK_ROWS = 2 ** 15

SystemLike = Union[SystemSpec, MetricSystem]


@dataclass(frozen=True)
class EstimatorConfig:
    """Sampling, horizon and tolerance knobs of an estimation run.

    Radii are in length units of the system (see
    :class:`~lyapnum.metric_core.MetricSystem`). ``nested`` lets every level
    reuse the candidates of all finer levels, which makes each convergence
    curve nonincreasing as delta shrinks at no extra cost.
    """

    delta0: float = 0.1
    delta_factor: float = 0.5
    delta_levels: int = 7
    horizon: int = 500
    tail_fraction: float = 0.5
    base_count: int = 200
    nbhd_count: int = 400
    pair_count: int = 400
    rng_seed: int = 42
    strict_paper_n: bool = False
    nested: bool = False
    diam_samples: int = 4096

    def __post_init__(self):
        for name in ("delta_levels", "horizon", "base_count", "nbhd_count", "pair_count"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.diam_samples < 2:
            raise ValueError("diam_samples must be >= 2")
        if not self.delta0 > 0:
            raise ValueError("delta0 must be positive")
        if not 0 < self.delta_factor < 1:
            raise ValueError("delta_factor must lie in (0, 1)")
        if not 0 < self.tail_fraction < 1:
            raise ValueError("tail_fraction must lie in (0, 1)")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")
        if not self.deltas[-1] > 0:
            raise ValueError("finest delta underflows to zero")

    @property
    def deltas(self) -> np.ndarray:
        return np.array([self.delta0 * self.delta_factor ** k for k in range(self.delta_levels)])

    @classmethod
    def preset(cls, name: str, **overrides) -> "EstimatorConfig":
        try:
            base = PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
        return cls(**{**base, **overrides})

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EstimatorConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


PRESETS = {
    "desk": dict(base_count=200, nbhd_count=400, pair_count=400, horizon=500, delta0=0.1,
                 delta_factor=0.5, delta_levels=7, tail_fraction=0.5, rng_seed=42),
    "smoke": dict(base_count=20, nbhd_count=40, pair_count=40, horizon=100, delta0=0.1,
                  delta_factor=0.5, delta_levels=7, tail_fraction=0.5, rng_seed=42),
}


@dataclass
class ConvergenceCurve:
    deltas: np.ndarray
    estimates: np.ndarray
    argmin: np.ndarray

    @property
    def monotone(self) -> bool:
        """True when the estimate never increases as delta shrinks."""
        return bool(np.all(np.diff(self.estimates) <= 0))

    @property
    def final(self) -> float:
        return float(self.estimates[-1])


@dataclass
class Verdict:
    name: str
    lhs: float
    rhs: float
    slack: float
    relation: str
    passed: bool


@dataclass
class LyapunovReport:
    system: str
    config: EstimatorConfig
    L1: float
    L2: float
    L3: float
    L4: float
    curves: dict
    diameter: float
    diameter_known: bool
    minimizers: dict
    inequalities: list = field(default_factory=list)

    @property
    def values(self) -> tuple:
        return (self.L1, self.L2, self.L3, self.L4)


@dataclass
class GapStats:
    """Return times ``n <= horizon`` of an orbit to a ball.

    Gap fields are NaN when fewer than two visits were seen
    (``gaps_defined`` is then False).
    """

    visit_count: int
    max_gap: float
    mean_gap: float
    longest_run: int
    horizon: int
    visits: np.ndarray

    @property
    def gaps_defined(self) -> bool:
        return self.visit_count >= 2


@dataclass
class EqProbe:
    found: bool
    witness: Optional[np.ndarray]
    value: float
    epsilon: float


# --------------------------------------------------------------------------
# sweep engine
# --------------------------------------------------------------------------


def _unpack(sys_like: SystemLike):
    if isinstance(sys_like, SystemSpec):
        return sys_like.system, sys_like.hard_points
    return sys_like, None


def base_centers(sys_like: SystemLike, cfg: EstimatorConfig) -> tuple[Batch, int]:
    """Hard points (if any) followed by ``base_count`` uniform centers."""
    system, hard = _unpack(sys_like)
    uniform = system.uniform_sampler(np.random.default_rng([cfg.rng_seed, 1]), cfg.base_count)
    if hard is None:
        return uniform, 0
    return concat([hard, uniform]), n_rows(hard)


@dataclass
class _Sweep:
    # arrays of shape (levels, centers)
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    L4: np.ndarray


def _run_items(system: MetricSystem, centers: Batch, items: list, cfg: EstimatorConfig,
               radii: np.ndarray) -> np.ndarray:
    m, p, horizon = cfg.nbhd_count, cfg.pair_count, cfg.horizon
    pools, ii, jj = [], [], []
    for slot, (level, b) in enumerate(items):
        rng = np.random.default_rng([cfg.rng_seed, 2, level, b])
        center = take(centers, [b])
        try:
            samples = system.ball_sampler(rng, center, float(radii[level]), m)
        except Exception as exc:
            raise RuntimeError(f"{system.name}: ball sampler failed at center {b}: {exc}") from exc
        if n_rows(samples) != m:
            raise RuntimeError(f"{system.name}: ball sampler returned {n_rows(samples)} points "
                               f"instead of {m} at center {b}")
        pools.append(concat([center, samples]))
        off = slot * (m + 1)
        a = rng.integers(0, m + 1, size=p)
        s = rng.integers(1, m + 1, size=p)
        # per item: the m center pairs, then the p random pairs
        ii.append(np.concatenate([np.full(m, off), off + a]))
        jj.append(np.concatenate([off + np.arange(1, m + 1), off + (a + s) % (m + 1)]))
    state = concat(pools)
    ii = np.concatenate(ii)
    jj = np.concatenate(jj)
    t0 = tail_start(horizon, cfg.tail_fraction)

    # running maxima over n = 0, over 1 <= n < t0 and over the tail window;
    # the full-range maximum is recombined at the end
    first = system.pair_distances(state, ii, jj)
    head = np.zeros_like(first)
    tail = np.zeros_like(first)
    for n in range(1, horizon + 1):
        state = system.map_eval(state)
        d = system.pair_distances(state, ii, jj)
        np.maximum(tail if n >= t0 else head, d, out=tail if n >= t0 else head)
    if t0 == 0:
        np.maximum(tail, first, out=tail)
    full_pos = np.maximum(head, tail)
    full = np.maximum(full_pos, first)
    diam_form = full_pos if cfg.strict_paper_n else full

    k = len(items)
    w = m + p
    full = full.reshape(k, w)
    tail = tail.reshape(k, w)
    diam_form = diam_form.reshape(k, w)
    c_all = full[:, :m].max(axis=1)
    c_tail = tail[:, :m].max(axis=1)
    return np.stack([c_all, diam_form.max(axis=1), c_tail, tail.max(axis=1)], axis=1)


def _row_bytes(batch: Batch) -> int:
    if isinstance(batch, tuple):
        return sum(_row_bytes(part) for part in batch)
    arr = np.asarray(batch)
    return max(1, arr.nbytes // max(1, arr.shape[0]))


def _sweep(sys_like: SystemLike, cfg: EstimatorConfig, n_jobs: int = 1) -> tuple[_Sweep, Batch]:
    system, _ = _unpack(sys_like)
    if system.max_horizon is not None and cfg.horizon > system.max_horizon:
        raise ValueError(f"{system.name}: horizon {cfg.horizon} exceeds max_horizon "
                         f"{system.max_horizon}; rebuild the system for a longer horizon")
    centers, _ = base_centers(sys_like, cfg)
    nb = n_rows(centers)
    radii = cfg.deltas
    items = [(level, b) for level in range(cfg.delta_levels) for b in range(nb)]
    per_item = (cfg.nbhd_count + 1) * _row_bytes(take(centers, [0]))
    # small chunks keep the per-step arrays in cache; the byte cap bounds memory
    per_chunk = max(1, min(_CHUNK_BYTES // per_item, _CHUNK_ROWS // (cfg.nbhd_count + 1)))
    chunks = [items[i:i + per_chunk] for i in range(0, len(items), per_chunk)]

    def work(chunk):
        return _run_items(system, centers, chunk, cfg, radii)

    if n_jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    vals = np.concatenate(parts, axis=0).reshape(cfg.delta_levels, nb, 4)
    if cfg.nested:
        for level in range(cfg.delta_levels - 2, -1, -1):
            np.maximum(vals[level], vals[level + 1], out=vals[level])
    return _Sweep(*(vals[:, :, i].copy() for i in range(4))), centers


def _curve(values: np.ndarray, deltas: np.ndarray) -> ConvergenceCurve:
    return ConvergenceCurve(deltas=deltas.copy(), estimates=values.min(axis=1),
                            argmin=values.argmin(axis=1))


def _curves(sweep: _Sweep, cfg: EstimatorConfig, system: MetricSystem) -> dict:
    deltas = cfg.deltas * system.length_unit
    return {key: _curve(getattr(sweep, key), deltas) for key in NUMBER_IDS}


def _estimate(sys_like: SystemLike, cfg: EstimatorConfig, key: str, n_jobs: int):
    sweep, _ = _sweep(sys_like, cfg, n_jobs)
    curve = _curves(sweep, cfg, _unpack(sys_like)[0])[key]
    return curve.final, curve


def estimate_L1(sys_like: SystemLike, cfg: EstimatorConfig, n_jobs: int = 1):
    """Radius-form number: min over centers of the largest orbit separation
    reached from the center's ball. Returns ``(value, curve)``."""
    return _estimate(sys_like, cfg, "L1", n_jobs)


def estimate_L2(sys_like: SystemLike, cfg: EstimatorConfig, n_jobs: int = 1):
    """Diameter form: separation between any two points of a ball."""
    return _estimate(sys_like, cfg, "L2", n_jobs)


def estimate_L3(sys_like: SystemLike, cfg: EstimatorConfig, n_jobs: int = 1):
    """Radius form with the tail-window (limsup) separation."""
    return _estimate(sys_like, cfg, "L3", n_jobs)


def estimate_L4(sys_like: SystemLike, cfg: EstimatorConfig, n_jobs: int = 1):
    """Diameter form with the tail-window (limsup) separation."""
    return _estimate(sys_like, cfg, "L4", n_jobs)


def system_diameter(sys_like: SystemLike, cfg: EstimatorConfig) -> tuple[float, bool]:
    system, _ = _unpack(sys_like)
    if system.known_diameter is not None:
        return float(system.known_diameter), True
    return diam_estimate(system, cfg.diam_samples, cfg.rng_seed), False


def estimate_all(sys_like: SystemLike, cfg: EstimatorConfig, n_jobs: int = 1,
                 slack: Optional[float] = None) -> LyapunovReport:
    """All four numbers from one matched-sampling sweep.

    ``n_jobs`` spreads the sweep over threads; results do not depend on it.
    ``slack`` for the attached inequality verdicts defaults to
    ``0.05 * diameter``.
    """
    system, _ = _unpack(sys_like)
    sweep, centers = _sweep(sys_like, cfg, n_jobs)
    curves = _curves(sweep, cfg, system)
    diameter, known = system_diameter(sys_like, cfg)
    if not known:
        # every estimate is a distance between two points of X, hence a
        # lower bound on the diameter as well
        diameter = max([diameter] + [curves[k].final for k in NUMBER_IDS])
    minimizers = {}
    for key, curve in curves.items():
        idx = int(curve.argmin[-1])
        minimizers[key] = {"index": idx, "coords": system.coords(take(centers, [idx]))[0].tolist()}
    report = LyapunovReport(
        system=system.name,
        config=cfg,
        L1=curves["L1"].final,
        L2=curves["L2"].final,
        L3=curves["L3"].final,
        L4=curves["L4"].final,
        curves=curves,
        diameter=diameter,
        diameter_known=known,
        minimizers=minimizers,
    )
    if slack is None:
        slack = DEFAULT_SLACK_FRACTION * diameter
    report.inequalities = check_inequalities(report, slack)
    return report


# --------------------------------------------------------------------------
# diagnostics
# --------------------------------------------------------------------------


def check_inequalities(report: LyapunovReport, slack: float) -> list[Verdict]:
    """Order relations between the four numbers, the factor-two bounds and
    the diameter bound, each judged with additive ``slack``."""
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    L = dict(zip(NUMBER_IDS, report.values))
    out = []

    def ge(name, lhs, rhs):
        out.append(Verdict(name, lhs, rhs, slack, ">=", bool(lhs >= rhs - slack)))

    def le(name, lhs, rhs):
        out.append(Verdict(name, lhs, rhs, slack, "<=", bool(lhs <= rhs + slack)))

    ge("L2>=L4", L["L2"], L["L4"])
    ge("L4>=L3", L["L4"], L["L3"])
    ge("L2>=L1", L["L2"], L["L1"])
    ge("L1>=L3", L["L1"], L["L3"])
    le("prop2.1:L2<=2*L3", L["L2"], 2.0 * L["L3"])
    for a in NUMBER_IDS:
        for b in NUMBER_IDS:
            if a != b and (a, b) != ("L2", "L3"):
                le(f"{a}<=2*{b}", L[a], 2.0 * L[b])
    for a in NUMBER_IDS:
        le(f"{a}<=diam", L[a], report.diameter)
    return out


def eq_region_probe(sys_like: SystemLike, epsilon: float, cfg: EstimatorConfig,
                    n_jobs: int = 1) -> EqProbe:
    """Look for a center whose sampled f-radius at the finest delta is at
    most ``epsilon``: a candidate witness that the system is not sensitive
    at that scale. A negative answer is only consistent with sensitivity."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    system, _ = _unpack(sys_like)
    sweep, centers = _sweep(sys_like, cfg, n_jobs)
    radius_f = sweep.L1[-1]
    hits = np.flatnonzero(radius_f <= epsilon)
    if hits.size == 0:
        return EqProbe(False, None, float(radius_f.min()), epsilon)
    idx = int(hits[0])
    return EqProbe(True, system.coords(take(centers, [idx]))[0], float(radius_f[idx]), epsilon)


def return_time_gaps(sys_like: SystemLike, x: Batch, target_center: Batch, target_radius: float,
                     horizon: int) -> GapStats:
    """Times ``0 <= n <= horizon`` with ``f^n(x)`` in the closed ball
    around ``target_center``, and their gap statistics.

    Bounded gaps hint at syndetic returns; long runs of consecutive visits
    hint at thick hitting sets.
    """
    system, _ = _unpack(sys_like)
    if not target_radius > 0:
        raise ValueError("target radius must be positive")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if system.max_horizon is not None and horizon > system.max_horizon:
        raise ValueError(f"{system.name}: horizon exceeds max_horizon {system.max_horizon}")
    visits = []
    for n in range(horizon + 1):
        if float(system.metric(x, target_center)[0]) <= target_radius:
            visits.append(n)
        if n < horizon:
            x = system.map_eval(x)
    v = np.asarray(visits, dtype=np.int64)
    if v.size >= 2:
        gaps = np.diff(v)
        max_gap, mean_gap = float(gaps.max()), float(gaps.mean())
        runs = np.split(v, np.flatnonzero(gaps != 1) + 1)
        longest = max(len(r) for r in runs)
    else:
        max_gap = mean_gap = math.nan
        longest = int(v.size)
    return GapStats(int(v.size), max_gap, mean_gap, longest, horizon, v)
