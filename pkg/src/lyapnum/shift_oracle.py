"""Exact finite-horizon Lyapunov numbers of the full shift.

Neighborhoods in the shift are cylinders: the closed ball of radius
``2**-m`` around a word is the set of words sharing its first ``m``
symbols. On words of length ``W`` every quantity the sampling estimators
approximate can be computed exactly, either by enumerating all pairs of
words in every cylinder or by a closed form. Values are returned as
:class:`fractions.Fraction` (dyadic rationals), so there is no rounding and
no seed.

The map drops the leading symbol; after ``n`` steps a word of length
``W`` has ``W - n`` symbols left, which is why ``W >= N + m + 1`` is
required: every difference that matters is still on the word at step ``N``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .estimators import EstimatorConfig, estimate_all
from .expansions import ShiftCodec
from .metric_core import tail_start
from .zoo import make_full_shift

ENUMERATION_CAP = 2 ** 24
MIN_WELL_SAMPLED = 64


@dataclass(frozen=True)
class SymbolicWord:
    """A finite word over ``{0, ..., k-1}``."""

    symbols: tuple
    k: int

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise ValueError("words need at least one symbol")
        if any(not 0 <= s < self.k for s in self.symbols):
            raise ValueError("symbol outside the alphabet")

    @property
    def length(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class CylinderSpec:
    """Words of length ``W`` with a fixed prefix of length ``m``."""

    prefix: tuple
    W: int
    k: int

    def __post_init__(self):
        if not 0 <= len(self.prefix) <= self.W:
            raise ValueError("prefix length must lie in [0, W]")
        if any(not 0 <= s < self.k for s in self.prefix):
            raise ValueError("symbol outside the alphabet")

    @property
    def m(self) -> int:
        return len(self.prefix)

    def words(self) -> np.ndarray:
        """All members, one word per row, in lexicographic order."""
        free = self.W - self.m
        tails = np.array(list(itertools.product(range(self.k), repeat=free)), dtype=np.int64)
        tails = tails.reshape(self.k ** free, free)
        head = np.broadcast_to(np.array(self.prefix, dtype=np.int64), (tails.shape[0], self.m))
        return np.concatenate([head, tails], axis=1)


def _check(k: int, m: int, W: int, N: int, tau: float) -> None:
    if k < 2:
        raise ValueError("alphabet size must be >= 2")
    if m < 0 or N < 0:
        raise ValueError("prefix depth and horizon must be nonnegative")
    if W < N + m + 1:
        raise ValueError(f"word length W={W} must be at least N + m + 1 = {N + m + 1}")
    if not 0 < tau < 1:
        raise ValueError("tail fraction must lie in (0, 1)")


def enumeration_pairs(k: int, m: int, W: int) -> int:
    """Number of ordered word pairs the full enumeration visits."""
    return k ** m * k ** (2 * (W - m))


def _dyadic(exponent: Optional[int]) -> Fraction:
    return Fraction(0) if exponent is None else Fraction(1, 2 ** exponent)


def _closed_form(m: int, N: int, diagonal: bool) -> tuple:
    # A partner that agrees on the prefix and differs everywhere after it
    # has its first difference carried to index 0 at step m, and stays
    # different at index 0 for the rest of the window.
    if diagonal:
        return (Fraction(0),) * 4
    value = _dyadic(max(m - N, 0))
    return (value,) * 4


def _separations(x: np.ndarray, ys: np.ndarray, N: int, start: int) -> tuple:
    """Exponents of ``max_n d(f^n x, f^n y)`` over ``[0, N]`` and
    ``[start, N]`` for one word ``x`` against rows ``ys``; -1 means 0."""
    W = x.shape[0]
    differs = ys != x
    full = np.full(ys.shape[0], np.iinfo(np.int64).max)
    tail = full.copy()
    for n in range(N + 1):
        # compare the shifted (truncated) words x[n:], y[n:]
        window = differs[:, n:W]
        has = window.any(axis=1)
        first = np.where(has, np.argmax(window, axis=1), np.iinfo(np.int64).max)
        np.minimum(full, first, out=full)
        if n >= start:
            np.minimum(tail, first, out=tail)
    none = np.iinfo(np.int64).max
    return np.where(full == none, -1, full), np.where(tail == none, -1, tail)


def _best(exps: np.ndarray) -> int:
    # smallest first-difference index is the largest distance; -1 only if all equal
    nonzero = exps[exps >= 0]
    return int(nonzero.min()) if nonzero.size else -1


def _larger(a: int, b: int) -> int:
    # exponent of max(2**-a, 2**-b) with -1 standing for distance 0
    if a < 0:
        return b
    if b < 0:
        return a
    return min(a, b)


def _smaller(a: int, b: int) -> int:
    if a < 0 or b < 0:
        return -1
    return max(a, b)


def _enumerate(k: int, m: int, W: int, N: int, tau: float, diagonal: bool) -> tuple:
    start = tail_start(N, tau)
    r_all = r_tail = d_all = d_tail = None
    for prefix in itertools.product(range(k), repeat=m):
        words = CylinderSpec(prefix, W, k).words()
        cyl_d_all = cyl_d_tail = -1
        cyl_r_all = cyl_r_tail = None
        for x in words:
            ys = x[None, :] if diagonal else words
            full, tail = _separations(x, ys, N, start)
            bx_all, bx_tail = _best(full), _best(tail)
            cyl_d_all = _larger(cyl_d_all, bx_all)
            cyl_d_tail = _larger(cyl_d_tail, bx_tail)
            cyl_r_all = bx_all if cyl_r_all is None else _smaller(cyl_r_all, bx_all)
            cyl_r_tail = bx_tail if cyl_r_tail is None else _smaller(cyl_r_tail, bx_tail)
        if r_all is None:
            r_all, r_tail, d_all, d_tail = cyl_r_all, cyl_r_tail, cyl_d_all, cyl_d_tail
        else:
            r_all = _smaller(r_all, cyl_r_all)
            r_tail = _smaller(r_tail, cyl_r_tail)
            d_all = _smaller(d_all, cyl_d_all)
            d_tail = _smaller(d_tail, cyl_d_tail)

    def frac(e):
        return _dyadic(None if e < 0 else e)
    return frac(r_all), frac(d_all), frac(r_tail), frac(d_tail)


def exact_L_estimates(k: int, m: int, W: int, N: int, tau: float = 0.5,
                      method: str = "closed_form", diagonal: bool = False) -> tuple:
    """Exact ``(L1, L2, L3, L4)`` of the full shift on ``k`` symbols.

    Neighborhoods are the depth-``m`` cylinders of words of length ``W``,
    orbits are followed for ``N`` steps and the tail window starts at
    ``ceil(tau * N)``. ``method="enumerate"`` visits every pair of words in
    every cylinder (refused above ``2**24`` pairs); ``"closed_form"`` uses
    the formula the enumeration confirms. ``diagonal=True`` restricts the
    pair set to ``y = x``.
    """
    _check(k, m, W, N, tau)
    if method == "closed_form":
        return _closed_form(m, N, diagonal)
    if method == "enumerate":
        pairs = enumeration_pairs(k, m, W)
        if pairs > ENUMERATION_CAP:
            raise ValueError(f"enumeration would visit {pairs} pairs, above the cap of {ENUMERATION_CAP}")
        return _enumerate(k, m, W, N, tau, diagonal)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class OracleComparison:
    k: int
    m: int
    W: int
    N: int
    exact: tuple
    estimated: tuple
    gaps: tuple
    undersampled: bool

    @property
    def max_gap(self) -> float:
        return max(self.gaps)


def oracle_vs_estimator(k: int, cfg: Optional[EstimatorConfig] = None, n_jobs: int = 1) -> OracleComparison:
    """Run the sampling estimators on the full shift and compare them with
    the exact values at the finest radius of ``cfg``.

    ``undersampled`` is set when the neighborhood sample is too small
    (fewer than 64 points) for the comparison to be meaningful.
    """
    cfg = cfg or EstimatorConfig.preset("desk")
    spec = make_full_shift(k, horizon=cfg.horizon)
    report = estimate_all(spec, cfg, n_jobs=n_jobs)
    m = ShiftCodec.depth(float(cfg.deltas[-1]))
    N = cfg.horizon
    exact = exact_L_estimates(k, m, N + m + 1, N, cfg.tail_fraction)
    estimated = tuple(float(v) for v in report.values)
    gaps = tuple(abs(e - float(x)) for e, x in zip(estimated, exact))
    return OracleComparison(k, m, N + m + 1, N, exact, estimated, gaps,
                            cfg.nbhd_count < MIN_WELL_SAMPLED)


def format_exact(values: Sequence[Fraction]) -> str:
    """Space-separated exact values, e.g. ``1 1 1/2 1``."""
    return " ".join(str(v) for v in values)
