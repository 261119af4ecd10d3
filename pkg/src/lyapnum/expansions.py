"""Exact symbolic representations for maps that float64 cannot iterate.

Iterating ``x -> 2x mod 1`` or the tent map in floating point discards one
bit per step and every orbit collapses to 0 after about 53 steps. Here a
point carries its leading 53 binary digits as an exact dyadic float plus a
reservoir of further digits that are shifted in one per step, so each map
application is exact and O(1) per point. The reservoir length bounds the
usable horizon.

The full shift uses the same idea with a packed 64-bit head word and a
reservoir of symbols.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .sampling import chart_ball

MANT = 53
ULP = 2.0 ** -MANT
_SCALE = float(2 ** MANT)


class BinaryPoints(NamedTuple):
    """Rows of points in [0, 1] given by binary expansions.

    ``value`` holds the leading 53 effective digits exactly; ``reservoir``
    holds the raw digits that follow. For the tent map the effective digit
    is ``raw XOR flip`` (see :func:`tent_step`); the doubling map keeps
    ``flip`` at zero.
    """

    value: np.ndarray
    flip: np.ndarray
    reservoir: np.ndarray


def _exhausted(res: np.ndarray) -> None:
    if res.shape[1] == 0:
        raise ValueError("binary expansion exhausted: increase the reservoir length")


def doubling_step(p: BinaryPoints) -> BinaryPoints:
    res = p.reservoir
    _exhausted(res)
    top = (p.value >= 0.5).astype(float)
    value = 2.0 * p.value - top + res[:, 0] * ULP
    return BinaryPoints(value, p.flip, res[:, 1:])


def tent_step(p: BinaryPoints) -> BinaryPoints:
    # If the leading effective digit is 1 the image is 2(1 - x), whose digits
    # are the complements of the remaining ones: fold that into the flip bit.
    res = p.reservoir
    _exhausted(res)
    high = p.value >= 0.5
    flip = p.flip ^ high.astype(np.uint8)
    incoming = (res[:, 0] ^ flip) * ULP
    value = np.where(high, (2.0 - 2.0 * p.value) - 2.0 * ULP, 2.0 * p.value) + incoming
    return BinaryPoints(value, flip, res[:, 1:])


def interval_metric(a: BinaryPoints, b: BinaryPoints) -> np.ndarray:
    return np.abs(a.value - b.value)


def circle_metric(a: BinaryPoints, b: BinaryPoints) -> np.ndarray:
    t = np.abs(a.value - b.value)
    return np.minimum(t, 1.0 - t)


def interval_pair_metric(p: BinaryPoints, i, j) -> np.ndarray:
    return np.abs(p.value[i] - p.value[j])


def circle_pair_metric(p: BinaryPoints, i, j) -> np.ndarray:
    t = np.abs(p.value[i] - p.value[j])
    return np.minimum(t, 1.0 - t)


def quantize(x: np.ndarray) -> np.ndarray:
    """Round down to a multiple of 2**-53 inside [0, 1)."""
    q = np.floor(np.asarray(x, dtype=float) * _SCALE) / _SCALE
    return np.clip(q, 0.0, 1.0 - ULP)


def encode_binary(x, reservoir_bits: int) -> BinaryPoints:
    """Exact binary expansion of ``x`` in [0, 1] (float or Fraction), one row.

    Floats are dyadic, so their digits end in zeros; pass a ``Fraction``
    to get periodic expansions such as ``Fraction(2, 3)``. ``x == 1`` is
    stored as ``0.111...``.
    """
    frac = Fraction(x)
    if frac < 0 or frac > 1:
        raise ValueError("binary points must lie in [0, 1]")
    total = MANT + reservoir_bits
    if frac == 1:
        digits = np.ones(total, dtype=np.uint8)
    else:
        n = (frac.numerator << total) // frac.denominator
        digits = np.frombuffer(format(n, f"0{total}b").encode(), dtype=np.uint8) - ord("0")
    head = int("".join(map(str, digits[:MANT])), 2)
    value = np.array([head * ULP])
    return BinaryPoints(value, np.zeros(1, dtype=np.uint8), digits[MANT:].astype(np.uint8)[None, :])


def random_reservoir(rng: np.random.Generator, count: int, bits: int) -> np.ndarray:
    return rng.integers(0, 2, size=(count, bits), dtype=np.uint8)


def uniform_binary(rng: np.random.Generator, count: int, bits: int) -> BinaryPoints:
    value = rng.integers(0, 2 ** MANT, size=count, dtype=np.int64) * ULP
    return BinaryPoints(value, np.zeros(count, dtype=np.uint8), random_reservoir(rng, count, bits))


def ball_binary(rng, center: BinaryPoints, delta: float, count: int, bits: int, circle: bool) -> BinaryPoints:
    v0 = float(center.value[0])
    if circle:
        def project(t):
            return quantize(np.mod(t, 1.0))

        def dist(t):
            s = np.abs(t[:, 0] - v0)
            return np.minimum(s, 1.0 - s)
        width = min(delta, 0.5)
    else:
        def project(t):
            return quantize(t)

        def dist(t):
            return np.abs(t[:, 0] - v0)
        width = min(delta, 1.0)
    pts = chart_ball(rng, np.array([v0]), np.array([width]), count, delta, dist, project)
    return BinaryPoints(pts[:, 0].copy(), np.zeros(count, dtype=np.uint8), random_reservoir(rng, count, bits))


def validate_binary(p: BinaryPoints) -> None:
    v = np.asarray(p.value)
    if not np.all(np.isfinite(v)) or np.any(v < 0) or np.any(v >= 1):
        raise ValueError("binary point value outside [0, 1)")
    if np.any(np.floor(v * _SCALE) != v * _SCALE):
        raise ValueError("binary point value is not a multiple of 2**-53")
    if np.any(p.reservoir > 1) or np.any(p.flip > 1):
        raise ValueError("binary digits must be 0 or 1")


def decode_binary(p: BinaryPoints) -> np.ndarray:
    return np.asarray(p.value, dtype=float).reshape(-1, 1)


# --------------------------------------------------------------------------
# full shift on k symbols
# --------------------------------------------------------------------------


class ShiftPoints(NamedTuple):
    """Rows of finite words: the first ``head_len`` symbols packed into one
    uint64 (first symbol most significant), the rest stored in ``tail``."""

    head: np.ndarray
    tail: np.ndarray


class ShiftCodec:
    """Packing parameters and the map/metric for the full shift on ``k``
    symbols with words of length ``word_length``."""

    def __init__(self, k: int, word_length: int):
        if k < 2:
            raise ValueError("alphabet size must be >= 2")
        self.k = k
        self.bits = max(1, math.ceil(math.log2(k)))
        self.head_len = 64 // self.bits
        if word_length <= self.head_len:
            raise ValueError(f"word length must exceed {self.head_len}")
        self.word_length = word_length
        self.tail_len = word_length - self.head_len
        used = self.head_len * self.bits
        self._mask = np.uint64((1 << used) - 1) if used < 64 else np.uint64(0xFFFFFFFFFFFFFFFF)
        self._shift = np.uint64(self.bits)
        self._weights = [np.uint64(self.bits * (self.head_len - 1 - i)) for i in range(self.head_len)]

    # packing ---------------------------------------------------------------
    def pack(self, words: np.ndarray) -> ShiftPoints:
        words = np.asarray(words, dtype=np.uint8)
        if words.ndim == 1:
            words = words[None, :]
        head = np.zeros(words.shape[0], dtype=np.uint64)
        for i, w in enumerate(self._weights):
            head |= words[:, i].astype(np.uint64) << w
        return ShiftPoints(head, words[:, self.head_len:])

    def unpack(self, p: ShiftPoints) -> np.ndarray:
        n = p.head.shape[0]
        sym_mask = np.uint64((1 << self.bits) - 1)
        head = np.empty((n, self.head_len), dtype=np.uint8)
        for i, w in enumerate(self._weights):
            head[:, i] = ((p.head >> w) & sym_mask).astype(np.uint8)
        return np.concatenate([head, p.tail], axis=1)

    # dynamics --------------------------------------------------------------
    def step(self, p: ShiftPoints) -> ShiftPoints:
        _exhausted(p.tail)
        head = ((p.head << self._shift) & self._mask) | p.tail[:, 0].astype(np.uint64)
        return ShiftPoints(head, p.tail[:, 1:])

    def _first_diff_head(self, x: np.ndarray) -> np.ndarray:
        # index of the first differing symbol; equal heads give head_len
        hi = np.frexp((x >> np.uint64(32)).astype(np.float64))[1]
        lo = np.frexp((x & np.uint64(0xFFFFFFFF)).astype(np.float64))[1]
        msb = np.where(hi > 0, hi + 31, lo - 1)
        return (self.head_len * self.bits - 1 - msb) // self.bits

    def _finish(self, heads_x: np.ndarray, tails_a, tails_b) -> np.ndarray:
        out = np.ldexp(1.0, -self._first_diff_head(heads_x))
        zero = np.flatnonzero(heads_x == 0)
        if zero.size:
            ta = tails_a(zero)
            tb = tails_b(zero)
            neq = ta != tb
            has = neq.any(axis=1)
            first = np.argmax(neq, axis=1)
            out[zero] = np.where(has, np.ldexp(1.0, -(self.head_len + first)), 0.0)
        return out

    def metric(self, a: ShiftPoints, b: ShiftPoints) -> np.ndarray:
        ha, hb = np.broadcast_arrays(a.head, b.head)
        x = ha ^ hb

        def rows(t):
            def get(idx):
                return t[idx] if t.shape[0] > 1 else np.broadcast_to(t, (len(idx), t.shape[1]))
            return get
        return self._finish(x, rows(a.tail), rows(b.tail))

    def pair_metric(self, p: ShiftPoints, i, j) -> np.ndarray:
        x = p.head[i] ^ p.head[j]
        i = np.asarray(i)
        j = np.asarray(j)
        return self._finish(x, lambda idx: p.tail[i[idx]], lambda idx: p.tail[j[idx]])

    # sampling --------------------------------------------------------------
    def uniform(self, rng: np.random.Generator, count: int) -> ShiftPoints:
        return self.pack(rng.integers(0, self.k, size=(count, self.word_length), dtype=np.uint8))

    @staticmethod
    def depth(delta: float) -> int:
        """Smallest ``m`` with ``2**-m <= delta``: the ball of radius ``delta``
        is the cylinder of words sharing the first ``m`` symbols."""
        if not delta > 0:
            raise ValueError("radius must be positive")
        m = max(0, math.ceil(-math.log2(delta)))
        while math.ldexp(1.0, -m) > delta:
            m += 1
        while m > 0 and math.ldexp(1.0, -(m - 1)) <= delta:
            m -= 1
        return m

    def ball(self, rng: np.random.Generator, center: ShiftPoints, delta: float, count: int) -> ShiftPoints:
        word = self.unpack(center)[0]
        width = word.shape[0]
        m = self.depth(delta)
        words = rng.integers(0, self.k, size=(count, width), dtype=np.uint8)
        words[:, :min(m, width)] = word[:min(m, width)]
        if m < width and count > 0:
            # one word on the sphere: first difference exactly at depth m
            bump = rng.integers(1, self.k, dtype=np.uint8)
            words[0, m] = (word[m] + bump) % self.k
        return self.pack(words)

    def validate(self, p: ShiftPoints) -> None:
        if np.any(self.unpack(p) >= self.k):
            raise ValueError("symbol outside the alphabet")
