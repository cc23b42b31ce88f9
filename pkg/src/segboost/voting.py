"""Regional vote maps: per-pixel class frequencies over a centered window.

Given a one-hot pseudo label, each pixel receives the distribution of
classes voted by its ``h_v x w_v`` rectangular neighborhood. Two border
conventions are supported:

* ``clip``  - the window is clipped to the image and counts are divided
  by the in-bounds window size, so every pixel gets an exact probability
  distribution (this is the default),
* ``zero``  - out-of-bounds neighbors vote for nothing and counts are
  divided by the fixed window size ``h_v * w_v``, mimicking a
  zero-padded constant-kernel convolution; border rows then sum to the
  in-bounds fraction of the window rather than to 1.

All counting is integer and the division happens once at the end, so the
reference path (:func:`vote_naive`) and the summed-area-table path
(:func:`vote_integral`) produce bit-identical float32 output, and results
do not depend on how the work is partitioned across threads.

Void pixels (all-zero one-hot rows) contribute nothing to numerators;
denominators are not reduced for them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensors import ValidationError

BORDER_MODES = ("clip", "zero")


@dataclass
class OpCounter:
    """Tally of scalar arithmetic performed, for complexity assertions.

    Each voting routine reports exactly how many scalar additions,
    subtractions, multiplications, and divisions its array operations
    execute, which makes window-size-independence testable without
    wall-clock timing.
    """

    ops: int = 0

    def tally(self, n: int) -> None:
        self.ops += int(n)


@dataclass(frozen=True)
class VicinitySpec:
    """Centered voting window: odd height/width and a border mode."""

    height: int = 5
    width: int = 5
    border: str = "clip"

    def __post_init__(self):
        for name, v in (("height", self.height), ("width", self.width)):
            if v < 1 or v % 2 == 0:
                raise ValidationError(
                    f"vicinity {name} must be odd and >= 1, got {v} (no centered window exists)"
                )
        if self.border not in BORDER_MODES:
            raise ValidationError(f"border mode must be one of {BORDER_MODES}, got {self.border!r}")

    @property
    def size(self) -> int:
        return self.height * self.width


def _check_one_hot(p_oh: np.ndarray) -> np.ndarray:
    p_oh = np.asarray(p_oh)
    if p_oh.ndim != 3 or p_oh.shape[2] < 1:
        raise ValidationError(f"one-hot map must be (H, W, K), got shape {p_oh.shape}")
    if not np.issubdtype(p_oh.dtype, np.integer):
        raise ValidationError(f"one-hot map must be integer-typed, got {p_oh.dtype}")
    return p_oh


def _window_bounds(n: int, radius: int) -> tuple[np.ndarray, np.ndarray]:
    # Half-open [lo, hi) per index, clipped to the image.
    idx = np.arange(n)
    lo = np.clip(idx - radius, 0, n)
    hi = np.clip(idx + radius + 1, 0, n)
    return lo, hi


def _denominator(shape, v: VicinitySpec, ops: OpCounter | None):
    h, w = shape
    if v.border == "zero":
        return np.int64(v.size)
    r_lo, r_hi = _window_bounds(h, v.height // 2)
    c_lo, c_hi = _window_bounds(w, v.width // 2)
    denom = (r_hi - r_lo)[:, None] * (c_hi - c_lo)[None, :]
    if ops is not None:
        ops.tally(3 * h * w)  # two subtractions + one product per pixel
    return denom


def _finish(counts: np.ndarray, denom, ops: OpCounter | None) -> np.ndarray:
    # int64 / int64 -> float64, single rounding into float32; shared by both
    # paths so bit-identity reduces to equality of the integer counts.
    if ops is not None:
        ops.tally(counts.size)
    if np.ndim(denom) == 0:
        votes = counts / denom
    else:
        votes = counts / denom[:, :, None]
    return votes.astype(np.float32)


def vote_counts_naive(p_oh: np.ndarray, v: VicinitySpec, ops: OpCounter | None = None) -> np.ndarray:
    """Integer window counts by direct per-pixel summation (reference path)."""
    p_oh = _check_one_hot(p_oh)
    h, w, k = p_oh.shape
    rh, rw = v.height // 2, v.width // 2
    counts = np.empty((h, w, k), dtype=np.int64)
    total = 0
    for i in range(h):
        r0, r1 = max(i - rh, 0), min(i + rh + 1, h)
        for j in range(w):
            c0, c1 = max(j - rw, 0), min(j + rw + 1, w)
            counts[i, j] = p_oh[r0:r1, c0:c1].sum(axis=(0, 1), dtype=np.int64)
            total += ((r1 - r0) * (c1 - c0) - 1) * k
    if ops is not None:
        ops.tally(total)
    return counts


def vote_counts_integral(p_oh: np.ndarray, v: VicinitySpec, ops: OpCounter | None = None) -> np.ndarray:
    """Integer window counts via per-class summed-area tables.

    The arithmetic volume depends only on the map shape, never on the
    window size: two cumulative sums build the table and four corner
    lookups recover each window sum.
    """
    p_oh = _check_one_hot(p_oh)
    h, w, k = p_oh.shape
    sat = np.zeros((h + 1, w + 1, k), dtype=np.int64)
    np.cumsum(p_oh, axis=0, dtype=np.int64, out=sat[1:, 1:])
    np.cumsum(sat[1:, 1:], axis=1, out=sat[1:, 1:])
    r_lo, r_hi = _window_bounds(h, v.height // 2)
    c_lo, c_hi = _window_bounds(w, v.width // 2)
    counts = (
        sat[r_hi][:, c_hi]
        - sat[r_lo][:, c_hi]
        - sat[r_hi][:, c_lo]
        + sat[r_lo][:, c_lo]
    )
    if ops is not None:
        ops.tally((h - 1) * w * k + h * (w - 1) * k)  # the two cumulative sums
        ops.tally(3 * h * w * k)  # corner combination
    return counts


def vote_naive(p_oh: np.ndarray, v: VicinitySpec, ops: OpCounter | None = None) -> np.ndarray:
    """Regional vote map by direct counting. Output float32 ``(H, W, K)``."""
    counts = vote_counts_naive(p_oh, v, ops)
    return _finish(counts, _denominator(counts.shape[:2], v, ops), ops)


def vote_integral(p_oh: np.ndarray, v: VicinitySpec, ops: OpCounter | None = None) -> np.ndarray:
    """Regional vote map via summed-area tables; bit-identical to vote_naive."""
    counts = vote_counts_integral(p_oh, v, ops)
    return _finish(counts, _denominator(counts.shape[:2], v, ops), ops)


def vote_uniform(p_oh: np.ndarray) -> np.ndarray:
    """Region-agnostic alternative: every pixel gets the uniform distribution.

    Kept as the degraded baseline booster for ablations; it ignores the
    image's own label field entirely.
    """
    p_oh = _check_one_hot(p_oh)
    h, w, k = p_oh.shape
    return np.full((h, w, k), 1.0 / k, dtype=np.float32)
