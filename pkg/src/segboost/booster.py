"""Uncertainty-boosted soft pseudo labels.

The pipeline: take a model's probability map, harden it to a one-hot
pseudo label, build a per-pixel regional class distribution from that
label field, and blend the two convexly per pixel with weights from the
confidence plane,

    boosted = W * one_hot + (1 - W) * votes.

Confident pixels keep their one-hot label; unconfident pixels are pulled
toward the class distribution of their own neighborhood. Policies:

* ``ruv``     - regional votes over a centered window (the real booster),
* ``uniform`` - region-agnostic uniform votes (ablation baseline, known
  to degrade results),
* ``none``    - pass the one-hot label through untouched.

The blend runs in float64 and is stored as float32, so rows at weight
exactly 0 or 1 reproduce the votes / one-hot rows bit-for-bit and every
entry stays inside the [min, max] envelope of its two sources.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .confidence import adaptive_weights, confidence
from .tensors import ValidationError, argmax_labels, one_hot
from .voting import VicinitySpec, vote_integral, vote_uniform

POLICIES = ("ruv", "uniform", "none")


@dataclass(frozen=True)
class BoostedLabel:
    """Soft pseudo label plus the settings that produced it."""

    data: np.ndarray  # (H, W, K) float32
    vicinity: VicinitySpec
    policy: str

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def classes(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class BoostReport:
    """Observables worth inspecting before retraining on boosted labels."""

    changed_fraction: float  # pixels whose argmax moved
    mean_weight: float
    mean_confidence: float
    class_vote_mass: np.ndarray  # (K,) mean vote per class


def blend(p_oh: np.ndarray, votes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per-pixel convex combination ``W * p_oh + (1 - W) * votes`` as float32."""
    p_oh = np.asarray(p_oh)
    votes = np.asarray(votes)
    weights = np.asarray(weights)
    if p_oh.shape != votes.shape:
        raise ValidationError(f"shape mismatch: one-hot {p_oh.shape} vs votes {votes.shape}")
    if weights.shape != p_oh.shape[:2]:
        raise ValidationError(
            f"weights shape {weights.shape} does not match map shape {p_oh.shape[:2]}"
        )
    w = weights.astype(np.float64)[:, :, None]
    mixed = w * p_oh.astype(np.float64) + (1.0 - w) * votes.astype(np.float64)
    return mixed.astype(np.float32)


def boost(
    pred: np.ndarray,
    vicinity: VicinitySpec = VicinitySpec(),
    policy: str = "ruv",
) -> BoostedLabel:
    """Produce an uncertainty-boosted soft pseudo label from a probability map.

    Parameters
    ----------
    pred : (H, W, K) float array, rows normalized; the same map that defines
        the pseudo label also drives the confidence plane
    vicinity : voting window spec (ignored by policies without a region)
    policy : one of ``ruv``, ``uniform``, ``none``

    Returns
    -------
    :class:`BoostedLabel` whose rows are convex combinations of the one-hot
    label and the vote distribution (under border mode ``clip`` they sum
    to 1).
    """
    if policy not in POLICIES:
        raise ValidationError(f"policy must be one of {POLICIES}, got {policy!r}")
    pred = np.asarray(pred)
    labels = argmax_labels(pred)
    p_oh = one_hot(labels, pred.shape[2])
    if policy == "none":
        return BoostedLabel(p_oh.astype(np.float32), vicinity, policy)
    votes = vote_integral(p_oh, vicinity) if policy == "ruv" else vote_uniform(p_oh)
    weights = adaptive_weights(confidence(pred))
    return BoostedLabel(blend(p_oh, votes, weights), vicinity, policy)


def boost_report(
    pred: np.ndarray,
    vicinity: VicinitySpec = VicinitySpec(),
    policy: str = "ruv",
) -> BoostReport:
    """Boost a map and summarize what the booster did to it."""
    boosted = boost(pred, vicinity, policy)
    before = argmax_labels(pred)
    after = argmax_labels(boosted.data)
    conf = confidence(pred)
    weights = adaptive_weights(conf)
    if policy == "none":
        votes = boosted.data
    elif policy == "ruv":
        votes = vote_integral(one_hot(before, pred.shape[2]), vicinity)
    else:
        votes = vote_uniform(one_hot(before, pred.shape[2]))
    return BoostReport(
        changed_fraction=float(np.mean(before != after)),
        mean_weight=float(weights.mean(dtype=np.float64)),
        mean_confidence=float(conf.mean()),
        class_vote_mass=votes.mean(axis=(0, 1), dtype=np.float64),
    )
