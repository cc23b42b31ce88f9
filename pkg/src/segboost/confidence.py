"""Per-pixel confidence (negative entropy) and min-max-normalized blend weights.

Confidence is the signed negative entropy of a pixel's class distribution:
0 for a one-hot pixel, ``-ln K`` for a uniform one. The adaptive weight
rescales confidence affinely to [0, 1] per image, so the least confident
pixel gets weight 0 (strongest boost) and the most confident gets 1 (no
boost). Any choice of log base or positive affine rescaling of confidence
is erased by the normalization, which is why the natural log is used
without ceremony.
"""

from __future__ import annotations

import numpy as np

from .tensors import ValidationError


def confidence(pred: np.ndarray) -> np.ndarray:
    """Negative entropy ``sum_k p * ln(p)`` per pixel, with ``0 * ln 0 = 0``.

    Parameters
    ----------
    pred : (H, W, K) float array, rows normalized to 1

    Returns
    -------
    (H, W) float64 plane of values in [-ln K, 0]; closer to 0 means more
    confident.
    """
    pred = np.asarray(pred)
    if pred.ndim != 3 or pred.shape[2] < 1:
        raise ValidationError(f"probability map must be (H, W, K), got shape {pred.shape}")
    if (pred < 0).any():
        r, c, k = np.argwhere(pred < 0)[0]
        raise ValidationError(
            f"negative probability {pred[r, c, k]!r} at pixel ({r}, {c}), class {k}"
        )
    p = pred.astype(np.float64, copy=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p), 0.0)
    return terms.sum(axis=2)


def adaptive_weights(conf: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
    """Min-max normalize a confidence plane into per-pixel blend weights.

    ``W = (conf - min conf) / (max conf - min conf)`` over the image; on a
    constant plane there is no information to rank pixels, so W is 1
    everywhere and the pseudo label passes through unperturbed.

    Parameters
    ----------
    conf : (H, W) float plane, finite
    mask : optional (H, W) bool plane restricting the min/max scan (e.g. to
        non-void pixels); weights outside the mask are clipped to [0, 1]

    Returns
    -------
    (H, W) float32 weights in [0, 1].
    """
    conf = np.asarray(conf, dtype=np.float64)
    if conf.ndim != 2:
        raise ValidationError(f"confidence plane must be 2-D, got shape {conf.shape}")
    if not np.isfinite(conf).all():
        r, c = np.argwhere(~np.isfinite(conf))[0]
        raise ValidationError(f"non-finite confidence {conf[r, c]!r} at pixel ({r}, {c})")
    scoped = conf if mask is None else conf[np.asarray(mask, dtype=bool)]
    if scoped.size == 0:
        raise ValidationError("confidence mask selects no pixels")
    lo = scoped.min()
    hi = scoped.max()
    if hi == lo:
        return np.ones(conf.shape, dtype=np.float32)
    w = (conf - lo) / (hi - lo)
    if mask is not None:
        np.clip(w, 0.0, 1.0, out=w)
    return w.astype(np.float32)
