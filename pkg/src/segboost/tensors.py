"""Dense map containers, one-hot/argmax transforms, and the TEN1 byte format.

Conventions used throughout the package:

* probability maps are ``(H, W, K)`` float arrays (float32 on disk; any
  float dtype in memory, reductions run in float64),
* label maps are ``(H, W)`` uint16 arrays; the value ``IGNORE_LABEL``
  (65535) marks void pixels that take no part in voting or metrics,
* one-hot maps are ``(H, W, K)`` uint8 arrays with rows summing to 1
  (0 for void pixels).

Everything here is a pure function over immutable inputs; nothing keeps
state, so all of it is safe to call from multiple threads.
"""

from __future__ import annotations

import struct

import numpy as np

IGNORE_LABEL = 65535  # 2**16 - 1, reserved; labels must stay below it

_MAGIC = b"TEN1"
_DTYPE_CODES = {0: np.dtype("<f4"), 1: np.dtype("<u2"), 2: np.dtype("<u1")}
_CODE_FOR_KIND = {"f4": 0, "u2": 1, "u1": 2}


class TensorFormatError(ValueError):
    """Malformed TEN1 bytes; ``offset`` points at the offending byte."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ValidationError(ValueError):
    """Input data violates a documented precondition."""


class LabelRangeError(ValidationError):
    """A label value is out of range for the requested class count."""

    def __init__(self, row: int, col: int, value: int, classes: int):
        super().__init__(
            f"label {value} at pixel ({row}, {col}) is >= class count {classes}"
        )
        self.pixel = (row, col)
        self.value = value


def one_hot(labels: np.ndarray, classes: int) -> np.ndarray:
    """Expand a label map into a per-pixel one-hot map.

    Parameters
    ----------
    labels : (H, W) integer array, values in [0, classes) or IGNORE_LABEL
    classes : number of classes K

    Returns
    -------
    (H, W, K) uint8 array. Rows of void pixels are all zero.
    """
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ValidationError(f"label map must be 2-D, got shape {labels.shape}")
    if not (1 <= classes < IGNORE_LABEL):
        raise ValidationError(f"class count must be in [1, {IGNORE_LABEL}), got {classes}")
    valid = labels != IGNORE_LABEL
    bad = valid & (labels >= classes)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise LabelRangeError(int(r), int(c), int(labels[r, c]), classes)
    h, w = labels.shape
    out = np.zeros((h, w, classes), dtype=np.uint8)
    rows, cols = np.nonzero(valid)
    out[rows, cols, labels[rows, cols].astype(np.intp)] = 1
    return out


def argmax_labels(pred: np.ndarray) -> np.ndarray:
    """Per-pixel argmax of a probability map; ties go to the lowest class index.

    Raises :class:`ValidationError` if the map contains NaN.
    """
    pred = np.asarray(pred)
    if pred.ndim != 3 or pred.shape[2] < 1:
        raise ValidationError(f"probability map must be (H, W, K), got shape {pred.shape}")
    nan = np.isnan(pred)
    if nan.any():
        r, c, k = np.argwhere(nan)[0]
        raise ValidationError(f"NaN probability at pixel ({r}, {c}), class {k}")
    return np.argmax(pred, axis=2).astype(np.uint16)


def validate_probmap(pred: np.ndarray, normalized: bool = True) -> np.ndarray:
    """Check probability-map invariants and return the array unchanged.

    Values must sit in [0, 1]; with ``normalized`` the per-pixel class sums
    must fall within 1e-4 of 1.
    """
    pred = np.asarray(pred)
    if pred.ndim != 3 or pred.shape[2] < 1:
        raise ValidationError(f"probability map must be (H, W, K), got shape {pred.shape}")
    nan = np.isnan(pred)
    if nan.any():
        r, c, k = np.argwhere(nan)[0]
        raise ValidationError(f"NaN probability at pixel ({r}, {c}), class {k}")
    if (pred < 0).any() or (pred > 1).any():
        r, c, k = np.argwhere((pred < 0) | (pred > 1))[0]
        raise ValidationError(
            f"probability {pred[r, c, k]!r} at pixel ({r}, {c}), class {k} outside [0, 1]"
        )
    if normalized:
        sums = pred.sum(axis=2, dtype=np.float64)
        off = np.abs(sums - 1.0) > 1e-4
        if off.any():
            r, c = np.argwhere(off)[0]
            raise ValidationError(
                f"class sum {sums[r, c]:.6f} at pixel ({r}, {c}) not within 1e-4 of 1"
            )
    return pred


def write_tensor(arr: np.ndarray) -> bytes:
    """Serialize an array to TEN1 bytes.

    Layout: ``b"TEN1"``, 1 dtype byte (0=f32, 1=u16, 2=u8), 1 ndim byte,
    ndim little-endian u64 dims, then the row-major little-endian payload.
    """
    arr = np.ascontiguousarray(arr)
    kind = arr.dtype.newbyteorder("<").str.lstrip("<|=")
    if kind not in _CODE_FOR_KIND:
        raise ValidationError(f"unsupported dtype {arr.dtype}; use float32, uint16, or uint8")
    if arr.ndim > 255:
        raise ValidationError("tensor rank exceeds 255")
    header = struct.pack("<4sBB", _MAGIC, _CODE_FOR_KIND[kind], arr.ndim)
    dims = struct.pack(f"<{arr.ndim}Q", *arr.shape)
    payload = arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes()
    return header + dims + payload


def read_tensor(data: bytes) -> np.ndarray:
    """Parse TEN1 bytes back into an array; the exact inverse of write_tensor."""
    if len(data) < 6:
        raise TensorFormatError("truncated header", len(data))
    magic, code, ndim = struct.unpack_from("<4sBB", data, 0)
    if magic != _MAGIC:
        raise TensorFormatError(f"bad magic {magic!r}, expected {_MAGIC!r}", 0)
    if code not in _DTYPE_CODES:
        raise TensorFormatError(f"unknown dtype code {code}", 4)
    dims_end = 6 + 8 * ndim
    if len(data) < dims_end:
        raise TensorFormatError(f"truncated dims: need {dims_end} header bytes", len(data))
    dims = struct.unpack_from(f"<{ndim}Q", data, 6)
    dtype = _DTYPE_CODES[code]
    count = 1
    for d in dims:
        count *= d
    expected_end = dims_end + count * dtype.itemsize
    if len(data) != expected_end:
        kind = "truncated" if len(data) < expected_end else "oversized"
        raise TensorFormatError(
            f"{kind} payload: expected {count} elements ending at byte {expected_end}, "
            f"got {len(data) - dims_end} payload bytes",
            min(len(data), expected_end),
        )
    flat = np.frombuffer(data, dtype=dtype, count=count, offset=dims_end)
    return flat.reshape(dims).copy()
