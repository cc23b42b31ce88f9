"""Label/probability map transforms and the TEN1 byte format."""

import numpy as np
import pytest

from segboost import (
    IGNORE_LABEL,
    LabelRangeError,
    TensorFormatError,
    ValidationError,
    argmax_labels,
    one_hot,
    read_tensor,
    validate_probmap,
    write_tensor,
)


class TestOneHot:
    def test_basic_expansion(self):
        labels = np.array([[0, 2], [1, 1]], dtype=np.uint16)
        oh = one_hot(labels, 3)
        assert oh.shape == (2, 2, 3)
        assert oh.dtype == np.uint8
        np.testing.assert_array_equal(oh.sum(axis=2), 1)
        np.testing.assert_array_equal(oh[0, 1], [0, 0, 1])

    def test_void_rows_are_zero(self):
        labels = np.array([[0, IGNORE_LABEL]], dtype=np.uint16)
        oh = one_hot(labels, 2)
        np.testing.assert_array_equal(oh[0, 1], [0, 0])
        np.testing.assert_array_equal(oh[0, 0], [1, 0])

    def test_out_of_range_names_pixel_and_value(self):
        labels = np.array([[0, 0], [0, 7]], dtype=np.uint16)
        with pytest.raises(LabelRangeError) as info:
            one_hot(labels, 3)
        assert info.value.pixel == (1, 1)
        assert info.value.value == 7
        assert "(1, 1)" in str(info.value)

    def test_rejects_bad_class_count(self):
        labels = np.zeros((2, 2), dtype=np.uint16)
        with pytest.raises(ValidationError):
            one_hot(labels, 0)
        with pytest.raises(ValidationError):
            one_hot(labels, IGNORE_LABEL)

    def test_argmax_roundtrip(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            h, w, k = rng.integers(1, 12, size=3)
            labels = rng.integers(0, k, size=(h, w)).astype(np.uint16)
            oh = one_hot(labels, int(k))
            np.testing.assert_array_equal(argmax_labels(oh.astype(np.float32)), labels)


class TestArgmaxLabels:
    def test_ties_take_lowest_index(self):
        pred = np.array([[[0.4, 0.4, 0.2]]], dtype=np.float32)
        assert argmax_labels(pred)[0, 0] == 0

    def test_dtype_is_u16(self):
        pred = np.zeros((2, 2, 4), dtype=np.float32)
        pred[..., 3] = 1.0
        out = argmax_labels(pred)
        assert out.dtype == np.uint16
        np.testing.assert_array_equal(out, 3)

    def test_nan_rejected_with_location(self):
        pred = np.ones((2, 2, 2), dtype=np.float32) * 0.5
        pred[1, 0, 1] = np.nan
        with pytest.raises(ValidationError, match=r"\(1, 0\)"):
            argmax_labels(pred)


class TestValidateProbmap:
    def test_accepts_valid(self):
        pred = np.full((3, 3, 4), 0.25, dtype=np.float32)
        assert validate_probmap(pred) is pred

    def test_rejects_negative_and_above_one(self):
        pred = np.full((2, 2, 2), 0.5)
        pred[0, 0, 0] = -0.1
        pred[0, 0, 1] = 1.1
        with pytest.raises(ValidationError, match="outside"):
            validate_probmap(pred)

    def test_rejects_unnormalized_rows(self):
        pred = np.full((2, 2, 2), 0.4)
        with pytest.raises(ValidationError, match="sum"):
            validate_probmap(pred)
        validate_probmap(pred, normalized=False)  # tolerated when asked

    def test_rejects_nan(self):
        pred = np.full((2, 2, 2), 0.5)
        pred[1, 1, 0] = np.nan
        with pytest.raises(ValidationError, match="NaN"):
            validate_probmap(pred)


class TestTen1Format:
    def test_round_trip_all_dtypes(self):
        rng = np.random.default_rng(11)
        arrays = [
            rng.random((5, 7, 3)).astype(np.float32),
            rng.integers(0, 60000, size=(4, 9)).astype(np.uint16),
            rng.integers(0, 255, size=(3, 3, 2)).astype(np.uint8),
            np.arange(6, dtype=np.float32),
        ]
        for arr in arrays:
            back = read_tensor(write_tensor(arr))
            assert back.dtype == arr.dtype
            assert back.shape == arr.shape
            np.testing.assert_array_equal(back, arr)

    def test_bit_exact_including_nan_payload(self):
        arr = np.array([np.nan, -np.inf, np.inf, -0.0, 1.5], dtype=np.float32)
        blob = write_tensor(arr)
        back = read_tensor(blob)
        # compare raw bytes: NaN payloads must survive untouched
        assert back.tobytes() == arr.tobytes()
        assert write_tensor(back) == blob

    def test_header_layout(self):
        arr = np.zeros((2, 3), dtype=np.uint16)
        blob = write_tensor(arr)
        assert blob[:4] == b"TEN1"
        assert blob[4] == 1  # u16 code
        assert blob[5] == 2  # rank
        assert int.from_bytes(blob[6:14], "little") == 2
        assert int.from_bytes(blob[14:22], "little") == 3
        assert len(blob) == 22 + 2 * 3 * 2

    def test_bad_magic_offset_zero(self):
        with pytest.raises(TensorFormatError) as info:
            read_tensor(b"NOPE" + bytes(10))
        assert info.value.offset == 0

    def test_unknown_dtype_code_offset_four(self):
        blob = bytearray(write_tensor(np.zeros(2, dtype=np.uint8)))
        blob[4] = 9
        with pytest.raises(TensorFormatError) as info:
            read_tensor(bytes(blob))
        assert info.value.offset == 4

    def test_truncated_header(self):
        with pytest.raises(TensorFormatError):
            read_tensor(b"TEN1")

    def test_truncated_dims(self):
        blob = write_tensor(np.zeros((2, 2), dtype=np.uint8))
        with pytest.raises(TensorFormatError, match="dims"):
            read_tensor(blob[:10])

    def test_truncated_and_oversized_payload(self):
        blob = write_tensor(np.zeros((2, 2), dtype=np.uint8))
        with pytest.raises(TensorFormatError, match="truncated"):
            read_tensor(blob[:-1])
        with pytest.raises(TensorFormatError, match="oversized"):
            read_tensor(blob + b"\x00")

    def test_rejects_unsupported_dtype(self):
        with pytest.raises(ValidationError, match="dtype"):
            write_tensor(np.zeros(3, dtype=np.int32))

    def test_result_owns_its_memory(self):
        arr = np.arange(4, dtype=np.uint16)
        back = read_tensor(write_tensor(arr))
        back[0] = 9  # must not raise: buffer is writable, not a frozen view
        assert back[0] == 9
