"""Label maps as 8-bit binary PGM images."""

import numpy as np
import pytest

from segboost import (
    IGNORE_LABEL,
    ValidationError,
    gray_to_labels,
    label_palette,
    labels_to_gray,
    read_pgm,
    write_pgm,
)


class TestPalette:
    def test_distinct_levels_up_to_256(self):
        for k in (1, 2, 3, 21, 255, 256):
            pal = label_palette(k)
            assert pal.dtype == np.uint8
            assert len(np.unique(pal)) == k

    def test_endpoints(self):
        # white stays reserved for void below the 256-class limit
        np.testing.assert_array_equal(label_palette(2), [0, 254])
        np.testing.assert_array_equal(label_palette(1), [0])
        assert label_palette(255)[-1] == 254
        assert label_palette(256)[-1] == 255

    def test_monotone(self):
        pal = label_palette(40)
        assert (np.diff(pal.astype(int)) > 0).all()

    def test_full_256_uses_every_level(self):
        np.testing.assert_array_equal(label_palette(256), np.arange(256, dtype=np.uint8))


class TestRoundTrip:
    def test_labels_survive(self):
        rng = np.random.default_rng(6)
        for k in (2, 3, 10, 254):
            labels = rng.integers(0, k, size=(7, 9)).astype(np.uint16)
            gray = labels_to_gray(labels, k)
            np.testing.assert_array_equal(gray_to_labels(gray, k), labels)

    def test_void_maps_to_255_and_back(self):
        labels = np.array([[0, IGNORE_LABEL], [1, 2]], dtype=np.uint16)
        gray = labels_to_gray(labels, 3)
        assert gray[0, 1] == 255
        np.testing.assert_array_equal(gray_to_labels(gray, 3), labels)

    def test_custom_palette(self):
        labels = np.array([[0, 1, 2]], dtype=np.uint16)
        pal = np.array([10, 20, 30], dtype=np.uint8)
        gray = labels_to_gray(labels, 3, pal)
        np.testing.assert_array_equal(gray[0], [10, 20, 30])
        np.testing.assert_array_equal(gray_to_labels(gray, 3, pal), labels)

    def test_duplicate_palette_rejected(self):
        with pytest.raises(ValidationError):
            labels_to_gray(np.zeros((1, 1), dtype=np.uint16), 2, np.array([5, 5], dtype=np.uint8))

    def test_void_rejected_when_palette_claims_white(self):
        labels = np.array([[IGNORE_LABEL]], dtype=np.uint16)
        with pytest.raises(ValidationError, match="255"):
            labels_to_gray(labels, 2, np.array([0, 255], dtype=np.uint8))
        with pytest.raises(ValidationError, match="255"):
            labels_to_gray(labels, 256)

    def test_unknown_gray_rejected(self):
        gray = np.array([[7]], dtype=np.uint8)
        with pytest.raises(ValidationError):
            gray_to_labels(gray, 2)

    def test_out_of_range_label_rejected(self):
        with pytest.raises(ValidationError):
            labels_to_gray(np.array([[9]], dtype=np.uint16), 3)


class TestPgmBytes:
    def test_header_is_exact(self):
        gray = np.zeros((10, 12), dtype=np.uint8)
        blob = write_pgm(gray)
        assert blob.startswith(b"P5\n12 10\n255\n")
        assert len(blob) == len(b"P5\n12 10\n255\n") + 120

    def test_round_trip(self):
        rng = np.random.default_rng(8)
        gray = rng.integers(0, 256, size=(5, 4)).astype(np.uint8)
        np.testing.assert_array_equal(read_pgm(write_pgm(gray)), gray)

    def test_rejects_non_uint8(self):
        with pytest.raises(ValidationError):
            write_pgm(np.zeros((2, 2), dtype=np.uint16))

    def test_rejects_malformed_bytes(self):
        with pytest.raises(ValidationError):
            read_pgm(b"P6\n2 2\n255\n" + bytes(12))
        with pytest.raises(ValidationError):
            read_pgm(b"P5\n2 2\n255\n" + bytes(3))

    def test_full_pipeline(self):
        rng = np.random.default_rng(10)
        labels = rng.integers(0, 5, size=(6, 6)).astype(np.uint16)
        labels[0, 0] = IGNORE_LABEL
        blob = write_pgm(labels_to_gray(labels, 5))
        np.testing.assert_array_equal(gray_to_labels(read_pgm(blob), 5), labels)
