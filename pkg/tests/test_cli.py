"""Command-line surface: subcommands, file round-trips, exit codes."""

import io
from contextlib import redirect_stderr, redirect_stdout

import numpy as np
import pytest

from segboost import (
    IGNORE_LABEL,
    argmax_labels,
    one_hot,
    read_tensor,
    vote_naive,
    VicinitySpec,
    write_tensor,
)
from segboost.cli import main


def run_cli(*args):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(args))
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def probmap(tmp_path):
    rng = np.random.default_rng(31)
    raw = rng.random((12, 10, 3)).astype(np.float32) + np.float32(1e-3)
    pred = raw / raw.sum(axis=2, keepdims=True)
    path = tmp_path / "pred.ten1"
    path.write_bytes(write_tensor(pred))
    return path, pred


@pytest.fixture
def labelmap(tmp_path):
    rng = np.random.default_rng(37)
    labels = rng.integers(0, 3, size=(9, 9)).astype(np.uint16)
    path = tmp_path / "labels.ten1"
    path.write_bytes(write_tensor(labels))
    return path, labels


class TestExitCodes:
    def test_usage_errors_exit_one(self, probmap, tmp_path):
        path, _ = probmap
        assert run_cli()[0] == 1
        assert run_cli("boost")[0] == 1  # --out missing
        assert run_cli("boost", str(path), "--out", str(tmp_path / "o"), "--vicinity", "4")[0] == 1
        assert run_cli("boost", str(path), "--out", str(tmp_path / "o"), "--bogus")[0] == 1
        assert run_cli("frobnicate")[0] == 1
        assert run_cli("bounds", "--n", "100")[0] == 1
        assert run_cli("simulate", "--policies", "ruv,warp", "--iters", "1")[0] == 1

    def test_data_errors_exit_two(self, tmp_path):
        missing = tmp_path / "missing.ten1"
        assert run_cli("boost", str(missing), "--out", str(tmp_path / "o"))[0] == 2
        bad = tmp_path / "bad.ten1"
        bad.write_bytes(b"WHAT" + bytes(20))
        code, _, err = run_cli("boost", str(bad), "--out", str(tmp_path / "o"))
        assert code == 2
        assert "magic" in err and "offset" in err

    def test_success_exits_zero(self, probmap, tmp_path):
        path, _ = probmap
        assert run_cli("boost", str(path), "--out", str(tmp_path / "out.ten1"))[0] == 0


class TestBoostCommand:
    def test_writes_valid_boosted_tensor(self, probmap, tmp_path):
        path, pred = probmap
        out = tmp_path / "boosted.ten1"
        code, report, _ = run_cli("boost", str(path), "--out", str(out), "--vicinity", "3")
        assert code == 0
        boosted = read_tensor(out.read_bytes())
        assert boosted.shape == pred.shape
        assert boosted.dtype == np.float32
        np.testing.assert_allclose(boosted.sum(axis=2, dtype=np.float64), 1.0, atol=1e-6)
        assert report.splitlines()[0] == "metric,value"
        assert "changed_fraction," in report

    def test_policy_none_writes_one_hot(self, probmap, tmp_path):
        path, pred = probmap
        out = tmp_path / "none.ten1"
        run_cli("boost", str(path), "--out", str(out), "--policy", "none")
        expected = one_hot(argmax_labels(pred), 3).astype(np.float32)
        np.testing.assert_array_equal(read_tensor(out.read_bytes()), expected)

    def test_harden_writes_u16_labels(self, probmap, tmp_path):
        path, pred = probmap
        out = tmp_path / "hard.ten1"
        run_cli("boost", str(path), "--out", str(out), "--harden")
        labels = read_tensor(out.read_bytes())
        assert labels.dtype == np.uint16
        assert labels.shape == pred.shape[:2]

    def test_round_trip_is_bit_exact(self, probmap, tmp_path):
        path, _ = probmap
        out = tmp_path / "b.ten1"
        run_cli("boost", str(path), "--out", str(out))
        blob = out.read_bytes()
        assert write_tensor(read_tensor(blob)) == blob


class TestVoteAndConf:
    def test_fast_flag_gives_identical_bytes(self, labelmap, tmp_path):
        path, _ = labelmap
        slow, fast = tmp_path / "v1.ten1", tmp_path / "v2.ten1"
        assert run_cli("vote", str(path), "--out", str(slow))[0] == 0
        assert run_cli("vote", str(path), "--out", str(fast), "--fast")[0] == 0
        assert slow.read_bytes() == fast.read_bytes()

    def test_vote_matches_library(self, labelmap, tmp_path):
        path, labels = labelmap
        out = tmp_path / "v.ten1"
        run_cli("vote", str(path), "--out", str(out), "--vicinity", "3", "--border", "zero")
        expected = vote_naive(one_hot(labels, 3), VicinitySpec(3, 3, "zero"))
        np.testing.assert_array_equal(read_tensor(out.read_bytes()), expected)

    def test_vote_accepts_probmap_input(self, probmap, tmp_path):
        path, pred = probmap
        out = tmp_path / "v.ten1"
        assert run_cli("vote", str(path), "--out", str(out))[0] == 0
        assert read_tensor(out.read_bytes()).shape == pred.shape

    def test_all_void_labelmap_needs_classes(self, tmp_path):
        path = tmp_path / "void.ten1"
        path.write_bytes(write_tensor(np.full((3, 3), IGNORE_LABEL, dtype=np.uint16)))
        assert run_cli("vote", str(path), "--out", str(tmp_path / "v.ten1"))[0] == 2
        assert run_cli("vote", str(path), "--out", str(tmp_path / "v.ten1"), "--classes", "2")[0] == 0

    def test_conf_one_hot_is_zero_plane(self, tmp_path):
        oh = one_hot(np.zeros((4, 4), dtype=np.uint16), 2).astype(np.float32)
        path = tmp_path / "oh.ten1"
        path.write_bytes(write_tensor(oh))
        out = tmp_path / "conf.ten1"
        code, text, _ = run_cli("conf", str(path), "--out", str(out))
        assert code == 0
        np.testing.assert_array_equal(read_tensor(out.read_bytes()), np.zeros((4, 4), np.float32))
        assert "conf_mean,0.000000" in text


class TestEvalCommand:
    def test_identical_files_score_one(self, labelmap, tmp_path):
        path, _ = labelmap
        code, text, _ = run_cli("eval", str(path), str(path))
        assert code == 0
        assert text.strip().splitlines()[-1] == "miou,1.000000"

    def test_hand_counted_example(self, tmp_path):
        truth = tmp_path / "t.ten1"
        pred = tmp_path / "p.ten1"
        truth.write_bytes(write_tensor(np.array([[0, 0, 1, 1]], dtype=np.uint16)))
        pred.write_bytes(write_tensor(np.array([[0, 1, 1, 1]], dtype=np.uint16)))
        code, text, _ = run_cli("eval", str(truth), str(pred))
        lines = text.strip().splitlines()
        assert lines[0] == "class,iou"
        assert lines[1] == "0,0.500000"
        assert lines[2] == "1,0.666667"
        assert lines[-1] == "miou,0.583333"

    def test_disjoint_binary_files(self, tmp_path):
        truth = tmp_path / "t.ten1"
        pred = tmp_path / "p.ten1"
        truth.write_bytes(write_tensor(np.array([[0, 0]], dtype=np.uint16)))
        pred.write_bytes(write_tensor(np.array([[1, 1]], dtype=np.uint16)))
        code, text, _ = run_cli("eval", str(truth), str(pred), "--classes", "2")
        assert text.strip().splitlines()[-1] == "miou,0.000000"


class TestSimulateCommand:
    def test_deterministic_bytes(self, tmp_path):
        args = ("simulate", "--policy", "none", "--lambda", "0", "--seed", "7",
                "--iters", "12", "--images", "6", "--labeled-fraction", "0.25",
                "--eval-every", "12")
        a = run_cli(*args)
        b = run_cli(*args)
        assert a[0] == 0
        assert a[1] == b[1]
        assert a[1].splitlines()[0] == "policy,vicinity,seed,iter,miou"

    def test_grid_row_count(self, tmp_path):
        out = tmp_path / "grid.csv"
        code, _, _ = run_cli(
            "simulate", "--policies", "none,uniform,ruv", "--vicinities", "3,5",
            "--seeds", "0,1", "--iters", "6", "--images", "6",
            "--labeled-fraction", "0.25", "--eval-every", "6", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 1 + 2 * (1 + 1 + 2)

    def test_written_file_matches_stdout(self, tmp_path):
        args = ("simulate", "--policy", "ruv", "--seed", "3", "--iters", "6",
                "--images", "6", "--labeled-fraction", "0.25", "--eval-every", "6")
        _, stdout, _ = run_cli(*args)
        out = tmp_path / "o.csv"
        run_cli(*args, "--out", str(out))
        assert out.read_text() == stdout


class TestBoundsCommand:
    def test_closed_form_kl_zero(self):
        code, text, _ = run_cli("bounds", "--kl", "0", "--n", "100", "--delta", "0.05")
        assert code == 0
        assert text.splitlines()[0] == "quantity,mode,value"
        assert "gap_bound,-,0.173082" in text

    def test_mean_vector_path(self):
        code, text, _ = run_cli(
            "bounds", "--mu-q", "1,2", "--mu-p", "0,0", "--n", "50",
            "--risk", "0.1", "--mode", "paper",
        )
        assert code == 0
        assert "kl,paper,10.000000" in text
        assert "risk_upper_bound,paper," in text

    def test_standard_mode(self):
        _, text, _ = run_cli("bounds", "--mu-q", "1,2", "--mu-p", "0,0", "--n", "50",
                             "--mode", "standard")
        assert "kl,standard,2.500000" in text

    def test_kl_and_means_together_is_usage_error(self):
        assert run_cli("bounds", "--kl", "1", "--mu-q", "1", "--mu-p", "0", "--n", "5")[0] == 1


class TestExportPgm:
    def test_writes_expected_header_and_levels(self, labelmap, tmp_path):
        path, labels = labelmap
        out = tmp_path / "img.pgm"
        code, _, _ = run_cli("export-pgm", str(path), "--out", str(out), "--classes", "3")
        assert code == 0
        blob = out.read_bytes()
        assert blob.startswith(b"P5\n9 9\n255\n")
        body = np.frombuffer(blob[len(b"P5\n9 9\n255\n"):], dtype=np.uint8)
        assert set(np.unique(body)) <= {0, 127, 254}

    def test_custom_palette(self, labelmap, tmp_path):
        path, _ = labelmap
        out = tmp_path / "img.pgm"
        code, _, _ = run_cli(
            "export-pgm", str(path), "--out", str(out), "--classes", "3",
            "--palette", "10,20,30",
        )
        assert code == 0
        body = np.frombuffer(out.read_bytes().split(b"\n255\n", 1)[1], dtype=np.uint8)
        assert set(np.unique(body)) <= {10, 20, 30}

    def test_probmap_input_rejected(self, probmap, tmp_path):
        path, _ = probmap
        assert run_cli("export-pgm", str(path), "--out", str(tmp_path / "x"), "--classes", "3")[0] == 2
