"""CLI behavior, including the exit-code contract:
0 success, 1 usage, 2 data, 3 numeric."""

import math

import pytest

from dsig.cli import main
from dsig.engine import parse_signature_tsv
from conftest import SAMPLE_DECAYED_VALUES, SAMPLE_FLAT_VALUES


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestWordsCommand:
    def test_count_then_words(self, capsys):
        code, out, _ = run(capsys, "words", "-d", "4", "--half", "-k", "3")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "292"
        assert len(lines) == 293
        assert lines[1] == "1-"

    def test_restricted(self, capsys):
        code, out, _ = run(capsys, "words", "-d", "4", "--restrict", "2,4", "--half", "-k", "2")
        assert code == 0
        assert out.splitlines()[0] == "10"

    def test_zero_max_len(self, capsys):
        code, out, _ = run(capsys, "words", "-d", "4", "-k", "0")
        assert code == 0
        assert out.splitlines() == ["0"]

    def test_pattern(self, capsys):
        code, out, _ = run(capsys, "words", "-d", "4", "--half", "-k", "2", "--pattern", "4-,4+")
        assert out.splitlines()[0] == "15"


class TestComputeCommand:
    def test_flat_sample_to_stdout(self, capsys, sample_stream_file):
        code, out, _ = run(capsys, "compute", "--input", str(sample_stream_file), "--mu", "0", "-k", "2")
        assert code == 0
        assert parse_signature_tsv(out) == pytest.approx(SAMPLE_FLAT_VALUES, abs=1e-12)

    def test_decayed_sample(self, capsys, sample_stream_file):
        code, out, _ = run(
            capsys, "compute", "--input", str(sample_stream_file), "--mu", str(math.log(2)), "-k", "2"
        )
        parsed = parse_signature_tsv(out)
        for text, want in SAMPLE_DECAYED_VALUES.items():
            assert parsed[text] == pytest.approx(want, abs=0.005)

    def test_degenerate_window(self, capsys, sample_stream_file):
        code, out, _ = run(
            capsys, "compute", "--input", str(sample_stream_file), "-k", "2",
            "--from", "3", "--to", "3",
        )
        parsed = parse_signature_tsv(out)
        assert parsed.pop("@") == 1.0
        assert all(v == 0.0 for v in parsed.values())

    def test_output_file(self, capsys, sample_stream_file, tmp_path):
        out_path = tmp_path / "sig.tsv"
        code, out, _ = run(
            capsys, "compute", "--input", str(sample_stream_file), "-k", "1", "--out", str(out_path)
        )
        assert code == 0 and out == ""
        assert parse_signature_tsv(out_path.read_text())["1-"] == 7.0


class TestExitCodes:
    def test_usage_error_unknown_option(self, capsys):
        code, _, err = run(capsys, "words", "--no-such-flag")
        assert code == 1
        assert "no-such-flag" in err

    def test_usage_error_missing_file(self, capsys):
        code, _, _ = run(capsys, "compute", "--input", "/no/such/file", "-k", "1")
        assert code == 1

    def test_data_error_malformed_events(self, capsys, tmp_path):
        bad = tmp_path / "bad.dat"
        bad.write_text("1.0\t1\n")
        code, _, err = run(capsys, "compute", "--input", str(bad), "-k", "1")
        assert code == 2
        assert "data error" in err

    def test_data_error_bad_range(self, capsys, sample_stream_file):
        code, _, _ = run(
            capsys, "compute", "--input", str(sample_stream_file), "-k", "1", "--from", "0.123"
        )
        assert code == 2

    def test_usage_error_train_fraction(self, capsys, synth_dir_small):
        code, _, _ = run(
            capsys, "experiment", "--data-dir", str(synth_dir_small), "--train-fraction", "1.0"
        )
        assert code == 1

    def test_numeric_error_exit_three(self, capsys, synth_dir_small):
        code, _, err = run(
            capsys, "experiment", "--data-dir", str(synth_dir_small),
            "-k", "1", "--restrict", "4", "--rate", "1e12", "--iterations", "200",
        )
        assert code == 3
        assert "numeric" in err


class TestSynthAndIngest:
    def test_synth_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(capsys, "synth", "--out-dir", str(a), "--sessions", "2", "--seed", "5")[0] == 0
        assert run(capsys, "synth", "--out-dir", str(b), "--sessions", "2", "--seed", "5")[0] == 0
        for name in sorted(p.name for p in a.iterdir()):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_ingest_market_writes_session_tsv(self, capsys, synth_dir_small, tmp_path):
        source = sorted(synth_dir_small.glob("*.am"))[0]
        out = tmp_path / "session.tsv"
        code, _, _ = run(capsys, "ingest-market", "--input", str(source), "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t\tX1\tX2\tX3\tX4"
        assert len(lines) == 152

    def test_ingest_market_discarded_is_data_error(self, capsys, tmp_path):
        source = tmp_path / "empty.am"
        source.write_text("541.5\t1.001\t1.0\t10\t10\t5\n689.0\t1.002\t1.0\t10\t10\t9\n")
        code, _, err = run(capsys, "ingest-market", "--input", str(source))
        assert code == 2
        assert "discarded" in err


class TestExperimentCommand:
    def test_end_to_end_with_outputs(self, capsys, synth_dir_small, tmp_path):
        summary = tmp_path / "summary.tsv"
        coefs = tmp_path / "coefs.tsv"
        code, out, _ = run(
            capsys, "experiment", "--data-dir", str(synth_dir_small),
            "-k", "1", "--restrict", "4", "--seed", "3",
            "--out", str(summary), "--coefficients", str(coefs),
        )
        assert code == 0
        assert "test accuracy" in out
        assert "feature_count\t1" in summary.read_text()
        assert coefs.read_text().splitlines()[1].startswith("4-\t")

    def test_threads_env(self, capsys, synth_dir_small, monkeypatch):
        monkeypatch.setenv("DSIG_THREADS", "2")
        code, out, _ = run(
            capsys, "experiment", "--data-dir", str(synth_dir_small),
            "-k", "1", "--restrict", "4", "--seed", "3",
        )
        assert code == 0
