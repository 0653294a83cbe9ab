import json
import logging
import shlex
import sys

import numpy as np
import pytest
from PIL import Image

from speech_segmenter.cli import main
from speech_segmenter.formats import read_probabilities, read_segments, write_probabilities, write_segments
from speech_segmenter.manifest import manifest_path
from speech_segmenter.probabilities import synth_probs, validate_probs
from speech_segmenter.segments import SegmentSet


@pytest.fixture(autouse=True)
def restore_logging():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def run(*args) -> int:
    return main([str(a) for a in args] + ["--no-progress"])


@pytest.fixture
def probs_file(tmp_path):
    stream = validate_probs([0.0] * 25 + [0.9] * 50 + [0.0] * 25, 0.04, "talk")
    return write_probabilities([stream], tmp_path / "probs.jsonl")


@pytest.fixture
def corpus_files(tmp_path):
    """Synthetic probabilities plus the oracle they were generated from."""
    oracles = [
        SegmentSet.from_pairs("a", [(1.0, 4.0), (5.0, 9.5), (10.5, 14.0)], audio_len_s=16.0),
        SegmentSet.from_pairs("b", [(0.5, 8.8), (9.5, 12.0)], audio_len_s=13.0),
    ]
    streams = [synth_probs(o, 0.04, 0.03, 3, 17 + i) for i, o in enumerate(oracles)]
    return (
        write_probabilities(streams, tmp_path / "corpus.jsonl"),
        write_segments(oracles, tmp_path / "oracle.jsonl"),
    )


def _text(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


class TestExitCodes:
    def test_missing_required_flag_is_usage_error(self, probs_file, tmp_path):
        assert run("segment", "--probs", probs_file, "--out", tmp_path / "s.jsonl") == 2

    def test_unknown_command(self):
        assert run("transcribe") == 2

    def test_invalid_configuration(self, probs_file, tmp_path, capsys):
        assert run("segment", "--probs", probs_file, "--max-len", 20, "--threshold", 1.5,
                   "--out", tmp_path / "s.jsonl") == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_input(self, tmp_path, capsys):
        assert run("segment", "--probs", tmp_path / "nope.jsonl", "--max-len", 20,
                   "--out", tmp_path / "s.jsonl") == 1
        assert "not found" in capsys.readouterr().err

    def test_bad_worker_count(self, probs_file, tmp_path):
        assert run("segment", "--probs", probs_file, "--max-len", 20, "--workers", 0,
                   "--out", tmp_path / "s.jsonl") == 1


class TestSegment:
    def test_writes_segments_and_manifest(self, probs_file, tmp_path):
        out = tmp_path / "segments.jsonl"
        assert run("segment", "--probs", probs_file, "--max-len", 20, "--out", out) == 0
        assert read_segments(out)["talk"].pairs() == pytest.approx([(0.94, 3.06)])

        manifest = json.loads(manifest_path(out).read_text())
        assert manifest["command"] == "segment"
        assert manifest["config"]["maxlen_s"] == 20.0
        assert manifest["config"]["algorithm"] == "proposed"
        assert str(probs_file) in manifest["inputs"]

    def test_no_manifest(self, probs_file, tmp_path):
        out = tmp_path / "segments.jsonl"
        assert run("segment", "--probs", probs_file, "--max-len", 20, "--out", out, "--no-manifest") == 0
        assert not manifest_path(out).exists()

    def test_fixed_pieces(self, tmp_path):
        probs = write_probabilities([validate_probs([0.1] * 1125, 0.04, "long")], tmp_path / "p.jsonl")
        out = tmp_path / "s.tsv"
        assert run("segment", "--probs", probs, "--max-len", 20, "--algorithm", "fixed",
                   "--format", "tsv", "--out", out) == 0
        assert out.read_text().splitlines() == [
            "long\t0.000\t20.000",
            "long\t20.000\t40.000",
            "long\t40.000\t45.000",
        ]

    def test_trace(self, tmp_path):
        values = np.full(500, 0.9)
        values[200] = 0.6
        values[350] = 0.7
        probs = write_probabilities([validate_probs(values, 0.04, "t")], tmp_path / "p.jsonl")
        trace = tmp_path / "trace.jsonl"
        assert run("segment", "--probs", probs, "--max-len", 10, "--out", tmp_path / "s.jsonl",
                   "--trace", trace) == 0
        records = [json.loads(line) for line in trace.read_text().splitlines()]
        assert [r["t_hat_s"] for r in records] == [8.0, 14.0]
        assert records[0]["audio_id"] == "t"

    def test_output_is_deterministic(self, corpus_files, tmp_path):
        probs, _ = corpus_files
        first, second = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
        assert run("segment", "--probs", probs, "--max-len", 8, "--out", first) == 0
        assert run("segment", "--probs", probs, "--max-len", 8, "--out", second, "--workers", 2) == 0
        assert first.read_bytes() == second.read_bytes()
        one = json.loads(manifest_path(first).read_text())
        two = json.loads(manifest_path(second).read_text())
        assert one["config"] == two["config"]
        assert one["inputs"] == two["inputs"]


def test_merge(tmp_path):
    chunks = tmp_path / "chunks.jsonl"
    chunks.write_text(
        json.dumps({"audio_id": "a", "stride_ms": 40, "chunk": 0, "probs": [0.8] * 500}) + "\n"
        + json.dumps({"audio_id": "a", "stride_ms": 40, "chunk": 1, "probs": [0.4] * 500}) + "\n"
    )
    out = tmp_path / "merged.jsonl"
    assert run("merge", "--chunks", chunks, "--out", out) == 0
    merged = read_probabilities(out)[0]
    assert merged.num_frames == 950
    assert merged.probs[460] == pytest.approx(0.6, abs=1e-15)

    raw = tmp_path / "merged.f32"
    assert run("merge", "--chunks", chunks, "--out", raw, "--raw") == 0
    assert read_probabilities(raw)[0].num_frames == 950


def test_merge_rejects_bad_overlap(tmp_path):
    chunks = tmp_path / "chunks.jsonl"
    chunks.write_text(json.dumps({"audio_id": "a", "stride_ms": 40, "chunk": 0, "probs": [0.5]}) + "\n")
    assert run("merge", "--chunks", chunks, "--overlap", 25, "--out", tmp_path / "m.jsonl") == 1


class TestLabels:
    def test_writes_windows(self, tmp_path):
        segments = _text(tmp_path / "oracle.tsv", ["a\t1.0\t2.0"])
        out = tmp_path / "labels.jsonl"
        assert run("labels", "--segments", segments, "--audio-len", 4, "--out", out) == 0
        record = json.loads(out.read_text().splitlines()[0])
        assert record["valid"] == 100
        assert len(record["labels"]) == 500
        assert sum(record["labels"]) == 25

    def test_audio_length_table(self, tmp_path):
        segments = _text(tmp_path / "oracle.tsv", ["a\t1.0\t2.0", "b\t0.0\t30.0"])
        lengths = _text(tmp_path / "lengths.tsv", ["a\t4.0", "b\t30.0"])
        out = tmp_path / "labels.jsonl"
        assert run("labels", "--segments", segments, "--audio-lengths", lengths, "--out", out) == 0
        assert len(out.read_text().splitlines()) == 3

    def test_needs_audio_length(self, tmp_path, capsys):
        segments = _text(tmp_path / "oracle.tsv", ["a\t1.0\t2.0"])
        assert run("labels", "--segments", segments, "--out", tmp_path / "l.jsonl") == 1
        assert "No audio length" in capsys.readouterr().err


class TestEval:
    def test_wer(self, tmp_path, capsys):
        ref = _text(tmp_path / "ref.txt", ["a b c"])
        hyp = _text(tmp_path / "hyp.txt", ["a x c d"])
        assert run("eval", "wer", "--ref", ref, "--hyp", hyp) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["wer"] == 2 / 3
        assert report["resegmented"] is False

    def test_line_mismatch_needs_resegment(self, tmp_path, capsys):
        ref = _text(tmp_path / "ref.txt", ["the cat sat", "on the mat"])
        hyp = _text(tmp_path / "hyp.txt", ["the cat sat on the mat"])
        assert run("eval", "wer", "--ref", ref, "--hyp", hyp) == 1
        assert "--resegment" in capsys.readouterr().err
        assert run("eval", "wer", "--ref", ref, "--hyp", hyp, "--resegment") == 0
        assert json.loads(capsys.readouterr().out)["wer"] == 0.0

    def test_report_file(self, tmp_path):
        ref = _text(tmp_path / "ref.txt", ["a b c"])
        out = tmp_path / "reports" / "wer.json"
        assert run("eval", "wer", "--ref", ref, "--hyp", ref, "--out", out) == 0
        assert json.loads(out.read_text())["wer"] == 0.0
        manifest = json.loads(manifest_path(out).read_text())
        assert manifest["command"] == "eval wer"
        assert str(ref) in manifest["inputs"]

    @pytest.mark.parametrize("metric", ["wer", "punct-f1", "bleu"])
    def test_report_file_gets_manifest(self, tmp_path, metric):
        ref = _text(tmp_path / "ref.txt", ["the cat sat ."])
        out = tmp_path / f"{metric}.json"
        assert run("eval", metric, "--ref", ref, "--hyp", ref, "--out", out) == 0
        assert json.loads(manifest_path(out).read_text())["command"] == f"eval {metric}"

    def test_stdout_report_has_no_manifest(self, tmp_path):
        ref = _text(tmp_path / "ref.txt", ["a b c"])
        assert run("eval", "wer", "--ref", ref, "--hyp", ref) == 0
        assert list(tmp_path.glob("*.manifest.json")) == []

    def test_punct_f1(self, tmp_path, capsys):
        ref = _text(tmp_path / "ref.txt", ["hello , world ."])
        hyp = _text(tmp_path / "hyp.txt", ["hello world ."])
        assert run("eval", "punct-f1", "--ref", ref, "--hyp", hyp) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["f1"] == 0.5
        assert report["marks"][","]["fn"] == 1

    def test_bleu(self, tmp_path, capsys):
        ref = _text(tmp_path / "ref.txt", ["the cat sat on the mat"])
        assert run("eval", "bleu", "--ref", ref, "--hyp", ref) == 0
        assert json.loads(capsys.readouterr().out)["bleu"] == pytest.approx(100.0)

    def test_bleu_identity_on_short_lines(self, tmp_path, capsys):
        ref = _text(tmp_path / "ref.txt", ["the cat sat", "hello"])
        assert run("eval", "bleu", "--ref", ref, "--hyp", ref) == 0
        assert json.loads(capsys.readouterr().out)["bleu"] == pytest.approx(100.0)
        assert run("eval", "bleu", "--ref", ref, "--hyp", ref, "--strict-order") == 0
        assert json.loads(capsys.readouterr().out)["bleu"] == 0.0

    def test_resegment(self, tmp_path, capsys):
        ref = _text(tmp_path / "ref.txt", ["a b", "c d"])
        hyp = _text(tmp_path / "hyp.txt", ["a x c d"])
        out = tmp_path / "realigned.txt"
        assert run("eval", "resegment", "--ref", ref, "--hyp", hyp, "--out", out) == 0
        assert out.read_text().splitlines() == ["a x", "c d"]
        assert json.loads(capsys.readouterr().out)["cost"] == 1

    def test_boundary_f1(self, tmp_path, capsys):
        oracle = _text(tmp_path / "oracle.tsv", ["a\t1.0\t3.1"])
        predicted = _text(tmp_path / "pred.tsv", ["a\t1.02\t3.0"])
        assert run("eval", "boundary-f1", "--ref", oracle, "--hyp", predicted) == 0
        assert json.loads(capsys.readouterr().out)["f1"] == 1.0

    def test_boundary_f1_report_file(self, tmp_path):
        oracle = _text(tmp_path / "oracle.tsv", ["a\t1.0\t3.1"])
        out = tmp_path / "boundary.json"
        assert run("eval", "boundary-f1", "--ref", oracle, "--hyp", oracle, "--out", out) == 0
        assert json.loads(out.read_text())["f1"] == 1.0
        manifest = json.loads(manifest_path(out).read_text())
        assert manifest["config"]["tolerance_s"] == 0.12


class TestSweep:
    def test_boundary_scorer(self, corpus_files, tmp_path, capsys):
        probs, oracle = corpus_files
        out = tmp_path / "sweep.json"
        assert run("sweep", "--probs", probs, "--max-lens", "8,10,20", "--scorer", "boundary-f1",
                   "--oracle", oracle, "--out", out, "--workers", 2) == 0
        table = capsys.readouterr().out
        assert "boundary-f1" in table.splitlines()[0]
        report = json.loads(out.read_text())
        assert [row["maxlen_s"] for row in report["rows"]] == [8.0, 10.0, 20.0]
        assert report["best"]["boundary-f1"]["maxlen_s"] == 10.0
        assert manifest_path(out).exists()

    def test_external_scorer(self, corpus_files, tmp_path):
        probs, _ = corpus_files
        code = "import sys; print(sum(1 for line in open(sys.argv[1]) if line.strip()))"
        command = f"{shlex.quote(sys.executable)} -c {shlex.quote(code)} {{}}"
        out = tmp_path / "sweep.json"
        assert run("sweep", "--probs", probs, "--max-lens", "8,20", "--scorer-cmd", command,
                   "--scorer-name", "count", "--workdir", tmp_path / "work", "--out", out) == 0
        report = json.loads(out.read_text())
        for row in report["rows"]:
            assert row["metrics"]["count"] == row["stats"]["count"]
        assert (tmp_path / "work" / "segments_maxlen_8.jsonl").exists()

    def test_needs_a_scorer(self, corpus_files, capsys):
        probs, _ = corpus_files
        assert run("sweep", "--probs", probs) == 1
        assert "--scorer" in capsys.readouterr().err

    def test_text_scorer_needs_references(self, corpus_files):
        probs, _ = corpus_files
        assert run("sweep", "--probs", probs, "--scorer", "builtin-wer") == 1

    def test_bad_grid(self, corpus_files):
        probs, _ = corpus_files
        assert run("sweep", "--probs", probs, "--max-lens", "8,x") == 2


class TestSynth:
    def test_writes_streams(self, tmp_path):
        segments = _text(tmp_path / "oracle.tsv", ["a\t1.0\t3.0", "b\t2.0\t5.0"])
        out = tmp_path / "synth.jsonl"
        assert run("synth", "--segments", segments, "--audio-len", 10, "--out", out) == 0
        streams = read_probabilities(out)
        assert [s.audio_id for s in streams] == ["a", "b"]
        assert streams[0].num_frames == 250

    def test_seeded(self, tmp_path):
        segments = _text(tmp_path / "oracle.tsv", ["a\t1.0\t3.0"])
        one, two = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
        assert run("synth", "--segments", segments, "--audio-len", 10, "--seed", 3, "--out", one) == 0
        assert run("synth", "--segments", segments, "--audio-len", 10, "--seed", 3, "--out", two) == 0
        assert one.read_bytes() == two.read_bytes()


def test_stats(tmp_path, capsys):
    segments = _text(tmp_path / "s.tsv", ["a\t0.0\t2.0", "a\t3.0\t5.0", "b\t0.0\t4.0"])
    assert run("stats", "--segments", segments, "--per-audio") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["corpus"]["count"] == 3
    assert report["audios"]["a"]["mean_s"] == 2.0
    assert report["audios"]["b"]["max_s"] == 4.0


def test_stats_report_file(tmp_path):
    segments = _text(tmp_path / "s.tsv", ["a\t0.0\t2.0"])
    out = tmp_path / "stats.json"
    assert run("stats", "--segments", segments, "--out", out) == 0
    assert json.loads(out.read_text())["corpus"]["count"] == 1
    manifest = json.loads(manifest_path(out).read_text())
    assert manifest["command"] == "stats"
    assert str(segments) in manifest["inputs"]


def test_render(probs_file, tmp_path):
    segments = _text(tmp_path / "s.tsv", ["talk\t0.94\t3.06"])
    out = tmp_path / "timeline.png"
    assert run("render", "--probs", probs_file, "--segments", segments, "--oracle", segments, "--out", out) == 0
    with Image.open(out) as image:
        assert image.size == (200, 156)
    manifest = json.loads(manifest_path(out).read_text())
    assert manifest["command"] == "render"
    assert manifest["config"]["audio_id"] == "talk"
    assert str(probs_file) in manifest["inputs"]


def test_render_unknown_audio(probs_file, tmp_path, capsys):
    segments = _text(tmp_path / "s.tsv", ["talk\t0.94\t3.06"])
    assert run("render", "--probs", probs_file, "--segments", segments, "--audio-id", "other",
               "--out", tmp_path / "t.png") == 1
    assert "not found" in capsys.readouterr().err
