import math
import time

import numpy as np
import pytest

from speech_segmenter.boundaries import boundary_f1
from speech_segmenter.chunker import split_windows
from speech_segmenter.config import DEFAULT_MAXLEN_GRID, SegmenterConfig
from speech_segmenter.probabilities import LabelSequence, validate_probs
from speech_segmenter.segmenters import (
    binarize,
    discard_short,
    expand,
    runs_to_segments,
    segment_audio,
    segment_fixed,
    segment_pdac,
    segment_proposed,
    segment_pthr,
    segment_windows,
    split_long,
)
from speech_segmenter.segments import Segment, SegmentSet


def _assert_valid(s: SegmentSet, audio_len_s: float):
    for seg in s:
        assert 0.0 <= seg.start_s < seg.end_s <= audio_len_s + 1e-9
    for prev, cur in zip(s.segments, s.segments[1:]):
        assert prev.start_s <= cur.start_s
        assert prev.end_s <= cur.start_s


def _stream(values, audio_id="a"):
    return validate_probs(np.asarray(values, dtype=np.float64), 0.04, audio_id)


def _two_dips():
    """20 s of speech with dips at frames 200 (0.1) and 350 (0.2)."""
    values = np.full(500, 0.9)
    values[200] = 0.1
    values[350] = 0.2
    return _stream(values)


class TestBinarizeAndRuns:
    def test_threshold_is_strict(self):
        assert binarize(_stream([0.4, 0.5, 0.6]), 0.5).labels.tolist() == [0, 0, 1]

    def test_runs(self):
        labels = LabelSequence("a", 0.04, np.array([1, 1, 0, 0, 1, 0, 1, 1, 1]))
        s = runs_to_segments(labels)
        assert s.pairs() == pytest.approx([(0.0, 0.08), (0.16, 0.2), (0.24, 0.36)])
        assert s.audio_len_s == pytest.approx(0.36)

    def test_no_runs(self):
        assert len(runs_to_segments(LabelSequence("a", 0.04, np.zeros(10, dtype=np.int8)))) == 0

    def test_discard_short_keeps_exact_minlen(self):
        labels = LabelSequence("a", 0.04, np.array([1] * 5 + [0] * 3 + [1] * 4))
        kept = discard_short(runs_to_segments(labels), 0.2)
        assert len(kept) == 1
        assert kept.segments[0].start_s == 0.0

    def test_discard_short_with_zero_minlen(self):
        s = SegmentSet.from_pairs("a", [(0.0, 0.04)])
        assert discard_short(s, 0.0) is s


class TestSplitLong:
    def test_splits_at_minimum(self):
        probs = _two_dips()
        parts, trace = split_long(SegmentSet.from_pairs("a", [(0.0, 20.0)]), probs, 10.0)
        assert parts.pairs() == pytest.approx([(0.0, 8.0), (8.0, 14.0), (14.0, 20.0)])
        assert [r.t_hat for r in trace] == [200, 350]
        assert [r.p_min for r in trace] == [0.1, 0.2]
        assert trace[0].to_dict() == {"seg_start": 0.0, "seg_end": 20.0, "t_hat_s": 8.0, "p_min": 0.1}

    def test_short_segments_untouched(self):
        s = SegmentSet.from_pairs("a", [(1.0, 5.0), (6.0, 9.5)])
        parts, trace = split_long(s, _two_dips(), 10.0)
        assert parts.pairs() == s.pairs()
        assert trace == []

    def test_first_frame_is_never_the_split(self):
        values = np.full(500, 0.9)
        values[0] = 0.0
        values[300] = 0.3
        parts, trace = split_long(SegmentSet.from_pairs("a", [(0.0, 20.0)]), _stream(values), 15.0)
        assert trace[0].t_hat == 300

    def test_ties_go_to_earliest_frame(self):
        values = np.full(500, 0.9)
        values[[120, 240, 360]] = 0.2
        _, trace = split_long(SegmentSet.from_pairs("a", [(0.0, 20.0)]), _stream(values), 15.0)
        assert trace[0].t_hat == 120

    def test_segment_beyond_stream(self):
        with pytest.raises(ValueError, match="extends beyond"):
            split_long(SegmentSet.from_pairs("a", [(0.0, 25.0)]), _two_dips(), 10.0)

    def test_tiling_is_lossless(self):
        gen = np.random.default_rng(2024)
        stride = 0.04
        for _ in range(10_000):
            num_frames = int(gen.integers(20, 1500))
            probs = validate_probs(gen.uniform(0, 1, num_frames), stride, "t")
            duration = num_frames * stride
            start = float(gen.uniform(0, duration * 0.5))
            end = float(gen.uniform(start + stride, duration))
            maxlen = float(gen.uniform(2 * stride, 20.0))
            seg = Segment(start, end)

            parts, trace = split_long(SegmentSet("t", (seg,)), probs, maxlen)

            assert parts.segments[0].start_s == seg.start_s
            assert parts.segments[-1].end_s == seg.end_s
            for prev, cur in zip(parts.segments, parts.segments[1:]):
                assert prev.end_s == cur.start_s
            assert len(parts) == len(trace) + 1
            for record in trace:
                assert record.segment.start_s < record.t_hat_s < record.segment.end_s
            for part in parts:
                first = int(math.floor(part.start_s / stride + 1e-9))
                last = int(math.ceil(part.end_s / stride - 1e-9))
                assert part.duration <= maxlen + 1e-9 or last - first < 2


class TestExpand:
    def test_conflict_meets_at_gap_midpoint(self):
        s = SegmentSet.from_pairs("a", [(0.0, 1.0), (1.04, 2.0)])
        assert expand(s, 0.06, 10.0).pairs() == pytest.approx([(0.0, 1.02), (1.02, 2.06)])

    def test_clips_to_audio(self):
        s = SegmentSet.from_pairs("a", [(0.03, 9.98)], audio_len_s=10.0)
        out = expand(s, 0.06)
        assert out.pairs() == [(0.0, 10.0)]
        assert out.audio_len_s == 10.0

    def test_free_neighbours_grow_by_full_amount(self):
        s = SegmentSet.from_pairs("a", [(1.0, 2.0), (3.0, 4.0)])
        assert expand(s, 0.06, 10.0).pairs() == pytest.approx([(0.94, 2.06), (2.94, 4.06)])

    def test_zero_expansion(self):
        s = SegmentSet.from_pairs("a", [(1.0, 2.0)])
        assert expand(s, 0.0, 5.0).pairs() == [(1.0, 2.0)]

    def test_touching_segments_stay_touching(self):
        s = SegmentSet.from_pairs("a", [(1.0, 2.0), (2.0, 3.0)])
        assert expand(s, 0.06, 5.0).pairs() == pytest.approx([(0.94, 2.0), (2.0, 3.06)])


class TestProposed:
    def test_single_run(self):
        probs = _stream([0.0] * 25 + [0.9] * 50 + [0.0] * 25)
        segments, trace = segment_proposed(probs, SegmenterConfig(maxlen_s=20))
        assert segments.pairs() == pytest.approx([(0.94, 3.06)])
        assert segments.audio_len_s == pytest.approx(4.0)
        assert trace == []

    def test_short_run_is_discarded(self):
        probs = _stream([0.0] * 10 + [0.9] * 4 + [0.0] * 10 + [0.9] * 30 + [0.0] * 10)
        segments, _ = segment_proposed(probs, SegmenterConfig(maxlen_s=20, expand_s=0.0))
        assert segments.pairs() == pytest.approx([(0.96, 2.16)])

    def test_long_run_is_split(self):
        segments, trace = segment_proposed(_two_dips(), SegmenterConfig(maxlen_s=10, expand_s=0.0))
        # Frames 200 and 350 fall below the threshold, so there are three runs.
        assert len(segments) == 3
        assert trace == []

    def test_empty_stream(self):
        segments, _ = segment_proposed(_stream([]), SegmenterConfig(maxlen_s=20))
        assert len(segments) == 0

    def test_constant_stream_peels_earliest_frames(self):
        # Every interior frame ties, so each split takes the earliest one until
        # the remaining part fits.
        segments, trace = segment_proposed(_stream([1.0] * 500), SegmenterConfig(maxlen_s=10, expand_s=0.0))
        assert len(segments) == 251
        assert len(trace) == 250
        assert all(seg.duration == pytest.approx(0.04) for seg in segments.segments[:250])
        assert segments.pairs()[-1] == pytest.approx((10.0, 20.0))
        assert max(segments.durations()) <= 10.0 + 1e-9
        assert segments.pairs()[0] == pytest.approx((0.0, 0.04))


class TestPdac:
    def _stream(self):
        values = np.full(625, 0.9)
        values[:25] = 0.1
        values[600:] = 0.1
        values[300] = 0.3
        return _stream(values)

    def test_splits_and_trims(self):
        config = SegmenterConfig(maxlen_s=15, algorithm="pdac", expand_s=0.0)
        assert segment_pdac(self._stream(), config).pairs() == pytest.approx([(1.0, 12.0), (12.04, 24.0)])

    def test_expansion_after_splitting(self):
        config = SegmenterConfig(maxlen_s=15, algorithm="pdac")
        assert segment_pdac(self._stream(), config).pairs() == pytest.approx([(0.94, 12.02), (12.02, 24.06)])

    def test_fits_without_split(self):
        config = SegmenterConfig(maxlen_s=30, algorithm="pdac", expand_s=0.0)
        assert segment_pdac(self._stream(), config).pairs() == pytest.approx([(1.0, 24.0)])

    def test_nothing_above_threshold(self):
        config = SegmenterConfig(maxlen_s=15, algorithm="pdac")
        assert len(segment_pdac(_stream([0.2] * 100), config)) == 0

    def test_short_blip_is_discarded(self):
        config = SegmenterConfig(maxlen_s=15, algorithm="pdac")
        assert len(segment_pdac(_stream([0.1] * 50 + [0.9] * 2 + [0.1] * 50), config)) == 0

    def test_silence_inside_a_candidate_is_not_a_boundary(self):
        # Candidates span from the first to the last frame above threshold.
        config = SegmenterConfig(maxlen_s=15, algorithm="pdac", expand_s=0.0)
        values = [0.9] * 100 + [0.1] * 100 + [0.9] * 100
        assert segment_pdac(_stream(values), config).pairs() == pytest.approx([(0.0, 12.0)])


class TestPthr:
    def test_chops_into_maxlen_pieces(self):
        probs = _stream([0.9] * 625)
        config = SegmenterConfig(maxlen_s=10, algorithm="pthr", expand_s=0.0)
        assert segment_pthr(probs, config).pairs() == pytest.approx([(0.0, 10.0), (10.0, 20.0), (20.0, 25.0)])

    def test_short_remainder_is_kept(self):
        probs = _stream([0.9] * 503)
        config = SegmenterConfig(maxlen_s=10, algorithm="pthr", expand_s=0.0)
        pairs = segment_pthr(probs, config).pairs()
        assert len(pairs) == 3
        assert pairs[-1] == pytest.approx((20.0, 20.12))

    def test_exact_multiple_has_no_empty_piece(self):
        probs = _stream([0.9] * 500)
        config = SegmenterConfig(maxlen_s=10, algorithm="pthr", expand_s=0.0)
        assert segment_pthr(probs, config).pairs() == pytest.approx([(0.0, 10.0), (10.0, 20.0)])


class TestFixed:
    def test_covers_audio(self):
        assert segment_fixed(45, 20, "a").pairs() == [(0.0, 20.0), (20.0, 40.0), (40.0, 45.0)]

    def test_rejects_bad_piece(self):
        with pytest.raises(ValueError, match="Piece length"):
            segment_fixed(45, 0)

    def test_empty_audio(self):
        assert len(segment_fixed(0, 20)) == 0

    def test_dispatch_uses_stream_duration(self):
        probs = _stream([0.1] * 1125)
        segments, trace = segment_audio(probs, SegmenterConfig(maxlen_s=20, algorithm="fixed"))
        assert segments.pairs() == pytest.approx([(0.0, 20.0), (20.0, 40.0), (40.0, 45.0)])
        assert trace == []


def test_segment_windows_merges_first():
    windows = split_windows(38, 20, 2)
    first = [0.1] * 25 + [0.9] * 475
    second = [0.9] * 450 + [0.1] * 50
    segments, _ = segment_windows([first, second], windows, 0.04, SegmenterConfig(maxlen_s=40, expand_s=0.0), "w")
    assert segments.audio_id == "w"
    assert segments.pairs() == pytest.approx([(1.0, 36.0)])


class TestInvariantsOnRandomStreams:
    def test_all_algorithms(self, stream_factory):
        gen = np.random.default_rng(7)
        low, high = math.log(10 / 0.04), math.log(30 * 60 / 0.04)
        started = time.perf_counter()
        for i in range(1000):
            num_frames = int(math.exp(gen.uniform(low, high)))
            probs = stream_factory(gen, num_frames, f"r{i}")
            maxlen = float(gen.choice(DEFAULT_MAXLEN_GRID))
            threshold = float(gen.uniform(0.2, 0.8))
            base = SegmenterConfig(maxlen_s=maxlen, threshold=threshold)

            raw, _ = segment_proposed(probs, base.replace(expand_s=0.0))
            _assert_valid(raw, probs.duration_s)
            assert all(seg.duration <= maxlen + 1e-9 for seg in raw)

            for algorithm in ("proposed", "pdac", "pthr", "fixed"):
                segments, _ = segment_audio(probs, base.replace(algorithm=algorithm))
                _assert_valid(segments, probs.duration_s)
                assert all(seg.duration <= maxlen + 2 * base.expand_s + 1e-9 for seg in segments)
        assert time.perf_counter() - started < 60


def test_recovers_synthetic_boundaries(synthetic_corpus):
    oracles, streams = synthetic_corpus(50, seed=17, sigma=0.05, slope=3)
    config = SegmenterConfig(maxlen_s=20)
    predicted = {}
    for stream in streams:
        predicted[stream.audio_id], _ = segment_audio(stream, config)
    report = boundary_f1(predicted, {o.audio_id: o for o in oracles}, tolerance_s=0.12)
    assert report.reference == 50 * 10 * 2
    assert report.recall >= 0.95


def test_one_hour_under_a_second(stream_factory):
    probs = stream_factory(np.random.default_rng(3), 90_000, "hour")
    config = SegmenterConfig(maxlen_s=20)
    started = time.perf_counter()
    segment_audio(probs, config)
    assert time.perf_counter() - started < 1.0
