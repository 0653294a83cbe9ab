import pytest
from hypothesis import given
from hypothesis import strategies as st

from speech_segmenter.segments import (
    Segment,
    SegmentSet,
    SegmentStats,
    corpus_segment_stats,
    segment_stats,
)


class TestSegment:
    def test_duration(self):
        assert Segment(1.0, 3.5).duration == 2.5

    @pytest.mark.parametrize("start,end", [(2.0, 2.0), (3.0, 2.0), (-0.1, 1.0)])
    def test_rejects_invalid_spans(self, start, end):
        with pytest.raises(ValueError, match="Invalid segment"):
            Segment(start, end)


class TestSegmentSet:
    def test_touching_segments_are_allowed(self):
        s = SegmentSet.from_pairs("a", [(0.0, 1.0), (1.0, 2.0)])
        assert len(s) == 2
        assert s.pairs() == [(0.0, 1.0), (1.0, 2.0)]

    def test_rejects_overlap(self):
        with pytest.raises(ValueError, match="overlap"):
            SegmentSet.from_pairs("a", [(0.0, 1.5), (1.0, 2.0)])

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError, match="not sorted"):
            SegmentSet.from_pairs("a", [(2.0, 3.0), (0.0, 1.0)])

    def test_rejects_segment_after_audio_end(self):
        with pytest.raises(ValueError, match="ends after the audio"):
            SegmentSet.from_pairs("a", [(0.0, 5.0)], audio_len_s=4.0)

    def test_with_segments_keeps_audio(self):
        s = SegmentSet.from_pairs("a", [(0.0, 1.0)], audio_len_s=4.0)
        t = s.with_segments([Segment(2.0, 3.0)])
        assert t.audio_id == "a"
        assert t.audio_len_s == 4.0
        assert t.pairs() == [(2.0, 3.0)]


class TestSegmentStats:
    def test_basic_counts(self):
        stats = segment_stats(SegmentSet.from_pairs("a", [(0, 2), (3, 5)]))
        assert stats.count == 2
        assert stats.total_s == 4.0
        assert stats.mean_s == 2.0
        assert stats.min_s == stats.max_s == 2.0
        assert stats.percentiles["p50"] == 2.0

    def test_histogram_uses_one_second_bins(self):
        stats = segment_stats(SegmentSet.from_pairs("a", [(0, 0.5), (1, 2.5), (3, 4.9), (5, 8.2)]))
        assert stats.histogram == (1, 2, 0, 1)

    def test_empty_set(self):
        stats = segment_stats(SegmentSet("a"))
        assert stats.count == 0
        assert stats.total_s == 0.0
        assert stats.mean_s is None
        assert stats.histogram == ()

    def test_corpus_pools_segments(self):
        a = SegmentSet.from_pairs("a", [(0, 2)])
        b = SegmentSet.from_pairs("b", [(0, 4)])
        stats = corpus_segment_stats([a, b])
        assert stats.count == 2
        assert stats.mean_s == 3.0
        assert stats.max_s == 4.0

    def test_dict_round_trip(self):
        stats = segment_stats(SegmentSet.from_pairs("a", [(0, 2), (3, 7.5)]))
        assert SegmentStats.from_dict(stats.to_dict()) == stats

    @given(st.lists(st.floats(0.01, 60.0), min_size=1, max_size=50))
    def test_total_matches_count_times_mean(self, durations):
        pairs, t = [], 0.0
        for d in durations:
            pairs.append((t, t + d))
            t += d + 0.1
        stats = segment_stats(SegmentSet.from_pairs("a", pairs))
        assert stats.count == len(durations)
        assert stats.min_s - 1e-9 <= stats.mean_s <= stats.max_s + 1e-9
        assert sum(stats.histogram) == len(durations)
        assert stats.total_s == pytest.approx(stats.mean_s * stats.count)
