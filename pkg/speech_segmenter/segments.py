"""
Segments

Time segments of one audio, ordered segment sets, and segment statistics.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class Segment:
    """A contiguous span of audio in seconds, ``0 <= start_s < end_s``."""

    start_s: float
    end_s: float

    def __post_init__(self):
        if not (0.0 <= self.start_s < self.end_s):
            raise ValueError(
                f"Invalid segment [{self.start_s}, {self.end_s}]\n"
                f"Segments need 0 <= start < end"
            )

    @property
    def duration(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class SegmentSet:
    """
    Ordered, pairwise non-overlapping segments of one audio.

    Args:
        audio_id: Identifier of the audio the segments belong to
        segments: Segments sorted by start time
        audio_len_s: Optional total duration; when set, every segment must
            lie within [0, audio_len_s]

    Raises:
        ValueError: If segments are unsorted, overlap, or leave the audio
    """

    audio_id: str
    segments: Tuple[Segment, ...] = ()
    audio_len_s: Optional[float] = None

    def __post_init__(self):
        # Accept any sequence but store a tuple.
        object.__setattr__(self, "segments", tuple(self.segments))

        for i in range(1, len(self.segments)):
            prev, cur = self.segments[i - 1], self.segments[i]
            if cur.start_s < prev.start_s:
                raise ValueError(
                    f"Segments of '{self.audio_id}' are not sorted at index {i}: "
                    f"{cur.start_s} < {prev.start_s}"
                )
            if prev.end_s > cur.start_s:
                raise ValueError(
                    f"Segments of '{self.audio_id}' overlap at index {i}: "
                    f"[{prev.start_s}, {prev.end_s}] and [{cur.start_s}, {cur.end_s}]"
                )

        if self.audio_len_s is not None:
            if self.audio_len_s < 0:
                raise ValueError(f"Negative audio length for '{self.audio_id}': {self.audio_len_s}")
            if self.segments and self.segments[-1].end_s > self.audio_len_s:
                raise ValueError(
                    f"Segment [{self.segments[-1].start_s}, {self.segments[-1].end_s}] of "
                    f"'{self.audio_id}' ends after the audio ({self.audio_len_s} s)"
                )

    @classmethod
    def from_pairs(
        cls,
        audio_id: str,
        pairs: Iterable[Tuple[float, float]],
        audio_len_s: Optional[float] = None,
    ) -> "SegmentSet":
        """Build a set from ``(start, end)`` pairs."""
        return cls(audio_id, tuple(Segment(s, e) for s, e in pairs), audio_len_s)

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def pairs(self) -> List[Tuple[float, float]]:
        return [(s.start_s, s.end_s) for s in self.segments]

    def durations(self) -> List[float]:
        return [s.duration for s in self.segments]

    def with_segments(self, segments: Sequence[Segment]) -> "SegmentSet":
        """Same audio, new segments."""
        return SegmentSet(self.audio_id, tuple(segments), self.audio_len_s)


@dataclass(frozen=True)
class SegmentStats:
    """
    Duration statistics of a segmentation.

    ``histogram[i]`` counts segments with duration in [i, i + 1) seconds.
    Mean, min, max and percentiles are None when there are no segments.
    """

    count: int
    total_s: float
    mean_s: Optional[float] = None
    min_s: Optional[float] = None
    max_s: Optional[float] = None
    percentiles: Dict[str, float] = field(default_factory=dict)
    histogram: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "count": self.count,
            "total_s": self.total_s,
            "mean_s": self.mean_s,
            "min_s": self.min_s,
            "max_s": self.max_s,
            "percentiles": dict(self.percentiles),
            "histogram": list(self.histogram),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SegmentStats":
        return cls(
            count=int(data["count"]),
            total_s=float(data["total_s"]),
            mean_s=data.get("mean_s"),
            min_s=data.get("min_s"),
            max_s=data.get("max_s"),
            percentiles={k: float(v) for k, v in data.get("percentiles", {}).items()},
            histogram=tuple(int(c) for c in data.get("histogram", ())),
        )


def segment_stats(s: SegmentSet) -> SegmentStats:
    """
    Compute duration statistics for one segment set.

    Args:
        s: Segment set

    Returns:
        SegmentStats with count, total, mean, min, max, p50/p90/p99 and a
        1-second-bin histogram

    Example:
        >>> stats = segment_stats(SegmentSet.from_pairs("a", [(0, 2), (3, 5)]))
        >>> stats.count, stats.mean_s, stats.total_s
        (2, 2.0, 4.0)
    """
    return stats_from_durations(s.durations())


def corpus_segment_stats(sets: Iterable[SegmentSet]) -> SegmentStats:
    """Pool the segments of several audios into one set of statistics."""
    durations: List[float] = []
    for s in sets:
        durations.extend(s.durations())
    return stats_from_durations(durations)


def stats_from_durations(durations: Sequence[float]) -> SegmentStats:
    """Statistics over raw segment durations (seconds)."""
    if len(durations) == 0:
        return SegmentStats(count=0, total_s=0.0)

    values = np.asarray(durations, dtype=np.float64)
    # fsum keeps total_s within rounding of the exact sum.
    total = math.fsum(durations)
    p50, p90, p99 = np.percentile(values, [50, 90, 99])

    bins = np.floor(values).astype(np.int64)
    histogram = np.bincount(bins, minlength=int(bins.max()) + 1)

    return SegmentStats(
        count=len(values),
        total_s=total,
        mean_s=total / len(values),
        min_s=float(values.min()),
        max_s=float(values.max()),
        percentiles={"p50": float(p50), "p90": float(p90), "p99": float(p99)},
        histogram=tuple(int(c) for c in histogram),
    )
