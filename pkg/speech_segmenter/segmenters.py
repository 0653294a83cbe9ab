"""
Segmenters

Turn a merged probability stream into a SegmentSet.

Algorithms:
    proposed: binarize -> runs -> discard short -> split long at the
        probability minimum -> expand
    pdac: probabilistic divide-and-conquer; recursively split the trimmed
        stream at its probability minimum until parts fit [minlen, maxlen]
    pthr: binarize -> runs -> discard short -> chop long runs into
        maxlen-sized pieces -> expand
    fixed: contiguous pieces of a fixed length, ignoring probabilities
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .chunker import Window, merge_window_probs
from .config import SegmenterConfig
from .probabilities import FrameProbabilities, LabelSequence
from .segments import Segment, SegmentSet

logger = logging.getLogger(__name__)

# Durations are compared with this slack so that grid arithmetic
# (e.g. 5 * 0.04 != 0.2) doesn't flip a comparison.
DURATION_EPS = 1e-9


@dataclass(frozen=True)
class SplitRecord:
    """One split made by split_long: the segment, the split frame t_hat and p[t_hat]."""

    segment: Segment
    t_hat: int
    t_hat_s: float
    p_min: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seg_start": round(self.segment.start_s, 3),
            "seg_end": round(self.segment.end_s, 3),
            "t_hat_s": round(self.t_hat_s, 3),
            "p_min": self.p_min,
        }


SplitTrace = List[SplitRecord]


class _RangeArgmin:
    """
    Sparse table answering argmin over p[lo:hi] in O(1).

    Ties resolve to the earliest frame.
    """

    def __init__(self, values: np.ndarray):
        self.values = values
        n = values.shape[0]
        self.levels = [np.arange(n)]
        width = 2
        while width <= n:
            prev = self.levels[-1]
            half = width // 2
            left = prev[: n - width + 1]
            right = prev[half: half + n - width + 1]
            self.levels.append(np.where(values[right] < values[left], right, left))
            width *= 2

    def argmin(self, lo: int, hi: int) -> int:
        level = (hi - lo).bit_length() - 1
        i = int(self.levels[level][lo])
        j = int(self.levels[level][hi - (1 << level)])
        return j if self.values[j] < self.values[i] else i


def _to_frames(segment: Segment, stride_s: float) -> Tuple[int, int]:
    first = int(math.floor(segment.start_s / stride_s + DURATION_EPS))
    last = int(math.ceil(segment.end_s / stride_s - DURATION_EPS))
    return first, last


def binarize(probs: FrameProbabilities, threshold: float) -> LabelSequence:
    """
    l_t = 1 iff p_t > threshold (strict).

    Example:
        >>> binarize(validate_probs([0.4, 0.5, 0.6]), 0.5).labels.tolist()
        [0, 0, 1]
    """
    return LabelSequence(probs.audio_id, probs.stride_s, (probs.probs > threshold).astype(np.int8))


def _run_bounds(labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Start (inclusive) and end (exclusive) frames of every maximal run of 1s."""
    padded = np.concatenate(([0], labels.astype(np.int8), [0]))
    edges = np.diff(padded)
    return np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)


def runs_to_segments(labels: LabelSequence) -> SegmentSet:
    """
    One segment per maximal run of positive labels.

    A run over frames [a, b] becomes [a * stride, (b + 1) * stride].

    Example:
        >>> labels = LabelSequence("a", 0.04, np.array([0, 1, 1, 0, 1]))
        >>> [(round(s, 2), round(e, 2)) for s, e in runs_to_segments(labels).pairs()]
        [(0.04, 0.12), (0.16, 0.2)]
    """
    stride = labels.stride_s
    starts, ends = _run_bounds(labels.labels)
    segments = tuple(Segment(a * stride, b * stride) for a, b in zip(starts.tolist(), ends.tolist()))
    return SegmentSet(labels.audio_id, segments, labels.num_frames * stride)


def discard_short(s: SegmentSet, minlen_s: float) -> SegmentSet:
    """Keep exactly the segments lasting at least minlen_s."""
    if minlen_s <= 0:
        return s
    return s.with_segments([seg for seg in s if seg.duration >= minlen_s - DURATION_EPS])


def split_long(
    s: SegmentSet,
    probs: FrameProbabilities,
    maxlen_s: float,
) -> Tuple[SegmentSet, SplitTrace]:
    """
    Recursively split segments longer than maxlen_s at their probability minimum.

    The split frame t_hat is the argmin of p over the segment's frames
    excluding its first one (earliest frame on ties); it starts the right
    part, so no audio is dropped. Parts keep splitting until every part is
    at most maxlen_s long.

    Args:
        s: Segments to split
        probs: Probability stream covering every segment
        maxlen_s: Maximum segment duration

    Returns:
        Tuple of (split segments, trace of every split made)

    Raises:
        ValueError: If a segment extends beyond the probability stream

    Example:
        >>> parts, trace = split_long(segments, probs, 10.0)
        >>> max(seg.duration for seg in parts) <= 10.0
        True
    """
    stride = probs.stride_s
    values = probs.probs
    finder: Optional[_RangeArgmin] = None

    out: List[Segment] = []
    trace: SplitTrace = []
    for seg in s:
        first, last = _to_frames(seg, stride)
        if last > probs.num_frames:
            raise ValueError(
                f"Segment [{seg.start_s}, {seg.end_s}] of '{s.audio_id}' extends beyond the "
                f"probability stream ({probs.num_frames} frames, {probs.duration_s:.3f} s)"
            )
        if seg.duration <= maxlen_s + DURATION_EPS:
            out.append(seg)
            continue

        if finder is None:
            finder = _RangeArgmin(values)

        # Explicit stack, left part on top, so parts come out in time order.
        stack = [(seg.start_s, seg.end_s, first, last)]
        while stack:
            start, end, a, b = stack.pop()
            if end - start <= maxlen_s + DURATION_EPS or b - a < 2:
                out.append(Segment(start, end))
                continue
            t_hat = finder.argmin(a + 1, b)
            cut = t_hat * stride
            trace.append(SplitRecord(Segment(start, end), t_hat, cut, float(values[t_hat])))
            stack.append((cut, end, t_hat, b))
            stack.append((start, cut, a, t_hat))

    if trace:
        logger.debug(f"Made {len(trace)} splits in '{s.audio_id}' (maxlen {maxlen_s} s)")
    return s.with_segments(out), trace


def expand(
    s: SegmentSet,
    expand_s: float,
    audio_len_s: Optional[float] = None,
) -> SegmentSet:
    """
    Widen every segment by expand_s on each side.

    Results are clipped to [0, audio_len_s]. Where two widened neighbours
    would overlap, both are cut at the midpoint of the original gap.

    Args:
        s: Segments to widen
        expand_s: Padding per side in seconds
        audio_len_s: Audio duration; defaults to s.audio_len_s

    Returns:
        Widened SegmentSet

    Example:
        >>> s = SegmentSet.from_pairs("a", [(0.0, 1.0), (1.04, 2.0)])
        >>> [(round(a, 2), round(b, 2)) for a, b in expand(s, 0.06, 10.0).pairs()]
        [(0.0, 1.02), (1.02, 2.06)]
    """
    if audio_len_s is None:
        audio_len_s = s.audio_len_s
    if expand_s <= 0 or not s.segments:
        return SegmentSet(s.audio_id, s.segments, audio_len_s)

    starts = [max(0.0, seg.start_s - expand_s) for seg in s]
    ends = [seg.end_s + expand_s for seg in s]
    if audio_len_s is not None:
        ends = [min(end, audio_len_s) for end in ends]

    for i in range(1, len(starts)):
        if starts[i] < ends[i - 1]:
            mid = (s.segments[i - 1].end_s + s.segments[i].start_s) / 2.0
            ends[i - 1] = mid
            starts[i] = mid

    return SegmentSet(s.audio_id, tuple(Segment(a, b) for a, b in zip(starts, ends)), audio_len_s)


def segment_proposed(probs: FrameProbabilities, config: SegmenterConfig) -> Tuple[SegmentSet, SplitTrace]:
    """
    The proposed algorithm: binarize -> runs -> discard short -> split long -> expand.

    Example:
        >>> segments, trace = segment_proposed(probs, SegmenterConfig(maxlen_s=20))
    """
    labels = binarize(probs, config.threshold)
    candidates = discard_short(runs_to_segments(labels), config.minlen_s)
    parts, trace = split_long(candidates, probs, config.maxlen_s)
    return expand(parts, config.expand_s, probs.duration_s), trace


def segment_pdac(probs: FrameProbabilities, config: SegmenterConfig) -> SegmentSet:
    """
    Probabilistic divide-and-conquer.

    Starts from the whole stream trimmed to its first and last frame above
    the threshold. While a candidate is longer than maxlen_s it is split at
    its interior probability minimum, and both parts are trimmed of leading
    and trailing frames at or below the threshold. Parts shorter than
    minlen_s are discarded; parts within [minlen_s, maxlen_s] are accepted
    without further splitting. Accepted parts are then expanded.

    Returns:
        SegmentSet of accepted parts
    """
    stride = probs.stride_s
    values = probs.probs
    total = probs.num_frames
    above = values > config.threshold
    if not above.any():
        return SegmentSet(probs.audio_id, (), probs.duration_s)

    frames = np.arange(total)
    next_above = np.minimum.accumulate(np.where(above, frames, total)[::-1])[::-1]
    prev_above = np.maximum.accumulate(np.where(above, frames, -1))

    def trim(a: int, b: int) -> Optional[Tuple[int, int]]:
        a = int(next_above[a])
        if a >= b:
            return None
        return a, int(prev_above[b - 1]) + 1

    finder = _RangeArgmin(values)
    accepted: List[Tuple[int, int]] = []
    stack = [trim(0, total)]
    while stack:
        a, b = stack.pop()
        duration = (b - a) * stride
        if duration < config.minlen_s - DURATION_EPS:
            continue
        if duration <= config.maxlen_s + DURATION_EPS or b - a < 2:
            accepted.append((a, b))
            continue
        t_hat = finder.argmin(a + 1, b)
        for part in (trim(t_hat, b), trim(a, t_hat)):
            if part is not None:
                stack.append(part)

    segments = SegmentSet(
        probs.audio_id,
        tuple(Segment(a * stride, b * stride) for a, b in accepted),
        probs.duration_s,
    )
    return expand(segments, config.expand_s, probs.duration_s)


def _chop(segment: Segment, piece_s: float) -> List[Segment]:
    """Consecutive pieces of exactly piece_s; the last piece is the remainder."""
    cuts = [segment.start_s]
    k = 1
    while segment.start_s + k * piece_s < segment.end_s - DURATION_EPS:
        cuts.append(segment.start_s + k * piece_s)
        k += 1
    cuts.append(segment.end_s)
    return [Segment(a, b) for a, b in zip(cuts[:-1], cuts[1:])]


def segment_pthr(probs: FrameProbabilities, config: SegmenterConfig) -> SegmentSet:
    """
    Threshold baseline: binarize -> runs -> discard short -> chop long runs -> expand.

    Runs longer than maxlen_s are chopped into maxlen_s pieces; the
    remainder piece is kept even when it is shorter than minlen_s, since
    discarding happens before chopping.
    """
    labels = binarize(probs, config.threshold)
    candidates = discard_short(runs_to_segments(labels), config.minlen_s)
    pieces: List[Segment] = []
    for seg in candidates:
        if seg.duration > config.maxlen_s + DURATION_EPS:
            pieces.extend(_chop(seg, config.maxlen_s))
        else:
            pieces.append(seg)
    return expand(candidates.with_segments(pieces), config.expand_s, probs.duration_s)


def segment_fixed(audio_len_s: float, piece_s: float, audio_id: str = "") -> SegmentSet:
    """
    Contiguous fixed-length pieces covering the whole audio.

    Example:
        >>> segment_fixed(45, 20).pairs()
        [(0.0, 20.0), (20.0, 40.0), (40.0, 45.0)]
    """
    if piece_s <= 0:
        raise ValueError(f"Piece length must be positive, got {piece_s}")
    if audio_len_s <= 0:
        return SegmentSet(audio_id, (), max(audio_len_s, 0.0))
    return SegmentSet(audio_id, tuple(_chop(Segment(0.0, float(audio_len_s)), piece_s)), float(audio_len_s))


def segment_audio(probs: FrameProbabilities, config: SegmenterConfig) -> Tuple[SegmentSet, SplitTrace]:
    """
    Run the configured algorithm on one stream.

    Returns:
        Tuple of (segments, split trace); the trace is only filled by the
        proposed algorithm
    """
    if config.algorithm == "proposed":
        return segment_proposed(probs, config)
    if config.algorithm == "pdac":
        return segment_pdac(probs, config), []
    if config.algorithm == "pthr":
        return segment_pthr(probs, config), []
    if config.algorithm == "fixed":
        return segment_fixed(probs.duration_s, config.maxlen_s, probs.audio_id), []
    raise ValueError(f"Unknown algorithm: {config.algorithm}")


def segment_windows(
    window_probs: Sequence[Sequence[float]],
    windows: Sequence[Window],
    stride_s: float,
    config: SegmenterConfig,
    audio_id: str = "",
) -> Tuple[SegmentSet, SplitTrace]:
    """Chunked inference output to segments: merge the windows, then segment."""
    merged = merge_window_probs(window_probs, windows, stride_s, audio_id)
    return segment_audio(merged, config)
