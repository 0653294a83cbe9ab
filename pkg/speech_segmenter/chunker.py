"""
Chunker

Fixed-size windowing of long-form audio, averaging of window probabilities
over overlaps, and frame-label generation for training data.

Windows of length W start every W - overlap seconds; the last window is
truncated at the end of the audio. Inference runs on each window and the
per-window probabilities are merged back into one stream.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .config import DEFAULT_OVERLAP_S, DEFAULT_STRIDE_S, DEFAULT_WINDOW_S
from .probabilities import (
    FrameProbabilities,
    LabelSequence,
    inside_mask,
    num_frames_for,
    validate_probs,
)
from .segments import SegmentSet

logger = logging.getLogger(__name__)

_GRID_EPS = 1e-9


@dataclass(frozen=True)
class Window:
    """One analysis window [start_s, end_s] of a long audio."""

    index: int
    start_s: float
    end_s: float

    @property
    def duration(self) -> float:
        return self.end_s - self.start_s

    def frame_range(self, stride_s: float) -> range:
        """Frames of this window: start rounded down, end rounded up to the grid."""
        first = int(math.floor(self.start_s / stride_s + _GRID_EPS))
        last = int(math.ceil(self.end_s / stride_s - _GRID_EPS))
        return range(first, last)


class TrainingExample(NamedTuple):
    """A fixed-length label window; frames from ``valid`` on are zero padding."""

    window: Window
    labels: LabelSequence
    valid: int


def count_windows(audio_len_s: float, window_len_s: float = DEFAULT_WINDOW_S, overlap_s: float = DEFAULT_OVERLAP_S) -> int:
    """
    Number of windows needed: max(1, ceil((L - W) / (W - overlap)) + 1).

    Example:
        >>> count_windows(56, 20, 2)
        3
    """
    if audio_len_s <= window_len_s:
        return 1
    hop = window_len_s - overlap_s
    return max(1, int(math.ceil((audio_len_s - window_len_s) / hop - _GRID_EPS)) + 1)


def split_windows(
    audio_len_s: float,
    window_len_s: float = DEFAULT_WINDOW_S,
    overlap_s: float = DEFAULT_OVERLAP_S,
) -> List[Window]:
    """
    Split an audio into overlapping fixed-size windows.

    Args:
        audio_len_s: Audio duration in seconds
        window_len_s: Window length (20 s by default)
        overlap_s: Overlap between consecutive windows (2 s by default)

    Returns:
        Windows starting at i * (window_len_s - overlap_s); the last one ends
        at audio_len_s

    Raises:
        ValueError: If the audio length is negative or the overlap is not in
            [0, window_len_s)

    Example:
        >>> [(w.start_s, w.end_s) for w in split_windows(38, 20, 2)]
        [(0.0, 20.0), (18.0, 38.0)]
    """
    if audio_len_s < 0:
        raise ValueError(f"Audio length must be non-negative, got {audio_len_s}")
    if not (0 <= overlap_s < window_len_s):
        raise ValueError(
            f"Invalid windowing: overlap={overlap_s}, window={window_len_s}\n"
            f"Need 0 <= overlap < window"
        )

    hop = window_len_s - overlap_s
    windows = []
    for i in range(count_windows(audio_len_s, window_len_s, overlap_s)):
        start = i * hop
        end = min(start + window_len_s, audio_len_s)
        windows.append(Window(i, float(start), float(end)))
    return windows


def merge_window_probs(
    window_probs: Sequence[Sequence[float]],
    windows: Sequence[Window],
    stride_s: float = DEFAULT_STRIDE_S,
    audio_id: str = "",
) -> FrameProbabilities:
    """
    Merge per-window probability sequences into one stream.

    Frames covered by one window keep its value; frames covered by several
    windows get the arithmetic mean of their values.

    Args:
        window_probs: One probability sequence per window
        windows: Windows from split_windows()
        stride_s: Seconds per frame
        audio_id: Audio identifier of the merged stream

    Returns:
        FrameProbabilities with ceil(audio_len_s / stride_s) frames, where
        audio_len_s is the end of the last window

    Raises:
        ValueError: If counts differ or a sequence length doesn't match its
            window's frame count

    Example:
        >>> windows = split_windows(38, 20, 2)
        >>> merged = merge_window_probs([[0.8] * 500, [0.4] * 500], windows)
        >>> round(float(merged.probs[460]), 12)
        0.6
    """
    if len(window_probs) != len(windows):
        raise ValueError(
            f"Got {len(window_probs)} probability sequences for {len(windows)} windows"
        )
    if not windows:
        return validate_probs([], stride_s, audio_id)

    num_frames = num_frames_for(windows[-1].end_s, stride_s)
    sums = np.zeros(num_frames, dtype=np.float64)
    counts = np.zeros(num_frames, dtype=np.int64)

    for window, values in zip(windows, window_probs):
        frames = window.frame_range(stride_s)
        values = np.asarray(values, dtype=np.float64)
        if values.shape[0] != len(frames):
            raise ValueError(
                f"Length mismatch for window {window.index} [{window.start_s}, {window.end_s}] of '{audio_id}':\n"
                f"  expected {len(frames)} frames at stride {stride_s}, got {values.shape[0]}"
            )
        sums[frames.start:frames.stop] += values
        counts[frames.start:frames.stop] += 1

    uncovered = np.flatnonzero(counts == 0)
    if uncovered.size:
        raise ValueError(f"Frame {uncovered[0]} of '{audio_id}' is not covered by any window")

    return validate_probs(sums / counts, stride_s, audio_id)


def labels_from_segments(
    oracle: SegmentSet,
    audio_len_s: Optional[float] = None,
    stride_s: float = DEFAULT_STRIDE_S,
) -> LabelSequence:
    """
    Frame labels from an oracle segmentation.

    l_t = 1 iff the frame center (t + 0.5) * stride_s lies inside a segment.

    Args:
        oracle: Oracle segmentation
        audio_len_s: Audio duration; defaults to oracle.audio_len_s
        stride_s: Seconds per frame

    Returns:
        LabelSequence with ceil(audio_len_s / stride_s) frames

    Example:
        >>> oracle = SegmentSet.from_pairs("a", [(1.0, 2.0)])
        >>> labels = labels_from_segments(oracle, 4.0, 0.04)
        >>> int(labels.labels[25]), int(labels.labels[49]), int(labels.labels[50])
        (1, 1, 0)
    """
    if audio_len_s is None:
        audio_len_s = oracle.audio_len_s
    if audio_len_s is None:
        raise ValueError(f"No audio length given for '{oracle.audio_id}'")

    num_frames = num_frames_for(audio_len_s, stride_s)
    mask = inside_mask(oracle, num_frames, stride_s)
    return LabelSequence(oracle.audio_id, stride_s, mask.astype(np.int8))


def window_training_examples(
    labels: LabelSequence,
    window_len_s: float = DEFAULT_WINDOW_S,
    hop_s: Optional[float] = None,
) -> List[TrainingExample]:
    """
    Cut a label sequence into fixed-length training windows.

    Windows start every hop_s seconds until one reaches the end of the
    stream; a final partial window is zero-padded and its number of real
    frames is recorded as ``valid``.

    Args:
        labels: Frame labels of one audio
        window_len_s: Window length in seconds
        hop_s: Hop between window starts (defaults to window_len_s)

    Returns:
        List of TrainingExample(window, labels, valid)

    Raises:
        ValueError: If hop_s is not positive

    Example:
        >>> labels = LabelSequence("a", 0.04, np.ones(125, dtype=np.int8))
        >>> [ex.valid for ex in window_training_examples(labels, 20)]
        [125]
    """
    hop_s = window_len_s if hop_s is None else hop_s
    if hop_s <= 0:
        raise ValueError(f"hop must be positive, got {hop_s}")

    stride = labels.stride_s
    width = int(round(window_len_s / stride))
    hop = max(1, int(round(hop_s / stride)))
    total = labels.num_frames
    if total == 0:
        return []

    examples = []
    start = 0
    index = 0
    while True:
        chunk = labels.labels[start:start + width]
        valid = int(chunk.shape[0])
        padded = np.zeros(width, dtype=np.int8)
        padded[:valid] = chunk
        window = Window(index, start * stride, (start + width) * stride)
        examples.append(TrainingExample(window, LabelSequence(labels.audio_id, stride, padded), valid))
        if start + width >= total:
            break
        start += hop
        index += 1

    logger.debug(f"Cut {total} frames of '{labels.audio_id}' into {len(examples)} training windows")
    return examples
