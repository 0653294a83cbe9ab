"""
Frame Probability Streams

Per-audio segment-membership probabilities and binary frame labels at a
fixed stride, plus validation and a deterministic synthetic generator.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_STRIDE_S
from .segments import SegmentSet

logger = logging.getLogger(__name__)

# Plateaus of the synthetic generator; a 0.5 threshold sits halfway between.
SYNTH_INSIDE = 0.95
SYNTH_OUTSIDE = 0.05

# Tolerance for snapping durations onto the frame grid.
_GRID_EPS = 1e-9


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class FrameProbabilities:
    """
    Segment-membership probabilities p_t of one audio.

    Frame t covers [t * stride_s, (t + 1) * stride_s). The array is
    read-only; build instances through ``validate_probs``.
    """

    audio_id: str
    stride_s: float
    probs: np.ndarray

    @property
    def num_frames(self) -> int:
        return int(self.probs.shape[0])

    @property
    def duration_s(self) -> float:
        return self.num_frames * self.stride_s


@dataclass(frozen=True, eq=False)
class LabelSequence:
    """Binary frame labels l_t in {0, 1} of one audio."""

    audio_id: str
    stride_s: float
    labels: np.ndarray

    def __post_init__(self):
        labels = _frozen_array(self.labels, np.int8)
        if labels.ndim != 1:
            raise ValueError(f"Labels of '{self.audio_id}' must be one-dimensional")
        bad = np.flatnonzero((labels != 0) & (labels != 1))
        if bad.size:
            raise ValueError(
                f"Label at index {bad[0]} of '{self.audio_id}' is {labels[bad[0]]}, "
                f"labels must be 0 or 1"
            )
        if self.stride_s <= 0:
            raise ValueError(f"Stride must be positive, got {self.stride_s}")
        object.__setattr__(self, "labels", labels)

    @property
    def num_frames(self) -> int:
        return int(self.labels.shape[0])


def num_frames_for(duration_s: float, stride_s: float) -> int:
    """
    Number of frames needed to cover ``duration_s``: ceil(duration / stride).

    Example:
        >>> num_frames_for(20.0, 0.04)
        500
    """
    if duration_s <= 0:
        return 0
    return int(math.ceil(duration_s / stride_s - _GRID_EPS))


def validate_probs(
    raw: Sequence[float],
    stride_s: float = DEFAULT_STRIDE_S,
    audio_id: str = "",
) -> FrameProbabilities:
    """
    Validate raw values and wrap them as FrameProbabilities.

    Args:
        raw: Probability values, one per frame
        stride_s: Seconds per frame (must be positive)
        audio_id: Audio identifier

    Returns:
        Read-only FrameProbabilities

    Raises:
        ValueError: If the stride is not positive or a value lies outside
            [0, 1] (the first offending index is reported)

    Example:
        >>> validate_probs([0.1, 0.9], 0.04, "a").num_frames
        2
    """
    if not stride_s > 0:
        raise ValueError(f"Stride must be positive, got {stride_s} for '{audio_id}'")

    probs = np.asarray(raw, dtype=np.float64)
    if probs.ndim != 1:
        raise ValueError(
            f"Probabilities of '{audio_id}' must be a flat sequence, got shape {probs.shape}"
        )

    # NaN fails both comparisons and is reported as out of range.
    bad = np.flatnonzero(~((probs >= 0.0) & (probs <= 1.0)))
    if bad.size:
        index = int(bad[0])
        raise ValueError(
            f"Probability out of range at index {index} of '{audio_id}': {probs[index]}\n"
            f"Values must lie in [0, 1]"
        )

    return FrameProbabilities(audio_id, float(stride_s), _frozen_array(probs, np.float64))


def inside_mask(segments: SegmentSet, num_frames: int, stride_s: float) -> np.ndarray:
    """
    Frame-center membership: True where (t + 0.5) * stride lies in a segment.

    A segment [start, end) claims the frames whose centers fall in it.
    """
    centers = (np.arange(num_frames, dtype=np.float64) + 0.5) * stride_s
    if not segments.segments or num_frames == 0:
        return np.zeros(num_frames, dtype=bool)

    starts = np.array([s.start_s for s in segments], dtype=np.float64)
    ends = np.array([s.end_s for s in segments], dtype=np.float64)
    idx = np.searchsorted(starts, centers, side="right") - 1
    valid = idx >= 0
    inside = np.zeros(num_frames, dtype=bool)
    inside[valid] = centers[valid] < ends[idx[valid]]
    return inside


def _boundary_times(oracle: SegmentSet, audio_len_s: float) -> np.ndarray:
    """Interior speech/non-speech transitions; touching segments share no boundary."""
    times = []
    prev_end: Optional[float] = None
    for seg in oracle:
        if prev_end is not None and seg.start_s <= prev_end:
            times.pop()
        else:
            times.append(seg.start_s)
        times.append(seg.end_s)
        prev_end = seg.end_s
    return np.array([t for t in times if 0.0 < t < audio_len_s], dtype=np.float64)


def synth_probs(
    oracle: SegmentSet,
    stride_s: float = DEFAULT_STRIDE_S,
    noise_sigma: float = 0.05,
    boundary_slope_frames: float = 3,
    seed: int = 17,
) -> FrameProbabilities:
    """
    Generate a probability stream that a perfect model would emit for ``oracle``.

    The base value is 0.95 for frames whose center lies inside an oracle
    segment and 0.05 elsewhere. With a positive slope, values change linearly
    over ``boundary_slope_frames`` frames centred on every boundary (0.5 exactly
    at the boundary). Gaussian noise is added and the result clamped to [0, 1].

    Noise comes from numpy's PCG64 generator (``np.random.default_rng(seed)``),
    so the output is fully determined by the seed.

    Args:
        oracle: Oracle segmentation; must carry audio_len_s
        stride_s: Seconds per frame
        noise_sigma: Standard deviation of the additive noise
        boundary_slope_frames: Ramp width in frames (0 gives hard steps)
        seed: Random seed

    Returns:
        FrameProbabilities with ceil(audio_len_s / stride_s) frames

    Raises:
        ValueError: If oracle has no audio length or parameters are negative

    Example:
        >>> oracle = SegmentSet.from_pairs("a", [(1.0, 3.0)], audio_len_s=4.0)
        >>> p = synth_probs(oracle, 0.04, noise_sigma=0, boundary_slope_frames=0)
        >>> float(p.probs[25]), float(p.probs[24])
        (0.95, 0.05)
    """
    if oracle.audio_len_s is None:
        raise ValueError(
            f"Oracle segmentation of '{oracle.audio_id}' has no audio length\n"
            f"synth_probs needs audio_len_s to size the stream"
        )
    if noise_sigma < 0 or boundary_slope_frames < 0:
        raise ValueError(
            f"noise_sigma and boundary_slope_frames must be non-negative, "
            f"got {noise_sigma} and {boundary_slope_frames}"
        )

    num_frames = num_frames_for(oracle.audio_len_s, stride_s)
    inside = inside_mask(oracle, num_frames, stride_s)
    base = np.where(inside, SYNTH_INSIDE, SYNTH_OUTSIDE)

    boundaries = _boundary_times(oracle, oracle.audio_len_s)
    if boundary_slope_frames > 0 and boundaries.size and num_frames:
        centers = (np.arange(num_frames, dtype=np.float64) + 0.5) * stride_s
        pos = np.searchsorted(boundaries, centers)
        left = np.abs(centers - boundaries[np.clip(pos - 1, 0, boundaries.size - 1)])
        right = np.abs(boundaries[np.clip(pos, 0, boundaries.size - 1)] - centers)
        distance = np.minimum(left, right) / stride_s
        signed = np.where(inside, distance, -distance)
        ramp = 0.5 + (SYNTH_INSIDE - 0.5) * 2.0 * signed / boundary_slope_frames
        base = np.clip(ramp, SYNTH_OUTSIDE, SYNTH_INSIDE)

    rng = np.random.default_rng(seed)
    if noise_sigma > 0:
        base = np.clip(base + rng.normal(0.0, noise_sigma, size=num_frames), 0.0, 1.0)

    logger.debug(
        f"Synthesised {num_frames} frames for '{oracle.audio_id}' "
        f"({len(oracle)} oracle segments, sigma={noise_sigma}, slope={boundary_slope_frames})"
    )
    return validate_probs(base, stride_s, oracle.audio_id)
