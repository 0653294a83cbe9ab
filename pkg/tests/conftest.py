"""Shared fixtures: seeded synthetic oracles, probability streams and corpora."""

from typing import Callable, List, Tuple

import numpy as np
import pytest

from speech_segmenter.probabilities import FrameProbabilities, synth_probs, validate_probs
from speech_segmenter.segments import SegmentSet


def random_oracle(
    rng: np.random.Generator,
    audio_id: str,
    num_segments: int,
    min_dur: float = 2.0,
    max_dur: float = 15.0,
    min_gap: float = 0.5,
    max_gap: float = 2.0,
) -> SegmentSet:
    """Oracle segments with random durations and gaps, plus a gap at both ends."""
    pairs: List[Tuple[float, float]] = []
    t = float(rng.uniform(min_gap, max_gap))
    for _ in range(num_segments):
        duration = float(rng.uniform(min_dur, max_dur))
        pairs.append((t, t + duration))
        t += duration + float(rng.uniform(min_gap, max_gap))
    return SegmentSet.from_pairs(audio_id, pairs, audio_len_s=t)


def random_stream(rng: np.random.Generator, num_frames: int, audio_id: str = "rand") -> FrameProbabilities:
    """Piecewise-constant random levels with noise, clipped to [0, 1]."""
    values = np.empty(num_frames)
    t = 0
    while t < num_frames:
        length = int(rng.integers(1, 400))
        values[t:t + length] = rng.uniform(0.0, 1.0)
        t += length
    values = np.clip(values + rng.normal(0.0, 0.1, num_frames), 0.0, 1.0)
    return validate_probs(values, 0.04, audio_id)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def oracle_factory() -> Callable[..., SegmentSet]:
    return random_oracle


@pytest.fixture
def stream_factory() -> Callable[..., FrameProbabilities]:
    return random_stream


@pytest.fixture
def synthetic_corpus() -> Callable[..., Tuple[List[SegmentSet], List[FrameProbabilities]]]:
    """
    Build (oracles, streams) for a seeded corpus.

    Keyword arguments are passed on to random_oracle; sigma and slope go to
    synth_probs.
    """

    def build(num_audios: int, num_segments: int = 10, seed: int = 17,
              sigma: float = 0.05, slope: float = 3, **oracle_kwargs):
        gen = np.random.default_rng(seed)
        oracles, streams = [], []
        for i in range(num_audios):
            oracle = random_oracle(gen, f"audio_{i}", num_segments, **oracle_kwargs)
            oracles.append(oracle)
            streams.append(synth_probs(oracle, 0.04, sigma, slope, seed + i))
        return oracles, streams

    return build
