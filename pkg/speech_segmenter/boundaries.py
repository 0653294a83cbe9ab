"""
Boundary F1

Compares predicted segment boundaries with oracle boundaries. Every segment
start and end is a boundary; predicted and oracle boundaries of the same
audio are matched one-to-one when they lie within a tolerance.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Union

from .segments import SegmentSet

DEFAULT_TOLERANCE_S = 0.12

SegmentInput = Union[SegmentSet, Mapping[str, SegmentSet]]


@dataclass(frozen=True)
class BoundaryReport:
    """Matched/predicted/reference boundary counts; both sides empty scores 1.0."""

    matched: int
    predicted: int
    reference: int
    tolerance_s: float = DEFAULT_TOLERANCE_S

    @property
    def precision(self) -> float:
        if self.predicted == 0:
            return 1.0 if self.reference == 0 else 0.0
        return self.matched / self.predicted

    @property
    def recall(self) -> float:
        if self.reference == 0:
            return 1.0 if self.predicted == 0 else 0.0
        return self.matched / self.reference

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)

    def __add__(self, other: "BoundaryReport") -> "BoundaryReport":
        return BoundaryReport(
            self.matched + other.matched,
            self.predicted + other.predicted,
            self.reference + other.reference,
            self.tolerance_s,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "matched": self.matched,
            "predicted": self.predicted,
            "reference": self.reference,
            "tolerance_s": self.tolerance_s,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def boundary_times(s: SegmentSet) -> List[float]:
    """All segment starts and ends in time order."""
    times = []
    for seg in s:
        times.append(seg.start_s)
        times.append(seg.end_s)
    return sorted(times)


def match_boundaries(predicted: List[float], reference: List[float], tolerance_s: float) -> int:
    """
    Greedy one-to-one matching of two sorted time lists.

    Walks both lists in time order and pairs the current boundaries when
    they are within tolerance, otherwise advances the earlier one.

    Example:
        >>> match_boundaries([1.0, 2.05, 5.0], [1.1, 2.0, 3.0], 0.12)
        2
    """
    i = j = matched = 0
    limit = tolerance_s + 1e-9
    while i < len(predicted) and j < len(reference):
        if abs(predicted[i] - reference[j]) <= limit:
            matched += 1
            i += 1
            j += 1
        elif predicted[i] < reference[j]:
            i += 1
        else:
            j += 1
    return matched


def _as_mapping(s: SegmentInput) -> Mapping[str, SegmentSet]:
    return {s.audio_id: s} if isinstance(s, SegmentSet) else s


def boundary_f1(
    predicted: SegmentInput,
    oracle: SegmentInput,
    tolerance_s: float = DEFAULT_TOLERANCE_S,
) -> BoundaryReport:
    """
    Boundary precision, recall and F1 of a segmentation against the oracle.

    Args:
        predicted: One SegmentSet or a mapping audio_id -> SegmentSet
        oracle: Oracle segmentation in the same form
        tolerance_s: Maximum distance between matched boundaries

    Returns:
        BoundaryReport with counts pooled over all audios

    Raises:
        ValueError: If the tolerance is negative

    Example:
        >>> pred = SegmentSet.from_pairs("a", [(1.02, 3.0)])
        >>> gold = SegmentSet.from_pairs("a", [(1.0, 3.1)])
        >>> boundary_f1(pred, gold).f1
        1.0
    """
    if tolerance_s < 0:
        raise ValueError(f"Tolerance must be non-negative, got {tolerance_s}")

    pred_map = _as_mapping(predicted)
    gold_map = _as_mapping(oracle)

    total = BoundaryReport(0, 0, 0, tolerance_s)
    for audio_id in sorted(set(pred_map) | set(gold_map)):
        pred_times = boundary_times(pred_map[audio_id]) if audio_id in pred_map else []
        gold_times = boundary_times(gold_map[audio_id]) if audio_id in gold_map else []
        matched = match_boundaries(pred_times, gold_times, tolerance_s)
        total = total + BoundaryReport(matched, len(pred_times), len(gold_times), tolerance_s)
    return total
