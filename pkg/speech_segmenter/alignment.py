"""
Alignment

Word-level Levenshtein alignment, word error rate, and resegmentation of an
unsegmented hypothesis onto reference segments (mwerSegmenter-style).

The dynamic programs run one numpy row at a time: the diagonal and vertical
moves are elementwise, and the horizontal (insertion) chain is resolved with
a running minimum.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

MATCH = "match"
SUBSTITUTE = "substitute"
DELETE = "delete"
INSERT = "insert"


@dataclass(frozen=True)
class AlignOp:
    """One alignment step; ref_index is None for insertions, hyp_index for deletions."""

    op: str
    ref_index: Optional[int]
    hyp_index: Optional[int]


@dataclass(frozen=True)
class Alignment:
    """Operations turning the reference token list into the hypothesis, in order."""

    ops: Tuple[AlignOp, ...] = ()

    def count(self, op: str) -> int:
        return sum(1 for step in self.ops if step.op == op)

    @property
    def cost(self) -> int:
        return sum(1 for step in self.ops if step.op != MATCH)


def _encode(*token_lists: Sequence[str]) -> List[np.ndarray]:
    """Map tokens to integer ids shared across all lists."""
    vocab: Dict[str, int] = {}
    encoded = []
    for tokens in token_lists:
        encoded.append(np.array([vocab.setdefault(t, len(vocab)) for t in tokens], dtype=np.int64))
    return encoded


def _next_row(prev: np.ndarray, token: int, hyp: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Levenshtein row for one more reference token, given the previous row."""
    cur = np.empty_like(prev)
    cur[0] = prev[0] + 1
    cur[1:] = np.minimum(prev[:-1] + (hyp != token), prev[1:] + 1)
    return np.minimum.accumulate(cur - steps) + steps


def edit_distance(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> Tuple[int, Alignment]:
    """
    Minimal unit-cost edit distance between two token lists, with an alignment.

    Among equal-cost alignments the backtrace prefers, at every cell,
    match over substitute over delete over insert.

    Args:
        ref_tokens: Reference tokens
        hyp_tokens: Hypothesis tokens

    Returns:
        Tuple of (cost, Alignment)

    Example:
        >>> cost, alignment = edit_distance("a b c".split(), "a x c d".split())
        >>> cost, alignment.count("substitute"), alignment.count("insert")
        (2, 1, 1)
    """
    ref, hyp = _encode(ref_tokens, hyp_tokens)
    n, m = len(ref), len(hyp)
    steps = np.arange(m + 1, dtype=np.int64)

    table = np.empty((n + 1, m + 1), dtype=np.int64)
    table[0] = steps
    for i in range(n):
        table[i + 1] = _next_row(table[i], ref[i], hyp, steps)

    ops: List[AlignOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = table[i, j]
        if i > 0 and j > 0:
            diag = table[i - 1, j - 1]
            if ref[i - 1] == hyp[j - 1] and diag == here:
                ops.append(AlignOp(MATCH, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
            if ref[i - 1] != hyp[j - 1] and diag + 1 == here:
                ops.append(AlignOp(SUBSTITUTE, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
        if i > 0 and table[i - 1, j] + 1 == here:
            ops.append(AlignOp(DELETE, i - 1, None))
            i -= 1
        else:
            ops.append(AlignOp(INSERT, None, j - 1))
            j -= 1

    ops.reverse()
    return int(table[n, m]), Alignment(tuple(ops))


@dataclass(frozen=True)
class WerReport:
    """Word error counts; ``wer`` is (S + D + I) / N_ref and may exceed 1."""

    substitutions: int
    deletions: int
    insertions: int
    reference_words: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        if self.reference_words == 0:
            raise ValueError("WER is undefined for an empty reference")
        return self.errors / self.reference_words

    def __add__(self, other: "WerReport") -> "WerReport":
        return WerReport(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.reference_words + other.reference_words,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "wer": self.wer,
            "substitutions": self.substitutions,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "reference_words": self.reference_words,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WerReport":
        return cls(
            int(data["substitutions"]),
            int(data["deletions"]),
            int(data["insertions"]),
            int(data["reference_words"]),
        )


def _count_errors(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> WerReport:
    _, alignment = edit_distance(ref_tokens, hyp_tokens)
    return WerReport(
        alignment.count(SUBSTITUTE),
        alignment.count(DELETE),
        alignment.count(INSERT),
        len(ref_tokens),
    )


def wer(ref_text: str, hyp_text: str) -> WerReport:
    """
    Word error rate of one hypothesis against one reference (whitespace tokens).

    Raises:
        ValueError: If the reference has no words

    Example:
        >>> wer("a b c", "a x c d").wer
        0.6666666666666666
    """
    ref_tokens = ref_text.split()
    if not ref_tokens:
        raise ValueError("WER is undefined for an empty reference")
    return _count_errors(ref_tokens, hyp_text.split())


def corpus_wer(ref_lines: Sequence[str], hyp_lines: Sequence[str]) -> WerReport:
    """
    Corpus WER: counts summed over aligned line pairs, then divided once.

    Empty reference lines are allowed as long as the corpus has words.

    Raises:
        ValueError: On line-count mismatch or an empty reference corpus
    """
    if len(ref_lines) != len(hyp_lines):
        raise ValueError(
            f"Line count mismatch: {len(ref_lines)} reference lines, {len(hyp_lines)} hypothesis lines\n"
            f"Resegment the hypothesis first for long-form output"
        )
    total = WerReport(0, 0, 0, 0)
    for ref, hyp in zip(ref_lines, hyp_lines):
        total = total + _count_errors(ref.split(), hyp.split())
    if total.reference_words == 0:
        raise ValueError("WER is undefined for an empty reference corpus")
    return total


def resegment(
    hyp_words: Sequence[str],
    ref_segments: Sequence[Sequence[str]],
) -> Tuple[List[List[str]], int]:
    """
    Partition hypothesis words into one contiguous span per reference segment.

    The partition minimises the summed edit distance between every reference
    segment and its span. Any alignment of the concatenated references can
    be cut at the segment rows, so the minimum equals the edit distance of
    the concatenations. Boundaries are then fixed left to right, each at the
    earliest hypothesis position that still admits the optimum.

    Args:
        hyp_words: Hypothesis tokens of the whole document
        ref_segments: Reference segments as token lists

    Returns:
        Tuple of (spans, total cost); spans may be empty

    Raises:
        ValueError: If there are no reference segments

    Example:
        >>> resegment("a x c d".split(), [["a", "b"], ["c", "d"]])
        ([['a', 'x'], ['c', 'd']], 1)
    """
    if not ref_segments:
        raise ValueError("Need at least one reference segment to resegment against")

    encoded = _encode(hyp_words, *ref_segments)
    hyp, refs = encoded[0], encoded[1:]
    m = len(hyp)
    flat = np.concatenate(refs) if refs else np.zeros(0, dtype=np.int64)
    n = len(flat)

    offsets = np.cumsum([0] + [len(r) for r in refs])
    # Suffix costs ED(flat[i:], hyp[j:]) are only needed at segment boundary rows.
    wanted: Dict[int, List[int]] = {}
    for k in range(len(refs)):
        wanted.setdefault(n - int(offsets[k]), []).append(k)
    suffix_rows: Dict[int, np.ndarray] = {}
    steps = np.arange(m + 1, dtype=np.int64)
    rev_hyp = hyp[::-1]
    row = steps.copy()
    for r in range(n + 1):
        for k in wanted.get(r, ()):
            suffix_rows[k] = row[::-1]
        if r < n:
            row = _next_row(row, flat[n - 1 - r], rev_hyp, steps)
    optimum = int(suffix_rows[0][0])

    spans: List[List[str]] = []
    begin = 0
    base = 0
    for k, ref in enumerate(refs):
        tail = hyp[begin:]
        local_steps = np.arange(len(tail) + 1, dtype=np.int64)
        row = base + local_steps
        for token in ref:
            row = _next_row(row, token, tail, local_steps)

        if k == len(refs) - 1:
            end = m
        else:
            total = row + suffix_rows[k + 1][begin:]
            end = begin + int(np.flatnonzero(total == optimum)[0])
        base = int(row[end - begin])
        spans.append(list(hyp_words[begin:end]))
        begin = end

    logger.debug(f"Resegmented {m} words onto {len(refs)} segments, cost {optimum}")
    return spans, optimum
