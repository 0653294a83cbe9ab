"""
BLEU

Corpus BLEU over aligned line pairs via sacreBLEU, with plain whitespace
tokenization (inputs are expected pre-tokenized) and exponential smoothing.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

from sacrebleu.metrics import BLEU

logger = logging.getLogger(__name__)

MAX_ORDER = 4


@dataclass(frozen=True)
class BleuReport:
    """Corpus BLEU (0-100) with its n-gram statistics."""

    score: float
    precisions: Tuple[float, ...]
    bp: float
    sys_len: int
    ref_len: int
    counts: Tuple[int, ...] = ()
    totals: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bleu": self.score,
            "precisions": list(self.precisions),
            "bp": self.bp,
            "sys_len": self.sys_len,
            "ref_len": self.ref_len,
            "counts": list(self.counts),
            "totals": list(self.totals),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BleuReport":
        return cls(
            score=float(data["bleu"]),
            precisions=tuple(float(p) for p in data["precisions"]),
            bp=float(data["bp"]),
            sys_len=int(data["sys_len"]),
            ref_len=int(data["ref_len"]),
            counts=tuple(int(c) for c in data.get("counts", ())),
            totals=tuple(int(t) for t in data.get("totals", ())),
        )


def bleu(
    ref_lines: Sequence[str],
    hyp_lines: Sequence[str],
    effective_order: bool = True,
) -> BleuReport:
    """
    Corpus-level, case-sensitive BLEU.

    Args:
        ref_lines: Reference lines
        hyp_lines: Hypothesis lines aligned with the references (resegment
            long-form output first)
        effective_order: Average only the n-gram orders that occur in the
            corpus. This matches plain 1-4-gram BLEU whenever every order has
            n-grams, and keeps a corpus of short lines from scoring 0; pass
            False for the strict sacreBLEU default

    Returns:
        BleuReport

    Raises:
        ValueError: If the line counts differ

    Example:
        >>> bleu(["the cat sat on the mat"], ["the cat sat on the mat"]).score
        100.0
    """
    if len(ref_lines) != len(hyp_lines):
        raise ValueError(
            f"Line count mismatch: {len(ref_lines)} reference lines, {len(hyp_lines)} hypothesis lines\n"
            f"Resegment the hypothesis first for long-form output"
        )
    if not hyp_lines:
        return BleuReport(0.0, (0.0,) * MAX_ORDER, 0.0, 0, 0, (0,) * MAX_ORDER, (0,) * MAX_ORDER)

    metric = BLEU(
        tokenize="none",
        smooth_method="exp",
        effective_order=effective_order,
        max_ngram_order=MAX_ORDER,
    )
    # sacreBLEU joins tokens on single spaces itself; collapse stray whitespace first.
    hyps = [" ".join(line.split()) for line in hyp_lines]
    refs = [" ".join(line.split()) for line in ref_lines]
    result = metric.corpus_score(hyps, [refs])

    logger.debug(f"BLEU {result.score:.2f} over {len(hyps)} lines")
    return BleuReport(
        score=float(result.score),
        precisions=tuple(float(p) for p in result.precisions),
        bp=float(result.bp),
        sys_len=int(result.sys_len),
        ref_len=int(result.ref_len),
        counts=tuple(int(c) for c in result.counts),
        totals=tuple(int(t) for t in result.totals),
    )
