"""
Punctuation F1

Scores punctuation marks of a hypothesis against a reference after aligning
their words. Only trailing marks are scored; a token made only of marks
gives its marks to the previous word ("hello , world ." reads as
"hello, world.").
"""

from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, Sequence, Tuple

from .alignment import DELETE, INSERT, edit_distance

DEFAULT_MARKS = ".?,"
MARK_NAMES = {".": "period", "?": "question", ",": "comma"}
AVERAGES = ("macro", "micro")


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class MarkScore:
    """Counts for one punctuation mark."""

    mark: str
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def support(self) -> int:
        return self.tp + self.fp + self.fn

    @property
    def precision(self) -> float:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> float:
        return _f1(self.precision, self.recall)

    def __add__(self, other: "MarkScore") -> "MarkScore":
        return MarkScore(self.mark, self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": MARK_NAMES.get(self.mark, self.mark),
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


@dataclass(frozen=True)
class PunctReport:
    """
    Per-mark scores plus an average.

    ``macro`` averages precision, recall and F1 over the marks that occur in
    the reference or hypothesis (all configured marks with include_absent).
    ``micro`` pools the counts of all marks first. With nothing to average,
    the average is 0.
    """

    scores: Tuple[MarkScore, ...]
    average: str = "macro"
    include_absent: bool = False

    def __post_init__(self):
        if self.average not in AVERAGES:
            raise ValueError(f"Unknown average '{self.average}', expected one of {AVERAGES}")

    def score(self, mark: str) -> MarkScore:
        for s in self.scores:
            if s.mark == mark:
                return s
        raise KeyError(mark)

    def _averaged(self) -> Tuple[float, float, float]:
        if self.average == "micro":
            pooled = MarkScore("", sum(s.tp for s in self.scores),
                               sum(s.fp for s in self.scores), sum(s.fn for s in self.scores))
            return pooled.precision, pooled.recall, pooled.f1
        chosen = [s for s in self.scores if self.include_absent or s.support > 0]
        if not chosen:
            return 0.0, 0.0, 0.0
        k = len(chosen)
        return (
            sum(s.precision for s in chosen) / k,
            sum(s.recall for s in chosen) / k,
            sum(s.f1 for s in chosen) / k,
        )

    @property
    def precision(self) -> float:
        return self._averaged()[0]

    @property
    def recall(self) -> float:
        return self._averaged()[1]

    @property
    def f1(self) -> float:
        return self._averaged()[2]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "marks": {s.mark: s.to_dict() for s in self.scores},
            "average": self.average,
            "include_absent": self.include_absent,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PunctReport":
        scores = tuple(
            MarkScore(mark, int(v["tp"]), int(v["fp"]), int(v["fn"]))
            for mark, v in data["marks"].items()
        )
        return cls(scores, data.get("average", "macro"), bool(data.get("include_absent", False)))


def split_marks(token: str, marks: str = DEFAULT_MARKS) -> Tuple[str, FrozenSet[str]]:
    """
    Split a token into its lowercased core and the set of trailing marks.

    Example:
        >>> split_marks("World?!.", ".?,")
        ('world?!', frozenset({'.'}))
    """
    end = len(token)
    while end > 0 and token[end - 1] in marks:
        end -= 1
    return token[:end].lower(), frozenset(token[end:])


def tokenize(text: str, marks: str = DEFAULT_MARKS) -> List[Tuple[str, FrozenSet[str]]]:
    """Whitespace tokens as (core, marks); marks-only tokens join the previous word."""
    tokens: List[Tuple[str, FrozenSet[str]]] = []
    for raw in text.split():
        core, found = split_marks(raw, marks)
        if not core and tokens:
            prev_core, prev_marks = tokens[-1]
            tokens[-1] = (prev_core, prev_marks | found)
        else:
            tokens.append((core, found))
    return tokens


def _count_marks(ref_text: str, hyp_text: str, marks: str) -> Dict[str, List[int]]:
    ref = tokenize(ref_text, marks)
    hyp = tokenize(hyp_text, marks)
    _, alignment = edit_distance([c for c, _ in ref], [c for c, _ in hyp])

    counts = {m: [0, 0, 0] for m in marks}
    for step in alignment.ops:
        ref_marks = ref[step.ref_index][1] if step.op != INSERT else frozenset()
        hyp_marks = hyp[step.hyp_index][1] if step.op != DELETE else frozenset()
        for m in marks:
            in_ref, in_hyp = m in ref_marks, m in hyp_marks
            if in_ref and in_hyp:
                counts[m][0] += 1
            elif in_hyp:
                counts[m][1] += 1
            elif in_ref:
                counts[m][2] += 1
    return counts


def _check_marks(marks: str) -> str:
    if not marks:
        raise ValueError("Need at least one punctuation mark to score")
    # Keep first occurrence order, drop repeats.
    return "".join(dict.fromkeys(marks))


def corpus_punct_f1(
    ref_lines: Sequence[str],
    hyp_lines: Sequence[str],
    marks: str = DEFAULT_MARKS,
    average: str = "macro",
    include_absent: bool = False,
) -> PunctReport:
    """
    Punctuation F1 over aligned line pairs; counts are summed before scoring.

    Args:
        ref_lines: Reference lines
        hyp_lines: Hypothesis lines, one per reference line
        marks: Mark characters to score
        average: "macro" or "micro"
        include_absent: Macro-average over every configured mark, even
            marks that never occur

    Returns:
        PunctReport

    Raises:
        ValueError: On line-count mismatch or an empty mark set
    """
    marks = _check_marks(marks)
    if len(ref_lines) != len(hyp_lines):
        raise ValueError(
            f"Line count mismatch: {len(ref_lines)} reference lines, {len(hyp_lines)} hypothesis lines"
        )
    totals = {m: MarkScore(m) for m in marks}
    for ref, hyp in zip(ref_lines, hyp_lines):
        for m, (tp, fp, fn) in _count_marks(ref, hyp, marks).items():
            totals[m] = totals[m] + MarkScore(m, tp, fp, fn)
    return PunctReport(tuple(totals[m] for m in marks), average, include_absent)


def punct_f1(
    ref_text: str,
    hyp_text: str,
    marks: str = DEFAULT_MARKS,
    average: str = "macro",
    include_absent: bool = False,
) -> PunctReport:
    """
    Punctuation F1 of one hypothesis text against one reference text.

    For each mark, aligned words that both carry it count as true
    positives; a mark only on the hypothesis side (inserted words included)
    is a false positive, and a mark only on the reference side (deleted
    words included) is a false negative. A substituted mark therefore
    counts once as FN and once as FP.

    Example:
        >>> report = punct_f1("hello world.", "hello world,")
        >>> report.score(".").fn, report.score(",").fp
        (1, 1)
    """
    return corpus_punct_f1([ref_text], [hyp_text], marks, average, include_absent)

