"""
Maxlen Sweep

Grid-sweeps maxlen (and optionally the threshold) over a probability corpus,
scores every grid point with one or more scorers, and reports the best
configuration per metric.

Scorers:
    TextScorer: WER or BLEU of pre-computed hypothesis files, one per grid
        point, found by discover_hypotheses()
    BoundaryF1Scorer: boundary F1 against an oracle segmentation
    CommandScorer: an external command run on the grid point's segment file
"""

import logging
import math
import re
import shlex
import subprocess
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Protocol, Sequence, Tuple, Union

from .alignment import corpus_wer, resegment
from .bleu import bleu
from .boundaries import DEFAULT_TOLERANCE_S, boundary_f1
from .config import DEFAULT_MAXLEN_GRID, SegmenterConfig
from .formats import read_lines, write_segments
from .probabilities import FrameProbabilities
from .segmenters import segment_audio
from .segments import SegmentSet, SegmentStats, corpus_segment_stats

logger = logging.getLogger(__name__)

OBJECTIVES = ("minimize", "maximize")
DEFAULT_SCORER_TIMEOUT_S = 600.0
PLACEHOLDER = "{}"

_HYPOTHESIS_NAME = re.compile(r"^maxlen_(\d+(?:\.\d+)?)(?:_thr_(\d+(?:\.\d+)?))?\.txt$")

ProgressCallback = Callable[[int, int, str], bool]


class ScorerError(RuntimeError):
    """A scorer could not produce a metric value."""


@dataclass(frozen=True, order=True)
class GridPoint:
    """One sweep configuration; threshold None means the base threshold."""

    maxlen_s: float
    threshold: Optional[float] = None

    @property
    def label(self) -> str:
        label = f"maxlen_{self.maxlen_s:g}"
        if self.threshold is not None:
            label += f"_thr_{self.threshold:g}"
        return label


@dataclass(frozen=True)
class SweepConfig:
    """
    Sweep grid and execution settings.

    Args:
        maxlen_grid: maxlen values to try (seconds)
        threshold_grid: Optional threshold values; every combination with
            maxlen_grid is tried
        workers: Grid points segmented and scored in parallel
    """

    maxlen_grid: Tuple[float, ...] = DEFAULT_MAXLEN_GRID
    threshold_grid: Optional[Tuple[float, ...]] = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "maxlen_grid", tuple(float(v) for v in self.maxlen_grid))
        if self.threshold_grid is not None:
            object.__setattr__(self, "threshold_grid", tuple(float(v) for v in self.threshold_grid))

        errors = []
        if not self.maxlen_grid:
            errors.append("maxlen grid is empty")
        if any(v <= 0 for v in self.maxlen_grid):
            errors.append(f"maxlen values must be positive, got {list(self.maxlen_grid)}")
        if self.threshold_grid is not None:
            if not self.threshold_grid:
                errors.append("threshold grid is empty")
            if any(not (0.0 < v < 1.0) for v in self.threshold_grid):
                errors.append(f"threshold values must be in (0, 1), got {list(self.threshold_grid)}")
        if self.workers < 1:
            errors.append(f"workers must be at least 1, got {self.workers}")
        if errors:
            raise ValueError("Invalid sweep configuration:\n  " + "\n  ".join(errors))

    def points(self) -> List[GridPoint]:
        """Grid points in ascending (maxlen, threshold) order, duplicates removed."""
        thresholds = self.threshold_grid if self.threshold_grid is not None else (None,)
        return sorted({GridPoint(m, t) for m in self.maxlen_grid for t in thresholds},
                      key=lambda p: (p.maxlen_s, -1.0 if p.threshold is None else p.threshold))


class Scorer(Protocol):
    name: str
    objective: str

    def __call__(self, point: GridPoint, segment_sets: Mapping[str, SegmentSet], segment_file: Path) -> float:
        ...


# ---------------------------------------------------------------------------
# External scorer
# ---------------------------------------------------------------------------

_workdir_locks: Dict[str, threading.Lock] = {}
_workdir_locks_guard = threading.Lock()


def _workdir_lock(workdir: Path) -> threading.Lock:
    key = str(workdir.resolve())
    with _workdir_locks_guard:
        return _workdir_locks.setdefault(key, threading.Lock())


def parse_metric(stdout: str) -> float:
    """
    Parse the metric from the last non-empty output line.

    Raises:
        ScorerError: If there is no output or the line isn't a finite number
    """
    lines = [line.strip() for line in stdout.splitlines() if line.strip()]
    if not lines:
        raise ScorerError("Scorer printed nothing; expected the metric on its last line")
    try:
        value = float(lines[-1])
    except ValueError:
        raise ScorerError(f"Cannot parse metric from scorer output line: {lines[-1]!r}")
    if not math.isfinite(value):
        raise ScorerError(f"Scorer returned a non-finite metric: {lines[-1]!r}")
    return value


def external_scorer(
    command_template: str,
    segment_file: Union[str, Path],
    workdir: Optional[Union[str, Path]] = None,
    timeout_s: float = DEFAULT_SCORER_TIMEOUT_S,
) -> float:
    """
    Run an external scoring command and return its metric.

    The template is split like a shell command line and every ``{}`` is
    replaced by the segment file path; no shell is involved. The command
    runs in ``workdir`` (the segment file's folder by default), and calls
    sharing a workdir never overlap.

    Args:
        command_template: e.g. "python score_st.py --segments {}"
        segment_file: Segment file handed to the command
        workdir: Working directory of the command
        timeout_s: Seconds before the command is killed

    Returns:
        The number on the command's last non-empty output line

    Raises:
        ValueError: If the template has no ``{}`` placeholder
        ScorerError: On timeout, non-zero exit or unparsable output

    Example:
        >>> external_scorer("python score_st.py {}", "segments.jsonl")
        12.85
    """
    if PLACEHOLDER not in command_template:
        raise ValueError(
            f"Scorer command has no {PLACEHOLDER} placeholder: {command_template!r}\n"
            f"The placeholder is replaced by the segment file path"
        )
    segment_file = Path(segment_file)
    workdir = Path(workdir) if workdir is not None else segment_file.parent
    args = [arg.replace(PLACEHOLDER, str(segment_file.resolve())) for arg in shlex.split(command_template)]

    with _workdir_lock(workdir):
        logger.debug(f"Running scorer in {workdir}: {args}")
        try:
            result = subprocess.run(
                args,
                cwd=str(workdir),
                capture_output=True,
                text=True,
                timeout=timeout_s,
            )
        except subprocess.TimeoutExpired:
            raise ScorerError(f"Scorer timed out after {timeout_s} s: {args[0]}")
        except OSError as e:
            raise ScorerError(f"Cannot start scorer {args[0]!r}: {e}")

    if result.returncode != 0:
        tail = result.stderr.strip().splitlines()[-3:]
        raise ScorerError(
            f"Scorer exited with status {result.returncode}: {args[0]}\n" + "\n".join(tail)
        )
    return parse_metric(result.stdout)


# ---------------------------------------------------------------------------
# Scorers
# ---------------------------------------------------------------------------


def discover_hypotheses(hyp_dir: Union[str, Path]) -> Dict[Tuple[float, Optional[float]], Path]:
    """
    Find hypothesis files produced for each grid point.

    Files are named ``maxlen_<v>.txt`` or ``maxlen_<v>_thr_<t>.txt`` and hold
    one hypothesis segment per line.

    Args:
        hyp_dir: Folder holding the hypothesis files

    Returns:
        Dictionary of {(maxlen, threshold or None): path}

    Raises:
        FileNotFoundError: If hyp_dir doesn't exist
        ValueError: If no hypothesis files are found

    Example:
        >>> hyps = discover_hypotheses("hyps/")
        >>> sorted(hyps)
        [(8.0, None), (10.0, None), (20.0, None)]
    """
    hyp_dir = Path(hyp_dir)
    if not hyp_dir.is_dir():
        raise FileNotFoundError(
            f"Hypothesis folder not found: {hyp_dir}\n"
            f"Expected files named maxlen_<v>.txt or maxlen_<v>_thr_<t>.txt"
        )

    found: Dict[Tuple[float, Optional[float]], Path] = {}
    for item in sorted(hyp_dir.iterdir()):
        if not item.is_file() or item.suffix != ".txt":
            continue
        match = _HYPOTHESIS_NAME.match(item.name)
        if match is None:
            logger.warning(f"Ignoring hypothesis file with unexpected name: {item.name}")
            continue
        threshold = float(match.group(2)) if match.group(2) is not None else None
        found[(float(match.group(1)), threshold)] = item

    if not found:
        raise ValueError(
            f"No hypothesis files found in {hyp_dir}\n"
            f"Expected files named maxlen_<v>.txt or maxlen_<v>_thr_<t>.txt"
        )
    logger.info(f"Discovered {len(found)} hypothesis files in {hyp_dir}")
    return found


@dataclass
class TextScorer:
    """
    WER or BLEU of the hypothesis file that belongs to each grid point.

    Hypothesis words are resegmented onto the reference lines before
    scoring, since hypothesis lines follow the grid point's segmentation.
    """

    metric: str
    references: Sequence[str]
    hyp_dir: Path
    hypotheses: Dict[Tuple[float, Optional[float]], Path] = field(default_factory=dict)

    def __post_init__(self):
        if self.metric not in ("wer", "bleu"):
            raise ValueError(f"Unknown text metric {self.metric!r}, expected 'wer' or 'bleu'")
        if not self.hypotheses:
            self.hypotheses = discover_hypotheses(self.hyp_dir)

    @property
    def name(self) -> str:
        return self.metric

    @property
    def objective(self) -> str:
        return "minimize" if self.metric == "wer" else "maximize"

    def _hypothesis_file(self, point: GridPoint) -> Path:
        for key in ((point.maxlen_s, point.threshold), (point.maxlen_s, None)):
            if key in self.hypotheses:
                return self.hypotheses[key]
        raise ScorerError(f"No hypothesis file for {point.label} in {self.hyp_dir}")

    def __call__(self, point: GridPoint, segment_sets: Mapping[str, SegmentSet], segment_file: Path) -> float:
        hyp_words = " ".join(read_lines(self._hypothesis_file(point))).split()
        spans, _ = resegment(hyp_words, [line.split() for line in self.references])
        hyp_lines = [" ".join(span) for span in spans]
        if self.metric == "wer":
            return corpus_wer(self.references, hyp_lines).wer
        return bleu(self.references, hyp_lines).score


@dataclass
class BoundaryF1Scorer:
    """Boundary F1 of the grid point's segments against an oracle."""

    oracle: Mapping[str, SegmentSet]
    tolerance_s: float = DEFAULT_TOLERANCE_S
    name: str = "boundary-f1"
    objective: str = "maximize"

    def __call__(self, point: GridPoint, segment_sets: Mapping[str, SegmentSet], segment_file: Path) -> float:
        return boundary_f1(segment_sets, self.oracle, self.tolerance_s).f1


@dataclass
class CommandScorer:
    """External command scorer; see external_scorer()."""

    template: str
    timeout_s: float = DEFAULT_SCORER_TIMEOUT_S
    name: str = "external"
    objective: str = "minimize"

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"Unknown objective {self.objective!r}, expected one of {OBJECTIVES}")
        if PLACEHOLDER not in self.template:
            raise ValueError(f"Scorer command has no {PLACEHOLDER} placeholder: {self.template!r}")

    def __call__(self, point: GridPoint, segment_sets: Mapping[str, SegmentSet], segment_file: Path) -> float:
        return external_scorer(self.template, segment_file, segment_file.parent, self.timeout_s)


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """Result of one grid point; failed scorers appear in ``errors`` instead of ``metrics``."""

    point: GridPoint
    stats: SegmentStats
    metrics: Dict[str, float]
    errors: Dict[str, str] = field(default_factory=dict)
    segment_file: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "maxlen_s": self.point.maxlen_s,
            "threshold": self.point.threshold,
            "stats": self.stats.to_dict(),
            "metrics": dict(self.metrics),
            "errors": dict(self.errors),
            "segment_file": self.segment_file,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SweepRow":
        return cls(
            point=GridPoint(float(data["maxlen_s"]), data.get("threshold")),
            stats=SegmentStats.from_dict(data["stats"]),
            metrics={k: float(v) for k, v in data["metrics"].items()},
            errors=dict(data.get("errors", {})),
            segment_file=data.get("segment_file"),
        )


def select_best(rows: Sequence[SweepRow], metric: str, objective: str) -> Optional[SweepRow]:
    """
    Best row for one metric; ties go to the smaller maxlen, then the smaller threshold.

    Rows where the metric failed are skipped. Returns None if every row failed.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"Unknown objective {objective!r}, expected one of {OBJECTIVES}")
    sign = 1.0 if objective == "minimize" else -1.0
    candidates = [row for row in rows if metric in row.metrics]
    if not candidates:
        return None
    return min(
        candidates,
        key=lambda row: (
            sign * row.metrics[metric],
            row.point.maxlen_s,
            -1.0 if row.point.threshold is None else row.point.threshold,
        ),
    )


@dataclass(frozen=True)
class SweepReport:
    """All sweep rows plus the best row per metric (None when every row failed)."""

    rows: Tuple[SweepRow, ...]
    objectives: Dict[str, str]
    best: Dict[str, Optional[SweepRow]]

    def to_dict(self) -> Dict[str, Any]:
        best = {}
        for metric, row in self.best.items():
            best[metric] = None if row is None else {
                "maxlen_s": row.point.maxlen_s,
                "threshold": row.point.threshold,
                "value": row.metrics[metric],
                "objective": self.objectives[metric],
            }
        return {
            "rows": [row.to_dict() for row in self.rows],
            "objectives": dict(self.objectives),
            "best": best,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SweepReport":
        rows = tuple(SweepRow.from_dict(r) for r in data["rows"])
        objectives = dict(data["objectives"])
        best = {metric: select_best(rows, metric, objective) for metric, objective in objectives.items()}
        return cls(rows, objectives, best)


def run_point(
    point: GridPoint,
    corpus: Sequence[FrameProbabilities],
    base: SegmenterConfig,
    scorers: Sequence[Scorer],
    workdir: Path,
) -> SweepRow:
    """
    Segment the corpus with one grid point and score it.

    The segments are written to ``<workdir>/segments_<label>.jsonl`` for
    scorers that read files. Scorer failures are recorded in the row.
    """
    changes: Dict[str, Any] = {"maxlen_s": point.maxlen_s}
    if point.threshold is not None:
        changes["threshold"] = point.threshold
    config = base.replace(**changes)

    segment_sets: Dict[str, SegmentSet] = {}
    for probs in corpus:
        segments, _ = segment_audio(probs, config)
        segment_sets[probs.audio_id] = segments

    segment_file = write_segments(segment_sets.values(), workdir / f"segments_{point.label}.jsonl")

    metrics: Dict[str, float] = {}
    errors: Dict[str, str] = {}
    for scorer in scorers:
        try:
            metrics[scorer.name] = float(scorer(point, segment_sets, segment_file))
        except (ScorerError, ValueError, OSError) as e:
            logger.warning(f"Scorer '{scorer.name}' failed for {point.label}: {e}")
            errors[scorer.name] = str(e)

    return SweepRow(
        point=point,
        stats=corpus_segment_stats(segment_sets.values()),
        metrics=metrics,
        errors=errors,
        segment_file=str(segment_file),
    )


def run_sweep(
    corpus: Sequence[FrameProbabilities],
    base: SegmenterConfig,
    sweep: SweepConfig,
    scorers: Sequence[Scorer],
    workdir: Optional[Union[str, Path]] = None,
    progress_callback: Optional[ProgressCallback] = None,
) -> SweepReport:
    """
    Segment and score the corpus at every grid point.

    Args:
        corpus: Probability streams of all audios
        base: Segmenter settings shared by all grid points
        sweep: Grid and worker settings
        scorers: Scorers with distinct names
        workdir: Folder for per-point segment files (a temporary folder,
            removed afterwards, when None)
        progress_callback: Called as (done, total, message) after each
            point; returning False cancels the remaining points

    Returns:
        SweepReport with rows in grid order

    Raises:
        ValueError: If there are no scorers, names repeat, or a maxlen is
            not above the base minlen

    Example:
        >>> report = run_sweep(corpus, SegmenterConfig(maxlen_s=20), SweepConfig(), [scorer])
        >>> report.best["boundary-f1"].point.maxlen_s
        10.0
    """
    if not scorers:
        raise ValueError("Need at least one scorer to run a sweep")
    names = [s.name for s in scorers]
    if len(set(names)) != len(names):
        raise ValueError(f"Scorer names must be unique, got {names}")
    for scorer in scorers:
        if scorer.objective not in OBJECTIVES:
            raise ValueError(f"Unknown objective {scorer.objective!r} for scorer '{scorer.name}'")
    too_short = [m for m in sweep.maxlen_grid if m <= base.minlen_s]
    if too_short:
        raise ValueError(
            f"Every maxlen must exceed minlen={base.minlen_s}, got {too_short}"
        )

    if workdir is None:
        with tempfile.TemporaryDirectory(prefix="sweep_") as tmp:
            return _run_grid(corpus, base, sweep, scorers, Path(tmp), progress_callback)
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    return _run_grid(corpus, base, sweep, scorers, workdir, progress_callback)


def _run_grid(
    corpus: Sequence[FrameProbabilities],
    base: SegmenterConfig,
    sweep: SweepConfig,
    scorers: Sequence[Scorer],
    workdir: Path,
    progress_callback: Optional[ProgressCallback],
) -> SweepReport:
    points = sweep.points()
    logger.info(f"Sweeping {len(points)} grid points over {len(corpus)} audios with {sweep.workers} workers")

    results: Dict[GridPoint, SweepRow] = {}
    with ThreadPoolExecutor(max_workers=sweep.workers) as pool:
        futures = {pool.submit(run_point, p, corpus, base, scorers, workdir): p for p in points}
        for done, future in enumerate(as_completed(futures), 1):
            point = futures[future]
            results[point] = future.result()
            if progress_callback is not None and not progress_callback(done, len(points), point.label):
                for pending in futures:
                    pending.cancel()
                logger.warning("Sweep cancelled")
                break

    rows = tuple(results[p] for p in points if p in results)
    objectives = {s.name: s.objective for s in scorers}
    best = {name: select_best(rows, name, objective) for name, objective in objectives.items()}
    for name, row in best.items():
        if row is None:
            logger.warning(f"No grid point produced a '{name}' value")
        else:
            logger.info(f"Best {name}: {row.metrics[name]:.4f} at {row.point.label}")
    return SweepReport(rows, objectives, best)


def format_sweep_table(report: SweepReport) -> str:
    """
    Plain-text table of the sweep, best values marked with '*'.

    Example:
        >>> print(format_sweep_table(report))
        maxlen  thr  segments  mean_s  max_s  boundary-f1
           8.0    -        42   4.210  8.000      0.8120
          10.0    -        38   4.650  9.040     *0.9630
    """
    metrics = list(report.objectives)
    header = ["maxlen", "thr", "segments", "mean_s", "max_s"] + metrics
    lines = []
    for row in report.rows:
        cells = [
            f"{row.point.maxlen_s:.1f}",
            "-" if row.point.threshold is None else f"{row.point.threshold:.2f}",
            str(row.stats.count),
            "-" if row.stats.mean_s is None else f"{row.stats.mean_s:.3f}",
            "-" if row.stats.max_s is None else f"{row.stats.max_s:.3f}",
        ]
        for metric in metrics:
            if metric in row.metrics:
                mark = "*" if report.best.get(metric) is row else ""
                cells.append(f"{mark}{row.metrics[metric]:.4f}")
            else:
                cells.append("error")
        lines.append(cells)

    widths = [max([len(h)] + [len(cells[i]) for cells in lines]) for i, h in enumerate(header)]
    out = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    for cells in lines:
        out.append("  ".join(c.rjust(w) for c, w in zip(cells, widths)))
    return "\n".join(out)
