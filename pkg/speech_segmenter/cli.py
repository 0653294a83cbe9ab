"""
Command-Line Interface

    python -m speech_segmenter <command> [flags]

Commands:
    segment   probabilities -> segments (+ optional split trace)
    merge     per-window chunk probabilities -> merged probabilities
    labels    oracle segments -> frame-label training windows
    eval      wer | punct-f1 | bleu | resegment | boundary-f1
    sweep     maxlen (and threshold) grid sweep with one or more scorers
    synth     oracle segments -> synthetic probabilities
    stats     segment duration statistics
    render    timeline image of one audio

Durations are in seconds, strides in milliseconds. Reports go to standard
output, diagnostics to standard error. Exit status: 0 success, 1 runtime
failure, 2 usage error.
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

from . import __version__
from .alignment import corpus_wer, resegment
from .bleu import bleu
from .boundaries import DEFAULT_TOLERANCE_S, boundary_f1
from .chunker import count_windows, labels_from_segments, merge_window_probs, split_windows, window_training_examples
from .config import (
    ALGORITHMS,
    DEFAULT_EXPAND_S,
    DEFAULT_MAXLEN_GRID,
    DEFAULT_MINLEN_S,
    DEFAULT_OVERLAP_S,
    DEFAULT_THRESHOLD,
    DEFAULT_WINDOW_S,
    SegmenterConfig,
    default_workers,
)
from .formats import (
    read_audio_lengths,
    read_chunks,
    read_lines,
    read_probabilities,
    read_segments,
    write_labels,
    write_lines,
    write_probabilities,
    write_segments,
    write_trace,
)
from .manifest import build_manifest, write_manifest
from .probabilities import synth_probs
from .punctuation import AVERAGES, DEFAULT_MARKS, corpus_punct_f1
from .segmenters import segment_audio
from .segments import SegmentSet, corpus_segment_stats, segment_stats
from .sweep import (
    DEFAULT_SCORER_TIMEOUT_S,
    OBJECTIVES,
    BoundaryF1Scorer,
    CommandScorer,
    ScorerError,
    SweepConfig,
    TextScorer,
    format_sweep_table,
    run_sweep,
)
from .timeline import render_timeline

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

BUILTIN_SCORERS = ("builtin-wer", "builtin-bleu", "boundary-f1")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _workers(args: argparse.Namespace) -> int:
    if args.workers is None:
        return default_workers()
    if args.workers < 1:
        raise ValueError(f"--workers must be at least 1, got {args.workers}")
    return args.workers


def _map_audios(
    fn: Callable[[T], R],
    items: Sequence[T],
    args: argparse.Namespace,
    desc: str,
) -> List[R]:
    """Apply fn to every item on a worker pool; results keep input order."""
    workers = _workers(args)
    with tqdm(total=len(items), desc=desc, unit="audio", disable=args.no_progress, file=sys.stderr) as bar:
        if workers == 1:
            results = []
            for item in items:
                results.append(fn(item))
                bar.update(1)
            return results
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = []
            for result in pool.map(fn, items):
                results.append(result)
                bar.update(1)
            return results


def _stride_s(stride_ms: float) -> float:
    if stride_ms <= 0:
        raise ValueError(f"--stride-ms must be positive, got {stride_ms}")
    return stride_ms / 1000.0


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _emit_report(report: Dict[str, Any], out: Optional[Path]) -> None:
    text = json.dumps(report, indent=2)
    if out is None:
        print(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote report to {out}")


def _write_manifest(args: argparse.Namespace, command: str, config: Dict[str, Any],
                    inputs: Iterable[Path], output: Path) -> None:
    if args.no_manifest:
        return
    write_manifest(build_manifest(command, config, inputs), output)


def _audio_lengths(args: argparse.Namespace, audio_ids: Iterable[str]) -> Dict[str, float]:
    """Resolve every audio's duration from --audio-len or --audio-lengths."""
    table = read_audio_lengths(args.audio_lengths) if args.audio_lengths else {}
    lengths = {}
    for audio_id in audio_ids:
        if audio_id in table:
            lengths[audio_id] = table[audio_id]
        elif args.audio_len is not None:
            lengths[audio_id] = args.audio_len
        else:
            raise ValueError(
                f"No audio length for '{audio_id}'\n"
                f"Pass --audio-len SECONDS or --audio-lengths FILE (audio_id<TAB>seconds)"
            )
    return lengths


def _segmenter_config(args: argparse.Namespace, maxlen_s: float) -> SegmenterConfig:
    return SegmenterConfig(
        maxlen_s=maxlen_s,
        algorithm=args.algorithm,
        threshold=args.threshold,
        minlen_s=args.min_len,
        expand_s=args.expand,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_segment(args: argparse.Namespace) -> int:
    config = _segmenter_config(args, args.max_len)
    streams = read_probabilities(args.probs)
    results = _map_audios(lambda probs: segment_audio(probs, config), streams, args, "segment")

    write_segments([segments for segments, _ in results], args.out, args.format)
    logger.info(f"Wrote {sum(len(s) for s, _ in results)} segments of {len(results)} audios to {args.out}")
    if args.trace:
        write_trace([(probs.audio_id, trace) for probs, (_, trace) in zip(streams, results)], args.trace)

    _write_manifest(args, "segment", {**config.to_dict(), "format": args.format}, [args.probs], args.out)
    return 0


def cmd_merge(args: argparse.Namespace) -> int:
    chunked = read_chunks(args.chunks)
    if not (0 <= args.overlap < args.window):
        raise ValueError(f"Need 0 <= --overlap < --window, got overlap={args.overlap}, window={args.window}")
    hop = args.window - args.overlap

    def merge_one(item):
        audio_id, (stride_s, sequences) = item
        # Audio length from the last window: its start plus its frame count.
        last_start = (len(sequences) - 1) * hop
        audio_len = last_start + len(sequences[-1]) * stride_s
        if count_windows(audio_len, args.window, args.overlap) != len(sequences):
            raise ValueError(
                f"'{audio_id}' has {len(sequences)} chunks, which doesn't fit "
                f"window={args.window} s, overlap={args.overlap} s"
            )
        windows = split_windows(audio_len, args.window, args.overlap)
        return merge_window_probs(sequences, windows, stride_s, audio_id)

    merged = _map_audios(merge_one, list(chunked.items()), args, "merge")
    write_probabilities(merged, args.out, raw=args.raw)
    _write_manifest(
        args, "merge", {"window_s": args.window, "overlap_s": args.overlap, "raw": args.raw},
        [args.chunks], args.out,
    )
    return 0


def cmd_labels(args: argparse.Namespace) -> int:
    stride_s = _stride_s(args.stride_ms)
    oracle = read_segments(args.segments)
    lengths = _audio_lengths(args, oracle)

    examples = []
    for audio_id, segments in oracle.items():
        labels = labels_from_segments(segments, lengths[audio_id], stride_s)
        examples.extend(window_training_examples(labels, args.window, args.hop))

    write_labels(examples, args.out)
    logger.info(f"Wrote {len(examples)} label windows to {args.out}")
    inputs = [args.segments] + ([args.audio_lengths] if args.audio_lengths else [])
    _write_manifest(
        args, "labels",
        {"stride_ms": args.stride_ms, "window_s": args.window, "hop_s": args.hop, "audio_len_s": args.audio_len},
        inputs, args.out,
    )
    return 0


def _read_pair(args: argparse.Namespace):
    refs = read_lines(args.ref)
    hyps = read_lines(args.hyp)
    if args.resegment:
        spans, _ = resegment(" ".join(hyps).split(), [line.split() for line in refs])
        hyps = [" ".join(span) for span in spans]
    elif len(refs) != len(hyps):
        raise ValueError(
            f"{args.ref} has {len(refs)} lines but {args.hyp} has {len(hyps)}\n"
            f"Use --resegment to realign long-form output first"
        )
    return refs, hyps


def _emit_eval_report(args: argparse.Namespace, metric: str, report: Dict[str, Any],
                      config: Dict[str, Any]) -> None:
    """Emit a text-metric report; a report file gets a manifest."""
    report["resegmented"] = args.resegment
    _emit_report(report, args.out)
    if args.out is not None:
        _write_manifest(args, f"eval {metric}", {**config, "resegment": args.resegment},
                        [args.ref, args.hyp], args.out)


def cmd_eval_wer(args: argparse.Namespace) -> int:
    refs, hyps = _read_pair(args)
    _emit_eval_report(args, "wer", corpus_wer(refs, hyps).to_dict(), {})
    return 0


def cmd_eval_punct(args: argparse.Namespace) -> int:
    refs, hyps = _read_pair(args)
    report = corpus_punct_f1(refs, hyps, args.marks, args.average, args.include_absent).to_dict()
    config = {"marks": args.marks, "average": args.average, "include_absent": args.include_absent}
    _emit_eval_report(args, "punct-f1", report, config)
    return 0


def cmd_eval_bleu(args: argparse.Namespace) -> int:
    refs, hyps = _read_pair(args)
    effective_order = not args.strict_order
    report = bleu(refs, hyps, effective_order=effective_order).to_dict()
    _emit_eval_report(args, "bleu", report, {"effective_order": effective_order})
    return 0


def cmd_eval_resegment(args: argparse.Namespace) -> int:
    refs = read_lines(args.ref)
    hyps = read_lines(args.hyp)
    spans, cost = resegment(" ".join(hyps).split(), [line.split() for line in refs])
    write_lines([" ".join(span) for span in spans], args.out)
    print(json.dumps({"segments": len(spans), "cost": cost, "output": str(args.out)}, indent=2))
    _write_manifest(args, "resegment", {}, [args.ref, args.hyp], args.out)
    return 0


def cmd_eval_boundary(args: argparse.Namespace) -> int:
    oracle = read_segments(args.ref)
    predicted = read_segments(args.hyp)
    _emit_report(boundary_f1(predicted, oracle, args.tolerance).to_dict(), args.out)
    if args.out is not None:
        _write_manifest(args, "eval boundary-f1", {"tolerance_s": args.tolerance},
                        [args.ref, args.hyp], args.out)
    return 0


def _build_scorers(args: argparse.Namespace) -> list:
    scorers = []
    for name in args.scorer or []:
        if name in ("builtin-wer", "builtin-bleu"):
            if args.ref is None or args.hyp_dir is None:
                raise ValueError(f"--scorer {name} needs --ref and --hyp-dir")
            metric = name.split("-", 1)[1]
            scorers.append(TextScorer(metric, read_lines(args.ref), args.hyp_dir))
        elif name == "boundary-f1":
            if args.oracle is None:
                raise ValueError("--scorer boundary-f1 needs --oracle SEGMENTS")
            scorers.append(BoundaryF1Scorer(read_segments(args.oracle), args.tolerance))
    if args.scorer_cmd:
        scorers.append(CommandScorer(args.scorer_cmd, args.scorer_timeout, args.scorer_name, args.scorer_objective))
    if not scorers:
        raise ValueError("Give --scorer-cmd TEMPLATE and/or --scorer NAME")
    return scorers


def cmd_sweep(args: argparse.Namespace) -> int:
    base = _segmenter_config(args, max(args.max_lens))
    sweep = SweepConfig(tuple(args.max_lens), tuple(args.thresholds) if args.thresholds else None, _workers(args))
    scorers = _build_scorers(args)
    corpus = read_probabilities(args.probs)

    with tqdm(total=len(sweep.points()), desc="sweep", unit="point", disable=args.no_progress, file=sys.stderr) as bar:
        def progress(done: int, total: int, label: str) -> bool:
            bar.set_postfix_str(label)
            bar.update(1)
            return True

        report = run_sweep(corpus, base, sweep, scorers, args.workdir, progress)

    print(format_sweep_table(report))
    if args.out:
        _emit_report(report.to_dict(), args.out)
        inputs = [args.probs] + [p for p in (args.ref, args.oracle) if p is not None]
        _write_manifest(
            args, "sweep",
            {
                **base.to_dict(),
                "max_lens": list(sweep.maxlen_grid),
                "thresholds": None if sweep.threshold_grid is None else list(sweep.threshold_grid),
                "scorers": {s.name: s.objective for s in scorers},
            },
            inputs, args.out,
        )
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    stride_s = _stride_s(args.stride_ms)
    oracle = read_segments(args.segments)
    lengths = _audio_lengths(args, oracle)

    streams = []
    for index, (audio_id, segments) in enumerate(oracle.items()):
        with_len = SegmentSet(audio_id, segments.segments, lengths[audio_id])
        streams.append(synth_probs(with_len, stride_s, args.sigma, args.slope, args.seed + index))

    write_probabilities(streams, args.out, raw=args.raw)
    logger.info(f"Wrote {len(streams)} synthetic streams to {args.out}")
    _write_manifest(
        args, "synth",
        {"stride_ms": args.stride_ms, "sigma": args.sigma, "slope": args.slope,
         "seed": args.seed, "audio_len_s": args.audio_len, "raw": args.raw},
        [args.segments] + ([args.audio_lengths] if args.audio_lengths else []), args.out,
    )
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    sets = read_segments(args.segments)
    report: Dict[str, Any] = {"corpus": corpus_segment_stats(sets.values()).to_dict()}
    if args.per_audio:
        report["audios"] = {audio_id: segment_stats(s).to_dict() for audio_id, s in sets.items()}
    _emit_report(report, args.out)
    if args.out is not None:
        _write_manifest(args, "stats", {"per_audio": args.per_audio}, [args.segments], args.out)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    streams = {p.audio_id: p for p in read_probabilities(args.probs)}
    audio_id = args.audio_id if args.audio_id is not None else next(iter(streams), None)
    if audio_id not in streams:
        raise ValueError(f"Audio '{audio_id}' not found in {args.probs}")

    predicted = read_segments(args.segments).get(audio_id, SegmentSet(audio_id))
    oracle = None
    if args.oracle:
        oracle = read_segments(args.oracle).get(audio_id, SegmentSet(audio_id))

    render_timeline(
        streams[audio_id], predicted, args.out,
        threshold=args.threshold,
        pixels_per_second=args.pps,
        height=args.height,
        oracle=oracle,
    )
    _write_manifest(
        args, "render",
        {"audio_id": audio_id, "threshold": args.threshold, "pixels_per_second": args.pps,
         "height": args.height},
        [args.probs, args.segments] + ([args.oracle] if args.oracle else []), args.out,
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("general")
    verbosity = group.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    group.add_argument("--workers", type=int, default=None,
                       help="worker threads (default: $SEGMENTER_WORKERS or 1)")
    group.add_argument("--no-progress", action="store_true", help="hide progress bars")
    group.add_argument("--no-manifest", action="store_true", help="don't write <out>.manifest.json")
    return common


def _segmenter_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--algorithm", choices=ALGORITHMS, default="proposed")
    parser.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    parser.add_argument("--min-len", type=float, default=DEFAULT_MINLEN_S, help="seconds")
    parser.add_argument("--expand", type=float, default=DEFAULT_EXPAND_S, help="seconds per side")


def _audio_length_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--audio-len", type=float, default=None, help="seconds, for every audio")
    parser.add_argument("--audio-lengths", type=Path, default=None,
                        help="TSV of audio_id<TAB>seconds (overrides --audio-len)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speech_segmenter",
        description="Long-form speech segmentation: segment, evaluate and tune maxlen.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    common = _common_flags()
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("segment", parents=[common], formatter_class=fmt,
                       help="segment probability streams")
    p.add_argument("--probs", type=Path, required=True)
    p.add_argument("--max-len", type=float, required=True, help="seconds (piece length for 'fixed')")
    _segmenter_flags(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl")
    p.add_argument("--trace", type=Path, default=None, help="write split trace JSONL here")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("merge", parents=[common], formatter_class=fmt,
                       help="merge overlapping window probabilities")
    p.add_argument("--chunks", type=Path, required=True)
    p.add_argument("--window", type=float, default=DEFAULT_WINDOW_S)
    p.add_argument("--overlap", type=float, default=DEFAULT_OVERLAP_S)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--raw", action="store_true", help="write float32 + JSON sidecar")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("labels", parents=[common], formatter_class=fmt,
                       help="frame-label training windows from oracle segments")
    p.add_argument("--segments", type=Path, required=True)
    _audio_length_flags(p)
    p.add_argument("--stride-ms", type=float, default=40)
    p.add_argument("--window", type=float, default=DEFAULT_WINDOW_S)
    p.add_argument("--hop", type=float, default=None, help="defaults to --window")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_labels)

    p = sub.add_parser("eval", help="scoring against references")
    eval_sub = p.add_subparsers(dest="metric", metavar="METRIC")
    eval_sub.required = True

    def text_eval(name: str, func, help_text: str) -> argparse.ArgumentParser:
        e = eval_sub.add_parser(name, parents=[common], formatter_class=fmt, help=help_text)
        e.add_argument("--ref", type=Path, required=True, help="reference, one segment per line")
        e.add_argument("--hyp", type=Path, required=True, help="hypothesis, one segment per line")
        e.add_argument("--resegment", action="store_true",
                       help="realign hypothesis words to the reference lines first")
        e.add_argument("--out", type=Path, default=None, help="write the JSON report here")
        e.set_defaults(func=func)
        return e

    text_eval("wer", cmd_eval_wer, "word error rate")
    e = text_eval("punct-f1", cmd_eval_punct, "punctuation F1")
    e.add_argument("--marks", default=DEFAULT_MARKS)
    e.add_argument("--average", choices=AVERAGES, default="macro")
    e.add_argument("--include-absent", action="store_true",
                   help="macro-average over every mark, even absent ones")
    e = text_eval("bleu", cmd_eval_bleu, "corpus BLEU")
    e.add_argument("--strict-order", action="store_true",
                   help="average all four n-gram orders even when one has no n-grams")

    e = eval_sub.add_parser("resegment", parents=[common], formatter_class=fmt,
                            help="realign hypothesis words to reference lines")
    e.add_argument("--ref", type=Path, required=True)
    e.add_argument("--hyp", type=Path, required=True)
    e.add_argument("--out", type=Path, required=True, help="realigned hypothesis lines")
    e.set_defaults(func=cmd_eval_resegment)

    e = eval_sub.add_parser("boundary-f1", parents=[common], formatter_class=fmt,
                            help="segment boundary F1 against oracle segments")
    e.add_argument("--ref", type=Path, required=True, help="oracle segment file")
    e.add_argument("--hyp", type=Path, required=True, help="predicted segment file")
    e.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE_S)
    e.add_argument("--out", type=Path, default=None)
    e.set_defaults(func=cmd_eval_boundary)

    p = sub.add_parser("sweep", parents=[common], formatter_class=fmt,
                       help="grid-sweep maxlen and report the best per metric")
    p.add_argument("--probs", type=Path, required=True)
    p.add_argument("--max-lens", type=_float_list,
                   default=list(DEFAULT_MAXLEN_GRID), help="comma-separated seconds")
    p.add_argument("--thresholds", type=_float_list, default=None, help="comma-separated")
    _segmenter_flags(p)
    p.add_argument("--scorer", action="append", choices=BUILTIN_SCORERS, default=None)
    p.add_argument("--scorer-cmd", default=None, help="command template, {} = segment file")
    p.add_argument("--scorer-name", default="external")
    p.add_argument("--scorer-objective", choices=OBJECTIVES, default="minimize")
    p.add_argument("--scorer-timeout", type=float, default=DEFAULT_SCORER_TIMEOUT_S)
    p.add_argument("--ref", type=Path, default=None, help="reference lines for text scorers")
    p.add_argument("--hyp-dir", type=Path, default=None, help="folder of maxlen_<v>.txt hypotheses")
    p.add_argument("--oracle", type=Path, default=None, help="oracle segments for boundary-f1")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE_S)
    p.add_argument("--workdir", type=Path, default=None, help="keep per-point segment files here")
    p.add_argument("--out", type=Path, default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", parents=[common], formatter_class=fmt,
                       help="synthetic probabilities from oracle segments")
    p.add_argument("--segments", type=Path, required=True)
    _audio_length_flags(p)
    p.add_argument("--stride-ms", type=float, default=40)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--slope", type=float, default=3, help="ramp width in frames")
    p.add_argument("--seed", type=int, default=17, help="audio i uses seed + i")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--raw", action="store_true")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stats", parents=[common], formatter_class=fmt, help="segment statistics")
    p.add_argument("--segments", type=Path, required=True)
    p.add_argument("--per-audio", action="store_true")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("render", parents=[common], formatter_class=fmt, help="timeline image")
    p.add_argument("--probs", type=Path, required=True)
    p.add_argument("--segments", type=Path, required=True)
    p.add_argument("--oracle", type=Path, default=None)
    p.add_argument("--audio-id", default=None, help="defaults to the first audio")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--pps", type=float, default=50, help="pixels per second")
    p.add_argument("--height", type=int, default=120)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI and return the exit status.

    Example:
        >>> main(["segment", "--probs", "p.jsonl", "--max-len", "20", "--out", "s.jsonl"])
        0
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    _configure_logging(args.verbose, args.quiet)
    try:
        return args.func(args)
    except (ValueError, OSError, ScorerError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
