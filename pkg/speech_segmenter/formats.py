"""
File Formats

Readers and writers for probability streams, chunked probabilities,
segment files, label exports, split traces and plain-text corpora.

Probability file: one JSON object per line
    {"audio_id": str, "stride_ms": int, "probs": [float, ...]}
or raw little-endian float32 with a JSON sidecar
    {"audio_id": str, "stride_ms": int, "num_frames": int}
stored next to it with the suffix ".json".

Segment file: one JSON object per line
    {"audio_id": str, "start": seconds, "end": seconds}
or TSV lines "audio_id<TAB>start<TAB>end".
"""

import json
import logging
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np

from .probabilities import FrameProbabilities, validate_probs
from .segments import Segment, SegmentSet

logger = logging.getLogger(__name__)

RAW_SUFFIXES = (".f32", ".raw", ".bin")
SEGMENT_FORMATS = ("jsonl", "tsv")


def _require_file(path: Path, what: str) -> None:
    if not path.exists():
        raise FileNotFoundError(f"{what} not found: {path}")
    if not path.is_file():
        raise ValueError(f"{what} is not a file: {path}")


def _iter_json_lines(path: Path) -> Iterator[Tuple[int, Dict[str, Any]]]:
    """Yield (line_number, record) for every non-empty line of a JSONL file."""
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"Invalid JSON in {path} at line {line_no}: {e}")
            if not isinstance(record, dict):
                raise ValueError(f"Expected a JSON object in {path} at line {line_no}")
            yield line_no, record


def _require_keys(record: Dict[str, Any], keys: Sequence[str], path: Path, line_no: int) -> None:
    missing = [k for k in keys if k not in record]
    if missing:
        raise ValueError(
            f"Missing required fields in {path} at line {line_no}: {', '.join(missing)}\n"
            f"Required: {', '.join(keys)}"
        )


def stride_to_ms(stride_s: float) -> int:
    """
    Convert a stride to integral milliseconds.

    Raises:
        ValueError: If the stride is not a whole number of milliseconds

    Example:
        >>> stride_to_ms(0.04)
        40
    """
    stride_ms = int(round(stride_s * 1000))
    if stride_ms <= 0 or abs(stride_ms - stride_s * 1000) > 1e-6:
        raise ValueError(
            f"Stride {stride_s} s is not a whole number of milliseconds\n"
            f"File formats store stride_ms as an integer"
        )
    return stride_ms


def _stride_from_ms(value: Any, path: Path, line_no: int) -> float:
    try:
        stride_ms = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"Field 'stride_ms' must be an integer in {path} at line {line_no}, got: {value}")
    if stride_ms != value or stride_ms <= 0:
        raise ValueError(f"Field 'stride_ms' must be a positive integer in {path} at line {line_no}, got: {value}")
    return stride_ms / 1000.0


# ---------------------------------------------------------------------------
# Probabilities
# ---------------------------------------------------------------------------


def read_probabilities(path: Union[str, Path]) -> List[FrameProbabilities]:
    """
    Read probability streams from a JSONL file or a raw float32 file.

    Args:
        path: JSONL file, or raw file ending in .f32/.raw/.bin with a .json sidecar

    Returns:
        List of FrameProbabilities in file order

    Raises:
        FileNotFoundError: If the file (or raw sidecar) doesn't exist
        ValueError: If a record is malformed or a value is out of range

    Example:
        >>> streams = read_probabilities("probs.jsonl")
        >>> streams[0].audio_id, streams[0].stride_s
        ('ted_1', 0.04)
    """
    path = Path(path)
    if path.suffix.lower() in RAW_SUFFIXES:
        return [read_raw_probabilities(path)]

    _require_file(path, "Probability file")
    streams = []
    for line_no, record in _iter_json_lines(path):
        _require_keys(record, ["audio_id", "stride_ms", "probs"], path, line_no)
        stride_s = _stride_from_ms(record["stride_ms"], path, line_no)
        try:
            streams.append(validate_probs(record["probs"], stride_s, str(record["audio_id"])))
        except ValueError as e:
            raise ValueError(f"Invalid probabilities in {path} at line {line_no}:\n{e}")

    logger.info(f"Loaded {len(streams)} probability streams from {path}")
    return streams


def sidecar_path(raw_path: Union[str, Path]) -> Path:
    """Sidecar location for a raw probability file: same stem, .json suffix."""
    return Path(raw_path).with_suffix(".json")


def read_raw_probabilities(path: Union[str, Path]) -> FrameProbabilities:
    """Read one stream stored as little-endian float32 with a JSON sidecar."""
    path = Path(path)
    _require_file(path, "Raw probability file")
    meta_path = sidecar_path(path)
    _require_file(meta_path, "Raw probability sidecar")

    try:
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in {meta_path}: {e}")
    _require_keys(meta, ["audio_id", "stride_ms", "num_frames"], meta_path, 1)

    values = np.fromfile(path, dtype="<f4")
    if values.shape[0] != int(meta["num_frames"]):
        raise ValueError(
            f"Frame count mismatch for {path}:\n"
            f"  sidecar num_frames: {meta['num_frames']}\n"
            f"  frames in file: {values.shape[0]}"
        )
    stride_s = _stride_from_ms(meta["stride_ms"], meta_path, 1)
    return validate_probs(values.astype(np.float64), stride_s, str(meta["audio_id"]))


def write_probabilities(
    streams: Iterable[FrameProbabilities],
    path: Union[str, Path],
    raw: bool = False,
) -> Path:
    """
    Write probability streams.

    JSONL output keeps full float precision, so reading it back reproduces
    the values bit-exactly. Raw output holds exactly one stream and stores
    float32 values.

    Args:
        streams: Streams to write
        path: Output file
        raw: Write raw float32 plus sidecar instead of JSONL

    Returns:
        Path to the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    streams = list(streams)

    if raw:
        if len(streams) != 1:
            raise ValueError(f"Raw probability files hold exactly one stream, got {len(streams)}")
        stream = streams[0]
        stream.probs.astype("<f4").tofile(path)
        meta = {
            "audio_id": stream.audio_id,
            "stride_ms": stride_to_ms(stream.stride_s),
            "num_frames": stream.num_frames,
        }
        with open(sidecar_path(path), "w", encoding="utf-8") as f:
            json.dump(meta, f)
        return path

    with open(path, "w", encoding="utf-8") as f:
        for stream in streams:
            record = {
                "audio_id": stream.audio_id,
                "stride_ms": stride_to_ms(stream.stride_s),
                "probs": stream.probs.tolist(),
            }
            f.write(json.dumps(record) + "\n")
    return path


def read_chunks(path: Union[str, Path]) -> "OrderedDict[str, Tuple[float, List[np.ndarray]]]":
    """
    Read per-window probability sequences for chunked inference.

    Each line is a probability record with an extra integer "chunk" index.
    Chunks are grouped by audio_id and ordered by index.

    Returns:
        Ordered mapping audio_id -> (stride_s, [window sequences])

    Raises:
        ValueError: If strides differ within an audio or chunk indices are
            not 0..n-1
    """
    path = Path(path)
    _require_file(path, "Chunk file")

    grouped: "OrderedDict[str, Dict[str, Any]]" = OrderedDict()
    for line_no, record in _iter_json_lines(path):
        _require_keys(record, ["audio_id", "stride_ms", "chunk", "probs"], path, line_no)
        audio_id = str(record["audio_id"])
        stride_s = _stride_from_ms(record["stride_ms"], path, line_no)
        entry = grouped.setdefault(audio_id, {"stride_s": stride_s, "chunks": {}})
        if entry["stride_s"] != stride_s:
            raise ValueError(
                f"Inconsistent stride for '{audio_id}' in {path} at line {line_no}:\n"
                f"  earlier chunks: {entry['stride_s'] * 1000:g} ms, this chunk: {record['stride_ms']} ms"
            )
        index = int(record["chunk"])
        if index in entry["chunks"]:
            raise ValueError(f"Duplicate chunk {index} for '{audio_id}' in {path} at line {line_no}")
        entry["chunks"][index] = validate_probs(record["probs"], stride_s, audio_id).probs

    result: "OrderedDict[str, Tuple[float, List[np.ndarray]]]" = OrderedDict()
    for audio_id, entry in grouped.items():
        indices = sorted(entry["chunks"])
        if indices != list(range(len(indices))):
            raise ValueError(f"Chunks of '{audio_id}' in {path} must be numbered 0..{len(indices) - 1}, got {indices}")
        result[audio_id] = (entry["stride_s"], [entry["chunks"][i] for i in indices])
    return result


# ---------------------------------------------------------------------------
# Segments
# ---------------------------------------------------------------------------


def _detect_segment_format(path: Path) -> str:
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                return "jsonl" if line.lstrip().startswith("{") else "tsv"
    return "jsonl"


def read_segments(
    path: Union[str, Path],
    fmt: str = "auto",
) -> "OrderedDict[str, SegmentSet]":
    """
    Read a segment file (JSONL or TSV).

    Args:
        path: Segment file
        fmt: 'jsonl', 'tsv' or 'auto' (sniffed from the first non-empty line)

    Returns:
        Ordered mapping audio_id -> SegmentSet (segments sorted by start)

    Raises:
        FileNotFoundError: If the file doesn't exist
        ValueError: If a line is malformed or segments overlap

    Example:
        >>> sets = read_segments("segments.jsonl")
        >>> sets["ted_1"].pairs()[:1]
        [(0.94, 4.06)]
    """
    path = Path(path)
    _require_file(path, "Segment file")
    if fmt == "auto":
        fmt = _detect_segment_format(path)
    if fmt not in SEGMENT_FORMATS:
        raise ValueError(f"Unknown segment format {fmt!r}, expected one of {', '.join(SEGMENT_FORMATS)}")

    pairs: "OrderedDict[str, List[Tuple[float, float]]]" = OrderedDict()
    if fmt == "jsonl":
        for line_no, record in _iter_json_lines(path):
            _require_keys(record, ["audio_id", "start", "end"], path, line_no)
            pairs.setdefault(str(record["audio_id"]), []).append(
                (float(record["start"]), float(record["end"]))
            )
    else:
        with open(path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, 1):
                if not line.strip():
                    continue
                fields = line.rstrip("\n").split("\t")
                if len(fields) != 3:
                    raise ValueError(
                        f"Expected 3 tab-separated fields in {path} at line {line_no}, got {len(fields)}"
                    )
                try:
                    start, end = float(fields[1]), float(fields[2])
                except ValueError:
                    raise ValueError(f"Non-numeric time in {path} at line {line_no}: {line.strip()}")
                pairs.setdefault(fields[0], []).append((start, end))

    sets: "OrderedDict[str, SegmentSet]" = OrderedDict()
    for audio_id, items in pairs.items():
        try:
            sets[audio_id] = SegmentSet.from_pairs(audio_id, sorted(items))
        except ValueError as e:
            raise ValueError(f"Invalid segments in {path}:\n{e}")

    logger.info(f"Loaded {sum(len(s) for s in sets.values())} segments of {len(sets)} audios from {path}")
    return sets


def format_segment_line(audio_id: str, segment: Segment, fmt: str = "jsonl") -> str:
    """One output line with times at 3 decimal places."""
    if fmt == "tsv":
        return f"{audio_id}\t{segment.start_s:.3f}\t{segment.end_s:.3f}"
    return f'{{"audio_id": {json.dumps(audio_id)}, "start": {segment.start_s:.3f}, "end": {segment.end_s:.3f}}}'


def write_segments(
    sets: Iterable[SegmentSet],
    path: Union[str, Path],
    fmt: str = "jsonl",
) -> Path:
    """Write segment sets in file order as JSONL or TSV."""
    if fmt not in SEGMENT_FORMATS:
        raise ValueError(f"Unknown segment format {fmt!r}, expected one of {', '.join(SEGMENT_FORMATS)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for s in sets:
            for segment in s:
                f.write(format_segment_line(s.audio_id, segment, fmt) + "\n")
    return path


# ---------------------------------------------------------------------------
# Labels, traces, text
# ---------------------------------------------------------------------------


def write_labels(examples: Iterable[Any], path: Union[str, Path]) -> Path:
    """
    Write training label windows, one JSON object per line:
    {"audio_id", "window_start", "stride_ms", "labels", "valid"}.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for example in examples:
            record = {
                "audio_id": example.labels.audio_id,
                "window_start": round(example.window.start_s, 3),
                "stride_ms": stride_to_ms(example.labels.stride_s),
                "labels": example.labels.labels.tolist(),
                "valid": example.valid,
            }
            f.write(json.dumps(record) + "\n")
    return path


def write_trace(traces: Iterable[Tuple[str, Sequence[Any]]], path: Union[str, Path]) -> Path:
    """
    Write split traces, one JSON object per split:
    {"audio_id", "seg_start", "seg_end", "t_hat_s", "p_min"}.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for audio_id, trace in traces:
            for split in trace:
                f.write(json.dumps({"audio_id": audio_id, **split.to_dict()}) + "\n")
    return path


def read_lines(path: Union[str, Path]) -> List[str]:
    """Read a UTF-8 text file with one segment per line (newlines stripped)."""
    path = Path(path)
    _require_file(path, "Text file")
    with open(path, "r", encoding="utf-8") as f:
        return [line.rstrip("\r\n") for line in f]


def write_lines(lines: Iterable[str], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(line + "\n")
    return path


def read_audio_lengths(path: Union[str, Path]) -> Dict[str, float]:
    """Read "audio_id<TAB>seconds" lines."""
    path = Path(path)
    _require_file(path, "Audio length file")
    lengths = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise ValueError(f"Expected 'audio_id<TAB>seconds' in {path} at line {line_no}")
            try:
                lengths[fields[0]] = float(fields[1])
            except ValueError:
                raise ValueError(f"Non-numeric length in {path} at line {line_no}: {fields[1]}")
    return lengths
