"""
Timeline Renderer

Draws one audio's probability stream, threshold and segments into an image:

    +--------------------------------------+
    | probability curve, dashed threshold  |  plot area
    +--------------------------------------+
    | predicted segments                   |  bar lane
    | oracle segments (optional)           |  bar lane
    +--------------------------------------+
"""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image, ImageDraw

from .probabilities import FrameProbabilities
from .segments import SegmentSet

logger = logging.getLogger(__name__)

SUPPORTED_FORMATS = ("PNG", "JPEG", "WEBP")

BACKGROUND = (255, 255, 255, 0)
CURVE_COLOR = (31, 119, 180, 255)
THRESHOLD_COLOR = (214, 39, 40, 255)
SEGMENT_COLOR = (44, 160, 44, 255)
ORACLE_COLOR = (127, 127, 127, 255)
LANE_HEIGHT = 12
LANE_GAP = 4
DASH = 6


def render_timeline(
    probs: FrameProbabilities,
    segments: SegmentSet,
    output_path: Union[str, Path],
    threshold: float = 0.5,
    pixels_per_second: float = 50,
    height: int = 120,
    oracle: Optional[SegmentSet] = None,
    fmt: Optional[str] = None,
) -> Path:
    """
    Render a segmentation timeline image.

    Args:
        probs: Probability stream of the audio
        segments: Predicted segments of the same audio
        output_path: Where to save the image
        threshold: Threshold line drawn across the plot
        pixels_per_second: Horizontal scale
        height: Height of the probability plot in pixels
        oracle: Optional oracle segments drawn in a second lane
        fmt: Output format ('PNG', 'JPEG', 'WEBP'). Auto-detected if None.

    Returns:
        Path to the saved image

    Raises:
        ValueError: If the stream is empty, the scale is not positive or
            the format is unsupported

    Example:
        >>> render_timeline(probs, segments, "out/ted_1.png", oracle=gold)
        PosixPath('out/ted_1.png')
    """
    output_path = Path(output_path)
    fmt = _resolve_format(output_path, fmt)

    if probs.num_frames == 0:
        raise ValueError(f"Cannot render an empty probability stream for '{probs.audio_id}'")
    if pixels_per_second <= 0 or height <= 0:
        raise ValueError(
            f"Invalid image scale: pixels_per_second={pixels_per_second}, height={height}\n"
            f"Both must be positive"
        )

    width = max(1, int(round(probs.duration_s * pixels_per_second)))
    lanes = 2 if oracle is not None else 1
    total_height = height + lanes * (LANE_HEIGHT + LANE_GAP) + LANE_GAP

    image = Image.new("RGBA", (width, total_height), BACKGROUND)
    draw = ImageDraw.Draw(image)

    def y_of(p: float) -> float:
        return (height - 1) * (1.0 - p)

    # Frame values at frame centers.
    xs = (np.arange(probs.num_frames) + 0.5) * probs.stride_s * pixels_per_second
    ys = y_of(probs.probs)
    if probs.num_frames == 1:
        draw.point((float(xs[0]), float(ys[0])), fill=CURVE_COLOR)
    else:
        draw.line(list(zip(xs.tolist(), ys.tolist())), fill=CURVE_COLOR, width=1)

    y_thr = y_of(threshold)
    for x in range(0, width, 2 * DASH):
        draw.line([(x, y_thr), (min(x + DASH, width - 1), y_thr)], fill=THRESHOLD_COLOR, width=1)

    top = height + LANE_GAP
    _draw_lane(draw, segments, top, pixels_per_second, SEGMENT_COLOR)
    if oracle is not None:
        _draw_lane(draw, oracle, top + LANE_HEIGHT + LANE_GAP, pixels_per_second, ORACLE_COLOR)

    _save_image(image, output_path, fmt)
    logger.info(f"Saved timeline of '{probs.audio_id}' ({width}×{total_height} px) to {output_path}")
    return output_path


def _draw_lane(draw: ImageDraw.ImageDraw, segments: SegmentSet, top: int, pps: float, color) -> None:
    for seg in segments:
        x0 = seg.start_s * pps
        x1 = max(x0 + 1, seg.end_s * pps)
        draw.rectangle([x0, top, x1 - 1, top + LANE_HEIGHT - 1], fill=color)


def _resolve_format(output_path: Path, fmt: Optional[str]) -> str:
    if fmt is None:
        fmt = output_path.suffix.upper().lstrip(".") or "PNG"
    fmt = fmt.upper()
    if fmt == "JPG":
        fmt = "JPEG"
    if fmt not in SUPPORTED_FORMATS:
        raise ValueError(
            f"Unsupported image format: {fmt}\n"
            f"Expected one of {', '.join(SUPPORTED_FORMATS)}"
        )
    return fmt


def _save_image(image: Image.Image, output_path: Path, fmt: str):
    """Save image with format-specific options."""
    output_path.parent.mkdir(parents=True, exist_ok=True)

    save_kwargs = {}
    if fmt == "JPEG":
        # JPEG has no alpha: flatten onto white
        background = Image.new("RGB", image.size, (255, 255, 255))
        background.paste(image, mask=image.split()[3])
        image = background
        save_kwargs = {"quality": 95, "optimize": True}
    elif fmt == "WEBP":
        save_kwargs = {"quality": 95, "method": 6}
    elif fmt == "PNG":
        save_kwargs = {"optimize": True}

    image.save(output_path, format=fmt, **save_kwargs)
