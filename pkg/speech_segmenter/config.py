"""
Segmenter Configuration

Default hyper-parameters and the validated SegmenterConfig container.
"""

import logging
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

# Stream layout
DEFAULT_STRIDE_S = 0.04
DEFAULT_WINDOW_S = 20.0
DEFAULT_OVERLAP_S = 2.0

# Segmentation
DEFAULT_THRESHOLD = 0.5
DEFAULT_MINLEN_S = 0.2
DEFAULT_EXPAND_S = 0.06
DEFAULT_MAXLEN_GRID = (8.0, 10.0, 15.0, 20.0, 30.0)

ALGORITHMS = ("proposed", "pdac", "pthr", "fixed")

WORKERS_ENV_VAR = "SEGMENTER_WORKERS"


@dataclass(frozen=True)
class SegmenterConfig:
    """
    Algorithm choice and hyper-parameters for turning probabilities into segments.

    For the ``fixed`` algorithm, ``maxlen_s`` is the piece length and the
    probability-related fields are ignored.

    Raises:
        ValueError: If any field is out of range
    """

    maxlen_s: float
    algorithm: str = "proposed"
    threshold: float = DEFAULT_THRESHOLD
    minlen_s: float = DEFAULT_MINLEN_S
    expand_s: float = DEFAULT_EXPAND_S

    def __post_init__(self):
        errors = []
        if self.algorithm not in ALGORITHMS:
            errors.append(f"algorithm must be one of {', '.join(ALGORITHMS)}, got {self.algorithm!r}")
        if not (0.0 < self.threshold < 1.0):
            errors.append(f"threshold must be in (0, 1), got {self.threshold}")
        if not (0.0 <= self.minlen_s < self.maxlen_s):
            errors.append(
                f"need 0 <= minlen < maxlen, got minlen={self.minlen_s}, maxlen={self.maxlen_s}"
            )
        if self.expand_s < 0:
            errors.append(f"expand must be non-negative, got {self.expand_s}")
        if errors:
            raise ValueError("Invalid segmenter configuration:\n  " + "\n  ".join(errors))

    def replace(self, **changes: Any) -> "SegmenterConfig":
        """Return a copy with some fields changed (validated again)."""
        values = asdict(self)
        values.update(changes)
        return SegmenterConfig(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def default_workers(env: Optional[Dict[str, str]] = None) -> int:
    """
    Resolve the default worker count from ``SEGMENTER_WORKERS``.

    Falls back to 1 when the variable is unset or unusable.

    Example:
        >>> default_workers({"SEGMENTER_WORKERS": "4"})
        4
    """
    env = os.environ if env is None else env
    raw = env.get(WORKERS_ENV_VAR)
    if not raw:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {WORKERS_ENV_VAR}={raw!r}, using 1 worker")
        return 1
    if workers < 1:
        logger.warning(f"Ignoring {WORKERS_ENV_VAR}={workers}, using 1 worker")
        return 1
    return workers
