"""
Run Manifest

Records what produced an output file: tool version, resolved configuration,
input digests and a timestamp. Written next to the output as
``<output>.manifest.json``.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

from . import __version__

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"


@dataclass(frozen=True)
class RunManifest:
    """Provenance of one command run."""

    command: str
    config: Dict[str, Any]
    inputs: Dict[str, str]
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tool": "speech_segmenter",
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "timestamp": self.timestamp,
        }

    def without_timestamp(self) -> Dict[str, Any]:
        data = self.to_dict()
        del data["timestamp"]
        return data


def file_digest(path: Union[str, Path]) -> str:
    """SHA-256 hex digest of a file, read in 1 MiB blocks."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Input file not found: {path}")
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def build_manifest(
    command: str,
    config: Dict[str, Any],
    inputs: Iterable[Union[str, Path]],
    timestamp: Optional[str] = None,
) -> RunManifest:
    """
    Build the manifest of one run.

    Args:
        command: Subcommand name (e.g. "segment")
        config: Fully resolved configuration, JSON-serialisable
        inputs: Input files; directories are listed but not hashed
        timestamp: Fixed timestamp (defaults to now, UTC)

    Returns:
        RunManifest
    """
    digests = {}
    for path in inputs:
        path = Path(path)
        digests[str(path)] = "directory" if path.is_dir() else file_digest(path)
    if timestamp is None:
        return RunManifest(command, dict(config), digests)
    return RunManifest(command, dict(config), digests, timestamp=timestamp)


def manifest_path(output_path: Union[str, Path]) -> Path:
    output_path = Path(output_path)
    return output_path.with_name(output_path.name + MANIFEST_SUFFIX)


def write_manifest(manifest: RunManifest, output_path: Union[str, Path]) -> Path:
    """Write ``<output_path>.manifest.json`` and return its path."""
    path = manifest_path(output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    logger.debug(f"Wrote manifest {path}")
    return path
