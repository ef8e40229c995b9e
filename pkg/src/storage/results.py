"""
Result Storage

Writes analysis results as CSV tables or JSON documents. Every artifact
carries the run's config hash and the tool version, and nothing else that
varies between runs, so identical configs reproduce identical bytes.
"""

import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from src import __version__

logger = logging.getLogger(__name__)


def canonical_json(obj: Any) -> str:
    """Compact JSON with sorted keys; the input to config hashing."""
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def config_hash(obj: Any) -> str:
    """SHA-256 of the canonical JSON of ``obj``."""
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays, tuples, paths and non-finite floats into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


class ResultWriter:
    """Writes stamped result artifacts for one run."""

    def __init__(self, command: str, run_hash: str, version: str = __version__):
        """
        Args:
            command: CLI subcommand that produced the results
            run_hash: Config hash of the run
            version: Tool version stamped into every artifact
        """
        self.command = command
        self.run_hash = run_hash
        self.version = version

    def document(self, result: Any) -> Dict[str, Any]:
        return {
            "tool_version": self.version,
            "config_hash": self.run_hash,
            "command": self.command,
            "result": to_jsonable(result),
        }

    def render_json(self, result: Any) -> str:
        return json.dumps(self.document(result), indent=2, sort_keys=True) + "\n"

    def render_csv(self, frame: pd.DataFrame) -> str:
        stamped = frame.copy()
        stamped["config_hash"] = self.run_hash
        stamped["tool_version"] = self.version
        return stamped.to_csv(index=False, lineterminator="\n")

    def write_json(self, result: Any, path: Union[str, Path]) -> Path:
        return self.write_text(self.render_json(result), path)

    def write_csv(self, frame: pd.DataFrame, path: Union[str, Path]) -> Path:
        return self.write_text(self.render_csv(frame), path)

    def write_text(self, text: str, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            logger.error(f"Error writing {path}: {e}")
            raise
        logger.info(f"✓ Saved {self.command} results to {path}")
        return path


def emit(
    writer: ResultWriter,
    result: Any,
    fmt: str,
    path: Optional[Union[str, Path]] = None,
    frame: Optional[pd.DataFrame] = None,
) -> str:
    """
    Render a result as JSON or CSV and write it to ``path`` when given.

    CSV needs a table; results without one fall back to JSON.

    Returns:
        The rendered text
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"Unknown format: {fmt!r}")
    if fmt == "csv" and frame is not None:
        text = writer.render_csv(frame)
    else:
        if fmt == "csv":
            logger.warning(f"{writer.command} has no tabular output; writing JSON")
        text = writer.render_json(result)
    if path is not None:
        writer.write_text(text, path)
    return text
