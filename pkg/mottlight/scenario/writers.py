"""Run outputs: comma-separated tables, JSON summary and grayscale images.

Every output path is written by exactly one call, so concurrent runs into
different directories never share a file.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

try:
    import cv2
except ImportError:
    cv2 = None  # images are skipped without OpenCV

logger = logging.getLogger("mottlight.scenario")

TABLE_FORMAT = "%.10g"


@dataclass(frozen=True)
class Table:
    """Named columns of equal length."""

    header: Sequence[str]
    columns: Sequence[np.ndarray]

    def __post_init__(self):
        lengths = {len(c) for c in self.columns}
        if len(self.header) != len(self.columns) or len(lengths) > 1:
            raise ValueError("table needs one header per column and equal column lengths")

    def as_array(self) -> np.ndarray:
        return np.column_stack([np.asarray(c, dtype=float) for c in self.columns])


def write_table(path: Path, table: Table) -> Path:
    """Write a table as CSV with a header row."""
    path = Path(path)
    np.savetxt(
        path,
        table.as_array(),
        delimiter=",",
        header=",".join(table.header),
        comments="",
        fmt=TABLE_FORMAT,
    )
    return path


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _finite(value):
    """Replace inf/nan (not valid JSON) by None, recursively."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def write_summary(path: Path, summary: dict) -> Path:
    """Write the run summary as indented, key-sorted JSON."""
    path = Path(path)
    text = json.dumps(_finite(summary), indent=2, sort_keys=True, default=_jsonable)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def to_gray16(image: np.ndarray) -> np.ndarray:
    """Scale a non-negative image to the full 16-bit range."""
    image = np.asarray(image, dtype=float)
    peak = float(image.max(initial=0.0))
    if peak <= 0:
        return np.zeros(image.shape, dtype=np.uint16)
    return np.round(np.clip(image / peak, 0.0, 1.0) * 65535.0).astype(np.uint16)


def write_image(path: Path, image: np.ndarray) -> bool:
    """Write a camera image as a 16-bit binary PGM.

    Returns:
        bool: False when OpenCV is unavailable or encoding failed
    """
    if cv2 is None:
        logger.warning("OpenCV not available; skipping image %s", path)
        return False
    ok, buffer = cv2.imencode(".pgm", to_gray16(image))
    if not ok:
        logger.error("Failed to encode image %s", path)
        return False
    Path(path).write_bytes(buffer.tobytes())
    return True
