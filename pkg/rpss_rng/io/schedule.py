"""
Recorded per-permutation cost schedules as JSON arrays of integers.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable


def load_schedule(path: str | Path) -> list[int]:
    """
    Read a schedule such as ``[3, 1, 4, 1, 5]``.

    Raises:
        ValueError: If the file is not a JSON array of integers >= 1.
    """
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list):
        raise ValueError(f"{path}: schedule must be a JSON array")
    for i, value in enumerate(data):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ValueError(f"{path}: entry {i} must be an integer >= 1, got {value!r}")
    return data


def save_schedule(path: str | Path, ticks: Iterable[int]) -> Path:
    path = Path(path)
    path.write_text(json.dumps([int(t) for t in ticks]))
    return path
