"""
Histogram and report files.

CSV: header ``value,count``, values ascending. Residue histograms list
every residue 0..R-1, including empty ones.

JSON: ``{"bins": {"0": 12, "1": 9, ...}, "total": 21, ...}`` with any
extra summary fields alongside.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..models.histogram import Histogram, UniformityReport


CSV_HEADER = ["value", "count"]


def write_histogram_csv(h: Histogram, path: str | Path, R: int | None = None) -> Path:
    """Write ``h`` as CSV; pass R to emit every residue."""
    path = Path(path)
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        writer.writerows(h.rows(R))
    return path


def read_histogram_csv(path: str | Path) -> Histogram:
    with Path(path).open(newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}, got {header}")
        return Histogram({int(value): int(count) for value, count in reader})


def histogram_summary(h: Histogram) -> dict:
    """Mean, population variance and mode of a non-empty histogram."""
    return {"mean": h.mean(), "variance": h.variance(), "mode": h.mode(), "total": h.total}


def write_histogram_json(h: Histogram, path: str | Path, **extra) -> Path:
    path = Path(path)
    payload = {"bins": h.to_dict(), "total": h.total, **extra}
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def read_histogram_json(path: str | Path) -> Histogram:
    data = json.loads(Path(path).read_text())
    return Histogram.from_dict(data["bins"])


def write_report_json(report: UniformityReport, path: str | Path, **extra) -> Path:
    path = Path(path)
    path.write_text(json.dumps({**report.to_dict(), **extra}, indent=2) + "\n")
    return path


def write_rows_csv(rows: list[dict], path: str | Path) -> Path:
    """Write flat dicts; columns are the union of keys in first-seen order."""
    path = Path(path)
    fieldnames = list(dict.fromkeys(key for row in rows for key in row))
    with path.open("w", newline="") as f:
        if fieldnames:
            writer = csv.DictWriter(f, fieldnames=fieldnames, restval="")
            writer.writeheader()
            writer.writerows(rows)
    return path
