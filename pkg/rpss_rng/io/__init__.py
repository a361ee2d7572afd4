"""File formats: histograms, reports, run manifests and tick schedules."""

from .histogram_io import (
    write_histogram_csv,
    read_histogram_csv,
    write_histogram_json,
    read_histogram_json,
    write_report_json,
    write_rows_csv,
    histogram_summary,
)
from .manifest import RunManifest, output_dir, OUTPUT_DIR_ENV
from .schedule import load_schedule, save_schedule

__all__ = [
    "write_histogram_csv",
    "read_histogram_csv",
    "write_histogram_json",
    "read_histogram_json",
    "write_report_json",
    "write_rows_csv",
    "histogram_summary",
    "RunManifest",
    "output_dir",
    "OUTPUT_DIR_ENV",
    "load_schedule",
    "save_schedule",
]
