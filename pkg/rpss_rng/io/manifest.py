"""
Run manifests: what was run, with which parameters, and what it wrote.

A manifest is written next to every command's outputs, also when the
command fails, and can be replayed with ``rpss replay``.
"""

from __future__ import annotations

import json
import os
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..timing import clock_resolution


OUTPUT_DIR_ENV = "RPSS_OUTPUT_DIR"


def output_dir(explicit: str | Path | None = None) -> Path:
    """
    Directory for command outputs.

    Order: explicit argument, RPSS_OUTPUT_DIR, current directory.
    """
    if explicit:
        path = Path(explicit)
    else:
        path = Path(os.environ.get(OUTPUT_DIR_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def platform_descriptor() -> str:
    return (f"{platform.platform()}; {platform.machine()}; "
            f"python {platform.python_version()}; "
            f"perf_counter resolution {clock_resolution():g}s")


@dataclass
class RunManifest:
    """
    Reproducibility record of one CLI run.

    Attributes:
        command: Subcommand name.
        arguments: Resolved command arguments.
        config: Engine configuration as a dict, when one was used.
        seed: Initial seed.
        mode: "hardware" or "sim".
        generator: Pad generator used: "lcg", "pcg64", or both for a sweep.
        trials: Cycles or symbols requested.
        outputs: Every file the run wrote.
        status: "running", "ok" or "failed".
    """
    command: str
    arguments: dict = field(default_factory=dict)
    config: dict | None = None
    seed: int | None = None
    mode: str | None = None
    generator: str | None = None
    trials: int | None = None
    outputs: list[str] = field(default_factory=list)
    started: str = field(default_factory=_now)
    finished: str | None = None
    platform: str = field(default_factory=platform_descriptor)
    status: str = "running"
    error: str | None = None

    def add_output(self, path: str | Path):
        self.outputs.append(str(path))

    def finish(self, error: BaseException | None = None):
        self.finished = _now()
        self.status = "failed" if error else "ok"
        if error is not None:
            self.error = f"{type(error).__name__}: {error}"

    def to_dict(self) -> dict:
        return asdict(self)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n")
        return path

    @classmethod
    def load(cls, path: str | Path) -> RunManifest:
        data = json.loads(Path(path).read_text())
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)
