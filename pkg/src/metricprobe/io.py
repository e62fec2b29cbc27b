"""CSV output with a ``#``-prefixed run manifest above the header row.

Layout::

    # command: sweep
    # tool_version: 0.1.0
    # timestamp: 2026-10-15T12:00:00+00:00
    # seed: 0
    # generator: PCG64
    # params: {"omega0": 0.0, ...}
    col_a,col_b,...
    ...

Floats are written with 17 significant digits so every value round-trips.
The timestamp honours ``SOURCE_DATE_EPOCH`` for byte-reproducible files.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .ensemble import GENERATOR_NAME

_MANIFEST_KEYS = ("command", "tool_version", "timestamp", "seed", "generator", "params")


def timestamp_now() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        when = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        when = datetime.now(timezone.utc).replace(microsecond=0)
    return when.isoformat()


@dataclass(frozen=True)
class RunManifest:
    command: str
    params: dict[str, Any]
    seed: int
    tool_version: str = __version__
    timestamp: str = field(default_factory=timestamp_now)
    generator: str = GENERATOR_NAME

    def header_lines(self) -> list[str]:
        values = {
            "command": self.command,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "seed": str(self.seed),
            "generator": self.generator,
            "params": json.dumps(self.params, sort_keys=True),
        }
        return [f"# {k}: {values[k]}" for k in _MANIFEST_KEYS]

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "RunManifest":
        found: dict[str, str] = {}
        for line in lines:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(": ")
            found[key] = value
        missing = [k for k in _MANIFEST_KEYS if k not in found]
        if missing:
            raise ValueError(f"CSV manifest is missing {missing}")
        return cls(
            command=found["command"],
            params=json.loads(found["params"]),
            seed=int(found["seed"]),
            tool_version=found["tool_version"],
            timestamp=found["timestamp"],
            generator=found["generator"],
        )


def format_value(v: Any) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def render_csv(manifest: RunManifest, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    for line in manifest.header_lines():
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path: str | Path, manifest: RunManifest, columns, rows) -> None:
    Path(path).write_text(render_csv(manifest, columns, rows))


@dataclass(frozen=True)
class CsvTable:
    manifest: RunManifest
    columns: list[str]
    rows: list[dict[str, str]]

    def column(self, name: str) -> list[float]:
        return [float(r[name]) for r in self.rows]


def read_csv(path: str | Path) -> CsvTable:
    text = Path(path).read_text()
    lines = text.splitlines()
    manifest = RunManifest.from_lines(lines)
    body = [ln for ln in lines if not ln.startswith("#")]
    reader = csv.DictReader(body)
    rows = list(reader)
    return CsvTable(manifest, list(reader.fieldnames or []), rows)


def csv_body(path: str | Path) -> str:
    """File contents without the manifest lines."""
    return "".join(
        ln for ln in Path(path).read_text().splitlines(keepends=True) if not ln.startswith("#")
    )
