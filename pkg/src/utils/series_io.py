"""JSON-lines series files and atomic output writes."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Optional, Union

from src.services.tv_engine import TVRecord, TVSeries
from src.utils.errors import MalformedInput

PathLike = Union[str, Path]


def atomic_write_text(path: PathLike, text: str) -> None:
    """Write to a temporary file next to `path`, then rename over it."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def append_record(path: PathLike, rec: TVRecord) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("a", encoding="utf-8") as fh:
        fh.write(rec.to_json_line() + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def read_series(path: PathLike, label: str = "", target: Optional[float] = None) -> TVSeries:
    series = TVSeries(manifold_label=label or Path(path).stem, target_limit=target)
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise MalformedInput(f"cannot read series {path}: {e}") from e
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = TVRecord.from_json_line(line)
        except (ValueError, KeyError, TypeError) as e:
            raise MalformedInput(f"bad series record in {path}: {e}", line=lineno, column=1) from e
        series.add(rec)
    return series


def write_series(path: PathLike, series: TVSeries) -> None:
    atomic_write_text(path, "".join(rec.to_json_line() + "\n" for rec in series.records))


__all__ = ["atomic_write_text", "append_record", "read_series", "write_series"]
