"""Signal files and CSV tables.

A signal file holds one decimal real per line (UTF-8, ``\\n`` endings).
Tables are comma separated with a header row; floats are written with 12
significant digits.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from segclust.errors import ValidationError
from segclust.signal import PiecewiseSpec

SPEC_HEADER = ("cluster_index", "level", "seg_start", "seg_end")


class ParseError(ValidationError):
    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.path = str(path)
        self.line = line


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(value)


def read_signal(path) -> np.ndarray:
    path = Path(path)
    values = []
    with path.open(encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for i, line in enumerate(lines, start=1):
        try:
            v = float(line)
        except ValueError:
            raise ParseError(path, i, f"not a number: {line!r}") from None
        if not math.isfinite(v):
            raise ParseError(path, i, f"value is not finite: {line!r}")
        values.append(v)
    if not values:
        raise ParseError(path, 1, "signal file is empty")
    return np.array(values)


def write_signal(path, values: Iterable[float]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for v in values:
            fh.write(fmt(float(v)) + "\n")


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_table(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(path, 1, "missing header row")
    return rows[0], rows[1:]


def write_spec(path, spec: PiecewiseSpec) -> None:
    write_table(path, SPEC_HEADER, spec.to_rows())


def read_spec(path) -> PiecewiseSpec:
    header, rows = read_table(path)
    if tuple(h.strip() for h in header) != SPEC_HEADER:
        raise ParseError(path, 1, f"expected header {','.join(SPEC_HEADER)}")
    parsed = []
    for i, row in enumerate(rows, start=2):
        if len(row) != 4:
            raise ParseError(path, i, f"expected 4 fields, got {len(row)}")
        try:
            parsed.append((int(row[0]), float(row[1]), int(row[2]), int(row[3])))
        except ValueError as exc:
            raise ParseError(path, i, str(exc)) from None
    if not parsed:
        raise ParseError(path, 2, "spec table has no rows")
    return PiecewiseSpec.from_rows(parsed)
