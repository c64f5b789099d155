"""Comma-separated numeric tables with lossless float formatting."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

FLOAT_FORMAT = "{:.16e}"


def format_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return FLOAT_FORMAT.format(value)


def render_table(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} values, header has {len(header)}")
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_table(path, header, rows) -> Path:
    path = Path(path)
    path.write_text(render_table(header, rows))
    return path


def read_table(path):
    """Return ``(header, rows)``; numeric cells come back as float."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[_parse(cell) for cell in row] for row in reader]
    return header, rows


def _parse(cell):
    try:
        return float(cell)
    except ValueError:
        return cell
