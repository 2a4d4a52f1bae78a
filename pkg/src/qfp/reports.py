"""Deterministic CSV/JSON report emission.

Same rows in, same bytes out: floats are rendered with ``repr`` (shortest
round-trip form), key order is fixed by the caller, files carry no
timestamps, and writes go through a temp file plus rename so a crashed run
never leaves a half-written report.
"""

from __future__ import annotations

import csv
import io
import json
import os
from typing import Iterable, Mapping, Sequence


def render_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def csv_text(fieldnames: Sequence[str],
             rows: Iterable[Mapping[str, object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([render_value(row.get(name)) for name in fieldnames])
    return buf.getvalue()


def write_csv(path, fieldnames: Sequence[str],
              rows: Iterable[Mapping[str, object]]) -> None:
    atomic_write_text(path, csv_text(fieldnames, rows))


def json_text(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def write_json(path, payload) -> None:
    atomic_write_text(path, json_text(payload))
