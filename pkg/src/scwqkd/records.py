"""CSV and JSON emission of rate records."""

from __future__ import annotations

import csv
import io
import json


def _cell(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def to_json(rows, columns: list[str]) -> str:
    """One object for a single dict, an array for a list."""
    if isinstance(rows, dict):
        return json.dumps({c: rows[c] for c in columns}, indent=2) + "\n"
    return json.dumps([{c: r[c] for c in columns} for r in rows], indent=2) + "\n"


def parse_csv(text: str) -> list[dict]:
    """Read rows written by :func:`to_csv` back into typed dicts."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        rec = {}
        for k, v in row.items():
            if k in ("saturated_flag",):
                rec[k] = v == "1"
            elif k == "converged_steps":
                rec[k] = int(v)
            else:
                rec[k] = float(v)
        out.append(rec)
    return out
