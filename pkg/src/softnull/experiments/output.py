"""CSV / JSON table writers with stable, byte-reproducible formatting."""

import csv
import io
import json
import math

import numpy as np


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return f"{v:.6f}"
    return str(value)


def _json_value(value):
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    v = float(value)
    if not math.isfinite(v):
        return _cell(v)
    return round(v, 6)


def format_table(columns, rows, fmt="csv"):
    """Render rows as CSV (header first) or as a JSON list of records."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        records = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps({"columns": list(columns), "rows": records}, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_table(columns, rows, path=None, fmt="csv", stream=None):
    text = format_table(columns, rows, fmt)
    if path is None:
        stream.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
