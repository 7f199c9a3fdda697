"""Small helpers for deterministic artifact files."""
from __future__ import annotations

import csv
import json

from . import __version__


def metadata_line(config: dict) -> str:
    """Text of the '#' comment line heading every artifact (no leading '#')."""
    return f"harmgrowth {__version__} config={json.dumps(config, sort_keys=True, separators=(',', ':'))}"


def write_rows(path, header, rows, comment=None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path, obj, comment=None):
    # JSON has no comments; the metadata rides along as a "_meta" field.
    payload = dict(obj)
    if comment:
        payload["_meta"] = comment
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)) or type(v).__name__.startswith("int"):
        return str(int(v))
    if isinstance(v, str):
        return v
    try:
        f = float(v)
    except (TypeError, ValueError):
        return str(v)
    return "nan" if f != f else repr(f)
