"""CSV output with a ``#``-prefixed metadata header.

Rows are formatted with a fixed number of significant digits so that the
same inputs always produce the same bytes.
"""

from __future__ import annotations

import hashlib
import io
import json
from pathlib import Path

import numpy as np

from . import __version__

UNITS_NOTE = "frequencies in MHz are cyclic (MHz = omega / 2pi)"


def config_hash(payload) -> str:
    """Short stable hash of a JSON-serializable payload."""
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def write_csv(target, columns, rows, metadata=None):
    """Write ``rows`` (an iterable of sequences) under ``columns``.

    ``target`` is a path or a text stream.  ``metadata`` key/value pairs are
    written as ``# key: value`` lines after the version and units lines.
    """
    out = io.StringIO()
    out.write(f"# eitsim {__version__}\n")
    out.write(f"# {UNITS_NOTE}\n")
    for k, v in (metadata or {}).items():
        out.write(f"# {k}: {v}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")
    text = out.getvalue()
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text)
    return text


def read_csv(source):
    """Return (metadata dict, column names, array) from ``write_csv`` output.

    The array is float unless some column holds text, in which case it is
    an object array of strings.
    """
    text = source.read() if hasattr(source, "read") else Path(source).read_text()
    meta, data_lines, header = {}, [], None
    for line in text.splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if ": " in body:
                k, v = body.split(": ", 1)
                meta[k] = v
            continue
        if header is None:
            header = line.split(",")
        elif line.strip():
            data_lines.append(line.split(","))
    try:
        arr = np.array(data_lines, dtype=float)
    except ValueError:
        arr = np.array(data_lines, dtype=object)
    arr = arr.reshape(-1, len(header or []))
    return meta, header, arr
