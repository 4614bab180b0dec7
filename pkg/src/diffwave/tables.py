"""Plain-text self-describing tables and atomic file output.

Layout::

    # diffwave-<kind> v1
    key=value
    ...
    # columns: x v u
    0.5 1.0 0.0
    ...
"""
from __future__ import annotations

import io
import os
import tempfile

import numpy as np

__all__ = ["write_table", "read_table", "atomic_write_text", "atomic_write_bytes"]


def atomic_write_bytes(path, data: bytes):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def _fmt_value(value):
    if isinstance(value, (list, tuple, np.ndarray)):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(path, kind, params, columns):
    """Write ``columns`` (mapping name -> 1-D array, equal lengths) with a parameter header."""
    names = list(columns)
    buf = io.StringIO()
    buf.write(f"# diffwave-{kind} v1\n")
    for key, value in params.items():
        if "=" in str(key) or "\n" in _fmt_value(value):
            raise ValueError(f"parameter {key!r} cannot be serialised")
        buf.write(f"{key}={_fmt_value(value)}\n")
    if names:
        data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
        buf.write("# columns: " + " ".join(names) + "\n")
        np.savetxt(buf, data, fmt="%.17g")
    atomic_write_text(path, buf.getvalue())


def read_table(path):
    """Return ``(kind, params, columns)``; parameter values are left as strings."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# diffwave-") or not lines[0].endswith(" v1"):
        raise ValueError(f"{path}: not a diffwave v1 table")
    kind = lines[0][len("# diffwave-"):-len(" v1")]
    params, names, body_start = {}, [], len(lines)
    for i, line in enumerate(lines[1:], start=1):
        if line.startswith("# columns:"):
            names = line[len("# columns:"):].split()
            body_start = i + 1
            break
        if line.startswith("#") or not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{i + 1}: expected key=value")
        params[key.strip()] = value.strip()
    columns = {}
    if names:
        body = "\n".join(lines[body_start:])
        data = np.loadtxt(io.StringIO(body), ndmin=2) if body.strip() else np.empty((0, len(names)))
        if data.shape[1] != len(names):
            raise ValueError(f"{path}: expected {len(names)} columns, found {data.shape[1]}")
        columns = {n: data[:, j] for j, n in enumerate(names)}
    return kind, params, columns
