"""CSV/JSON output with pinned float formatting and metadata sidecars.

Floats are written with 17 significant digits, which round-trips every
IEEE double; together with per-sample random streams this makes outputs
byte-identical across reruns.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = [
    "FORMAT_VERSION",
    "fmt",
    "write_csv",
    "read_csv",
    "write_json",
    "sidecar_path",
    "sha256",
    "parse_grid",
]

FORMAT_VERSION = 1


def _code_version():
    from . import __version__

    return __version__


def fmt(x):
    if isinstance(x, (str, bytes)):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(data), indent=2, sort_keys=True) + "\n")
    return path


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_csv(path, columns, meta=None):
    """Write ``columns`` (an ordered mapping name -> sequence) and its sidecar.

    The sidecar always records the format version and code version; ``meta``
    adds run details such as the seed and conventions.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = [np.asarray(columns[k]) for k in names]
    n = len(data[0]) if data else 0
    if any(len(d) != n for d in data):
        raise ValueError("all columns must have the same length")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for i in range(n):
            writer.writerow([fmt(d[i]) for d in data])
    sidecar = {"format_version": FORMAT_VERSION, "code_version": _code_version(),
               "columns": names}
    sidecar.update(meta or {})
    write_json(sidecar_path(path), sidecar)
    return path


def read_csv(path):
    """Read a CSV written by :func:`write_csv` into a dict of arrays.

    Numeric columns become float arrays; anything else stays a list of strings.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    out = {}
    for j, name in enumerate(header):
        col = [r[j] for r in body]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError:
            out[name] = col
    return out


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def parse_grid(spec):
    """``"start:stop:points"`` -> ``numpy.linspace(start, stop, points)``."""
    try:
        start, stop, points = spec.split(":")
        return np.linspace(float(start), float(stop), int(points))
    except (AttributeError, ValueError) as exc:
        raise ValueError(f"grid must look like 'start:stop:points', got {spec!r}") from exc
