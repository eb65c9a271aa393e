"""JSON and CSV reading and writing."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .complex import Complex, complex_from_json, complex_to_json
from .develop import EquivariantMap, map_from_json, map_to_json
from .simplex import simplex_from_json, simplex_to_json

CENSUS_COLUMNS = ["face_id", "dim", "value", "stderr", "degree", "certified"]


def fmt(x) -> str:
    """Stable text for numbers: integers as is, floats with 12 significant digits."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0:
        return "0"
    return format(x, ".12g")


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path, data: dict):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1, sort_keys=False)
        fh.write("\n")


def load_complex(path) -> Complex:
    return complex_from_json(read_json(path))


def load_map(path, K: Complex) -> EquivariantMap:
    return map_from_json(read_json(path), K)


def load_simplex(path):
    return simplex_from_json(read_json(path))


def save_complex(path, K: Complex):
    write_json(path, complex_to_json(K))


def save_map(path, F: EquivariantMap):
    write_json(path, map_to_json(F))


def save_simplex(path, T):
    write_json(path, simplex_to_json(T))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def census_rows(entries) -> list:
    return [[e.face, e.dim, e.value, e.stderr, e.degree, e.certified] for e in entries]


def write_text(path, text: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def gnuplot_script(csv_path: str, xcol: int, ycol: int, ecol: int | None, title: str) -> str:
    """A plain gnuplot script plotting one CSV column against another."""
    lines = [
        "set datafile separator ','",
        f"set title '{title}'",
        "set key off",
    ]
    if ecol is None:
        lines.append(f"plot '{csv_path}' every ::1 using {xcol}:{ycol} with linespoints")
    else:
        lines.append(f"plot '{csv_path}' every ::1 using {xcol}:{ycol}:{ecol} with yerrorbars")
    return "\n".join(lines) + "\n"
