"""Bit-exact artifact writers: binary PPM, 17-digit CSV, JSON manifests."""

from __future__ import annotations

import hashlib
import json
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__


@dataclass
class Table:
    header: list[str]
    rows: list[tuple] = field(default_factory=list)


def write_ppm(image: np.ndarray, path) -> None:
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] == 0 or img.shape[1] == 0:
        raise ValueError("expected a non-empty (height, width, 3) image")
    height, width = img.shape[:2]
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    x = float(value)
    if x == 0.0:
        x = 0.0  # drops the sign of -0.0
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def write_csv(table: Table, path) -> None:
    width = len(table.header)
    lines = [",".join(table.header)]
    for row in table.rows:
        if len(row) != width:
            raise ValueError("ragged table row")
        lines.append(",".join(format_cell(v) for v in row))
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> Table:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    header = lines[0].split(",")
    rows = [tuple(float(v) for v in line.split(",")) for line in lines[1:]]
    return Table(header, rows)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


WALL_CLOCK_KEYS = ("wall_clock_seconds",)


def build_manifest(command: str, argv: list[str], config: dict, artifacts: list,
                   wall_clock_seconds: float, **extra) -> dict:
    manifest = {
        "tool": "mandeldde",
        "tool_version": __version__,
        "command": command,
        "command_line": ["mandeldde", *argv],
        "config": config,
        "artifacts": {Path(p).name: sha256_file(p) for p in artifacts},
        "wall_clock_seconds": wall_clock_seconds,
    }
    manifest.update(extra)
    return manifest


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_manifest(manifest: dict, path) -> None:
    text = json.dumps(_jsonable(manifest), indent=2, sort_keys=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def manifest_path(artifact) -> Path:
    p = Path(artifact)
    return p.with_name(p.stem + ".manifest.json")
