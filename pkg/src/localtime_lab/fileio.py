"""Text formats: path files (``t,value`` CSV) and code files (one 0/1 line)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidPath
from .path_model import BinaryCode, PiecewiseLinearPath

PATH_HEADER = "t,value"


def format_path(path: PiecewiseLinearPath) -> str:
    lines = [PATH_HEADER]
    lines += [f"{t:.17g},{v:.17g}" for t, v in zip(path.times.tolist(), path.values.tolist())]
    return "\n".join(lines) + "\n"


def write_path(path: PiecewiseLinearPath, file) -> None:
    Path(file).write_text(format_path(path))


def parse_path(text: str) -> PiecewiseLinearPath:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != PATH_HEADER:
        raise InvalidPath(f"path file must start with header {PATH_HEADER!r}")
    try:
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise InvalidPath(f"bad number in path file: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 2:
        raise InvalidPath("each path line must be a t,value pair")
    if data[0, 0] != 0.0 or data[0, 1] != 0.0:
        raise InvalidPath("first path line must be 0,0")
    return PiecewiseLinearPath(data[:, 0], data[:, 1])


def read_path(file) -> PiecewiseLinearPath:
    return parse_path(Path(file).read_text())


def write_code(code: BinaryCode, file) -> None:
    Path(file).write_text(str(code) + "\n")


def read_code(file) -> BinaryCode:
    return BinaryCode.from_string(Path(file).read_text())


def write_sidecar(meta: dict, file) -> None:
    Path(file).write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
