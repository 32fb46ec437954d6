"""Text and image formats: 17-digit JSON, CSV tables, PGM (P2/P5)."""
from __future__ import annotations

import json
import math
import re
from pathlib import Path

import numpy as np

from .filterbank import ImageBuffer


def _render(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialise non-finite value {x}")
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_render(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, (bool, np.bool_)) for v in seq):
            return "[" + ", ".join(_render(v, indent, level + 1) for v in seq) + "]"
        if not seq:
            return "[]"
        return "[\n" + ",\n".join(pad + _render(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float printed at 17 significant digits."""
    return _render(obj, indent, 0) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def write_csv(path, first, values, header: str) -> None:
    lines = [header]
    for a, v in zip(first, values):
        a = str(int(a)) if header.startswith("index") else format(float(a), ".17g")
        lines.append(f"{a},{format(float(v), '.17g')}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_grid_csv(path, t, values) -> None:
    write_csv(path, t, values, "t,value")


def write_signal_csv(path, values) -> None:
    write_csv(path, range(len(values)), values, "index,value")


def read_signal_csv(path) -> np.ndarray:
    """Read the ``value`` column of an ``index,value`` (or ``t,value``) table."""
    rows = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows:
        raise ValueError(f"{path}: empty signal file")
    head = [h.strip() for h in rows[0].split(",")]
    first_line = 1
    if any(not _is_number(h) for h in head):
        if "value" not in head:
            raise ValueError(f"{path}: header has no 'value' field")
        col = head.index("value")
        rows = rows[1:]
        first_line = 2
    else:
        col = len(head) - 1
    out = []
    for n, row in enumerate(rows, start=first_line):
        fields = row.split(",")
        try:
            out.append(float(fields[col]))
        except (ValueError, IndexError):
            raise ValueError(f"{path}: line {n}: field 'value' is not a number: {row!r}") from None
    return np.array(out)


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def read_pgm(path) -> ImageBuffer:
    data = Path(path).read_bytes()
    pos = 0
    header = []
    while len(header) < 4:
        m = _TOKEN.match(data, pos)
        if not m:
            raise ValueError(f"{path}: truncated PGM header")
        header.append(m.group(1))
        pos = m.end()
    magic = header[0]
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"{path}: field 'magic' must be P2 or P5, got {magic!r}")
    try:
        width, height, maxval = (int(h) for h in header[1:])
    except ValueError:
        raise ValueError(f"{path}: non-integer width/height/maxval in header") from None
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise ValueError(f"{path}: bad width/height/maxval {width}/{height}/{maxval}")
    if magic == b"P5":
        pos += 1  # single whitespace after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[pos:pos + width * height * dtype.itemsize]
        if len(raw) != width * height * dtype.itemsize:
            raise ValueError(f"{path}: pixel data shorter than width*height")
        px = np.frombuffer(raw, dtype=dtype).astype(float)
    else:
        toks = data[pos:].split()
        if len(toks) < width * height:
            raise ValueError(f"{path}: pixel data shorter than width*height")
        px = np.array([int(t) for t in toks[:width * height]], dtype=float)
    return ImageBuffer(width, height, px.reshape(height, width), maxval)


def write_pgm(path, img: ImageBuffer, binary: bool = True) -> None:
    maxval = int(img.maxval)
    px = np.clip(np.rint(img.pixels), 0, maxval).astype(np.int64)
    head = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n{maxval}\n".encode()
    if binary:
        dtype = ">u2" if maxval > 255 else "u1"
        body = px.astype(dtype).tobytes()
    else:
        body = ("\n".join(" ".join(str(v) for v in row) for row in px) + "\n").encode()
    Path(path).write_bytes(head + body)
