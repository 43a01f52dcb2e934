"""Reading and writing binary shapes as PBM/PGM images.

Supported formats: P1/P4 (bitmaps, 1 means black means in-set) and P2/P5
(graymaps, a pixel strictly above the threshold is in-set).  Files are
written in a canonical form (no comments, maxval 255, in-set pixels 255)
so that a write/read cycle reproduces the bits and repeated writes are
byte-identical.

A slice stack is a numbered family of same-sized images, e.g.
``slice_%03d.pgm``; indices must be consecutive starting at 0 or 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PnmFormatError
from .raster import Raster

__all__ = [
    "SliceStack",
    "load_stack",
    "read_pnm",
    "save_stack",
    "write_pnm",
]


@dataclass(frozen=True)
class SliceStack:
    """Shapes loaded from a numbered image family, in index order."""

    slices: tuple[Raster, ...]
    spacing: float = 1.0
    source: str = ""

    def positions(self) -> list[float]:
        return [i * self.spacing for i in range(len(self.slices))]


class _Tokens:
    """Whitespace/comment-aware scanner over the header part of a file."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_separators(self) -> None:
        while self.pos < len(self.data):
            c = self.data[self.pos:self.pos + 1]
            if c.isspace():
                self.pos += 1
            elif c == b"#":
                nl = self.data.find(b"\n", self.pos)
                self.pos = len(self.data) if nl < 0 else nl + 1
            else:
                return

    def next_token(self) -> bytes:
        self._skip_separators()
        start = self.pos
        while self.pos < len(self.data) and not self.data[self.pos:self.pos + 1].isspace():
            self.pos += 1
        if start == self.pos:
            raise PnmFormatError("unexpected end of header")
        return self.data[start:self.pos]

    def next_int(self) -> int:
        tok = self.next_token()
        if not re.fullmatch(rb"\d+", tok):
            raise PnmFormatError(f"expected integer, got {tok!r}")
        return int(tok)

    def raw_rest(self) -> bytes:
        # Binary payload starts after exactly one separator byte.
        self.pos += 1
        return self.data[self.pos:]


def read_pnm(path, threshold: int = 127, cell_size: float = 1.0) -> Raster:
    """Load one image as a raster at the default origin."""
    data = Path(path).read_bytes()
    toks = _Tokens(data)
    magic = toks.next_token()
    if magic not in (b"P1", b"P2", b"P4", b"P5"):
        raise PnmFormatError(f"unsupported magic {magic!r} in {path}")
    width = toks.next_int()
    height = toks.next_int()
    if width < 1 or height < 1:
        raise PnmFormatError(f"bad dimensions {width}x{height} in {path}")

    if magic == b"P1":
        body = data[toks.pos:]
        digits = []
        i = 0
        while i < len(body) and len(digits) < width * height:
            c = body[i:i + 1]
            if c == b"#":
                nl = body.find(b"\n", i)
                i = len(body) if nl < 0 else nl + 1
                continue
            if c in (b"0", b"1"):
                digits.append(c == b"1")
            elif not c.isspace():
                raise PnmFormatError(f"unexpected byte {c!r} in P1 body of {path}")
            i += 1
        if len(digits) != width * height:
            raise PnmFormatError(f"short P1 body in {path}")
        bits = np.array(digits, dtype=bool).reshape(height, width)
    elif magic == b"P2":
        maxval = toks.next_int()
        if maxval < 1:
            raise PnmFormatError(f"bad maxval {maxval} in {path}")
        vals = np.empty(width * height, dtype=np.int64)
        for i in range(width * height):
            vals[i] = toks.next_int()
        bits = (vals > threshold).reshape(height, width)
    elif magic == b"P4":
        row_bytes = (width + 7) // 8
        raw = toks.raw_rest()
        need = row_bytes * height
        if len(raw) < need:
            raise PnmFormatError(f"short P4 body in {path}: {len(raw)} < {need}")
        packed = np.frombuffer(raw[:need], dtype=np.uint8).reshape(height, row_bytes)
        bits = np.unpackbits(packed, axis=1)[:, :width].astype(bool)
    else:  # P5
        maxval = toks.next_int()
        if not 1 <= maxval <= 255:
            raise PnmFormatError(f"maxval {maxval} outside 1..255 in {path}")
        raw = toks.raw_rest()
        need = width * height
        if len(raw) < need:
            raise PnmFormatError(f"short P5 body in {path}: {len(raw)} < {need}")
        vals = np.frombuffer(raw[:need], dtype=np.uint8)
        bits = (vals > threshold).reshape(height, width)
    return Raster(bits, cell_size=cell_size)


def write_pnm(path, raster: Raster, fmt: str = "P5") -> None:
    """Write a raster in canonical form in one of the four formats."""
    fmt = fmt.upper()
    bits = raster.bits
    h, w = bits.shape
    if fmt == "P5":
        payload = np.where(bits, 255, 0).astype(np.uint8).tobytes()
        blob = b"P5\n%d %d\n255\n" % (w, h) + payload
    elif fmt == "P4":
        packed = np.packbits(bits.astype(np.uint8), axis=1)
        blob = b"P4\n%d %d\n" % (w, h) + packed.tobytes()
    elif fmt == "P2":
        lines = [b"P2", b"%d %d" % (w, h), b"255"]
        for row in bits:
            lines.append(" ".join("255" if v else "0" for v in row).encode())
        blob = b"\n".join(lines) + b"\n"
    elif fmt == "P1":
        lines = [b"P1", b"%d %d" % (w, h)]
        for row in bits:
            text = "".join("1" if v else "0" for v in row)
            for i in range(0, len(text), 64):
                lines.append(text[i:i + 64].encode())
        blob = b"\n".join(lines) + b"\n"
    else:
        raise ValueError(f"unknown format {fmt!r}; use P1, P2, P4 or P5")
    Path(path).write_bytes(blob)


def _indexed_paths(pattern: str) -> list[Path]:
    if pattern.count("%") != 1:
        raise PnmFormatError(
            f"pattern needs exactly one integer placeholder, got {pattern!r}"
        )
    paths = []
    start = 0 if Path(pattern % 0).exists() else 1
    if start == 1 and not Path(pattern % 1).exists():
        raise PnmFormatError(f"no files match {pattern!r} at index 0 or 1")
    i = start
    while True:
        p = Path(pattern % i)
        if not p.exists():
            break
        paths.append(p)
        i += 1
    return paths


def load_stack(
    pattern: str,
    threshold: int = 127,
    spacing: float = 1.0,
    cell_size: float = 1.0,
) -> SliceStack:
    """Load a numbered family of images with matching dimensions."""
    paths = _indexed_paths(pattern)
    slices = []
    shape = None
    for p in paths:
        r = read_pnm(p, threshold=threshold, cell_size=cell_size)
        if shape is None:
            shape = r.shape
        elif r.shape != shape:
            raise PnmFormatError(
                f"slice {p} has shape {r.shape[1]}x{r.shape[0]}, "
                f"expected {shape[1]}x{shape[0]}"
            )
        slices.append(r)
    return SliceStack(tuple(slices), spacing=spacing, source=pattern)


def save_stack(directory, rasters, fmt: str = "P5", stem: str = "slice") -> list[Path]:
    """Write shapes as ``<stem>_0000.<ext>`` files; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ext = "pbm" if fmt.upper() in ("P1", "P4") else "pgm"
    out = []
    for i, r in enumerate(rasters):
        p = directory / f"{stem}_{i:04d}.{ext}"
        write_pnm(p, r, fmt)
        out.append(p)
    return out
