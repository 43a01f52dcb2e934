"""Binary rasters as finite sets with a symmetric-difference metric.

A :class:`Raster` is an immutable boolean grid together with a cell size
and the world coordinates of the first cell center.  A raster with a
single row is treated as one-dimensional: its measure is counted in cell
lengths rather than cell areas, and padding only grows the row.

Cells are addressed ``bits[row, col]`` and the center of cell ``(i, j)``
sits at ``(origin[0] + j * cell_size, origin[1] + i * cell_size)``.  The
flat row-major index orders cells whenever a deterministic tie-break is
needed.

Binary operations require both operands on the identical grid; call
:func:`align` first when they are not.  Resampling is never done behind
the caller's back.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError
from .kernels import INF_SQ, edt_sq, label_components

__all__ = [
    "Connectivity",
    "Raster",
    "align",
    "connected_components",
    "crop_to_content",
    "difference",
    "intersect",
    "is_subset",
    "measure",
    "offset",
    "pad",
    "symdiff_distance",
    "union",
    "xor",
]

_ORIGIN_RTOL = 1e-6


class Connectivity(enum.IntEnum):
    """Neighborhood used when splitting a set into connected components."""

    FOUR = 4
    EIGHT = 8


@dataclass(frozen=True, eq=False)
class Raster:
    """Immutable binary raster.

    ``bits`` is copied on construction and marked read-only, so instances
    can be hashed and safely shared as cache keys.
    """

    bits: np.ndarray
    cell_size: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        arr = np.array(self.bits, dtype=bool, copy=True, order="C")
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2:
            raise ValueError(f"bits must be 1- or 2-dimensional, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"degenerate grid shape {arr.shape}")
        if not self.cell_size > 0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        object.__setattr__(self, "cell_size", float(self.cell_size))

    # -- geometry ---------------------------------------------------------

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    @property
    def is_1d(self) -> bool:
        return self.bits.shape[0] == 1

    @property
    def dim(self) -> int:
        return 1 if self.is_1d else 2

    @property
    def cell_area(self) -> float:
        """Measure of a single cell (length in 1D, area in 2D)."""
        return self.cell_size ** self.dim

    @property
    def n_true(self) -> int:
        return int(np.count_nonzero(self.bits))

    def is_empty(self) -> bool:
        return self.n_true == 0

    def same_grid(self, other: "Raster") -> bool:
        if self.shape != other.shape:
            return False
        if self.cell_size != other.cell_size:
            return False
        tol = _ORIGIN_RTOL * self.cell_size
        return (
            abs(self.origin[0] - other.origin[0]) <= tol
            and abs(self.origin[1] - other.origin[1]) <= tol
        )

    def with_bits(self, bits: np.ndarray) -> "Raster":
        """New raster on the same grid with different contents."""
        return Raster(bits, self.cell_size, self.origin)

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (
            self.origin[0] + col * self.cell_size,
            self.origin[1] + row * self.cell_size,
        )

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return self.same_grid(other) and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            key = (
                self.shape,
                self.cell_size,
                round(self.origin[0] / self.cell_size, 6),
                round(self.origin[1] / self.cell_size, 6),
                self.bits.tobytes(),
            )
            cached = hash(key)
            self.__dict__["_hash"] = cached
        return cached

    def __repr__(self) -> str:
        kind = "1d" if self.is_1d else "2d"
        return (
            f"Raster({kind} {self.height}x{self.width}, cell={self.cell_size:g}, "
            f"origin=({self.origin[0]:g}, {self.origin[1]:g}), true={self.n_true})"
        )


def _require_same_grid(a: Raster, b: Raster) -> None:
    if not a.same_grid(b):
        raise GridMismatchError(
            f"grids differ ({a!r} vs {b!r}); call align() before combining"
        )


# -- measure and metric ---------------------------------------------------


def measure(a: Raster) -> float:
    """Total measure: number of true cells times the cell measure."""
    return a.n_true * a.cell_area


def symdiff_distance(a: Raster, b: Raster) -> float:
    """Measure of the symmetric difference; the metric used throughout."""
    _require_same_grid(a, b)
    return int(np.count_nonzero(a.bits ^ b.bits)) * a.cell_area


# -- boolean algebra ------------------------------------------------------


def union(a: Raster, b: Raster) -> Raster:
    _require_same_grid(a, b)
    return a.with_bits(a.bits | b.bits)


def intersect(a: Raster, b: Raster) -> Raster:
    _require_same_grid(a, b)
    return a.with_bits(a.bits & b.bits)


def difference(a: Raster, b: Raster) -> Raster:
    _require_same_grid(a, b)
    return a.with_bits(a.bits & ~b.bits)


def xor(a: Raster, b: Raster) -> Raster:
    _require_same_grid(a, b)
    return a.with_bits(a.bits ^ b.bits)


def is_subset(inner: Raster, outer: Raster) -> bool:
    """True iff every true cell of ``inner`` is true in ``outer``."""
    _require_same_grid(inner, outer)
    return not bool(np.any(inner.bits & ~outer.bits))


# -- components, offsets, windowing ---------------------------------------


def connected_components(
    s: Raster, connectivity: Connectivity = Connectivity.EIGHT
) -> list[Raster]:
    """Split into connected components, ordered by first row-major cell.

    The returned rasters share the input grid, are pairwise disjoint and
    union back to the input.
    """
    labels, count = label_components(s.bits, connectivity == Connectivity.EIGHT)
    out = []
    for idx in range(count):
        out.append(s.with_bits(labels == idx))
    return out


def offset(b: Raster, r: float) -> Raster:
    """Cells whose center lies within distance ``r`` of a true cell center.

    The comparison happens on exact integer squared distances with a tiny
    relative guard, so radii that land exactly on a lattice distance
    include the boundary ring.
    """
    if r < 0:
        raise ValueError(f"offset radius must be non-negative, got {r}")
    if b.is_empty():
        return b
    sq = edt_sq(b.bits)
    limit = (r / b.cell_size) ** 2
    limit = limit * (1.0 + 1e-12) + 1e-12
    return b.with_bits(sq <= limit)


def pad(a: Raster, margin: int) -> Raster:
    """Grow the grid by ``margin`` false cells on every side.

    One-dimensional rasters stay one-dimensional: only the row grows.
    """
    if margin < 0:
        raise ValueError(f"margin must be non-negative, got {margin}")
    if margin == 0:
        return a
    rows = 0 if a.is_1d else margin
    bits = np.pad(a.bits, ((rows, rows), (margin, margin)))
    origin = (
        a.origin[0] - margin * a.cell_size,
        a.origin[1] - rows * a.cell_size,
    )
    return Raster(bits, a.cell_size, origin)


def content_bbox(a: Raster) -> tuple[int, int, int, int] | None:
    """Half-open row/col bounds of the true cells, or None when empty."""
    if a.is_empty():
        return None
    rows = np.any(a.bits, axis=1)
    cols = np.any(a.bits, axis=0)
    r0, r1 = np.argmax(rows), a.height - np.argmax(rows[::-1])
    c0, c1 = np.argmax(cols), a.width - np.argmax(cols[::-1])
    return int(r0), int(r1), int(c0), int(c1)


def crop(a: Raster, r0: int, r1: int, c0: int, c1: int) -> Raster:
    """Restrict to the half-open cell window ``[r0, r1) x [c0, c1)``."""
    if not (0 <= r0 < r1 <= a.height and 0 <= c0 < c1 <= a.width):
        raise ValueError(f"window ({r0},{r1},{c0},{c1}) outside grid {a.shape}")
    origin = (
        a.origin[0] + c0 * a.cell_size,
        a.origin[1] + r0 * a.cell_size,
    )
    return Raster(a.bits[r0:r1, c0:c1], a.cell_size, origin)


def crop_to_content(a: Raster) -> Raster:
    """Smallest window holding all true cells; empty rasters are returned as-is."""
    box = content_bbox(a)
    if box is None:
        return a
    return crop(a, *box)


def _cell_shift(a: Raster, b: Raster) -> tuple[int, int]:
    """Offset of b's cell (0,0) from a's, in whole cells."""
    if not math.isclose(a.cell_size, b.cell_size, rel_tol=_ORIGIN_RTOL):
        raise GridMismatchError(
            f"cell sizes differ: {a.cell_size} vs {b.cell_size}"
        )
    dx = (b.origin[0] - a.origin[0]) / a.cell_size
    dy = (b.origin[1] - a.origin[1]) / a.cell_size
    ix, iy = round(dx), round(dy)
    if abs(dx - ix) > _ORIGIN_RTOL or abs(dy - iy) > _ORIGIN_RTOL:
        raise GridMismatchError(
            f"origins are not offset by whole cells: ({dx}, {dy})"
        )
    return ix, iy


def align(*rasters: Raster) -> list[Raster]:
    """Embed rasters on the smallest common grid covering all of them.

    Grids must share the cell size and sit on the same lattice; content is
    never resampled, only re-windowed.  Returns the rasters in order.
    """
    if len(rasters) < 2:
        return list(rasters)
    base = rasters[0]
    shifts = [(0, 0)] + [_cell_shift(base, r) for r in rasters[1:]]
    min_x = min(s[0] for s in shifts)
    min_y = min(s[1] for s in shifts)
    max_x = max(s[0] + r.width for s, r in zip(shifts, rasters))
    max_y = max(s[1] + r.height for s, r in zip(shifts, rasters))
    height, width = max_y - min_y, max_x - min_x
    origin = (
        base.origin[0] + min_x * base.cell_size,
        base.origin[1] + min_y * base.cell_size,
    )
    out = []
    for (sx, sy), r in zip(shifts, rasters):
        bits = np.zeros((height, width), dtype=bool)
        y0, x0 = sy - min_y, sx - min_x
        bits[y0:y0 + r.height, x0:x0 + r.width] = r.bits
        out.append(Raster(bits, base.cell_size, origin))
    return out
