"""Reference shape families used by the CLI, the verifier and the tests.

All generators are deterministic; the random ones take an explicit numpy
generator or seed.  One-dimensional shapes live on a single-row grid
whose cell centers tile the requested interval.
"""

from __future__ import annotations

import numpy as np

from .raster import Raster
from .schemes import SetSeq

__all__ = [
    "bands_profile",
    "bands_raster",
    "bands_seq",
    "blob_pair",
    "constant_seq",
    "disk_raster",
    "grid_1d",
    "growing_disk_seq",
    "intervals_raster",
    "monotone_disk_seq",
    "random_pair",
    "random_raster",
]


# -- one-dimensional ------------------------------------------------------


def grid_1d(cells: int, lo: float, hi: float) -> tuple[float, float]:
    """Cell size and first-center coordinate for a row covering [lo, hi]."""
    if cells < 1 or not hi > lo:
        raise ValueError(f"bad 1d grid: {cells} cells over [{lo}, {hi}]")
    c = (hi - lo) / cells
    return c, lo + 0.5 * c


def intervals_raster(
    intervals, cells: int = 128, lo: float = 0.0, hi: float = 6.4
) -> Raster:
    """Cells whose center falls in one of the closed intervals."""
    c, x0 = grid_1d(cells, lo, hi)
    centers = x0 + c * np.arange(cells)
    bits = np.zeros(cells, dtype=bool)
    for a, b in intervals:
        if b >= a:
            bits |= (centers >= a - 1e-12) & (centers <= b + 1e-12)
    return Raster(bits, cell_size=c, origin=(x0, 0.0))


def bands_profile(x: float) -> list[tuple[float, float]]:
    """Two bands that shrink as |x| grows and vanish one after the other."""
    return [(1.0, 2.0 - abs(x)), (3.0, 4.0 - 2.0 * abs(x))]


def bands_raster(x: float, cells: int = 128, lo: float = 0.0, hi: float = 6.4) -> Raster:
    """Cross-section of the two-band family at parameter ``x``."""
    return intervals_raster(bands_profile(x), cells, lo, hi)


def bands_seq(
    xs=None, cells: int = 128, lo: float = 0.0, hi: float = 6.4
) -> SetSeq:
    """Sampled two-band family; default 8 samples on [-0.875, 0.875]."""
    if xs is None:
        xs = [-0.875 + 0.25 * i for i in range(8)]
    sets = tuple(bands_raster(float(x), cells, lo, hi) for x in xs)
    return SetSeq(sets, tuple(float(x) for x in xs))


# -- disks ----------------------------------------------------------------


def disk_raster(
    radius: float,
    cells: int = 256,
    halfwidth: float = 2.6,
    center: tuple[float, float] = (0.0, 0.0),
) -> Raster:
    """Closed disk sampled at cell centers on a square window."""
    c = 2.0 * halfwidth / cells
    x0 = -halfwidth + 0.5 * c
    coords = x0 + c * np.arange(cells)
    dx = coords[None, :] - center[0]
    dy = coords[:, None] - center[1]
    bits = dx * dx + dy * dy <= radius * radius
    return Raster(bits, cell_size=c, origin=(x0, x0))


def growing_disk_seq(
    step: float = 0.125, cells: int = 256, halfwidth: float = 2.6
) -> SetSeq:
    """Disks of radius 1 + x for x on a uniform grid over [0, 1]."""
    n = int(round(1.0 / step))
    xs = [i * step for i in range(n + 1)]
    sets = tuple(disk_raster(1.0 + x, cells, halfwidth) for x in xs)
    return SetSeq(sets, tuple(xs))


def monotone_disk_seq(
    radii=(0.6, 1.0, 1.3, 1.9), cells: int = 128, halfwidth: float = 2.6
) -> SetSeq:
    """Nested, non-decreasing disks; handy for monotonicity checks."""
    if list(radii) != sorted(radii):
        raise ValueError(f"radii must be non-decreasing, got {radii}")
    sets = tuple(disk_raster(r, cells, halfwidth) for r in radii)
    return SetSeq(sets, tuple(float(i) for i in range(len(sets))))


def constant_seq(count: int = 4, radius: float = 1.0, cells: int = 64) -> SetSeq:
    """The same disk repeated; every scheme must reproduce it."""
    one = disk_raster(radius, cells, halfwidth=2.0)
    return SetSeq((one,) * count, tuple(float(i) for i in range(count)))


# -- two-dimensional demo and random shapes -------------------------------


def blob_pair(cells: int = 64) -> tuple[Raster, Raster]:
    """Overlapping rectangle-plus-disk shapes with a one-component overlap."""
    c = 4.0 / cells
    x0 = -2.0 + 0.5 * c
    coords = x0 + c * np.arange(cells)
    xx = coords[None, :]
    yy = coords[:, None]
    a = (xx > -1.6) & (xx < 0.4) & (yy > -1.0) & (yy < 1.0)
    a |= (xx + 1.0) ** 2 + yy**2 <= 0.81
    b = (xx > -0.4) & (xx < 1.6) & (yy > -0.6) & (yy < 1.4)
    geom = dict(cell_size=c, origin=(x0, x0))
    return Raster(a, **geom), Raster(b, **geom)


def _splat(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    """Union of a few random rectangles and disks inside a margin."""
    h, w = shape
    bits = np.zeros(shape, dtype=bool)
    margin = max(2, min(h, w) // 8)
    for _ in range(int(rng.integers(2, 5))):
        if h > 1 and rng.random() < 0.5:
            cy = rng.integers(margin, h - margin)
            cx = rng.integers(margin, w - margin)
            r = int(rng.integers(2, max(3, min(h, w) // 5)))
            yy, xx = np.ogrid[:h, :w]
            bits |= (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
        else:
            x1 = int(rng.integers(margin, w - margin))
            x2 = int(rng.integers(x1, w - margin)) + 1
            if h == 1:
                y1, y2 = 0, 1
            else:
                y1 = int(rng.integers(margin, h - margin))
                y2 = int(rng.integers(y1, h - margin)) + 1
            bits[y1:y2, x1:x2] = True
    return bits


def random_raster(
    rng: np.random.Generator, shape: tuple[int, int] = (64, 64), cell_size: float = 1.0
) -> Raster:
    """A non-empty random union of rectangles and disks."""
    while True:
        bits = _splat(rng, shape)
        if bits.any():
            return Raster(bits, cell_size=cell_size)


def random_pair(
    rng: np.random.Generator,
    kind: str,
    shape: tuple[int, int] = (64, 64),
    cell_size: float = 1.0,
) -> tuple[Raster, Raster]:
    """Seeded operand pair of one of three classes.

    ``nested``: B contained in A (possibly empty B).  ``general``:
    independent shapes, usually overlapping.  ``disjoint``: shapes
    confined to opposite halves of the grid with a gap between.
    """
    h, w = shape
    if kind == "nested":
        a = random_raster(rng, shape, cell_size)
        mask = _splat(rng, shape)
        return a, a.with_bits(a.bits & mask)
    if kind == "general":
        a = random_raster(rng, shape, cell_size)
        b = random_raster(rng, shape, cell_size)
        return a, b
    if kind == "disjoint":
        half = w // 2
        gap = 2
        while True:
            left = _splat(rng, (h, half - gap))
            right = _splat(rng, (h, w - half - gap))
            if left.any() and right.any():
                break
        a_bits = np.zeros(shape, dtype=bool)
        b_bits = np.zeros(shape, dtype=bool)
        a_bits[:, : half - gap] = left
        b_bits[:, half + gap:] = right
        return (
            Raster(a_bits, cell_size=cell_size),
            Raster(b_bits, cell_size=cell_size),
        )
    raise ValueError(f"unknown pair kind {kind!r}")
