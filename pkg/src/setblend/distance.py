"""Distance transforms, signed distance fields and distance-weighted blends.

Distances are Euclidean between cell centers.  Signed distance to a set is
positive inside and negative outside, with magnitude measured to the cell
boundary rather than the neighboring center: a cell just inside reports
``+0.5`` cells, a cell just outside ``-0.5``.  This half-cell convention
makes the field of a subset everywhere less or equal the field of its
superset, exactly, which the blending machinery depends on.

Internally all field math runs in cell units, where the attainable values
are halves of square roots of integers.  That keeps equalities and sign
decisions reproducible regardless of the physical cell size; the public
:class:`ScalarField` values are scaled to length units at the end.

The blend of two shapes at parameter ``x`` keeps the cells where the
affine combination ``x * sd(A) + (1 - x) * sd(B)`` is non-negative.  At
``x = 0`` this is exactly B, at ``x = 1`` exactly A, and moving ``x``
grows the result monotonically when one operand contains the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainClippedError, EmptyInputError, NotNestedError
from .kernels import INF_SQ, edt_sq
from .raster import Raster, _require_same_grid, is_subset, pad

__all__ = [
    "CrossingField",
    "ScalarField",
    "center_cell",
    "crossing_field",
    "crossing_field_empty",
    "distance_average",
    "distance_average_empty",
    "edt",
    "extrapolation_margin",
    "f_field",
    "members_at",
    "signed_distance",
]


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Per-cell real values on a raster grid, in world length units."""

    values: np.ndarray
    cell_size: float
    origin: tuple[float, float]

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True, eq=False)
class CrossingField:
    """Per-cell blend parameter at which membership switches on.

    For each cell exactly one of these holds: a finite ``threshold`` (the
    cell is a member at parameters >= threshold), ``always_in``, or
    ``never_in``.  Cells in the inner set carry negative thresholds, cells
    of the difference thresholds in (0, 1), cells outside thresholds > 1.
    """

    threshold: np.ndarray
    always_in: np.ndarray
    never_in: np.ndarray
    cell_size: float
    origin: tuple[float, float]

    def __post_init__(self):
        for name in ("threshold", "always_in", "never_in"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


# -- cached integer/cell-unit layers --------------------------------------


@lru_cache(maxsize=64)
def _edt_sq_cached(a: Raster) -> np.ndarray:
    out = edt_sq(a.bits)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def _dist_cells_cached(a: Raster) -> np.ndarray:
    """Distance in cells to the nearest true cell; +inf when empty."""
    sq = _edt_sq_cached(a)
    out = np.sqrt(sq.astype(np.float64))
    out[sq >= INF_SQ] = np.inf
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def _sdf_cells_cached(a: Raster) -> np.ndarray:
    """Signed distance in cell units (positive inside, negative outside).

    The complement transform runs on a one-cell enlarged copy so that a
    set touching the grid border still sees empty space beyond it; the
    grid is a window onto the plane, not a wall.
    """
    if a.is_empty():
        raise EmptyInputError("signed distance of the empty set is undefined")
    ring = pad(a, 1)
    comp_sq = edt_sq(~ring.bits)
    if a.is_1d:
        comp_sq = comp_sq[:, 1:-1]
    else:
        comp_sq = comp_sq[1:-1, 1:-1]
    inside = np.sqrt(comp_sq.astype(np.float64)) - 0.5
    outside = np.sqrt(_edt_sq_cached(a).astype(np.float64)) - 0.5
    out = np.where(a.bits, inside, -outside)
    out.setflags(write=False)
    return out


def _border_mask(shape: tuple[int, int]) -> np.ndarray:
    h, w = shape
    mask = np.zeros(shape, dtype=bool)
    if h == 1:
        mask[0, 0] = mask[0, w - 1] = True
    else:
        mask[0, :] = mask[h - 1, :] = True
        mask[:, 0] = mask[:, w - 1] = True
    return mask


# -- public fields --------------------------------------------------------


def edt(s: Raster) -> ScalarField:
    """Distance to the nearest true cell center; +inf field when empty."""
    if s.is_empty():
        values = np.full(s.shape, np.inf)
    else:
        values = _dist_cells_cached(s) * s.cell_size
    return ScalarField(values, s.cell_size, s.origin)


def signed_distance(a: Raster) -> ScalarField:
    """Signed distance field in length units; raises on an empty set."""
    return ScalarField(_sdf_cells_cached(a) * a.cell_size, a.cell_size, a.origin)


def f_field(a: Raster, b: Raster, x: float) -> ScalarField:
    """Affine combination ``x * sd(A) + (1 - x) * sd(B)`` of the two fields."""
    _require_same_grid(a, b)
    vals = x * _sdf_cells_cached(a) + (1.0 - x) * _sdf_cells_cached(b)
    return ScalarField(vals * a.cell_size, a.cell_size, a.origin)


# -- blends ---------------------------------------------------------------


def distance_average(a: Raster, b: Raster, x: float) -> Raster:
    """Cells where the combined field is non-negative (ties included).

    Raises :class:`DomainClippedError` when the result reaches the grid
    border, since cells beyond the border might then also qualify.
    """
    _require_same_grid(a, b)
    if a.is_empty() or b.is_empty():
        raise EmptyInputError("use distance_average_empty for an empty operand")
    f = x * _sdf_cells_cached(a) + (1.0 - x) * _sdf_cells_cached(b)
    bits = f >= 0.0
    if bool(np.any(bits & _border_mask(a.shape))):
        raise DomainClippedError(
            f"blend at x={x} touches the grid border; pad the operands"
        )
    return a.with_bits(bits)


def center_cell(a: Raster) -> tuple[int, int]:
    """Deepest cell of the set (max signed distance, first in flat order)."""
    sdf = _sdf_cells_cached(a)
    flat = int(np.argmax(sdf))
    return flat // a.width, flat % a.width


def _dist_to_cell_cells(shape: tuple[int, int], cell: tuple[int, int]) -> np.ndarray:
    h, w = shape
    ii = np.arange(h, dtype=np.float64)[:, None] - cell[0]
    jj = np.arange(w, dtype=np.float64)[None, :] - cell[1]
    return np.sqrt(ii * ii + jj * jj)


def distance_average_empty(a: Raster, x: float) -> Raster:
    """Blend of a set against the empty set.

    The empty operand is stood in for by the deepest cell ``q`` of A:
    membership keeps cells with ``x * sd(A) - (1 - x) * |p - q| >= 0``.
    At ``x = 0`` only ``q`` itself survives; at ``x = 1`` the result is A.
    """
    if a.is_empty():
        raise EmptyInputError("both operands empty: the blend is empty")
    q = center_cell(a)
    f = x * _sdf_cells_cached(a) + (x - 1.0) * _dist_to_cell_cells(a.shape, q)
    bits = f >= 0.0
    if bool(np.any(bits & _border_mask(a.shape))):
        raise DomainClippedError(
            f"blend at x={x} touches the grid border; pad the operand"
        )
    return a.with_bits(bits)


# -- crossing parameters --------------------------------------------------


def crossing_field(a: Raster, b: Raster) -> CrossingField:
    """Per-cell switch-on parameters for a nested pair ``B ⊆ A``.

    Thresholding the field at ``x`` reproduces ``distance_average(a, b, x)``
    cell for cell: a cell is a member iff it is ``always_in`` or its
    threshold is ``<= x``.
    """
    _require_same_grid(a, b)
    if a.is_empty() or b.is_empty():
        raise EmptyInputError("crossing_field needs two non-empty sets")
    if not is_subset(b, a):
        raise NotNestedError("crossing_field requires B contained in A")
    da = _sdf_cells_cached(a)
    db = _sdf_cells_cached(b)
    gap = da - db
    rising = gap > 0.0
    thr = np.full(a.shape, np.nan)
    np.divide(-db, gap, out=thr, where=rising)
    always = ~rising & (db > 0.0)
    never = ~rising & (db < 0.0)
    return CrossingField(thr, always, never, a.cell_size, a.origin)


def crossing_field_empty(a: Raster) -> CrossingField:
    """Switch-on parameters for blending A against the empty set."""
    if a.is_empty():
        raise EmptyInputError("crossing_field_empty needs a non-empty set")
    q = center_cell(a)
    da = _sdf_cells_cached(a)
    r = _dist_to_cell_cells(a.shape, q)
    thr = r / (r + da)
    none = np.zeros(a.shape, dtype=bool)
    return CrossingField(thr, none, none.copy(), a.cell_size, a.origin)


def members_at(cf: CrossingField, x: float) -> Raster:
    """Materialize the member set at parameter ``x``."""
    bits = cf.always_in | (cf.threshold <= x)
    return Raster(bits, cf.cell_size, cf.origin)


# -- padding advice -------------------------------------------------------


def _directed_reach_cells(src: Raster, dst: Raster) -> float:
    """Largest center distance, in cells, from a src cell to dst."""
    d = _dist_cells_cached(dst)
    return float(np.max(d[src.bits]))


def extrapolation_margin(a: Raster, b: Raster, x: float) -> int:
    """Cells of extra border clearance that make the blend at ``x`` safe.

    Outside ``[0, 1]`` the blend can reach beyond the union of the two
    sets; the reach is bounded by how far one set sticks out of the other,
    scaled by the parameter overshoot.
    """
    _require_same_grid(a, b)
    if 0.0 <= x <= 1.0:
        return 1
    if x > 1.0:
        theta = _directed_reach_cells(a, b) if not b.is_empty() else _empty_reach(a)
        need = (x - 1.0) * theta + 0.5 * x
    else:
        theta = _directed_reach_cells(b, a) if not a.is_empty() else _empty_reach(b)
        need = -x * theta + 0.5 * (1.0 - x)
    return int(np.ceil(need)) + 1


def _empty_reach(a: Raster) -> float:
    """Largest distance, in cells, from a cell of A to its deepest cell."""
    q = center_cell(a)
    r = _dist_to_cell_cells(a.shape, q)
    return float(np.max(r[a.bits]))
