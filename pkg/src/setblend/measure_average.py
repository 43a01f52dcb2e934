"""Measure-matched averaging of binary rasters.

The blend of two shapes at parameter ``t`` should have measure close to
``t * measure(A) + (1 - t) * measure(B)``.  Thresholding the combined
signed-distance field alone does not guarantee that, so the blend is
computed in two steps: order the cells by the field parameter at which
they switch membership (their crossing value), then cut that order at the
count closest to the requested measure.  Cutting inside a group of equal
crossing values falls back to ordering by distance to the inner set, and
then by flat cell index, so results are reproducible bit for bit.

Three entry points cover increasingly general operand pairs:

* :func:`simply_diff_average` for nested pairs whose difference region is
  a single connected component;
* :func:`nested_average` for arbitrary nested pairs, averaging each
  difference component separately and merging;
* :func:`general_average` for arbitrary pairs, splitting into the two
  nested pairs against the intersection.

Parameters outside ``[0, 1]`` extrapolate.  Shrinking reuses the on-grid
cell order; growing pads the grid adaptively until every candidate cell
up to the cut parameter is present, so results do not depend on how much
slack the caller left around the content.  Requested measures beyond what
the parameter range ``[-bound, bound]`` can reach are clamped and flagged.

Every average reports its exact bookkeeping in an :class:`AverageReport`;
the guaranteed measure slack is half a cell per simply-different
sub-average performed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .distance import (
    _dist_cells_cached,
    _dist_to_cell_cells,
    _sdf_cells_cached,
    center_cell,
)
from .errors import (
    EmptyInputError,
    NotNestedError,
    NotSimplyDifferentError,
)
from .kernels import label_components
from .raster import (
    Connectivity,
    Raster,
    _cell_shift,
    _require_same_grid,
    align,
    connected_components,
    content_bbox,
    crop,
    difference,
    intersect,
    is_subset,
    measure,
    pad,
    symdiff_distance,
    union,
)

__all__ = [
    "AverageReport",
    "HCurve",
    "MetricCheck",
    "general_average",
    "general_average_report",
    "h_curve",
    "metric_property_check",
    "nested_average",
    "nested_average_report",
    "offset_average",
    "simply_diff_average",
]

DEFAULT_BOUND = 8.0


@dataclass(frozen=True)
class AverageReport:
    """Bookkeeping of one measure-matched average.

    ``budget`` is the guaranteed bound on ``|achieved - requested|`` when
    the request was not clamped: half a cell of measure per
    simply-different sub-average that went into the result.
    """

    requested_target: float
    achieved_measure: float
    clamped: bool
    fallback_used: bool
    components: int
    sub_averages: int
    cell_area: float

    @property
    def budget(self) -> float:
        return 0.5 * self.cell_area * self.sub_averages

    def to_dict(self) -> dict:
        return {
            "requested_target": self.requested_target,
            "achieved_measure": self.achieved_measure,
            "clamped": self.clamped,
            "fallback_used": self.fallback_used,
            "components": self.components,
            "sub_averages": self.sub_averages,
            "cell_area": self.cell_area,
            "budget": self.budget,
        }


@dataclass(frozen=True)
class MetricCheck:
    """Outcome of comparing blend distances against the straight line."""

    s: float
    t: float
    measured: float
    predicted: float
    budget: float
    metric_ok: bool
    submetric_ok: bool
    clamped: bool


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _ordering(
    thresholds: np.ndarray, dist_inner: np.ndarray, flat_index: np.ndarray
) -> tuple[np.ndarray, ...]:
    """Sort keys for the membership order, least significant first.

    Primary: crossing value.  Ties: distance to the inner set, then flat
    cell index.  Kept as a separate hook so the verification harness can
    prove it would notice a broken order.
    """
    return (flat_index, dist_inner, thresholds)


@dataclass(frozen=True, eq=False)
class HCurve:
    """Cell membership order and the step function of reachable measures.

    ``base`` marks cells that are members at every parameter in
    ``[-bound, bound]``; ``order`` lists the remaining candidate cells as
    flat indices, sorted by crossing value with deterministic tie-breaks;
    ``thresholds`` holds their crossing values in the same order.
    """

    thresholds: np.ndarray
    order: np.ndarray
    base: np.ndarray
    cell_size: float
    origin: tuple[float, float]
    bound: float

    def __post_init__(self):
        for name in ("thresholds", "order", "base"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return 1 if self.base.shape[0] == 1 else 2

    @property
    def cell_area(self) -> float:
        return self.cell_size ** self.dim

    @property
    def base_count(self) -> int:
        return int(np.count_nonzero(self.base))

    def count_at(self, x) -> int | np.ndarray:
        """Number of member cells when thresholding at parameter ``x``."""
        extra = np.searchsorted(self.thresholds, x, side="right")
        return self.base_count + extra

    def h(self, x):
        """Measure of the member set at parameter ``x``."""
        return self.count_at(x) * self.cell_area

    def cut(self, target_count: float) -> tuple[int, bool]:
        """Prefix length whose cell count best matches ``target_count``."""
        wanted = _round_half_up(target_count) - self.base_count
        k = min(max(wanted, 0), len(self.order))
        return k, k != wanted

    def materialize(self, k: int) -> Raster:
        """Member set of the first ``k`` ordered cells plus the base."""
        bits = self.base.copy()
        bits.ravel()[self.order[:k]] = True
        return Raster(bits, self.cell_size, self.origin)


def _crossing_data(a: Raster, b: Raster):
    """Threshold, permanent-member mask and inner distances per cell."""
    if b.is_empty():
        q = center_cell(a)
        da = _sdf_cells_cached(a)
        r = _dist_to_cell_cells(a.shape, q)
        thr = r / (r + da)
        always = np.zeros(a.shape, dtype=bool)
        dist_inner = np.zeros(a.shape)
        return thr, always, dist_inner
    da = _sdf_cells_cached(a)
    db = _sdf_cells_cached(b)
    gap = da - db
    rising = gap > 0.0
    thr = np.full(a.shape, np.nan)
    np.divide(-db, gap, out=thr, where=rising)
    always = ~rising & (db > 0.0)
    return thr, always, _dist_cells_cached(b)


def h_curve(a: Raster, b: Raster, bound: float = DEFAULT_BOUND) -> HCurve:
    """Membership order of the nested pair ``B ⊆ A`` on the given grid.

    The resulting step function satisfies ``h(1) == measure(A)`` exactly
    and is non-decreasing by construction.  For a non-empty B also
    ``h(0) == measure(B)``; when B is empty the stand-in center cell of A
    switches on at exactly 0, so ``h(0)`` is one cell instead of zero.
    """
    _require_same_grid(a, b)
    if not bound > 1.0:
        raise ValueError(f"parameter bound must exceed 1, got {bound}")
    if not b.is_empty() and not is_subset(b, a):
        raise NotNestedError("h_curve requires B contained in A")
    if a.is_empty():
        return HCurve(
            np.empty(0),
            np.empty(0, dtype=np.int64),
            np.zeros(a.shape, dtype=bool),
            a.cell_size,
            a.origin,
            bound,
        )
    thr, always, dist_inner = _crossing_data(a, b)
    finite = np.isfinite(thr)
    base = always | (finite & (thr <= -bound))
    listed = finite & (thr > -bound) & (thr <= bound)
    flat = np.flatnonzero(listed.ravel()).astype(np.int64)
    thr_l = thr.ravel()[flat]
    dist_l = dist_inner.ravel()[flat]
    perm = np.lexsort(_ordering(thr_l, dist_l, flat))
    return HCurve(thr_l[perm], flat[perm], base, a.cell_size, a.origin, bound)


def _component_count(diff_bits: np.ndarray, connectivity: Connectivity) -> int:
    if not np.any(diff_bits):
        return 0
    _, count = label_components(diff_bits, connectivity == Connectivity.EIGHT)
    return count


def _clearance(a: Raster) -> int:
    """Cells between the content of ``a`` and the grid border."""
    box = content_bbox(a)
    if box is None:
        return min(a.shape)
    r0, r1, c0, c1 = box
    gaps = [c0, a.width - c1]
    if not a.is_1d:
        gaps += [r0, a.height - r1]
    return min(gaps)


def _reach_scale_cells(a: Raster, b: Raster) -> float:
    """Bound, in cells, on how fast the blend can outgrow ``A``."""
    if b.is_empty():
        q = center_cell(a)
        r = _dist_to_cell_cells(a.shape, q)
        return float(np.max(r[a.bits]))
    return float(np.max(_dist_cells_cached(b)[a.bits]))


def _trivial_report(value: float, cell_area: float) -> AverageReport:
    return AverageReport(value, value, False, False, 0, 0, cell_area)


def simply_diff_average(
    a: Raster,
    b: Raster,
    t: float,
    bound: float = DEFAULT_BOUND,
    connectivity: Connectivity = Connectivity.EIGHT,
) -> tuple[Raster, AverageReport]:
    """Measure-matched blend of a nested pair with one difference component.

    ``B`` may be empty; the blend then contracts ``A`` toward its deepest
    cell.  Growth beyond ``A`` (``t > 1``) pads the working grid until the
    candidate order is complete up to the cut, so the caller's grid slack
    does not influence the result.
    """
    _require_same_grid(a, b)
    if not bound > 1.0:
        raise ValueError(f"parameter bound must exceed 1, got {bound}")
    if a.is_empty() and b.is_empty():
        return a, _trivial_report(0.0, a.cell_area)
    if not b.is_empty() and not is_subset(b, a):
        raise NotNestedError("simply_diff_average requires B contained in A")
    if np.array_equal(a.bits, b.bits):
        m = measure(a)
        return a, _trivial_report(m, a.cell_area)
    n_comp = _component_count(a.bits & ~b.bits, connectivity)
    if n_comp > 1:
        raise NotSimplyDifferentError(
            f"difference region has {n_comp} components; use nested_average"
        )
    cnt_a, cnt_b = a.n_true, b.n_true
    target_counts = t * cnt_a + (1.0 - t) * cnt_b
    wanted = _round_half_up(target_counts)

    extra = 0
    if wanted <= cnt_a:
        curve = h_curve(a, b, bound)
    else:
        theta = _reach_scale_cells(a, b)
        slack = _clearance(a)
        xc = min(bound, max(1.25, 1.0 + 2.0 * (t - 1.0)))
        while True:
            need = int(np.ceil((xc - 1.0) * theta + 0.5 * xc)) + 1
            extra = max(0, need - slack)
            pa, pb = pad(a, extra), pad(b, extra)
            curve = h_curve(pa, pb, bound)
            avail = curve.base_count + int(
                np.searchsorted(curve.thresholds, xc, side="right")
            )
            if avail >= wanted or xc >= bound:
                break
            xc = min(bound, 1.0 + 2.0 * (xc - 1.0))

    k, clamped = curve.cut(target_counts)
    fallback = bool(
        0 < k < len(curve.order) and curve.thresholds[k - 1] == curve.thresholds[k]
    )
    result = curve.materialize(k)
    if extra:
        result = _rewindow(result, a, extra)
    report = AverageReport(
        requested_target=target_counts * a.cell_area,
        achieved_measure=measure(result),
        clamped=clamped,
        fallback_used=fallback,
        components=n_comp,
        sub_averages=1,
        cell_area=a.cell_area,
    )
    return result, report


def _rewindow(result: Raster, original: Raster, extra: int) -> Raster:
    """Crop a padded result to the original extent plus its own content."""
    rows = 0 if original.is_1d else extra
    r0, r1 = rows, rows + original.height
    c0, c1 = extra, extra + original.width
    box = content_bbox(result)
    if box is not None:
        r0, r1 = min(r0, box[0]), max(r1, box[1])
        c0, c1 = min(c0, box[2]), max(c1, box[3])
    return crop(result, r0, r1, c0, c1)


def offset_average(a: Raster, b: Raster, t: float) -> Raster:
    """Interpolate a nested pair by growing ``B`` outward, nearest first.

    Cells of ``A`` outside ``B`` join in order of distance to ``B`` until
    the measure matches the target.  Only defined for ``t`` in [0, 1];
    unlike the crossing order this one never extrapolates.
    """
    _require_same_grid(a, b)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"offset_average is an interpolation; got t={t}")
    if b.is_empty():
        raise EmptyInputError("offset_average needs a non-empty inner set")
    if not is_subset(b, a):
        raise NotNestedError("offset_average requires B contained in A")
    ring = a.bits & ~b.bits
    flat = np.flatnonzero(ring.ravel()).astype(np.int64)
    dist = _dist_cells_cached(b).ravel()[flat]
    perm = np.lexsort((flat, dist))
    target = t * a.n_true + (1.0 - t) * b.n_true
    k = min(max(_round_half_up(target) - b.n_true, 0), len(flat))
    bits = b.bits.copy()
    bits.ravel()[flat[perm][:k]] = True
    return b.with_bits(bits)


def _merge_reports(
    requested: float, achieved: float, parts: Iterable[AverageReport], cell_area: float
) -> AverageReport:
    parts = list(parts)
    return AverageReport(
        requested_target=requested,
        achieved_measure=achieved,
        clamped=any(p.clamped for p in parts),
        fallback_used=any(p.fallback_used for p in parts),
        components=sum(p.components for p in parts),
        sub_averages=sum(p.sub_averages for p in parts),
        cell_area=cell_area,
    )


def nested_average_report(
    a: Raster,
    b: Raster,
    t: float,
    bound: float = DEFAULT_BOUND,
    connectivity: Connectivity = Connectivity.EIGHT,
) -> tuple[Raster, AverageReport]:
    """Blend of an arbitrary nested pair ``B ⊆ A``.

    Each connected component of ``A \\ B`` is averaged against ``B`` on
    its own; for ``t >= 0`` the results are united, for ``t < 0`` (all of
    them subsets of ``B``) intersected.
    """
    _require_same_grid(a, b)
    if not b.is_empty() and not is_subset(b, a):
        raise NotNestedError("nested_average requires B contained in A")
    if np.array_equal(a.bits, b.bits):
        m = measure(a)
        return a, _trivial_report(m, a.cell_area)
    comps = connected_components(difference(a, b), connectivity)
    results = []
    reports = []
    for comp in comps:
        res, rep = simply_diff_average(union(b, comp), b, t, bound, connectivity)
        results.append(res)
        reports.append(rep)
    if len(results) == 1:
        merged = results[0]
    elif t >= 0.0:
        aligned = align(*results)
        bits = aligned[0].bits.copy()
        for r in aligned[1:]:
            bits |= r.bits
        merged = aligned[0].with_bits(bits)
    else:
        aligned = align(*results)
        bits = aligned[0].bits.copy()
        for r in aligned[1:]:
            bits &= r.bits
        merged = aligned[0].with_bits(bits)
    requested = t * measure(a) + (1.0 - t) * measure(b)
    report = _merge_reports(requested, measure(merged), reports, a.cell_area)
    return merged, report


def nested_average(
    a: Raster,
    b: Raster,
    t: float,
    bound: float = DEFAULT_BOUND,
    connectivity: Connectivity = Connectivity.EIGHT,
) -> Raster:
    """Like :func:`nested_average_report` without the report."""
    return nested_average_report(a, b, t, bound, connectivity)[0]


def general_average_report(
    a: Raster,
    b: Raster,
    t: float,
    bound: float = DEFAULT_BOUND,
    connectivity: Connectivity = Connectivity.EIGHT,
) -> tuple[Raster, AverageReport]:
    """Blend of two arbitrary shapes on a common grid.

    Both operands are averaged against their intersection: ``A`` toward
    parameter ``t``, ``B`` toward ``1 - t``.  For ``t`` in [0, 1] the two
    halves are united.  Beyond 1 the shrinking ``B`` half leaves the
    intersection, so only its remainder is kept next to the grown ``A``
    half.  Below 0 the roles swap: the call is evaluated as the blend of
    ``(B, A)`` at ``1 - t``, which is the same point from the other end.
    """
    _require_same_grid(a, b)
    if t < 0.0:
        return general_average_report(b, a, 1.0 - t, bound, connectivity)
    inter = intersect(a, b)
    r1, rep1 = nested_average_report(a, inter, t, bound, connectivity)
    r2, rep2 = nested_average_report(b, inter, 1.0 - t, bound, connectivity)
    if t <= 1.0:
        u1, u2 = align(r1, r2)
        result = union(u1, u2)
    else:
        u1, u2, ui = align(r1, r2, inter)
        result = union(difference(u1, ui), u2)
    result = _rewindow_to(result, a)
    requested = t * measure(a) + (1.0 - t) * measure(b)
    report = _merge_reports(requested, measure(result), [rep1, rep2], a.cell_area)
    return result, report


def general_average(
    a: Raster,
    b: Raster,
    t: float,
    bound: float = DEFAULT_BOUND,
    connectivity: Connectivity = Connectivity.EIGHT,
) -> Raster:
    """Like :func:`general_average_report` without the report."""
    return general_average_report(a, b, t, bound, connectivity)[0]


def _rewindow_to(result: Raster, reference: Raster) -> Raster:
    """Crop to the reference extent plus whatever content sticks out."""
    sx, sy = _cell_shift(result, reference)
    r0, r1 = sy, sy + reference.height
    c0, c1 = sx, sx + reference.width
    box = content_bbox(result)
    if box is not None:
        r0, r1 = min(r0, box[0]), max(r1, box[1])
        c0, c1 = min(c0, box[2]), max(c1, box[3])
    return crop(result, r0, r1, c0, c1)


def metric_property_check(
    a: Raster,
    b: Raster,
    s: float,
    t: float,
    bound: float = DEFAULT_BOUND,
    connectivity: Connectivity = Connectivity.EIGHT,
) -> MetricCheck:
    """Compare blend distances with the straight-line prediction.

    For interpolation parameters the distance between the blends at ``s``
    and ``t`` should equal ``|t - s|`` times the distance between the
    operands, up to the combined measure-matching slack of the two blends.
    """
    res_s, rep_s = general_average_report(a, b, s, bound, connectivity)
    res_t, rep_t = general_average_report(a, b, t, bound, connectivity)
    us, ut = align(res_s, res_t)
    measured = symdiff_distance(us, ut)
    predicted = abs(t - s) * symdiff_distance(a, b)
    budget = rep_s.budget + rep_t.budget
    clamped = rep_s.clamped or rep_t.clamped
    return MetricCheck(
        s=s,
        t=t,
        measured=measured,
        predicted=predicted,
        budget=budget,
        metric_ok=abs(measured - predicted) <= budget + 1e-9,
        submetric_ok=measured <= predicted + budget + 1e-9,
        clamped=clamped,
    )
