"""Subdivision of shape sequences by repeated measure-matched averaging.

A :class:`SetSeq` is a finite sequence of shapes tagged with strictly
increasing parameter positions.  Refinement inserts new shapes between
the old ones using the classical curve subdivision rules, with the
number average replaced by the measure-matched blend:

* degree-m splines in Lane-Riesenfeld form: double every entry, then
  average m - 1 times with the midpoint rule (degree 2 is Chaikin's
  corner cutting);
* the four-point scheme: keep every entry and insert interpolating
  midpoints built from two tension-weighted extrapolations.

Positions refine by the same rules applied to numbers, so each new shape
knows where it sits; for open ends the spacing near the boundary is not
uniform, which is intentional.

Two boundary treatments exist.  ``open`` follows endpoint-preserving
rules on the finite sequence: Chaikin keeps both end shapes and uses
plain midpoints next to them, the four-point scheme likewise falls back
to midpoints for the first and last insertion.  ``extend`` continues the
sequence by constant extension before refining and trims afterwards.

Each refined shape carries an accumulated measure-tracking slack in
``budgets``: the guaranteed bound on how far its measure can sit from
the value the same scheme would produce on the operand measures.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .measure_average import general_average_report
from .raster import Connectivity, Raster, align, symdiff_distance

__all__ = [
    "SchemeConfig",
    "SetSeq",
    "dk_sequence",
    "eval_interpolant",
    "eval_interpolant_report",
    "fourpoint_refine",
    "measure_curve",
    "piecewise_eval",
    "refine_values",
    "spline_refine",
    "subdivide",
    "subdivision_history",
    "velocity_estimate",
]

_SCHEMES = ("piecewise", "chaikin", "spline", "fourpoint")


@dataclass(frozen=True)
class SchemeConfig:
    """Knobs shared by the subdivision and averaging pipeline."""

    scheme: str = "chaikin"
    degree: int = 2
    tension: float = 1.0 / 16.0
    levels: int = 1
    connectivity: Connectivity = Connectivity.EIGHT
    bound: float = 8.0
    boundary: str = "open"

    def __post_init__(self):
        if self.scheme not in _SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {_SCHEMES}")
        if self.degree < 1:
            raise ValueError(f"spline degree must be >= 1, got {self.degree}")
        if self.levels < 0:
            raise ValueError(f"levels must be >= 0, got {self.levels}")
        if not self.bound > 1.0:
            raise ValueError(f"parameter bound must exceed 1, got {self.bound}")
        if self.boundary not in ("open", "extend"):
            raise ValueError(f"boundary must be 'open' or 'extend', got {self.boundary!r}")


DEFAULT_CONFIG = SchemeConfig()


@dataclass(frozen=True)
class SetSeq:
    """Sequence of shapes at strictly increasing parameter positions."""

    sets: tuple[Raster, ...]
    positions: tuple[float, ...]
    level: int = 0
    budgets: tuple[float, ...] = field(default=())

    def __post_init__(self):
        sets = tuple(self.sets)
        positions = tuple(float(p) for p in self.positions)
        if len(sets) != len(positions):
            raise ValueError(
                f"{len(sets)} sets but {len(positions)} positions"
            )
        if len(sets) < 2:
            raise ValueError("a sequence needs at least two shapes")
        diffs = np.diff(positions)
        if not np.all(diffs > 0):
            raise ValueError(f"positions must be strictly increasing: {positions}")
        cell_sizes = {s.cell_size for s in sets}
        if len(cell_sizes) > 1:
            raise ValueError(f"mixed cell sizes in one sequence: {sorted(cell_sizes)}")
        budgets = tuple(self.budgets) or tuple(0.0 for _ in sets)
        if len(budgets) != len(sets):
            raise ValueError("budgets, when given, must match the sets")
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "budgets", budgets)

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def span(self) -> tuple[float, float]:
        return self.positions[0], self.positions[-1]


# -- generic refinement engine --------------------------------------------
#
# Entries are (payload, position) pairs; the payload averager is swapped
# out to run the identical rules on shapes, on plain numbers, or on
# (shape, budget) pairs.  Positions always average affinely.


def _entry_avg(avg_payload):
    def combine(e1, e2, t):
        return (
            avg_payload(e1[0], e2[0], t),
            t * e1[1] + (1.0 - t) * e2[1],
        )

    return combine


def _set_payload_avg(cfg: SchemeConfig):
    def avg(u, v, t):
        (ra, ba), (rb, bb) = u, v
        pa, pb = align(ra, rb)
        res, rep = general_average_report(pa, pb, t, cfg.bound, cfg.connectivity)
        return (res, abs(t) * ba + abs(1.0 - t) * bb + rep.budget)

    return avg


def _number_avg(u, v, t):
    return t * u + (1.0 - t) * v


def _double(entries, avg2):
    out = [entries[0]]
    for i in range(len(entries) - 1):
        out.append(avg2(entries[i], entries[i + 1], 0.5))
        out.append(entries[i + 1])
    return out


def _midsweep(entries, avg2):
    return [avg2(entries[i], entries[i + 1], 0.5) for i in range(len(entries) - 1)]


def _chaikin_open(entries, avg2):
    """Corner cutting with endpoint-preserving boundary rules."""
    n = len(entries) - 1
    if n < 2:
        raise ValueError("open-ended corner cutting needs at least three shapes")
    mids = [avg2(entries[i], entries[i + 1], 0.5) for i in range(n)]

    def doubled(j):
        return entries[j // 2] if j % 2 == 0 else mids[j // 2]

    out = [entries[0], mids[0]]
    for j in range(2, 2 * n - 2):
        out.append(avg2(doubled(j), doubled(j + 1), 0.5))
    out.append(mids[n - 1])
    out.append(entries[n])
    return out


def _lr_open(entries, m, avg2):
    """Lane-Riesenfeld rounds on the finite sequence; it shrinks by m - 1."""
    work = _double(entries, avg2)
    for _ in range(m - 1):
        work = _midsweep(work, avg2)
    if len(work) < 2:
        raise ValueError(f"degree {m} needs a longer sequence")
    return work


def _lr_extend(entries, m, avg2):
    """Lane-Riesenfeld rounds after constant extension, trimmed back."""
    h = entries[1][1] - entries[0][1]
    reach = max(1, m)
    first, last = entries[0], entries[-1]
    ext = (
        [(first[0], first[1] - i * h) for i in range(reach, 0, -1)]
        + list(entries)
        + [(last[0], last[1] + i * h) for i in range(1, reach + 1)]
    )
    work = _double(ext, avg2)
    for _ in range(m - 1):
        work = _midsweep(work, avg2)
    lo = entries[0][1] - 1e-9 * abs(h)
    hi = entries[-1][1] + 1e-9 * abs(h)
    return [e for e in work if lo <= e[1] <= hi]


def _fourpoint_level(entries, tension, boundary, avg2):
    """Interpolatory refinement: originals survive, midway shapes join."""
    if tension >= 0.125:
        warnings.warn(
            f"tension {tension} >= 1/8 gives up the contraction guarantee",
            stacklevel=3,
        )
    n = len(entries) - 1
    short = n < 3
    if short and boundary == "open":
        warnings.warn(
            "four-point scheme on fewer than four shapes degenerates to midpoints",
            stacklevel=3,
        )
    if boundary == "extend":
        h = entries[1][1] - entries[0][1]
        work = (
            [(entries[0][0], entries[0][1] - h)]
            + list(entries)
            + [(entries[-1][0], entries[-1][1] + h)]
        )
        base = 1
    else:
        work = list(entries)
        base = 0
    out = []
    for i in range(n):
        if boundary == "open" and (short or i == 0 or i == n - 1):
            inserted = avg2(entries[i], entries[i + 1], 0.5)
        else:
            j = i + base
            e = avg2(work[j - 1], work[j], -2.0 * tension)
            g = avg2(work[j + 2], work[j + 1], -2.0 * tension)
            inserted = avg2(e, g, 0.5)
        out.append(entries[i])
        out.append(inserted)
    out.append(entries[n])
    return out


def _refine_entries(entries, cfg: SchemeConfig, scheme: str, avg2):
    if scheme == "fourpoint":
        return _fourpoint_level(entries, cfg.tension, cfg.boundary, avg2)
    m = {"piecewise": 1, "chaikin": 2, "spline": cfg.degree}[scheme]
    if cfg.boundary == "extend":
        return _lr_extend(entries, m, avg2)
    if m == 2:
        return _chaikin_open(entries, avg2)
    return _lr_open(entries, m, avg2)


def _refine_seq(seq: SetSeq, cfg: SchemeConfig, scheme: str) -> SetSeq:
    entries = [
        ((s, b), p) for s, b, p in zip(seq.sets, seq.budgets, seq.positions)
    ]
    avg2 = _entry_avg(_set_payload_avg(cfg))
    out = _refine_entries(entries, cfg, scheme, avg2)
    sets = tuple(payload[0] for payload, _ in out)
    budgets = tuple(payload[1] for payload, _ in out)
    positions = tuple(p for _, p in out)
    return SetSeq(sets, positions, seq.level + 1, budgets)


# -- public refinement API ------------------------------------------------


def spline_refine(
    seq: SetSeq, degree: int | None = None, cfg: SchemeConfig = DEFAULT_CONFIG
) -> SetSeq:
    """One spline refinement round of the given degree (default from cfg)."""
    m = cfg.degree if degree is None else degree
    if m < 1:
        raise ValueError(f"spline degree must be >= 1, got {m}")
    local = replace(cfg, degree=m)
    scheme = "chaikin" if m == 2 else "spline"
    return _refine_seq(seq, local, scheme)


def fourpoint_refine(
    seq: SetSeq, tension: float | None = None, cfg: SchemeConfig = DEFAULT_CONFIG
) -> SetSeq:
    """One four-point refinement round (default tension from cfg)."""
    w = cfg.tension if tension is None else tension
    local = replace(cfg, tension=w)
    return _refine_seq(seq, local, "fourpoint")


def subdivide(seq: SetSeq, cfg: SchemeConfig = DEFAULT_CONFIG) -> SetSeq:
    """Apply ``cfg.levels`` refinement rounds of the configured scheme."""
    return subdivision_history(seq, cfg)[-1]


def subdivision_history(seq: SetSeq, cfg: SchemeConfig = DEFAULT_CONFIG) -> list[SetSeq]:
    """All stages of :func:`subdivide`, starting with the input."""
    out = [seq]
    for _ in range(cfg.levels):
        out.append(_refine_seq(out[-1], cfg, cfg.scheme))
    return out


def refine_values(
    values, positions, cfg: SchemeConfig = DEFAULT_CONFIG, scheme: str | None = None
) -> tuple[list[float], list[float]]:
    """Run one refinement round on plain numbers with the same rules.

    This is the real-valued twin of the shape refinement: the measures of
    refined shapes track these numbers within the accumulated budgets.
    """
    entries = list(zip([float(v) for v in values], [float(p) for p in positions]))
    if len(entries) < 2:
        raise ValueError("need at least two values")
    avg2 = _entry_avg(_number_avg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = _refine_entries(entries, cfg, scheme or cfg.scheme, avg2)
    return [v for v, _ in out], [p for _, p in out]


# -- evaluation -----------------------------------------------------------


def _locate(seq: SetSeq, x: float) -> tuple[int, float] | int:
    """Bracket index and weight of the left shape, or the exact knot index."""
    pos = seq.positions
    lo, hi = pos[0], pos[-1]
    tol = 1e-9 * max(1.0, abs(lo), abs(hi))
    if x < lo - tol or x > hi + tol:
        raise ValueError(f"x={x} outside the sequence span [{lo}, {hi}]")
    for i, p in enumerate(pos):
        if abs(x - p) <= tol:
            return i
    i = int(np.searchsorted(pos, x)) - 1
    i = min(max(i, 0), len(pos) - 2)
    lam = (pos[i + 1] - x) / (pos[i + 1] - pos[i])
    return i, lam


def eval_interpolant_report(
    seq: SetSeq, x: float, cfg: SchemeConfig = DEFAULT_CONFIG
) -> tuple[Raster, float]:
    """Piecewise blend through the sequence, with its measure budget.

    At a knot the stored shape comes back untouched.  Between knots the
    neighbors are blended with weights proportional to the opposite
    parameter gaps, so the measure interpolates linearly within budget.
    """
    where = _locate(seq, x)
    if isinstance(where, int):
        return seq.sets[where], seq.budgets[where]
    i, lam = where
    pa, pb = align(seq.sets[i], seq.sets[i + 1])
    res, rep = general_average_report(pa, pb, lam, cfg.bound, cfg.connectivity)
    budget = (
        abs(lam) * seq.budgets[i]
        + abs(1.0 - lam) * seq.budgets[i + 1]
        + rep.budget
    )
    return res, budget


def eval_interpolant(seq: SetSeq, x: float, cfg: SchemeConfig = DEFAULT_CONFIG) -> Raster:
    """Piecewise blend through the sequence at parameter ``x``."""
    return eval_interpolant_report(seq, x, cfg)[0]


def piecewise_eval(seq: SetSeq, x: float, cfg: SchemeConfig = DEFAULT_CONFIG) -> Raster:
    """Evaluate the piecewise interpolant of raw data (same as eval on level 0)."""
    return eval_interpolant_report(seq, x, cfg)[0]


# -- diagnostics ----------------------------------------------------------


def dk_sequence(history) -> list[float]:
    """Largest neighbor distance at each subdivision stage.

    Shrinking of this sequence is the contraction evidence: the limits of
    the schemes exist because neighbor shapes approach each other.
    """
    out = []
    for seq in history:
        worst = 0.0
        for s1, s2 in zip(seq.sets, seq.sets[1:]):
            a, b = align(s1, s2)
            worst = max(worst, symdiff_distance(a, b))
        out.append(worst)
    return out


def measure_curve(
    seq: SetSeq, samples: int = 65, cfg: SchemeConfig = DEFAULT_CONFIG
) -> list[tuple[float, float]]:
    """Sampled parameter-to-measure profile of the interpolant."""
    from .raster import measure

    lo, hi = seq.span
    xs = np.linspace(lo, hi, samples)
    return [(float(x), measure(eval_interpolant(seq, float(x), cfg))) for x in xs]


def velocity_estimate(
    seq: SetSeq, x: float, eps: float, cfg: SchemeConfig = DEFAULT_CONFIG
) -> float:
    """Central estimate of the metric speed of the interpolant at ``x``.

    Averages the two one-sided difference quotients of the symmetric
    difference distance over a step of ``eps``.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    mid = eval_interpolant(seq, x, cfg)
    left = eval_interpolant(seq, x - eps, cfg)
    right = eval_interpolant(seq, x + eps, cfg)
    la, ma = align(left, mid)
    mb, rb = align(mid, right)
    return (symdiff_distance(la, ma) + symdiff_distance(mb, rb)) / (2.0 * eps)
