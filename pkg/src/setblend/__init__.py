"""Measure-matched blending and subdivision of binary shapes on rasters.

The package treats boolean grids as finite sets, measures them by cell
count times cell size and compares them by the measure of the symmetric
difference.  On top of that metric it offers distance-field blends,
measure-matched averages of arbitrary shape pairs, and subdivision
schemes that refine whole sequences of shapes, plus PBM/PGM slice-stack
input and output and a command line front end.
"""

from .distance import (
    CrossingField,
    ScalarField,
    crossing_field,
    crossing_field_empty,
    distance_average,
    distance_average_empty,
    edt,
    f_field,
    members_at,
    signed_distance,
)
from .errors import (
    DomainClippedError,
    EmptyInputError,
    GridMismatchError,
    NotNestedError,
    NotSimplyDifferentError,
    PnmFormatError,
    SetBlendError,
)
from .measure_average import (
    AverageReport,
    HCurve,
    MetricCheck,
    general_average,
    general_average_report,
    h_curve,
    metric_property_check,
    nested_average,
    nested_average_report,
    offset_average,
    simply_diff_average,
)
from .pnm import SliceStack, load_stack, read_pnm, save_stack, write_pnm
from .raster import (
    Connectivity,
    Raster,
    align,
    connected_components,
    crop_to_content,
    difference,
    intersect,
    is_subset,
    measure,
    offset,
    pad,
    symdiff_distance,
    union,
    xor,
)
from .schemes import (
    SchemeConfig,
    SetSeq,
    dk_sequence,
    eval_interpolant,
    eval_interpolant_report,
    fourpoint_refine,
    measure_curve,
    piecewise_eval,
    refine_values,
    spline_refine,
    subdivide,
    subdivision_history,
    velocity_estimate,
)
from .verify import VerifyReport, run_verification

__version__ = "0.1.0"
