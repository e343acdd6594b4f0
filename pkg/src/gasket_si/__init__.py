"""Singular integral operators on lambda-Sierpinski gaskets, in exact arithmetic."""

from .exactfield import QReal, qadd, qinv, qmul, qneg, qsign
from .gasket import (
    Cell,
    GasketParams,
    GasketPoint,
    Point,
    apply_similitude,
    ball_measure_bounds,
    cell,
    dist_bounds,
    point,
    point_of_periodic_code,
    sibling_gap,
)
from .kernel import (
    KernelSpec,
    check_k2,
    compute_epsilon,
    h_exact,
    h_smooth,
    kernel_eval_exact,
    kernel_eval_float,
    sector_of,
)
from .operator import (
    CellFunction,
    OpMatrix,
    build_matrix,
    maximal_probe,
    operator_norm,
    truncated_apply_exact,
)
from .pv import PvCertificate, find_annulus, oscillation_exact, pv_trace, switch_indices

__version__ = "0.1.0"

__all__ = [
    "QReal",
    "qadd",
    "qinv",
    "qmul",
    "qneg",
    "qsign",
    "Cell",
    "GasketParams",
    "GasketPoint",
    "Point",
    "apply_similitude",
    "ball_measure_bounds",
    "cell",
    "dist_bounds",
    "point",
    "point_of_periodic_code",
    "sibling_gap",
    "KernelSpec",
    "check_k2",
    "compute_epsilon",
    "h_exact",
    "h_smooth",
    "kernel_eval_exact",
    "kernel_eval_float",
    "sector_of",
    "CellFunction",
    "OpMatrix",
    "build_matrix",
    "maximal_probe",
    "operator_norm",
    "truncated_apply_exact",
    "PvCertificate",
    "find_annulus",
    "oscillation_exact",
    "pv_trace",
    "switch_indices",
]
