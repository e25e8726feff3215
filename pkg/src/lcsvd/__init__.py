"""Reduced-point SVD reconstruction of spatio-temporal snapshot data,
QR-pivot optimal sensor placement, sensor-count estimation, error
quantification and a speed-up benchmark harness."""

from .errors import ErrorReport, bias_uncertainty, build_error_report, density_curve
from .linalg import (
    PivotedQR,
    TruncatedFactorization,
    TruncationRule,
    parse_rule,
    qr_pivoted,
    qr_plain,
    svd_truncated,
)
from .optimize import (
    ElbowCurves,
    OsLcsvdConfig,
    OsLcsvdRun,
    SensorCountSearch,
    SensorCountSearchConfig,
    detect_elbow,
    elbow_curve,
    find_optimal_sensor_count,
    os_lcsvd_optimize,
    rrmse,
)
from .placement import SensorSet, measure, place_sensors
from .reconstruction import LcsvdResult, lcsvd_run, recover_modes, sign_alignment
from .snapshots import (
    ReducedMatrices,
    ReductionPlan,
    SnapshotMatrix,
    SnapshotTensor,
    TensorLayout,
    apply_plan,
    flatten,
    make_plan_equidistant,
    make_plan_from_rows,
    make_plan_random,
    unflatten,
)
from .synthetic import SyntheticSpec, gen_exact_rank, gen_noisy, gen_oscillatory_wake

__version__ = "0.1.0"

__all__ = [
    "ErrorReport",
    "bias_uncertainty",
    "build_error_report",
    "density_curve",
    "PivotedQR",
    "TruncatedFactorization",
    "TruncationRule",
    "parse_rule",
    "qr_pivoted",
    "qr_plain",
    "svd_truncated",
    "ElbowCurves",
    "OsLcsvdConfig",
    "OsLcsvdRun",
    "SensorCountSearch",
    "SensorCountSearchConfig",
    "detect_elbow",
    "elbow_curve",
    "find_optimal_sensor_count",
    "os_lcsvd_optimize",
    "rrmse",
    "SensorSet",
    "measure",
    "place_sensors",
    "LcsvdResult",
    "lcsvd_run",
    "recover_modes",
    "sign_alignment",
    "ReducedMatrices",
    "ReductionPlan",
    "SnapshotMatrix",
    "SnapshotTensor",
    "TensorLayout",
    "apply_plan",
    "flatten",
    "make_plan_equidistant",
    "make_plan_from_rows",
    "make_plan_random",
    "unflatten",
    "SyntheticSpec",
    "gen_exact_rank",
    "gen_noisy",
    "gen_oscillatory_wake",
    "__version__",
]
