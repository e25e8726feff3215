"""Sensor-placement optimization loop and sensor-count estimation.

One outer iteration draws a random spatial subsample (the initial
condition), builds a truncated basis from those rows' SVD enlarged back to
full dimension, places sensors by QR pivoting on that basis, reconstructs
from the sensor rows and scores the result by relative RMS error.  The loop
accepts the first placement beating the tolerance, otherwise returns the
best attempt with a non-convergence flag.

Sensor-count estimation runs the same single iteration over a grid of
counts, averaging the error over seeded repetitions, and either stops where
the improvement stalls or hands the bias/uncertainty curves to the elbow
heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import bias_uncertainty
from .linalg import TruncationRule, svd_truncated
from .placement import SensorSet, place_sensors
from .reconstruction import LcsvdResult, lcsvd_run, recover_modes
from .snapshots import SnapshotMatrix, apply_plan, make_plan_from_rows

__all__ = [
    "OsLcsvdConfig",
    "OsLcsvdRun",
    "SensorCountSearchConfig",
    "SensorCountSearch",
    "ElbowCurves",
    "rrmse",
    "os_lcsvd_optimize",
    "find_optimal_sensor_count",
    "elbow_curve",
    "detect_elbow",
]

_CHUNK_ELEMS = 8_000_000
# below this error (percent) extra sensors cannot meaningfully improve
_STALL_FLOOR_PERCENT = 1e-9


def rrmse(original, reconstructed) -> float:
    """Relative RMS error in percent: 100 * ||A - B||_F / ||A||_F.

    Accumulated in row chunks so no difference array of the full size is
    ever materialized (the inputs can be multi-gigabyte).
    """
    a = np.asarray(getattr(original, "values", original), dtype=np.float64)
    b = np.asarray(getattr(reconstructed, "values", reconstructed), dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    a = a.reshape(a.shape[0], -1) if a.ndim > 1 else a.reshape(1, -1)
    b = b.reshape(a.shape)
    rows = max(1, _CHUNK_ELEMS // max(1, a.shape[1]))
    num = 0.0
    den = 0.0
    for lo in range(0, a.shape[0], rows):
        da = a[lo : lo + rows]
        db = b[lo : lo + rows]
        diff = da - db
        num += float(np.einsum("ij,ij->", diff, diff))
        den += float(np.einsum("ij,ij->", da, da))
    if den == 0.0:
        raise ValueError("original matrix has zero norm")
    return 100.0 * float(np.sqrt(num / den))


@dataclass(frozen=True)
class OsLcsvdConfig:
    """Outer-loop parameters.

    ``mode_fraction`` sets the retained mode count as floor(fraction *
    n_sensors); ``tolerance_epsilon`` is the target error in percent.
    """

    n_sensors: int
    mode_fraction: float
    tolerance_epsilon: float
    max_iterations: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.n_sensors < 1:
            raise ValueError("n_sensors must be >= 1")
        if not 0.0 < self.mode_fraction <= 1.0:
            raise ValueError("mode_fraction must lie in (0, 1]")
        if self.n_modes < 1:
            raise ValueError(
                f"n_sensors={self.n_sensors} too small for mode_fraction="
                f"{self.mode_fraction} (would retain zero modes)"
            )
        if not self.tolerance_epsilon > 0:
            raise ValueError("tolerance_epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    @property
    def n_modes(self) -> int:
        return int(self.mode_fraction * self.n_sensors)


@dataclass(frozen=True)
class OsLcsvdRun:
    """Outcome of the optimization loop (best iterate if not converged)."""

    sensors: SensorSet
    result: LcsvdResult
    rrmse_percent: float
    converged: bool
    n_iterations: int
    history: tuple

    def summary(self) -> dict:
        return {
            "rrmse_percent": float(self.rrmse_percent),
            "converged": bool(self.converged),
            "n_iterations": int(self.n_iterations),
            "history_rrmse_percent": [float(h) for h in self.history],
            "sensors": [int(i) for i in self.sensors.indices],
            "n_modes": int(self.result.n_retained),
        }


def _single_iteration(matrix: SnapshotMatrix, n_sensors: int, n_modes: int, rng):
    """One placement + reconstruction cycle from a random initial condition."""
    rows0 = np.sort(rng.choice(matrix.j, size=n_sensors, replace=False))
    plan0 = make_plan_from_rows(rows0, matrix.k, strategy="random")
    red0 = apply_plan(matrix, plan0)
    fact0 = svd_truncated(red0.reduced, TruncationRule(n_modes=n_modes))
    basis = recover_modes(red0.space_full, fact0)
    sensors = place_sensors(basis, n_sensors, layout=matrix.origin)
    plan = make_plan_from_rows(sensors.indices, matrix.k)
    result = lcsvd_run(apply_plan(matrix, plan), TruncationRule(n_modes=n_modes))
    err = rrmse(matrix.values, result.reconstruction)
    return sensors, result, err


def os_lcsvd_optimize(matrix: SnapshotMatrix, config: OsLcsvdConfig) -> OsLcsvdRun:
    """Iterate sensor placement until the reconstruction error beats the
    tolerance, or ``max_iterations`` is exhausted (best iterate returned
    with ``converged=False``).  Fully deterministic for a fixed seed."""
    if config.n_sensors > matrix.j:
        raise ValueError(f"n_sensors={config.n_sensors} exceeds J={matrix.j}")
    if config.n_modes > min(config.n_sensors, matrix.k):
        raise ValueError("retained mode count exceeds the reduced dimensions")
    rng = np.random.Generator(np.random.PCG64(config.seed))
    best = None
    history = []
    failure: Exception | None = None
    for it in range(1, config.max_iterations + 1):
        try:
            sensors, result, err = _single_iteration(
                matrix, config.n_sensors, config.n_modes, rng
            )
        except np.linalg.LinAlgError as exc:  # degenerate subsample; redraw
            failure = exc
            history.append(float("inf"))
            continue
        history.append(err)
        if best is None or err < best[2]:
            best = (sensors, result, err)
        if err < config.tolerance_epsilon:
            return OsLcsvdRun(sensors, result, err, True, it, tuple(history))
    if best is None:
        raise np.linalg.LinAlgError(
            f"all {config.max_iterations} iterations failed"
        ) from failure
    return OsLcsvdRun(*best, False, config.max_iterations, tuple(history))


@dataclass(frozen=True)
class SensorCountSearchConfig:
    """Grid search over sensor counts: start/step/ceiling, repetitions per
    count, and the relative improvement below which the search stalls."""

    max_sensors: int
    start: int = 10
    step: int = 5
    runs_per_count: int = 100
    stall_threshold: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.start < 10:
            raise ValueError("start must be >= 10")
        if self.step < 1:
            raise ValueError("step must be >= 1")
        if self.max_sensors < self.start:
            raise ValueError("max_sensors must be >= start")
        if self.runs_per_count < 1:
            raise ValueError("runs_per_count must be >= 1")

    @property
    def counts(self) -> list[int]:
        return list(range(self.start, self.max_sensors + 1, self.step))


@dataclass(frozen=True)
class SensorCountSearch:
    """Search outcome: optimal count, its tolerance (mean error rounded to
    the nearest 0.5 percent) and the full (count, mean error) curve."""

    n_opt: int
    epsilon: float
    curve: tuple
    stalled: bool


def _count_rng(seed: int, count_index: int, run_index: int):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(count_index, run_index))
    return np.random.Generator(np.random.PCG64(ss))


def _mode_count(mode_fraction: float, n_sensors: int) -> int:
    n = int(mode_fraction * n_sensors)
    if n < 1:
        raise ValueError(
            f"mode_fraction={mode_fraction} retains zero modes at {n_sensors} sensors"
        )
    return n


def find_optimal_sensor_count(
    matrix: SnapshotMatrix, search: SensorCountSearchConfig, mode_fraction: float
) -> SensorCountSearch:
    """Increase the sensor count until the mean reconstruction error stops
    improving by at least the stall threshold (relative)."""
    means = []
    counts = [c for c in search.counts if c <= matrix.j]
    if not counts:
        raise ValueError("no feasible sensor counts below J")
    for ci, count in enumerate(counts):
        n_modes = _mode_count(mode_fraction, count)
        errs = []
        for ri in range(search.runs_per_count):
            rng = _count_rng(search.seed, ci, ri)
            _, _, err = _single_iteration(matrix, count, n_modes, rng)
            errs.append(err)
        means.append(float(np.mean(errs)))
    curve = tuple(zip(counts, means))
    for i in range(len(counts) - 1):
        if means[i] < _STALL_FLOOR_PERCENT:
            improvement = 0.0  # already at the numerical floor
        else:
            improvement = (means[i] - means[i + 1]) / means[i]
        if improvement < search.stall_threshold:
            eps = float(np.round(means[i] * 2.0) / 2.0)
            return SensorCountSearch(counts[i], eps, curve, True)
    eps = float(np.round(means[-1] * 2.0) / 2.0)
    return SensorCountSearch(counts[-1], eps, curve, False)


@dataclass(frozen=True)
class ElbowCurves:
    """Per-component bias and uncertainty versus sensor count."""

    counts: tuple
    bias: np.ndarray
    uncertainty: np.ndarray
    n_comp: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n_comp", int(self.uncertainty.shape[0]))

    def component(self, c: int) -> list[tuple[int, float, float]]:
        """(n_sensors, bias, uncertainty) rows for one component."""
        return [
            (int(n), float(self.bias[c, i]), float(self.uncertainty[c, i]))
            for i, n in enumerate(self.counts)
        ]


def elbow_curve(
    matrix: SnapshotMatrix,
    sensor_range,
    mode_fraction: float,
    runs_per_count: int = 1,
    seed: int = 0,
) -> ElbowCurves:
    """Bias/uncertainty of the per-component reconstruction error over a
    range of sensor counts (averaged over seeded repetitions).

    Requires the matrix to carry its tensor origin so rows can be decoded
    into components; errors are normalized by the free-stream velocity when
    the dataset provides one.
    """
    layout = matrix.origin
    if layout is None:
        raise ValueError("elbow_curve needs a matrix with a tensor origin layout")
    counts = [int(c) for c in sensor_range]
    if not counts:
        raise ValueError("sensor_range is empty")
    n_comp = layout.n_comp
    block = layout.n_points // n_comp
    bias = np.zeros((n_comp, len(counts)))
    sigma = np.zeros((n_comp, len(counts)))
    for ci, count in enumerate(counts):
        n_modes = _mode_count(mode_fraction, count)
        for ri in range(runs_per_count):
            rng = _count_rng(seed, ci, ri)
            _, result, _ = _single_iteration(matrix, count, n_modes, rng)
            err = matrix.values - result.reconstruction
            if layout.u_inf is not None:
                err /= layout.u_inf
            for c in range(n_comp):
                b, s = bias_uncertainty(err[c * block : (c + 1) * block])
                bias[c, ci] += b
                sigma[c, ci] += s
    bias /= runs_per_count
    sigma /= runs_per_count
    return ElbowCurves(counts=tuple(counts), bias=bias, uncertainty=sigma)


def detect_elbow(counts, values) -> int:
    """Sensor count at the maximum second difference of a decreasing curve."""
    counts = list(counts)
    v = np.asarray(values, dtype=np.float64)
    if len(counts) != v.size or v.size < 3:
        raise ValueError("need at least three curve points")
    d2 = v[2:] - 2.0 * v[1:-1] + v[:-2]
    return int(counts[1 + int(np.argmax(d2))])
