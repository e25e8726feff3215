"""Benchmark harness: wall-clock and peak-memory comparison of truncated SVD
on the full matrix versus the reduced-point reconstruction pipelines.

Timing phases are pinned to a single BLAS thread for comparability; a
background thread samples resident memory at >= 100 Hz into an append-only
log, from which per-phase peaks are read.  Configurations whose estimated
working set exceeds available memory are skipped with a note instead of
thrashing the machine.
"""

from __future__ import annotations

import contextlib
import csv
import gc
import threading
import time
from dataclasses import dataclass, fields

import numpy as np
import psutil
from threadpoolctl import threadpool_limits

from .linalg import _GRAM_ASPECT, _GRAM_MIN_COLS, TruncationRule, svd_truncated
from .optimize import OsLcsvdConfig, os_lcsvd_optimize
from .reconstruction import lcsvd_run
from .snapshots import SnapshotMatrix, apply_plan, make_plan_equidistant

__all__ = ["BenchmarkRecord", "MemoryMonitor", "run_benchmark", "write_benchmark_csv"]


class MemoryMonitor:
    """Samples this process's RSS into an append-only (time, bytes) log."""

    def __init__(self, interval: float = 0.005):
        self.interval = interval
        self.samples: list[tuple[float, int]] = []
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._proc = psutil.Process()

    def __enter__(self):
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._stop.set()
        self._thread.join()
        return False

    def _loop(self):
        while not self._stop.is_set():
            self.samples.append((time.perf_counter(), self._proc.memory_info().rss))
            self._stop.wait(self.interval)

    def peak_between(self, t0: float, t1: float) -> int:
        window = [rss for t, rss in self.samples if t0 <= t <= t1]
        if not window:  # phase shorter than one sampling interval
            return self._proc.memory_info().rss
        return max(window)


@dataclass(frozen=True)
class BenchmarkRecord:
    """Timings (seconds), speed-ups and peak memory (bytes) for one
    configuration.  Speed-ups are computed from the recorded medians."""

    dataset_id: str
    j: int
    k: int
    n_points: int
    mode_fraction: float
    runs: int
    t_svd: float
    t_lcsvd: float
    t_oslcsvd: float
    t_svd_mean: float
    t_lcsvd_mean: float
    t_oslcsvd_mean: float
    s_u_lcsvd: float
    s_u_oslcsvd: float
    peak_mem_svd: int
    peak_mem_lcsvd: int
    peak_mem_oslcsvd: int


def _gen_benchmark_matrix(j, k, rank, noise_level, seed) -> SnapshotMatrix:
    """Low-rank field plus full-rank noise, with the noise added in row
    blocks so no second J x K array is ever allocated."""
    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.standard_normal((j, rank))
    b = rng.standard_normal((k, rank))
    v = a @ b.T
    scale = noise_level * float(np.linalg.norm(v)) / np.sqrt(v.size)
    block = max(1, 4_000_000 // k)
    for lo in range(0, j, block):
        hi = min(j, lo + block)
        v[lo:hi] += scale * rng.standard_normal((hi - lo, k))
    return SnapshotMatrix(values=v)


def _estimated_bytes(j: int, k: int) -> int:
    """Peak working set: phases never hold gram workspace and the J x K
    reconstruction at the same time, so the bound is their maximum."""
    if k >= _GRAM_MIN_COLS and j >= _GRAM_ASPECT * k:  # gram route
        peak = max(j * k + 3.2 * k * k, 2 * j * k)
    else:  # bidiagonalization route copies input and both factor sets
        peak = 4 * j * k
    return int(8 * peak) + 200_000_000


def _timed_phase(monitor, func, runs):
    times = []
    peak = 0
    for _ in range(runs):
        gc.collect()
        t0 = time.perf_counter()
        out = func()
        t1 = time.perf_counter()
        del out
        times.append(t1 - t0)
        peak = max(peak, monitor.peak_between(t0, t1))
    return float(np.median(times)), float(np.mean(times)), peak


def run_benchmark(
    shapes,
    n_points_list,
    fractions,
    runs: int = 3,
    seed: int = 0,
    rank: int = 10,
    noise_level: float = 0.05,
    pin_single_thread: bool = True,
) -> tuple[list[BenchmarkRecord], list[str]]:
    """Time truncated SVD, reduced reconstruction and the placement loop on
    synthetic noisy low-rank data for every (shape, n_points, fraction)
    combo.  Returns the records plus notes for skipped configurations."""
    records: list[BenchmarkRecord] = []
    notes: list[str] = []
    pin = threadpool_limits(limits=1) if pin_single_thread else contextlib.nullcontext()
    with pin:
        with MemoryMonitor() as monitor:
            for j, k in shapes:
                need = _estimated_bytes(j, k)
                avail = psutil.virtual_memory().available
                if need > avail:
                    notes.append(
                        f"skipped {j}x{k}: needs ~{need / 1e9:.1f} GB, "
                        f"{avail / 1e9:.1f} GB available"
                    )
                    continue
                matrix = _gen_benchmark_matrix(
                    j, k, rank=min(rank, k), noise_level=noise_level, seed=seed
                )
                for n_points in n_points_list:
                    if n_points > j:
                        notes.append(f"skipped n_points={n_points} > J={j}")
                        continue
                    for fraction in fractions:
                        records.append(
                            _run_one(monitor, matrix, n_points, fraction, runs, seed)
                        )
                del matrix
                gc.collect()
    return records, notes


def _run_one(monitor, matrix: SnapshotMatrix, n_points, fraction, runs, seed):
    j, k = matrix.j, matrix.k
    n_modes = max(1, int(fraction * n_points))
    rule = TruncationRule(n_modes=n_modes)

    def svd_phase():
        return svd_truncated(matrix, rule).reconstruct()

    plan = make_plan_equidistant(j, k, n_points, k)

    def lcsvd_phase():
        return lcsvd_run(apply_plan(matrix, plan), rule)

    os_config = OsLcsvdConfig(
        n_sensors=n_points,
        mode_fraction=fraction,
        tolerance_epsilon=1e9,  # vacuous: time exactly one placement cycle
        max_iterations=1,
        seed=seed,
    )

    def os_phase():
        return os_lcsvd_optimize(matrix, os_config)

    t_svd, t_svd_mean, mem_svd = _timed_phase(monitor, svd_phase, runs)
    t_lc, t_lc_mean, mem_lc = _timed_phase(monitor, lcsvd_phase, runs)
    t_os, t_os_mean, mem_os = _timed_phase(monitor, os_phase, runs)
    return BenchmarkRecord(
        dataset_id=f"synthetic-{j}x{k}",
        j=j,
        k=k,
        n_points=n_points,
        mode_fraction=fraction,
        runs=runs,
        t_svd=t_svd,
        t_lcsvd=t_lc,
        t_oslcsvd=t_os,
        t_svd_mean=t_svd_mean,
        t_lcsvd_mean=t_lc_mean,
        t_oslcsvd_mean=t_os_mean,
        s_u_lcsvd=t_svd / t_lc,
        s_u_oslcsvd=t_svd / t_os,
        peak_mem_svd=mem_svd,
        peak_mem_lcsvd=mem_lc,
        peak_mem_oslcsvd=mem_os,
    )


def write_benchmark_csv(path, records) -> None:
    names = [f.name for f in fields(BenchmarkRecord)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for rec in records:
            writer.writerow([getattr(rec, name) for name in names])
