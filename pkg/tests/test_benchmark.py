"""Benchmark harness tests at desk scale."""

import numpy as np
import pytest

from lcsvd.benchmark import (
    MemoryMonitor,
    _estimated_bytes,
    run_benchmark,
    write_benchmark_csv,
)


class TestMemoryMonitor:
    def test_samples_accumulate(self):
        import time

        with MemoryMonitor(interval=0.002) as mon:
            t0 = time.perf_counter()
            block = np.ones((512, 1024))  # touch some memory
            time.sleep(0.05)
            t1 = time.perf_counter()
            del block
        assert len(mon.samples) >= 5
        assert mon.peak_between(t0, t1) > 0


class TestRunBenchmark:
    def test_records_and_ratios(self):
        records, notes = run_benchmark([(400, 60)], [20], [0.5], runs=2, seed=1)
        assert notes == []
        assert len(records) == 1
        rec = records[0]
        assert rec.t_svd > 0 and rec.t_lcsvd > 0 and rec.t_oslcsvd > 0
        assert rec.s_u_lcsvd == rec.t_svd / rec.t_lcsvd
        assert rec.s_u_oslcsvd == rec.t_svd / rec.t_oslcsvd
        assert rec.peak_mem_svd > 0

    def test_degenerate_no_reduction_speedup_near_one(self):
        # J-bar = J: the pipeline does the same SVD plus small extras
        records, _ = run_benchmark([(2000, 200)], [2000], [0.1], runs=3, seed=0)
        s_u = records[0].s_u_lcsvd
        assert 0.5 <= s_u <= 2.0

    def test_reduced_pipeline_uses_less_memory(self):
        # with J-bar << J the full SVD holds factor copies the reduced
        # pipeline never allocates
        records, _ = run_benchmark([(12000, 600)], [30], [0.5], runs=1, seed=3)
        rec = records[0]
        assert rec.peak_mem_lcsvd <= rec.peak_mem_svd

    def test_infeasible_shape_skipped_with_note(self):
        records, notes = run_benchmark([(10**7, 10**5)], [10], [0.5], runs=1)
        assert records == []
        assert len(notes) == 1 and "skipped" in notes[0]

    def test_points_above_j_skipped(self):
        records, notes = run_benchmark([(50, 20)], [60], [0.5], runs=1)
        assert records == []
        assert any("n_points=60" in n for n in notes)

    def test_csv_round_trip(self, tmp_path):
        records, _ = run_benchmark([(300, 40)], [15], [0.2], runs=1, seed=2)
        path = tmp_path / "bench.csv"
        write_benchmark_csv(path, records)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 2
        header = lines[0].split(",")
        row = dict(zip(header, lines[1].split(",")))
        assert float(row["s_u_lcsvd"]) == pytest.approx(
            float(row["t_svd"]) / float(row["t_lcsvd"]), rel=1e-12
        )
        assert int(row["j"]) == 300


class TestMemoryEstimate:
    def test_gram_route_bound_is_phase_max(self):
        j, k = 47850, 6170
        need = _estimated_bytes(j, k)
        assert need < 8 * (2 * j * k) + 3e8  # dominated by input + reconstruction

    def test_small_shapes_cheap(self):
        assert _estimated_bytes(400, 60) < 3e8
