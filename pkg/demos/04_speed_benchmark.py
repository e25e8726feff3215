"""
What does the reduction buy?
============================

Wall-clock comparison of truncated SVD on the full matrix against the
reduced-point pipelines, on a moderately sized synthetic dataset.  Timing
is pinned to one BLAS thread; a background monitor records peak resident
memory per phase.
"""

from pathlib import Path

from lcsvd.benchmark import run_benchmark, write_benchmark_csv

out = Path("demo_output")
out.mkdir(exist_ok=True)

records, notes = run_benchmark(
    shapes=[(12000, 600)],
    n_points_list=[10, 30, 50],
    fractions=[0.2, 0.5],
    runs=3,
    seed=0,
)
for note in notes:
    print("note:", note)

print(f"{'points':>6} {'modes%':>7} {'t_svd':>8} {'t_lcsvd':>9} {'t_os':>8} "
      f"{'S_u(lc)':>8} {'S_u(os)':>8} {'mem lc/svd':>10}")
for r in records:
    print(
        f"{r.n_points:6d} {r.mode_fraction:7.0%} {r.t_svd:8.3f} {r.t_lcsvd:9.4f} "
        f"{r.t_oslcsvd:8.4f} {r.s_u_lcsvd:8.1f} {r.s_u_oslcsvd:8.1f} "
        f"{r.peak_mem_lcsvd / r.peak_mem_svd:10.2f}"
    )

write_benchmark_csv(out / "benchmark.csv", records)
print(f"\nfull records written to {out}/benchmark.csv")
