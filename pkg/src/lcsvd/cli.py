"""Command-line interface.

Subcommands: gen, decompose, place-sensors, reconstruct, optimize,
search-sensors, elbow, benchmark.  Exit codes: 0 success, 2 validation
error, 3 non-convergence of the placement loop, 4 I/O or file-format error.
The LCSVD_THREADS environment variable caps BLAS thread counts for every
command (the benchmark always pins itself to one thread).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import benchmark as bench
from . import io as lio
from .errors import build_error_report
from .linalg import parse_rule, svd_truncated
from .optimize import (
    OsLcsvdConfig,
    SensorCountSearchConfig,
    detect_elbow,
    elbow_curve,
    find_optimal_sensor_count,
    os_lcsvd_optimize,
    rrmse,
)
from .placement import place_sensors
from .reconstruction import lcsvd_run
from .snapshots import (
    SnapshotMatrix,
    SnapshotTensor,
    apply_plan,
    flatten,
    make_plan_equidistant,
    make_plan_from_rows,
    make_plan_random,
    unflatten,
)
from .synthetic import SyntheticSpec, gen_exact_rank, gen_noisy, gen_oscillatory_wake

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4


class NotConverged(Exception):
    pass


def _load_matrix(path: str) -> SnapshotMatrix:
    p = Path(path)
    if not p.exists():
        raise lio.SnapshotFileError(f"{path}: no such file")
    if p.suffix == ".csv":
        return lio.read_matrix_csv(p)
    return flatten(lio.read_snt(p))


def _outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_field(out: Path, stem: str, matrix: SnapshotMatrix, fmt: str):
    if fmt == "csv":
        lio.write_matrix_csv(out / f"{stem}.csv", matrix)
    else:
        lio.write_snt(out / f"{stem}.snt", lio.matrix_as_tensor(matrix))


def cmd_gen(args) -> int:
    if args.kind == "wake":
        shape = tuple(int(s) for s in args.shape.split("x"))
        spec = SyntheticSpec(
            kind="oscillatory_wake",
            shape=shape,
            k=args.k,
            rank=args.rank,
            noise_level=args.noise_level,
            seed=args.seed,
        )
        lio.write_snt(args.output, gen_oscillatory_wake(spec))
        return EXIT_OK
    kind = "exact_rank" if args.kind == "exact-rank" else "noisy_low_rank"
    spec = SyntheticSpec(
        kind=kind,
        j=args.j,
        k=args.k,
        rank=args.rank,
        noise_level=args.noise_level,
        seed=args.seed,
    )
    matrix = gen_exact_rank(spec) if kind == "exact_rank" else gen_noisy(spec)
    if args.format == "csv":
        lio.write_matrix_csv(args.output, matrix)
    else:
        lio.write_snt(args.output, lio.matrix_as_tensor(matrix))
    return EXIT_OK


def cmd_decompose(args) -> int:
    matrix = _load_matrix(args.input)
    out = _outdir(args)
    fact = svd_truncated(matrix, parse_rule(args.rule))
    _write_field(out, "modes", SnapshotMatrix(fact.modes, origin=matrix.origin), args.format)
    np.savetxt(out / "singular_values.csv", fact.singular_values, delimiter=",", fmt="%.17g")
    lio.write_matrix_csv(out / "coefficients.csv", fact.coefficients)
    lio.write_json(
        out / "summary.json",
        {
            "input": str(args.input),
            "rule": args.rule,
            "j": matrix.j,
            "k": matrix.k,
            "n_retained": fact.n_retained,
            "leading_singular_value": float(fact.singular_values[0]),
        },
    )
    return EXIT_OK


def cmd_place_sensors(args) -> int:
    matrix = _load_matrix(args.input)
    out = _outdir(args)
    rule = parse_rule(args.rule if args.rule else f"modes:{args.sensors}")
    basis = svd_truncated(matrix, rule)
    sensors = place_sensors(basis, args.sensors, layout=matrix.origin)
    lio.write_sensors_csv(out / "sensors.csv", sensors)
    lio.write_json(
        out / "summary.json",
        {"n_sensors": sensors.p, "n_basis": sensors.n_basis, "j": matrix.j},
    )
    return EXIT_OK


def _build_plan(args, matrix: SnapshotMatrix):
    if args.plan_file:
        rows = lio.read_sensor_indices_csv(args.plan_file)
        return make_plan_from_rows(rows, matrix.k)
    if args.plan == "equidistant":
        return make_plan_equidistant(matrix.j, matrix.k, args.sensors, matrix.k)
    if args.plan == "random":
        return make_plan_random(matrix.j, matrix.k, args.sensors, matrix.k, args.seed)
    raise ValueError(f"unknown plan source {args.plan!r}")


def cmd_reconstruct(args) -> int:
    matrix = _load_matrix(args.input)
    out = _outdir(args)
    plan = _build_plan(args, matrix)
    n_modes = max(1, int(args.fraction * plan.n_rows))
    result = lcsvd_run(apply_plan(matrix, plan), f"modes:{n_modes}")
    err = rrmse(matrix.values, result.reconstruction)
    recon = SnapshotMatrix(result.reconstruction, origin=matrix.origin)
    _write_field(out, "reconstruction", recon, args.format)

    original_t = unflatten(matrix) if matrix.origin else lio.matrix_as_tensor(matrix)
    recon_t = (
        unflatten(recon) if matrix.origin else lio.matrix_as_tensor(recon)
    )
    report = build_error_report(original_t, recon_t, plan.n_rows)
    for c in range(original_t.n_comp):
        edges, dens = report.histograms[c]
        rows = np.column_stack([edges[:-1], dens])
        np.savetxt(out / f"error_hist_{c}.csv", rows, delimiter=",", fmt="%.17g")
        worst = report.abs_error[c, ..., report.worst_snapshot[c]]
        lio.write_snt(
            out / f"abs_error_worst_{c}.snt",
            SnapshotTensor(values=worst[None, ..., None]),
        )
    payload = report.scalars()
    payload.update({"rrmse_percent": err, "plan": plan.strategy, "n_rows": plan.n_rows})
    lio.write_json(out / "report.json", payload)
    return EXIT_OK


def cmd_optimize(args) -> int:
    matrix = _load_matrix(args.input)
    out = _outdir(args)
    config = OsLcsvdConfig(
        n_sensors=args.sensors,
        mode_fraction=args.fraction,
        tolerance_epsilon=args.epsilon,
        max_iterations=args.max_iterations,
        seed=args.seed,
    )
    run = os_lcsvd_optimize(matrix, config)
    lio.write_sensors_csv(out / "sensors.csv", run.sensors)
    payload = run.summary()
    payload["config"] = {
        "n_sensors": config.n_sensors,
        "mode_fraction": config.mode_fraction,
        "tolerance_epsilon": config.tolerance_epsilon,
        "max_iterations": config.max_iterations,
        "seed": config.seed,
    }
    lio.write_json(out / "run.json", payload)
    if not run.converged:
        raise NotConverged(
            f"best RRMSE {run.rrmse_percent:.4g}% after {run.n_iterations} iterations "
            f"(tolerance {config.tolerance_epsilon}%)"
        )
    return EXIT_OK


def cmd_search_sensors(args) -> int:
    matrix = _load_matrix(args.input)
    out = _outdir(args)
    config = SensorCountSearchConfig(
        max_sensors=args.max_sensors,
        start=args.start,
        step=args.step,
        runs_per_count=args.runs,
        stall_threshold=args.stall_threshold,
        seed=args.seed,
    )
    search = find_optimal_sensor_count(matrix, config, args.fraction)
    rows = np.asarray(search.curve, dtype=np.float64)
    np.savetxt(
        out / "search_curve.csv",
        rows,
        delimiter=",",
        fmt="%.17g",
        header="n_sensors,mean_rrmse_percent",
        comments="",
    )
    lio.write_json(
        out / "search.json",
        {
            "n_opt": search.n_opt,
            "epsilon": search.epsilon,
            "stalled": search.stalled,
            "mode_fraction": args.fraction,
        },
    )
    return EXIT_OK


def cmd_elbow(args) -> int:
    matrix = _load_matrix(args.input)
    out = _outdir(args)
    counts = [int(c) for c in args.counts.split(",")]
    curves = elbow_curve(matrix, counts, args.fraction, runs_per_count=args.runs, seed=args.seed)
    picks = {}
    for c in range(curves.n_comp):
        rows = np.asarray(
            [(n, b, s) for n, b, s in curves.component(c)], dtype=np.float64
        )
        np.savetxt(
            out / f"elbow_{c}.csv",
            rows,
            delimiter=",",
            fmt="%.17g",
            header="n_sensors,bias,uncertainty",
            comments="",
        )
        if len(counts) >= 3:
            picks[str(c)] = detect_elbow(curves.counts, curves.uncertainty[c])
    lio.write_json(out / "elbow.json", {"elbow_per_component": picks})
    return EXIT_OK


def cmd_benchmark(args) -> int:
    out = _outdir(args)
    shapes = []
    for token in args.shapes.split(","):
        j, _, k = token.partition("x")
        shapes.append((int(j), int(k)))
    points = [int(p) for p in args.points.split(",")]
    fractions = [float(f) for f in args.fractions.split(",")]
    records, notes = bench.run_benchmark(
        shapes, points, fractions, runs=args.runs, seed=args.seed
    )
    bench.write_benchmark_csv(out / "benchmark.csv", records)
    if notes:
        (out / "benchmark_notes.txt").write_text("\n".join(notes) + "\n")
    for note in notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcsvd",
        description="Reduced-point SVD reconstruction and optimal sensor placement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, output_dir=True):
        p.add_argument("--input", required=True, help="SNT1 (.snt) or CSV (.csv) input")
        if output_dir:
            p.add_argument("--output-dir", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--kind", choices=["exact-rank", "noisy", "wake"], required=True)
    p.add_argument("--j", type=int, default=400)
    p.add_argument("--k", type=int, default=60)
    p.add_argument("--shape", default="2x64x48", help="wake grid as CxXxY")
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--noise-level", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["snt", "csv"], default="snt")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("decompose", help="truncated SVD of a snapshot file")
    add_common(p)
    p.add_argument("--rule", default="tol:1e-8", help="tol:<eps> or modes:<n>")
    p.add_argument("--format", choices=["snt", "csv"], default="csv")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("place-sensors", help="QR-pivot sensor selection")
    add_common(p)
    p.add_argument("--sensors", type=int, required=True)
    p.add_argument("--rule", default=None, help="basis truncation rule (default modes:<sensors>)")
    p.set_defaults(func=cmd_place_sensors)

    p = sub.add_parser("reconstruct", help="reduced-point reconstruction + error report")
    add_common(p)
    p.add_argument("--plan", choices=["equidistant", "random"], default="equidistant")
    p.add_argument("--plan-file", default=None, help="sensors.csv to take rows from")
    p.add_argument("--sensors", type=int, default=10, help="row count for equidistant/random plans")
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["snt", "csv"], default="snt")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("optimize", help="optimal sensor placement loop")
    add_common(p)
    p.add_argument("--sensors", type=int, required=True)
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--epsilon", type=float, required=True, help="RRMSE tolerance in percent")
    p.add_argument("--max-iterations", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("search-sensors", help="optimal sensor count by stall detection")
    add_common(p)
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--start", type=int, default=10)
    p.add_argument("--step", type=int, default=5)
    p.add_argument("--max-sensors", type=int, required=True)
    p.add_argument("--runs", type=int, default=10, help="repetitions per count")
    p.add_argument("--stall-threshold", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_search_sensors)

    p = sub.add_parser("elbow", help="uncertainty-vs-sensors elbow curves")
    add_common(p)
    p.add_argument("--counts", required=True, help="comma-separated sensor counts")
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_elbow)

    p = sub.add_parser("benchmark", help="speed-up and memory benchmark")
    p.add_argument("--shapes", required=True, help="comma-separated JxK shapes")
    p.add_argument("--points", required=True, help="comma-separated reduced point counts")
    p.add_argument("--fractions", default="0.5", help="comma-separated mode fractions")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get("LCSVD_THREADS")
    try:
        if threads:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=int(threads)):
                return args.func(args)
        return args.func(args)
    except NotConverged as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (lio.SnapshotFileError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
