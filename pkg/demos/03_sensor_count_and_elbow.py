"""
How many sensors are enough?
============================

Two estimators: (1) increase the count until the mean reconstruction
error stops improving, (2) plot the error-field uncertainty against the
count and look for the elbow.  Both point at the count where the retained
modes first cover the data's effective rank.
"""

from pathlib import Path

import numpy as np

from lcsvd import (
    SensorCountSearchConfig,
    SyntheticSpec,
    detect_elbow,
    elbow_curve,
    find_optimal_sensor_count,
    flatten,
    gen_exact_rank,
    gen_oscillatory_wake,
)

out = Path("demo_output")
out.mkdir(exist_ok=True)

# --- stall search on exact rank-5 data --------------------------------
matrix = gen_exact_rank(SyntheticSpec(kind="exact_rank", j=400, k=60, rank=5, seed=2))
config = SensorCountSearchConfig(max_sensors=50, runs_per_count=5, seed=1)
search = find_optimal_sensor_count(matrix, config, mode_fraction=0.2)
print("sensor-count search on exact rank-5 data (modes = 20% of sensors):")
for count, mean_err in search.curve:
    marker = "  <- optimal" if count == search.n_opt else ""
    print(f"  {count:3d} sensors: mean RRMSE {mean_err:10.3e} %{marker}")
print(f"n_opt = {search.n_opt}, tolerance epsilon = {search.epsilon} %\n")

# --- elbow method on a noisy wake --------------------------------------
spec = SyntheticSpec(
    kind="oscillatory_wake", shape=(2, 60, 40), k=120, rank=6, noise_level=0.01, seed=7
)
wake = flatten(gen_oscillatory_wake(spec))
counts = [10, 15, 20, 25, 30, 35, 40, 45, 50]
curves = elbow_curve(wake, counts, mode_fraction=0.2, runs_per_count=3, seed=7)

for c, label in enumerate(("streamwise", "normal")):
    rows = np.asarray(curves.component(c))
    np.savetxt(
        out / f"elbow_{label}.csv", rows, delimiter=",",
        header="n_sensors,bias,uncertainty", comments="",
    )
    elbow = detect_elbow(curves.counts, curves.uncertainty[c])
    print(f"{label}: uncertainty elbow at {elbow} sensors")
    for n, _, sigma in curves.component(c):
        bar = "#" * int(60 * sigma / curves.uncertainty[c].max())
        print(f"  {n:3d} {sigma:9.2e} {bar}")
print(f"\ncurves written to {out}/elbow_*.csv")
