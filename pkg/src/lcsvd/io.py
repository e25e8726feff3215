"""File formats: the SNT1 binary tensor container, CSV matrices and sensor
lists, and small JSON helpers.

SNT1 layout: one ASCII header line ``SNT1 n_comp n_x n_y n_z n_t u_inf``
(``n_z = 1`` marks 2-D data, ``u_inf = 0`` marks "not available"), followed
by the field values as little-endian 64-bit floats in the documented row
order (component-major, then x, y, (z), with time fastest).  Writing and
re-reading is bitwise lossless.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .placement import SensorSet
from .snapshots import SnapshotMatrix, SnapshotTensor

__all__ = [
    "SnapshotFileError",
    "write_snt",
    "read_snt",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_sensors_csv",
    "read_sensor_indices_csv",
    "write_json",
    "matrix_as_tensor",
]

_MAGIC = "SNT1"


class SnapshotFileError(Exception):
    """Raised for malformed snapshot tensor files."""


def write_snt(path, tensor: SnapshotTensor) -> None:
    """Write a snapshot tensor to an SNT1 file (bitwise lossless)."""
    layout = tensor.layout
    u_inf = tensor.u_inf if tensor.u_inf is not None else 0.0
    header = (
        f"{_MAGIC} {layout.n_comp} {layout.n_x} {layout.n_y} "
        f"{layout.n_z or 1} {tensor.n_t} {u_inf!r}\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(tensor.values, dtype="<f8").tobytes())


def read_snt(path) -> SnapshotTensor:
    """Read an SNT1 file written by :func:`write_snt`."""
    with open(path, "rb") as fh:
        raw = fh.readline(256)
        if not raw.endswith(b"\n"):
            raise SnapshotFileError(f"{path}: missing or oversized header line")
        fields = raw.decode("ascii", errors="replace").split()
        if len(fields) != 7 or fields[0] != _MAGIC:
            raise SnapshotFileError(f"{path}: not an {_MAGIC} file")
        try:
            n_comp, n_x, n_y, n_z, n_t = (int(f) for f in fields[1:6])
            u_inf = float(fields[6])
        except ValueError as exc:
            raise SnapshotFileError(f"{path}: malformed header fields") from exc
        if min(n_comp, n_x, n_y, n_z, n_t) < 1 or u_inf < 0:
            raise SnapshotFileError(f"{path}: header fields out of range")
        count = n_comp * n_x * n_y * n_z * n_t
        data = np.fromfile(fh, dtype="<f8", count=count)
        if data.size != count:
            raise SnapshotFileError(
                f"{path}: expected {count} values, found {data.size}"
            )
    shape = (n_comp, n_x, n_y, n_t) if n_z == 1 else (n_comp, n_x, n_y, n_z, n_t)
    values = data.astype(np.float64).reshape(shape)
    return SnapshotTensor(values=values, u_inf=u_inf if u_inf > 0 else None)


def matrix_as_tensor(matrix: SnapshotMatrix) -> SnapshotTensor:
    """View a bare matrix as a single-component (1, J, 1) grid tensor."""
    if matrix.origin is not None:
        return SnapshotTensor(
            values=matrix.values.reshape(matrix.origin.grid_shape + (matrix.k,)),
            u_inf=matrix.origin.u_inf,
        )
    return SnapshotTensor(values=matrix.values.reshape(1, matrix.j, 1, matrix.k))


def write_matrix_csv(path, matrix) -> None:
    """Write a J x K matrix as CSV, one row per spatial point."""
    values = np.asarray(getattr(matrix, "values", matrix))
    np.savetxt(path, values, delimiter=",", fmt="%.17g")


def read_matrix_csv(path) -> SnapshotMatrix:
    """Read a J x K matrix from CSV (row per spatial point)."""
    values = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return SnapshotMatrix(values=values)


def write_sensors_csv(path, sensors: SensorSet) -> None:
    """Serialize a sensor set: one row per sensor, ``index,component,x,y,z``.

    Coordinate columns are left empty when the sensor set carries no decoded
    grid coordinates; ``z`` is 0 for 2-D layouts.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "component", "x", "y", "z"])
        for i, idx in enumerate(sensors.indices):
            if sensors.grid_coords is not None:
                coords = list(sensors.grid_coords[i])
                if len(coords) == 3:
                    coords.append(0)
                writer.writerow([int(idx), *coords])
            else:
                writer.writerow([int(idx), "", "", "", ""])


def read_sensor_indices_csv(path) -> np.ndarray:
    """Read back the sensor row indices from a sensors CSV file."""
    indices = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not header or header[0] != "index":
            raise SnapshotFileError(f"{path}: not a sensors CSV file")
        for row in reader:
            if row:
                indices.append(int(row[0]))
    if not indices:
        raise SnapshotFileError(f"{path}: no sensors listed")
    return np.asarray(indices, dtype=np.intp)


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
