"""File format tests: SNT1 binary tensors, CSV matrices, sensor lists."""

import numpy as np
import pytest

from lcsvd import SensorSet, SnapshotMatrix, SnapshotTensor, TensorLayout, place_sensors
from lcsvd.io import (
    SnapshotFileError,
    matrix_as_tensor,
    read_matrix_csv,
    read_sensor_indices_csv,
    read_snt,
    write_matrix_csv,
    write_sensors_csv,
    write_snt,
)


def _random_tensor(rng):
    n_comp = int(rng.integers(1, 4))
    n_x = int(rng.integers(1, 7))
    n_y = int(rng.integers(1, 7))
    n_t = int(rng.integers(1, 5))
    three_d = rng.random() < 0.5
    if three_d:
        n_z = int(rng.integers(2, 5))
        shape = (n_comp, n_x, n_y, n_z, n_t)
    else:
        shape = (n_comp, n_x, n_y, n_t)
    u_inf = float(rng.uniform(0.1, 10.0)) if rng.random() < 0.5 else None
    return SnapshotTensor(values=rng.standard_normal(shape), u_inf=u_inf)


class TestSntRoundTrip:
    def test_bitwise_lossless_random_tensors(self, tmp_path):
        rng = np.random.default_rng(2024)
        for i in range(20):
            t = _random_tensor(rng)
            path = tmp_path / f"case_{i}.snt"
            write_snt(path, t)
            back = read_snt(path)
            assert back.values.shape == t.values.shape
            np.testing.assert_array_equal(back.values, t.values)
            assert back.u_inf == t.u_inf

    def test_2d_header_uses_nz_one(self, tmp_path):
        t = SnapshotTensor(values=np.arange(8.0).reshape(1, 2, 2, 2))
        path = tmp_path / "flat.snt"
        write_snt(path, t)
        header = path.read_bytes().split(b"\n", 1)[0].split()
        assert header[:6] == [b"SNT1", b"1", b"2", b"2", b"1", b"2"]
        assert header[6] == b"0.0"  # u_inf absent

    def test_u_inf_round_trips_exactly(self, tmp_path):
        t = SnapshotTensor(values=np.ones((1, 2, 2, 1)), u_inf=np.pi)
        path = tmp_path / "u.snt"
        write_snt(path, t)
        assert read_snt(path).u_inf == np.pi


class TestSntErrors:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.snt"
        path.write_bytes(b"")
        with pytest.raises(SnapshotFileError):
            read_snt(path)

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "bad.snt"
        path.write_bytes(b"NOPE 1 1 1 1 1 0\n")
        with pytest.raises(SnapshotFileError):
            read_snt(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "short.snt"
        path.write_bytes(b"SNT1 1 2 2 1 2 0\n" + b"\x00" * 8)
        with pytest.raises(SnapshotFileError):
            read_snt(path)

    def test_garbage_header_fields(self, tmp_path):
        path = tmp_path / "garbage.snt"
        path.write_bytes(b"SNT1 a b c d e f\n")
        with pytest.raises(SnapshotFileError):
            read_snt(path)


class TestMatrixCsv:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        m = SnapshotMatrix(values=rng.standard_normal((12, 5)))
        path = tmp_path / "m.csv"
        write_matrix_csv(path, m)
        back = read_matrix_csv(path)
        np.testing.assert_array_equal(back.values, m.values)

    def test_single_row(self, tmp_path):
        path = tmp_path / "row.csv"
        path.write_text("1.5,2.5,3.5\n")
        m = read_matrix_csv(path)
        assert m.values.shape == (1, 3)


class TestMatrixAsTensor:
    def test_bare_matrix_becomes_single_component(self):
        m = SnapshotMatrix(values=np.arange(12.0).reshape(4, 3))
        t = matrix_as_tensor(m)
        assert t.values.shape == (1, 4, 1, 3)
        np.testing.assert_array_equal(t.values.reshape(4, 3), m.values)

    def test_matrix_with_origin_rebuilds_grid(self):
        layout = TensorLayout(n_comp=2, n_x=3, n_y=2, u_inf=1.5)
        m = SnapshotMatrix(values=np.arange(24.0).reshape(12, 2), origin=layout)
        t = matrix_as_tensor(m)
        assert t.values.shape == (2, 3, 2, 2)
        assert t.u_inf == 1.5


class TestSensorsCsv:
    def test_round_trip_with_coordinates(self, tmp_path):
        layout = TensorLayout(n_comp=2, n_x=4, n_y=3)
        rng = np.random.default_rng(0)
        w = np.linalg.qr(rng.standard_normal((layout.n_points, 4)))[0]
        sensors = place_sensors(w, 4, layout=layout)
        path = tmp_path / "sensors.csv"
        write_sensors_csv(path, sensors)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "index,component,x,y,z"
        assert len(lines) == 5
        np.testing.assert_array_equal(read_sensor_indices_csv(path), sensors.indices)

    def test_without_coordinates(self, tmp_path):
        sensors = SensorSet(indices=np.array([5, 2, 9]), n_basis=2)
        path = tmp_path / "bare.csv"
        write_sensors_csv(path, sensors)
        np.testing.assert_array_equal(read_sensor_indices_csv(path), [5, 2, 9])

    def test_not_a_sensor_file(self, tmp_path):
        path = tmp_path / "junk.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(SnapshotFileError):
            read_sensor_indices_csv(path)
