"""Snapshot data model: field tensors, flattened snapshot matrices, reduction plans.

A snapshot matrix stacks flattened spatial fields as columns, one column per
time instant.  Everything downstream (factorization, sensor placement,
reconstruction) operates on this J x K matrix view; the tensor form carries
the grid metadata needed to decode row indices back into physical
(component, x, y[, z]) coordinates.

Row layout of the flattened matrix
----------------------------------
Rows are ordered component-major: all points of component 0 first, then
component 1, and so on.  Within a component block the spatial indices are
nested x, then y, then z, with z varying fastest (C order over the
``(n_comp, n_x, n_y[, n_z])`` index tuple).  The same order is used for the
binary file format, so flattening is the identity on the stored buffer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SnapshotTensor",
    "SnapshotMatrix",
    "TensorLayout",
    "ReductionPlan",
    "ReducedMatrices",
    "flatten",
    "unflatten",
    "make_plan_equidistant",
    "make_plan_random",
    "make_plan_from_rows",
    "apply_plan",
]


@dataclass(frozen=True)
class TensorLayout:
    """Grid metadata of a snapshot tensor: component count, spatial extents
    and the optional free-stream velocity used for error normalization."""

    n_comp: int
    n_x: int
    n_y: int
    n_z: int | None = None
    u_inf: float | None = None

    def __post_init__(self):
        for name in ("n_comp", "n_x", "n_y"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_z is not None and self.n_z < 1:
            raise ValueError("n_z must be >= 1 when given")
        if self.u_inf is not None and not self.u_inf > 0:
            raise ValueError("u_inf must be positive when given")

    @property
    def n_points(self) -> int:
        """Number of spatial rows J = n_comp * n_x * n_y * (n_z or 1)."""
        return self.n_comp * self.n_x * self.n_y * (self.n_z or 1)

    @property
    def grid_shape(self) -> tuple[int, ...]:
        """Index shape of one snapshot, ``(n_comp, n_x, n_y[, n_z])``."""
        if self.n_z is None:
            return (self.n_comp, self.n_x, self.n_y)
        return (self.n_comp, self.n_x, self.n_y, self.n_z)

    def decode_row(self, row: int) -> tuple[int, ...]:
        """Map a flattened row index to ``(component, ix, iy[, iz])``."""
        if not 0 <= row < self.n_points:
            raise ValueError(f"row {row} out of range [0, {self.n_points})")
        return tuple(int(i) for i in np.unravel_index(row, self.grid_shape))

    def encode_coords(self, coords) -> int:
        """Inverse of :meth:`decode_row`."""
        return int(np.ravel_multi_index(tuple(coords), self.grid_shape))


@dataclass(frozen=True)
class SnapshotTensor:
    """Multi-component spatio-temporal field on a Cartesian grid.

    ``values`` has shape ``(n_comp, n_x, n_y, n_t)`` for 2-D data and
    ``(n_comp, n_x, n_y, n_z, n_t)`` for 3-D data, C-contiguous in the
    documented layout order.
    """

    values: np.ndarray
    u_inf: float | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim not in (4, 5):
            raise ValueError(
                f"values must be 4-D (2-D grid) or 5-D (3-D grid), got ndim={v.ndim}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("tensor values must all be finite")
        if self.u_inf is not None and not self.u_inf > 0:
            raise ValueError("u_inf must be positive when given")
        object.__setattr__(self, "values", np.ascontiguousarray(v))

    @property
    def n_comp(self) -> int:
        return self.values.shape[0]

    @property
    def n_x(self) -> int:
        return self.values.shape[1]

    @property
    def n_y(self) -> int:
        return self.values.shape[2]

    @property
    def n_z(self) -> int | None:
        return self.values.shape[3] if self.values.ndim == 5 else None

    @property
    def n_t(self) -> int:
        return self.values.shape[-1]

    @property
    def layout(self) -> TensorLayout:
        return TensorLayout(self.n_comp, self.n_x, self.n_y, self.n_z, self.u_inf)


@dataclass(frozen=True)
class SnapshotMatrix:
    """J x K snapshot matrix; column k is the flattened field at time k."""

    values: np.ndarray
    origin: TensorLayout | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError(f"snapshot matrix must be 2-D, got ndim={v.ndim}")
        if not np.all(np.isfinite(v)):
            raise ValueError("snapshot matrix values must all be finite")
        if self.origin is not None and self.origin.n_points != v.shape[0]:
            raise ValueError(
                f"origin implies J={self.origin.n_points} but matrix has {v.shape[0]} rows"
            )
        object.__setattr__(self, "values", np.ascontiguousarray(v))

    @property
    def j(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


def flatten(tensor: SnapshotTensor) -> SnapshotMatrix:
    """Flatten a snapshot tensor into its J x K matrix form.

    Row r maps bijectively to grid coordinates via
    :meth:`TensorLayout.decode_row`; the operation is the identity on the
    underlying buffer and round-trips exactly with :func:`unflatten`.
    """
    layout = tensor.layout
    mat = tensor.values.reshape(layout.n_points, tensor.n_t)
    return SnapshotMatrix(values=mat, origin=layout)


def unflatten(matrix: SnapshotMatrix, layout: TensorLayout | None = None) -> SnapshotTensor:
    """Rebuild a snapshot tensor from a flattened matrix.

    ``layout`` defaults to the matrix's own origin; the product of the
    layout extents must equal the matrix row count.
    """
    if layout is None:
        layout = matrix.origin
    if layout is None:
        raise ValueError("matrix has no origin layout; pass one explicitly")
    if layout.n_points != matrix.j:
        raise ValueError(
            f"layout implies J={layout.n_points} but matrix has {matrix.j} rows"
        )
    shape = layout.grid_shape + (matrix.k,)
    return SnapshotTensor(values=matrix.values.reshape(shape), u_inf=layout.u_inf)


@dataclass(frozen=True)
class ReductionPlan:
    """Retained row (space) and column (time) indices of a snapshot matrix."""

    row_indices: np.ndarray
    col_indices: np.ndarray
    strategy: str = "sensors"
    seed: int | None = None

    def __post_init__(self):
        rows = np.asarray(self.row_indices, dtype=np.intp)
        cols = np.asarray(self.col_indices, dtype=np.intp)
        for name, idx in (("row_indices", rows), ("col_indices", cols)):
            if idx.ndim != 1 or idx.size < 1:
                raise ValueError(f"{name} must be a non-empty 1-D index list")
            if idx[0] < 0:
                raise ValueError(f"{name} contains negative indices")
            if idx.size > 1 and not np.all(np.diff(idx) > 0):
                raise ValueError(f"{name} must be strictly increasing (unique, sorted)")
        if self.strategy not in ("sensors", "equidistant", "random"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        object.__setattr__(self, "row_indices", rows)
        object.__setattr__(self, "col_indices", cols)

    @property
    def n_rows(self) -> int:
        return int(self.row_indices.size)

    @property
    def n_cols(self) -> int:
        return int(self.col_indices.size)


@dataclass(frozen=True)
class ReducedMatrices:
    """The three restrictions of a snapshot matrix under a reduction plan.

    ``reduced`` keeps the planned rows and columns; ``space_full`` keeps all
    J rows at the retained columns; ``time_full`` keeps the retained rows at
    all K columns.  The three views agree on the shared submatrix.
    """

    reduced: np.ndarray
    space_full: np.ndarray
    time_full: np.ndarray
    plan: ReductionPlan = field(repr=False)

    @property
    def n_rows(self) -> int:
        return self.reduced.shape[0]

    @property
    def n_cols(self) -> int:
        return self.reduced.shape[1]


def _equidistant_indices(dim: int, n: int) -> np.ndarray:
    if not 1 <= n <= dim:
        raise ValueError(f"count {n} out of range [1, {dim}]")
    if n == 1:
        return np.zeros(1, dtype=np.intp)
    # endpoint-inclusive rounding; ties resolve to even (np.rint)
    idx = np.rint(np.arange(n) * (dim - 1) / (n - 1)).astype(np.intp)
    return idx


def make_plan_equidistant(j: int, k: int, n_rows: int, n_cols: int) -> ReductionPlan:
    """Uniform downsampling plan: ``n`` endpoint-inclusive equidistant indices
    per dimension, ``round(i*(dim-1)/(n-1))`` for i = 0..n-1."""
    return ReductionPlan(
        row_indices=_equidistant_indices(j, n_rows),
        col_indices=_equidistant_indices(k, n_cols),
        strategy="equidistant",
    )


def make_plan_random(j: int, k: int, n_rows: int, n_cols: int, seed: int) -> ReductionPlan:
    """Seeded uniform sampling without replacement (PCG64), sorted indices."""
    if not 1 <= n_rows <= j:
        raise ValueError(f"n_rows {n_rows} out of range [1, {j}]")
    if not 1 <= n_cols <= k:
        raise ValueError(f"n_cols {n_cols} out of range [1, {k}]")
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = np.sort(rng.choice(j, size=n_rows, replace=False))
    cols = np.sort(rng.choice(k, size=n_cols, replace=False))
    return ReductionPlan(row_indices=rows, col_indices=cols, strategy="random", seed=seed)


def make_plan_from_rows(rows, k: int, strategy: str = "sensors") -> ReductionPlan:
    """Plan keeping the given spatial rows (sorted, deduplicated) and all K columns."""
    row_indices = np.unique(np.asarray(rows, dtype=np.intp))
    return ReductionPlan(
        row_indices=row_indices,
        col_indices=np.arange(k, dtype=np.intp),
        strategy=strategy,
    )


def apply_plan(matrix: SnapshotMatrix, plan: ReductionPlan) -> ReducedMatrices:
    """Restrict a snapshot matrix to the plan's rows and columns."""
    v = matrix.values
    if plan.row_indices[-1] >= matrix.j:
        raise ValueError(f"row index {plan.row_indices[-1]} out of bounds for J={matrix.j}")
    if plan.col_indices[-1] >= matrix.k:
        raise ValueError(f"col index {plan.col_indices[-1]} out of bounds for K={matrix.k}")
    time_full = v[plan.row_indices, :]
    if plan.n_cols == matrix.k:
        # common case (no temporal reduction): avoid copying the J x K block
        space_full = v
        reduced = time_full
    else:
        space_full = v[:, plan.col_indices]
        reduced = time_full[:, plan.col_indices]
    return ReducedMatrices(reduced=reduced, space_full=space_full, time_full=time_full, plan=plan)
