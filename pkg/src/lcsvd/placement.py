"""QR-pivot sensor selection over a truncated mode basis.

For P <= N sensors the selected rows are the first P pivots of the
column-pivoted QR of the transposed mode matrix (the pivots that best
sample the N modes).  The oversampled regime P > N conceptually pivots the
J x J projector built from the modes; since that matrix has rank N, its
pivot sequence beyond N is determined by rounding noise rather than by the
data.  This implementation therefore takes the first N pivots from the
transposed-basis factorization (exactly the projector's pivot sequence in
exact arithmetic, via the shared Gram geometry) and completes the
remaining P - N sensors by a deterministic greedy leverage rule
(maximizing ``w_j.T M^-1 w_j`` with ``M`` the Gram matrix of the selected
rows), which keeps memory at O(J*N) instead of O(J^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import TruncatedFactorization, qr_pivoted
from .snapshots import SnapshotMatrix, TensorLayout

__all__ = ["SensorSet", "place_sensors", "measure"]


@dataclass(frozen=True)
class SensorSet:
    """Selected spatial row indices, in selection (pivot) order."""

    indices: np.ndarray
    n_basis: int
    grid_coords: tuple | None = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        if idx.ndim != 1 or idx.size < 1:
            raise ValueError("indices must be a non-empty 1-D list")
        if np.unique(idx).size != idx.size:
            raise ValueError("sensor indices must be unique")
        object.__setattr__(self, "indices", idx)

    @property
    def p(self) -> int:
        return int(self.indices.size)


def _basis_modes(basis) -> np.ndarray:
    if isinstance(basis, TruncatedFactorization):
        return basis.modes
    w = np.asarray(basis, dtype=np.float64)
    if w.ndim != 2:
        raise ValueError("basis must be a TruncatedFactorization or a J x N mode matrix")
    return w


def _leverage_completion(w: np.ndarray, selected: np.ndarray, p: int) -> np.ndarray:
    """Greedily append rows maximizing leverage against the selected Gram."""
    chosen = list(selected)
    mask = np.zeros(w.shape[0], dtype=bool)
    mask[chosen] = True
    gram = w[chosen].T @ w[chosen]
    while len(chosen) < p:
        lev = np.einsum("jn,jn->j", np.linalg.solve(gram, w.T).T, w)
        lev[mask] = -np.inf
        j = int(np.argmax(lev))
        chosen.append(j)
        mask[j] = True
        gram = gram + np.outer(w[j], w[j])
    return np.asarray(chosen, dtype=np.intp)


def place_sensors(basis, p: int, layout: TensorLayout | None = None) -> SensorSet:
    """Select ``p`` sensor rows that best sample the mode basis.

    ``basis`` is a :class:`TruncatedFactorization` (or a raw J x N mode
    matrix).  Deterministic: identical basis and ``p`` always give identical
    sensors.  When a grid ``layout`` is given, the decoded
    (component, x, y[, z]) coordinates of each sensor are attached.
    """
    w = _basis_modes(basis)
    j, n = w.shape
    if not 1 <= p <= j:
        raise ValueError(f"sensor count {p} out of range [1, {j}] (J={j})")
    pivots = qr_pivoted(w.T).pivots
    if p <= n:
        indices = np.asarray(pivots[:p], dtype=np.intp)
    else:
        indices = _leverage_completion(w, pivots[:n], p)
    coords = None
    if layout is not None:
        coords = tuple(layout.decode_row(int(r)) for r in indices)
    return SensorSet(indices=indices, n_basis=n, grid_coords=coords)


def measure(matrix: SnapshotMatrix, sensors: SensorSet) -> np.ndarray:
    """Sparse measurements: row i of the output is row ``indices[i]`` of V."""
    v = np.asarray(getattr(matrix, "values", matrix))
    if sensors.indices.max() >= v.shape[0]:
        raise ValueError(
            f"sensor index {sensors.indices.max()} out of range for J={v.shape[0]}"
        )
    return v[sensors.indices, :]
