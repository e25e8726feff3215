"""Dense factorization kernels: truncated SVD and QR (plain and column-pivoted).

These are the two primitives everything else is built on.  The SVD backend
is LAPACK bidiagonalization for desk-scale inputs; very tall-and-large
matrices (K >= 1024 and J >= 4K) are routed through the Gram matrix
eigendecomposition, the classic snapshot technique, which never materializes
a second J x K array.  Trailing singular values from the Gram route are only
accurate above the square root of machine precision, which is irrelevant for
the retained modes of a truncated factorization but is why the route is
reserved for large inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "TruncatedFactorization",
    "PivotedQR",
    "TruncationRule",
    "parse_rule",
    "svd_truncated",
    "qr_pivoted",
    "qr_plain",
]

ORTHONORMALITY_TOL = 1e-10
RANK_DEFICIENCY_TOL = 1e-12
# values this far below sigma_1 are indistinguishable from zero in float64
NUMERICAL_RANK_TOL = 1e-13

# Gram-route dispatch thresholds (see module docstring)
_GRAM_MIN_COLS = 1024
_GRAM_ASPECT = 4
# the gram route squares the spectrum: values below sqrt(eps) * sigma_1 are
# unresolvable and must not be retained
_GRAM_RESOLVABLE = 3e-8


@dataclass(frozen=True)
class TruncatedFactorization:
    """Rank-N factorization V ~ modes @ diag(singular_values) @ coefficients.T.

    ``modes`` is J x N with orthonormal columns, ``coefficients`` is K x N
    with orthonormal columns, and the singular values are positive and
    non-increasing.
    """

    modes: np.ndarray
    singular_values: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        w, s, t = self.modes, self.singular_values, self.coefficients
        n = s.size
        if w.ndim != 2 or t.ndim != 2 or w.shape[1] != n or t.shape[1] != n:
            raise ValueError("inconsistent factor shapes")
        if n > min(w.shape[0], t.shape[0]):
            raise ValueError("retained mode count exceeds min(J, K)")
        if not (np.all(s > 0) and np.all(np.diff(s) <= 0)):
            raise ValueError("singular values must be positive and non-increasing")
        for name, m in (("modes", w), ("coefficients", t)):
            drift = np.abs(m.T @ m - np.eye(n)).max()
            if drift > ORTHONORMALITY_TOL:
                raise ValueError(f"{name} not orthonormal (drift {drift:.2e})")

    @property
    def n_retained(self) -> int:
        return int(self.singular_values.size)

    def reconstruct(self) -> np.ndarray:
        """Dense rank-N product modes @ diag(s) @ coefficients.T."""
        return (self.modes * self.singular_values) @ self.coefficients.T


@dataclass(frozen=True)
class PivotedQR:
    """Column-pivoted QR: a[:, pivots] = q @ r with |r[i,i]| non-increasing."""

    q: np.ndarray
    r: np.ndarray
    pivots: np.ndarray


@dataclass(frozen=True)
class TruncationRule:
    """Either keep the smallest N with sigma_{N+1}/sigma_1 <= tolerance, or an
    explicit mode count (clamped to min(J, K))."""

    tolerance: float | None = None
    n_modes: int | None = None

    def __post_init__(self):
        if (self.tolerance is None) == (self.n_modes is None):
            raise ValueError("specify exactly one of tolerance or n_modes")
        if self.tolerance is not None and not 0 < self.tolerance < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        if self.n_modes is not None and self.n_modes <= 0:
            raise ValueError("requested mode count must be positive")


def parse_rule(rule) -> TruncationRule:
    """Coerce int / float / 'modes:<n>' / 'tol:<eps>' into a TruncationRule."""
    if isinstance(rule, TruncationRule):
        return rule
    if isinstance(rule, (int, np.integer)) and not isinstance(rule, bool):
        return TruncationRule(n_modes=int(rule))
    if isinstance(rule, float):
        return TruncationRule(tolerance=rule)
    if isinstance(rule, str):
        kind, _, value = rule.partition(":")
        if kind == "modes" and value:
            return TruncationRule(n_modes=int(value))
        if kind == "tol" and value:
            return TruncationRule(tolerance=float(value))
    raise ValueError(f"cannot interpret truncation rule {rule!r}")


def _as_array(matrix) -> np.ndarray:
    values = getattr(matrix, "values", matrix)
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return a


def _fix_signs(w: np.ndarray, t: np.ndarray) -> None:
    """Make the largest-magnitude entry of each mode column positive,
    flipping the paired coefficient column to keep the product unchanged."""
    idx = np.abs(w).argmax(axis=0)
    flip = w[idx, np.arange(w.shape[1])] < 0
    w[:, flip] *= -1.0
    t[:, flip] *= -1.0


def _truncation_count(s: np.ndarray, rule: TruncationRule) -> int:
    m = s.size
    if s[0] <= 0:
        raise np.linalg.LinAlgError("zero matrix has no leading singular value")
    if rule.n_modes is not None:
        n = min(rule.n_modes, m)
    else:
        below = np.nonzero(s[1:] <= rule.tolerance * s[0])[0]
        n = int(below[0]) + 1 if below.size else m
    # never retain a numerically zero singular value
    positive = int(np.count_nonzero(s[:n] > NUMERICAL_RANK_TOL * s[0]))
    return max(positive, 1)


def _svd_gram(a: np.ndarray, rule: TruncationRule) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    j, k = a.shape
    gram = a.T @ a
    if rule.n_modes is not None:
        n_req = min(rule.n_modes, k)
        w_eig, t = scipy.linalg.eigh(gram, subset_by_index=[k - n_req, k - 1])
    else:
        w_eig, t = scipy.linalg.eigh(gram)
    order = np.argsort(w_eig)[::-1]
    w_eig = w_eig[order]
    t = np.ascontiguousarray(t[:, order])
    s = np.sqrt(np.clip(w_eig, 0.0, None))
    n = _truncation_count(s, rule)
    n = max(1, min(n, int(np.count_nonzero(s > _GRAM_RESOLVABLE * s[0]))))
    s = s[:n]
    t = t[:, :n]
    w = (a @ t) / s
    return w, s, t


def svd_truncated(matrix, rule) -> TruncatedFactorization:
    """Truncated SVD of a snapshot matrix (or raw 2-D array).

    The retained count follows the rule: for a tolerance, the smallest N
    such that sigma_{N+1}/sigma_1 <= tolerance; for an explicit count, that
    count clamped to min(J, K).  Mode signs are normalized so each mode
    column's largest-magnitude entry is positive.
    """
    rule = parse_rule(rule)
    a = _as_array(matrix)
    j, k = a.shape
    if a.size == 0 or not np.any(a):
        raise np.linalg.LinAlgError("cannot factorize an all-zero matrix")
    if k >= _GRAM_MIN_COLS and j >= _GRAM_ASPECT * k:
        w, s, t = _svd_gram(a, rule)
    else:
        u, s_all, vt = np.linalg.svd(a, full_matrices=False)
        n = _truncation_count(s_all, rule)
        w = u[:, :n].copy()
        s = s_all[:n].copy()
        t = vt[:n].T.copy()
    _fix_signs(w, t)
    return TruncatedFactorization(modes=w, singular_values=s, coefficients=t)


def qr_pivoted(matrix) -> PivotedQR:
    """Householder QR with greedy column pivoting.

    At each step the remaining column of largest 2-norm (recomputed, ties
    broken by lowest index) is moved to the front and eliminated.  ``pivots``
    records the full column permutation; its first min(m, n) entries are the
    selection order.
    """
    a = _as_array(matrix)
    m, n = a.shape
    if not np.any(a):
        raise np.linalg.LinAlgError("cannot factorize an all-zero matrix")
    steps = min(m, n)
    r = a.copy()
    q = np.eye(m)
    pivots = np.arange(n)
    for kk in range(steps):
        norms = np.linalg.norm(r[kk:, kk:], axis=0)
        jj = kk + int(np.argmax(norms))
        if norms[jj - kk] == 0.0:
            steps = kk
            break
        if jj != kk:
            r[:, [kk, jj]] = r[:, [jj, kk]]
            pivots[[kk, jj]] = pivots[[jj, kk]]
        x = r[kk:, kk]
        alpha = np.linalg.norm(x)
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vtv = v @ v
        if vtv > 0:
            beta = 2.0 / vtv
            r[kk:, kk:] -= np.outer(beta * v, v @ r[kk:, kk:])
            q[:, kk:] -= np.outer(q[:, kk:] @ v, beta * v)
        r[kk, kk] = alpha
        r[kk + 1 :, kk] = 0.0
    return PivotedQR(q=q[:, :steps], r=np.triu(r[:steps, :]), pivots=pivots)


def qr_plain(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Economy QR with a positive R diagonal; raises on rank deficiency."""
    a = _as_array(matrix)
    if a.shape[0] < a.shape[1]:
        raise ValueError("qr_plain expects a tall (or square) matrix")
    q, r = np.linalg.qr(a)
    diag = np.abs(np.diag(r))
    if diag.size and diag.min() < RANK_DEFICIENCY_TOL * max(diag.max(), np.finfo(float).tiny):
        raise np.linalg.LinAlgError("matrix is numerically rank-deficient")
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return q * signs, signs[:, None] * r
