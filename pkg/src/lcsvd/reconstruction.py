"""Low-cost SVD: factorize a row/column-reduced snapshot matrix, then recover
full-dimension modes, coefficients and the reconstructed field.

The pipeline:

1. truncated SVD of the reduced matrix;
2. re-orthonormalize the reduced modes/coefficients by QR if (and only if)
   orthonormality drift exceeds the factorization tolerance;
3. align coefficient column signs against the reduced data;
4. recovered modes      = space_full  @ T_red / sigma   (J x N)
5. recovered coefficients = time_full.T @ W_red / sigma (K x N)
6. reconstruction = (recovered_modes * sigma) @ recovered_coefficients.T

The recovery products only ever allocate J x N and K x N intermediates, so
the dominant memory cost is the J x K reconstruction itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    ORTHONORMALITY_TOL,
    TruncatedFactorization,
    parse_rule,
    qr_plain,
    svd_truncated,
)
from .snapshots import ReducedMatrices

__all__ = ["LcsvdResult", "lcsvd_run", "sign_alignment", "recover_modes"]

# relative floor below which inverting a singular value is refused
SIGMA_INVERSION_TOL = 1e-14


@dataclass(frozen=True)
class LcsvdResult:
    """Output of one low-cost SVD pass.

    ``reconstruction`` is exactly the product
    ``(recovered_modes * singular_values) @ recovered_coefficients.T``.
    """

    reduced_factorization: TruncatedFactorization
    recovered_modes: np.ndarray
    recovered_coefficients: np.ndarray
    reconstruction: np.ndarray

    @property
    def n_retained(self) -> int:
        return self.reduced_factorization.n_retained


def sign_alignment(w: np.ndarray, v: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Column sign vector sign(diag(W.T @ V @ T)), with sign(0) = +1.

    For a consistent factorization the diagonal holds the (positive)
    singular values; a negative entry flags a coefficient column whose sign
    was flipped relative to its mode and must be flipped back.
    """
    d = np.einsum("nk,kn->n", w.T @ v, t)
    return np.where(d < 0, -1.0, 1.0)


def _reorthonormalize(m: np.ndarray) -> np.ndarray:
    drift = np.abs(m.T @ m - np.eye(m.shape[1])).max()
    if drift <= ORTHONORMALITY_TOL:
        return m
    q, _ = qr_plain(m)
    return q


def _inverse_sigma(s: np.ndarray) -> np.ndarray:
    if s[-1] < SIGMA_INVERSION_TOL * s[0]:
        raise np.linalg.LinAlgError(
            f"retained singular value {s[-1]:.3e} below inversion floor "
            f"({SIGMA_INVERSION_TOL:.0e} * {s[0]:.3e}); reduce the mode count"
        )
    return 1.0 / s


def recover_modes(space_full: np.ndarray, fact: TruncatedFactorization) -> np.ndarray:
    """Enlarge the reduced factorization's modes to full spatial dimension:
    ``space_full @ coefficients / sigma`` (J x N)."""
    return (space_full @ fact.coefficients) * _inverse_sigma(fact.singular_values)


def lcsvd_run(reduced: ReducedMatrices, rule) -> LcsvdResult:
    """Run the low-cost SVD pipeline on a reduced snapshot matrix.

    ``rule`` is a truncation rule (tolerance, mode count, or a
    ``tol:<eps>`` / ``modes:<n>`` string) applied to the reduced matrix's
    spectrum.
    """
    rule = parse_rule(rule)
    fact = svd_truncated(reduced.reduced, rule)
    w_red = _reorthonormalize(fact.modes)
    t_red = _reorthonormalize(fact.coefficients)
    signs = sign_alignment(w_red, reduced.reduced, t_red)
    t_red = t_red * signs
    s = fact.singular_values
    fact = TruncatedFactorization(modes=w_red, singular_values=s, coefficients=t_red)

    inv_s = _inverse_sigma(s)
    w_rec = (reduced.space_full @ t_red) * inv_s
    t_rec = (reduced.time_full.T @ w_red) * inv_s
    reconstruction = (w_rec * s) @ t_rec.T
    return LcsvdResult(
        reduced_factorization=fact,
        recovered_modes=w_rec,
        recovered_coefficients=t_rec,
        reconstruction=reconstruction,
    )
