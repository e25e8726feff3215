"""Reconstruction error quantification: per-component error fields,
free-stream-normalized errors, absolute-error maps, probability density
curves, bias/uncertainty scalars and the spatial compression rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .snapshots import SnapshotTensor

__all__ = [
    "ErrorReport",
    "bias_uncertainty",
    "density_curve",
    "build_error_report",
    "compression_rate_rounded",
]

_MAX_BINS = 1024


def bias_uncertainty(err: np.ndarray) -> tuple[float, float]:
    """Mean and population standard deviation of a pointwise error field.

    This single routine backs both the sensor-count curves and the error
    reports, so the two always agree bit for bit.
    """
    flat = np.asarray(err, dtype=np.float64).ravel()
    bias = float(flat.mean())
    uncertainty = float(np.sqrt(np.mean((flat - bias) ** 2)))
    return bias, uncertainty


def density_curve(errors) -> tuple[np.ndarray, np.ndarray]:
    """Normalized histogram density of an error sample.

    Bin width follows the Freedman-Diaconis rule with a floor of 16 bins
    (capped at 1024); a zero-spread sample collapses to a single narrow bin
    holding all the density mass.
    """
    sample = np.asarray(errors, dtype=np.float64).ravel()
    if sample.size == 0:
        raise ValueError("cannot build a density curve from an empty sample")
    lo, hi = float(sample.min()), float(sample.max())
    if lo == hi:
        half = max(abs(lo), 1.0) * 1e-9
        edges = np.array([lo - half, lo + half])
        return edges, np.array([1.0 / (2.0 * half)])
    q75, q25 = np.percentile(sample, [75.0, 25.0])
    width = 2.0 * (q75 - q25) / sample.size ** (1.0 / 3.0)
    if width > 0:
        n_bins = int(np.clip(math.ceil((hi - lo) / width), 16, _MAX_BINS))
    else:
        n_bins = 16
    densities, edges = np.histogram(sample, bins=n_bins, density=True)
    return edges, densities


def compression_rate_rounded(c_r: float) -> int:
    """Nearest integer with halves rounding up (the printed convention)."""
    return int(math.floor(c_r + 0.5))


@dataclass(frozen=True)
class ErrorReport:
    """Full error quantification of a reconstruction against its original.

    Fields indexed by component live on axis 0 of the tensor-shaped arrays;
    ``histograms`` holds one ``(bin_edges, densities)`` pair per component.
    ``normalized`` is the error field divided by the free-stream velocity
    and equals the raw errors (with ``normalized_by_u_inf = False``) when
    the dataset does not carry one.
    """

    errors: np.ndarray
    normalized: np.ndarray
    abs_error: np.ndarray
    worst_snapshot: np.ndarray
    histograms: tuple
    bias: np.ndarray
    uncertainty: np.ndarray
    compression_rate: float
    n_sensors: int
    normalized_by_u_inf: bool

    @property
    def compression_rate_int(self) -> int:
        return compression_rate_rounded(self.compression_rate)

    def scalars(self) -> dict:
        """JSON-friendly scalar summary."""
        return {
            "bias": [float(b) for b in self.bias],
            "uncertainty": [float(u) for u in self.uncertainty],
            "worst_snapshot": [int(w) for w in self.worst_snapshot],
            "compression_rate": float(self.compression_rate),
            "compression_rate_rounded": self.compression_rate_int,
            "n_sensors": int(self.n_sensors),
            "normalized_by_u_inf": bool(self.normalized_by_u_inf),
        }


def build_error_report(
    original: SnapshotTensor, reconstructed: SnapshotTensor, n_sensors: int
) -> ErrorReport:
    """Quantify the difference between an original and a reconstructed tensor."""
    if original.values.shape != reconstructed.values.shape:
        raise ValueError(
            f"shape mismatch: {original.values.shape} vs {reconstructed.values.shape}"
        )
    if n_sensors < 1:
        raise ValueError("n_sensors must be >= 1")
    err = original.values - reconstructed.values
    if original.u_inf is not None:
        normalized = err / original.u_inf
        has_norm = True
    else:
        normalized = err
        has_norm = False
    abs_err = np.abs(err)
    n_comp = original.n_comp
    # worst snapshot per component: argmax over time of the pointwise maximum
    per_snap_max = abs_err.reshape(n_comp, -1, original.n_t).max(axis=1)
    worst = per_snap_max.argmax(axis=1)
    histograms = tuple(density_curve(normalized[c]) for c in range(n_comp))
    stats = [bias_uncertainty(normalized[c]) for c in range(n_comp)]
    bias = np.array([s[0] for s in stats])
    uncertainty = np.array([s[1] for s in stats])
    j = original.layout.n_points
    return ErrorReport(
        errors=err,
        normalized=normalized,
        abs_error=abs_err,
        worst_snapshot=worst.astype(np.intp),
        histograms=histograms,
        bias=bias,
        uncertainty=uncertainty,
        compression_rate=j / n_sensors,
        n_sensors=n_sensors,
        normalized_by_u_inf=has_norm,
    )
