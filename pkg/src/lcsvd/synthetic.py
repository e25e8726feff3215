"""Deterministic synthetic datasets: exact low-rank matrices, a smooth
oscillatory wake tensor, and noisy low-rank variants.

These stand in for external flow databases in tests and demos, and provide
exact oracles: the constructed rank is known, so recovery errors can be
asserted tightly.  All generators draw from a seeded PCG64 stream and are
bit-reproducible for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .snapshots import SnapshotMatrix, SnapshotTensor

__all__ = ["SyntheticSpec", "gen_exact_rank", "gen_oscillatory_wake", "gen_noisy"]


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a synthetic dataset.

    ``j`` sizes matrix generators; ``shape = (n_comp, n_x, n_y)`` sizes the
    wake tensor generator.  ``rank`` is the target exact rank (the wake adds
    one mean mode on top of ``rank`` wave modes).  ``noise_level`` scales
    i.i.d. Gaussian noise relative to the clean field's RMS amplitude.
    """

    kind: str
    k: int
    rank: int
    j: int | None = None
    shape: tuple[int, int, int] | None = None
    noise_level: float = 0.0
    amplitude: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("exact_rank", "oscillatory_wake", "noisy_low_rank"):
            raise ValueError(f"unknown synthetic kind {self.kind!r}")
        if self.noise_level < 0:
            raise ValueError("noise_level must be >= 0")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.j is not None and self.rank > min(self.j, self.k):
            raise ValueError("rank exceeds min(J, K)")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _add_noise(values: np.ndarray, noise_level: float, rng: np.random.Generator) -> np.ndarray:
    if noise_level == 0.0:
        return values
    scale = noise_level * np.linalg.norm(values) / np.sqrt(values.size)
    return values + scale * rng.standard_normal(values.shape)


def gen_exact_rank(spec: SyntheticSpec) -> SnapshotMatrix:
    """Exact rank-r matrix A @ B.T with seeded standard-normal factors."""
    if spec.j is None:
        raise ValueError("exact_rank generation requires spec.j")
    rng = _rng(spec.seed)
    a = rng.standard_normal((spec.j, spec.rank))
    b = rng.standard_normal((spec.k, spec.rank))
    return SnapshotMatrix(values=a @ b.T)


def gen_noisy(spec: SyntheticSpec) -> SnapshotMatrix:
    """Exact low-rank matrix plus seeded Gaussian noise.

    The noise standard deviation is ``noise_level * ||V||_F / sqrt(J*K)``;
    with ``noise_level = 0`` the output equals :func:`gen_exact_rank`
    bitwise.
    """
    if spec.j is None:
        raise ValueError("noisy generation requires spec.j")
    rng = _rng(spec.seed)
    a = rng.standard_normal((spec.j, spec.rank))
    b = rng.standard_normal((spec.k, spec.rank))
    v = a @ b.T
    return SnapshotMatrix(values=_add_noise(v, spec.noise_level, rng))


def gen_oscillatory_wake(spec: SyntheticSpec) -> SnapshotTensor:
    """Two-component 2-D wake: a mean deficit field plus traveling waves.

    ``rank`` requests the number of wave modes; each traveling wave
    contributes a pair of standing modes, so odd requests are rounded up to
    the next even count.  The exact numerical rank of the flattened matrix
    is at most ``rank + 1`` (wave pairs plus the time-constant mean).  Wave
    frequencies are integer multiples of the fundamental of the sampled time
    window, so every wave has exactly zero time average and removing the
    temporal mean drops the rank by exactly one.
    """
    if spec.shape is None:
        raise ValueError("wake generation requires spec.shape = (n_comp, n_x, n_y)")
    n_comp, n_x, n_y = spec.shape
    if n_comp != 2:
        raise ValueError("the wake generator produces exactly two components")
    n_pairs = (spec.rank + 1) // 2
    rng = _rng(spec.seed)

    x = np.linspace(0.0, 4.0, n_x)[:, None]    # streamwise
    y = np.linspace(-1.0, 1.0, n_y)[None, :]   # normal
    t = 2.0 * np.pi * np.arange(spec.k) / spec.k

    # smooth wake envelope downstream of a circular obstruction at (0.5, 0)
    downstream = 1.0 / (1.0 + np.exp(-(x - 0.8) / 0.12))
    envelope = downstream * np.exp(-(y**2) / (2 * 0.35**2))
    mean_u = 1.0 - 0.6 * np.exp(-(((x - 0.5) ** 2) + y**2) / (2 * 0.3**2))

    u = np.empty((n_x, n_y, spec.k))
    v = np.empty((n_x, n_y, spec.k))
    u[:] = mean_u[..., None]
    v[:] = 0.0
    for m in range(n_pairs):
        k_m = 2.0 + 1.5 * m                     # streamwise wavenumber
        omega = float(m + 1)                    # integer cycles per window
        psi = rng.uniform(0.0, 2.0 * np.pi)
        cross = np.cos((m + 1) * np.pi * y / 2.0)
        phase = k_m * x + psi
        shape_u = spec.amplitude * envelope * cross
        shape_v = 0.6 * spec.amplitude * envelope * np.sin((m + 1) * np.pi * y / 2.0)
        u += shape_u[..., None] * np.cos(phase[..., None] + omega * t)
        v += shape_v[..., None] * np.sin(phase[..., None] + omega * t)

    values = np.stack([u, v], axis=0)
    values = _add_noise(values, spec.noise_level, rng)
    return SnapshotTensor(values=values, u_inf=1.0)
