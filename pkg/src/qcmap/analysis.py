"""Observables and quantum/classical comparison metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .integrators import Trajectory
from .models import Hamiltonian


def populations(z) -> np.ndarray:
    z = np.asarray(z)
    return z.real**2 + z.imag**2


def coherence(z, i: int, j: int):
    """``conj(z_i) * z_j`` (per sample when ``z`` is a trajectory array)."""
    z = np.asarray(z)
    n = z.shape[-1]
    for idx in (i, j):
        if not -n <= idx < n:
            raise IndexError(f"site index {idx} out of range for {n} sites")
    return np.conj(z[..., i]) * z[..., j]


def norm_squared(z) -> np.ndarray:
    return np.sum(populations(z), axis=-1)


def classical_energy(h: Hamiltonian, q, p) -> np.ndarray:
    """``1/2 sum_nm H_nm (q_n q_m + p_n p_m)`` along the last axis."""
    q = np.asarray(q, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    m = h.matrix
    return 0.5 * (np.sum(q * (q @ m), axis=-1) + np.sum(p * (p @ m), axis=-1))


@dataclass(frozen=True)
class ComparisonReport:
    max_abs_amplitude_diff: float
    max_population_diff: float
    rms_population_diff: float
    max_coherence_diff: float
    max_im_coherence_diff: float
    phase_compensated: bool
    phase_shift: float
    t_start: float
    t_end: float

    def as_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        lines = []
        for key, value in self.as_dict().items():
            if isinstance(value, bool):
                text = "true" if value else "false"
            else:
                text = format(value, ".17g")
            lines.append(f"{key}: {text}")
        return "\n".join(lines) + "\n"


def compare(a: Trajectory, b: Trajectory, phase_shift: float | None = None) -> ComparisonReport:
    """Deviation metrics between two trajectories on the same time grid.

    With ``phase_shift`` set, ``b`` is multiplied by ``exp(i phase_shift t)``
    before the amplitude metric; population and coherence metrics never see
    that factor because a global phase cancels in them.
    """
    if a.t.shape != b.t.shape or not np.array_equal(a.t, b.t):
        raise ValueError("trajectories are sampled on different time grids")
    if a.z.shape != b.z.shape:
        raise ValueError(f"trajectory shapes differ: {a.z.shape} vs {b.z.shape}")
    if len(a.t) == 0:
        raise ValueError("cannot compare empty trajectories")
    zb = b.z
    if phase_shift is not None:
        zb = zb * np.exp(1j * phase_shift * b.t)[:, None]
    amp = float(np.max(np.abs(a.z - zb)))
    dpop = populations(a.z) - populations(b.z)
    n = a.z.shape[1]
    coh = 0.0
    coh_im = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d = coherence(a.z, i, j) - coherence(b.z, i, j)
            coh = max(coh, float(np.max(np.abs(d))))
            coh_im = max(coh_im, float(np.max(np.abs(d.imag))))
    return ComparisonReport(
        max_abs_amplitude_diff=amp,
        max_population_diff=float(np.max(np.abs(dpop))),
        rms_population_diff=float(np.sqrt(np.mean(dpop**2))),
        max_coherence_diff=coh,
        max_im_coherence_diff=coh_im,
        phase_compensated=phase_shift is not None,
        phase_shift=0.0 if phase_shift is None else float(phase_shift),
        t_start=float(a.t[0]),
        t_end=float(a.t[-1]),
    )
