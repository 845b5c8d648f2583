"""Classical oscillators whose motion reproduces the quantum amplitudes exactly.

With the classical Hamiltonian ``1/2 sum_nm H_nm (q_n q_m + p_n p_m)`` the
equations of motion are ``q' = H p``, ``p' = -H q``, so ``q'' = -H^2 q``, and
``z = (q + i p)/sqrt(2)`` obeys ``i z' = H z``: the same equation as the
quantum coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrators import (
    IntegrationPlan,
    SecondOrderSystem,
    Trajectory,
    rk4_hamilton,
    verlet_second_order,
)
from .linalg import mat_square, solve_sym
from .models import Hamiltonian
from .quantum import amplitude_vector

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class PhaseSpaceState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=np.float64)
        p = np.array(self.p, dtype=np.float64)
        if q.shape != p.shape:
            raise ValueError(f"q and p shapes differ: {q.shape} vs {p.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("phase-space state has non-finite entries")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class PhaseSpaceTrajectory:
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray

    def amplitudes(self) -> Trajectory:
        return Trajectory(self.t, (self.q + 1j * self.p) / SQRT2)


def build_pq_system(h: Hamiltonian) -> SecondOrderSystem:
    """Stiffness ``S = H @ H``, no damping."""
    return SecondOrderSystem(mat_square(h.matrix), np.zeros(h.n), h.omega)


def pq_stiffness_terms(h: Hamiltonian):
    """Per-site expansion of ``H @ H`` into ``diag(omega**2) + linear + quadratic``.

    ``linear[n, m] = (omega_n + omega_m) V_nm`` and
    ``quadratic[n, m] = sum_{k != n, m} V_nk V_km`` (its diagonal is
    ``sum_k V_nk**2``). Note the quadratic term enters with a plus sign; the
    classical Newton equations read ``q_n'' + sum_m S_nm q_m = 0``.
    """
    v = h.v
    w = h.omega
    linear = (w[:, None] + w[None, :]) * v
    quadratic = v @ v
    return np.diag(w**2), linear, quadratic


def quantum_to_phase_space(c) -> PhaseSpaceState:
    c = amplitude_vector(c)
    return PhaseSpaceState(SQRT2 * c.real, SQRT2 * c.imag)


def assemble_amplitudes(s: PhaseSpaceState) -> np.ndarray:
    return (np.asarray(s.q) + 1j * np.asarray(s.p)) / SQRT2


def integrate_hamilton(h: Hamiltonian, s0: PhaseSpaceState, plan: IntegrationPlan) -> PhaseSpaceTrajectory:
    """RK4 on the first-order pair ``q' = H p``, ``p' = -H q``."""
    if s0.q.shape != (h.n,):
        raise ValueError(f"state has {s0.q.shape[0]} oscillators, Hamiltonian has {h.n} sites")
    q, p = rk4_hamilton(h.matrix, s0.q, s0.p, plan)
    return PhaseSpaceTrajectory(plan.sample_times, q, p)


def reconstruct_momenta(h: Hamiltonian, qdot) -> np.ndarray:
    """``p = H^{-1} q'``; raises SingularMatrixError when H is singular.

    ``qdot`` may be one vector or a stack of them (rows).
    """
    qdot = np.asarray(qdot, dtype=np.float64)
    if qdot.ndim == 1:
        return solve_sym(h.matrix, qdot, h.spectrum)
    return solve_sym(h.matrix, qdot.T, h.spectrum).T


@dataclass(frozen=True)
class NormalModeSolution:
    """``z_n(t) = sum_k B_kn A_k exp(-i Omega_k t)``."""

    frequencies: np.ndarray
    coefficients: np.ndarray
    eigenvectors: np.ndarray

    @property
    def beta(self) -> np.ndarray:
        """Real mode amplitudes: ``A_k = (beta_k / sqrt 2) exp(i alpha_k)``."""
        return SQRT2 * np.abs(self.coefficients)

    @property
    def alpha(self) -> np.ndarray:
        return np.angle(self.coefficients)

    def amplitudes(self, times) -> Trajectory:
        t = np.asarray(times, dtype=np.float64).reshape(-1)
        phases = np.exp(-1j * np.outer(t, self.frequencies))
        return Trajectory(t, (phases * self.coefficients) @ self.eigenvectors)

    def positions(self, times) -> np.ndarray:
        """``q_n(t) = sum_k B_kn beta_k cos(Omega_k t - alpha_k)``."""
        return SQRT2 * self.amplitudes(times).z.real


def normal_mode_solution(h: Hamiltonian, c0) -> NormalModeSolution:
    c0 = amplitude_vector(c0)
    dec = h.spectrum
    return NormalModeSolution(dec.eigenvalues, dec.eigenvectors @ c0, dec.eigenvectors)


def exact_classical_evolve(h: Hamiltonian, c0, plan: IntegrationPlan, method: str = "hamilton") -> Trajectory:
    """Map ``c0`` to oscillator coordinates, integrate, and reassemble ``z(t)``.

    ``method="hamilton"`` integrates ``q' = H p, p' = -H q`` with RK4.
    ``method="verlet"`` integrates ``q'' = -H^2 q`` with velocity Verlet and
    recovers ``p = H^{-1} q'``; it requires every eigenvalue of H to be
    positive and otherwise falls back to the first-order route.
    """
    c0 = amplitude_vector(c0)
    s0 = quantum_to_phase_space(c0)
    if method == "verlet" and h.spectrum.eigenvalues[0] > 0:
        sys = build_pq_system(h)
        traj = verlet_second_order(sys, s0.q, h.matrix @ s0.p, plan)
        p = reconstruct_momenta(h, traj.v)
        return Trajectory(traj.t, (traj.q + 1j * p) / SQRT2)
    if method not in ("hamilton", "verlet"):
        raise ValueError(f"unknown method {method!r}")
    return integrate_hamilton(h, s0, plan).amplitudes()
