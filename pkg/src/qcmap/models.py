"""Hamiltonians and the model systems: dimer, ring, tuned pendulum pair, LC pair.

Units: hbar = 1, so every energy is an angular frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .integrators import SecondOrderSystem
from .linalg import SpectralDecomposition, eig_sym, symmetric_matrix


class ModelError(ValueError):
    """Parameters violate a model precondition."""


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Real symmetric Hamiltonian split into site frequencies and couplings.

    All diagonal entries (omega_n) must be positive: the classical oscillator
    construction needs a positive natural frequency for every site.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = symmetric_matrix(self.matrix)
        diag = np.diagonal(m)
        if np.any(diag <= 0):
            bad = [int(i) for i in np.flatnonzero(diag <= 0)]
            raise ModelError(
                f"diagonal entries at sites {bad} are not positive; the classical oscillator "
                "mapping needs omega_n > 0 for every site"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def omega(self) -> np.ndarray:
        return np.diagonal(self.matrix).copy()

    @property
    def v(self) -> np.ndarray:
        out = self.matrix.copy()
        np.fill_diagonal(out, 0.0)
        return out

    @property
    def omega_bar(self) -> float:
        return float(np.mean(self.omega))

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return eig_sym(self.matrix)

    def __eq__(self, other):
        return isinstance(other, Hamiltonian) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())


def hamiltonian_from_dense(entries, rtol: float = 1e-12) -> Hamiltonian:
    """Build a Hamiltonian from a dense array, tolerating ``rtol`` relative asymmetry."""
    m = np.array(entries, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ModelError(f"Hamiltonian must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ModelError("Hamiltonian has non-finite entries")
    scale = np.max(np.abs(m))
    if np.max(np.abs(m - m.T)) > rtol * scale:
        raise ModelError("Hamiltonian is not symmetric (real couplings required: H_nm == H_mn)")
    return Hamiltonian(0.5 * (m + m.T))


def build_dimer(epsilon: float, v: float) -> Hamiltonian:
    if not epsilon > 0:
        raise ModelError(f"dimer needs epsilon > 0, got {epsilon}")
    if abs(v) >= epsilon:
        raise ModelError(f"dimer needs |v| < epsilon, got v={v}, epsilon={epsilon}")
    return Hamiltonian(np.array([[epsilon, v], [v, epsilon]], dtype=np.float64))


def build_ring(n: int, epsilon: float, v: float) -> Hamiltonian:
    """Circulant nearest-neighbour ring; ``n >= 3`` (use ``build_dimer`` for two sites)."""
    if n < 3:
        raise ModelError(f"ring needs n >= 3, got {n}; use build_dimer for two sites")
    if not epsilon > 0:
        raise ModelError(f"ring needs epsilon > 0, got {epsilon}")
    m = np.eye(n) * epsilon
    for j in range(n):
        m[j, (j + 1) % n] = v
        m[(j + 1) % n, j] = v
    return Hamiltonian(m)


def ring_dispersion(n: int, epsilon: float, v: float) -> np.ndarray:
    """``epsilon + 2 v cos(2 pi j / n)`` for ``j = 0..n-1``."""
    k = 2.0 * np.pi * np.arange(n) / n
    return epsilon + 2.0 * v * np.cos(k)


@dataclass(frozen=True)
class PendulumPair:
    """Two spring-coupled pendula retuned so their q-coupled motion is exact.

    ``omega_s**2 = omega**2 - k + k**2 / (4 omega**2)``, i.e.
    ``omega_s = omega - k / (2 omega)``.
    """

    omega: float
    k: float
    omega_s: float

    @property
    def v(self) -> float:
        """Coupling of the quantum dimer these pendula reproduce.

        Negative for a positive spring: the symmetric mode is the slow one.
        """
        return -self.k / (2.0 * self.omega)

    def system(self) -> SecondOrderSystem:
        """``q1'' + omega_s**2 q1 + k q1 = k q2`` and the mirror equation."""
        w2 = self.omega_s**2
        s = np.array([[w2 + self.k, -self.k], [-self.k, w2 + self.k]])
        return SecondOrderSystem(s, np.zeros(2), np.full(2, self.omega))


def pendulum_params_for_dimer(omega: float, k: float) -> PendulumPair:
    if not omega > 0:
        raise ModelError(f"omega must be positive, got {omega}")
    if k >= omega**2:
        raise ModelError(f"spring constant k={k} must be below omega**2={omega**2} to keep omega_s real")
    omega_s2 = omega**2 - k + k**2 / (4.0 * omega**2)
    return PendulumPair(omega, k, math.sqrt(omega_s2))


@dataclass(frozen=True)
class LcCircuitPair:
    """Two identical LC circuits joined by a coupling capacitor."""

    inductance: float
    capacitance: float
    coupling_capacitance: float

    def __post_init__(self):
        if not (self.inductance > 0 and self.capacitance > 0):
            raise ModelError("inductance and capacitance must be positive")
        if self.coupling_capacitance < 0:
            raise ModelError("coupling capacitance must be non-negative")


@dataclass(frozen=True)
class LcOscillator:
    omega: float
    k_ratio: float
    v_equiv: float
    omega_plus: float
    omega_minus: float

    @property
    def omega_minus_rca(self) -> float:
        """First-order expansion ``omega - K omega`` of the lower mode."""
        return self.omega - self.k_ratio * self.omega


def lc_to_oscillator(c: LcCircuitPair) -> LcOscillator:
    omega = 1.0 / math.sqrt(c.inductance * c.capacitance)
    k = c.coupling_capacitance / c.capacitance
    return LcOscillator(
        omega=omega,
        k_ratio=k,
        v_equiv=k * omega / 2.0,
        omega_plus=omega,
        omega_minus=omega / math.sqrt(1.0 + 2.0 * k),
    )


def lc_circuit_system(c: LcCircuitPair) -> SecondOrderSystem:
    """Charge equations ``(1+K) q1'' - K q2'' + omega**2 q1 = 0`` (and mirror) as ``q'' = -S q``."""
    osc = lc_to_oscillator(c)
    k = osc.k_ratio
    # inverse of the mass matrix [[1+K, -K], [-K, 1+K]]
    inv = np.array([[1.0 + k, k], [k, 1.0 + k]]) / (1.0 + 2.0 * k)
    s = osc.omega**2 * inv
    return SecondOrderSystem(s, np.zeros(2), np.full(2, osc.omega))
