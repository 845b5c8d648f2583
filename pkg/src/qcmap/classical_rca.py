"""Position-coupled ("q-coupled") oscillators and the weak-coupling (RCA) mapping.

``omega_bar`` is the arithmetic mean of the site frequencies. Two variants:

* ``build_q_coupled``: ``q_n'' + omega_n**2 q_n = -sum_m K_nm q_m`` with
  ``K_nm = 2 omega_bar V_nm``.
* ``build_q_coupled_spring``: pendula joined by springs of constant
  ``K_nm = -2 omega_bar V_nm``,
  ``q_n'' + (omega_n**2 + sum_m K_nm) q_n = sum_m K_nm q_m``. A spring pulls
  the pendula toward each other, so a positive spring constant stands for a
  negative quantum coupling; with this sign the oscillators track the source
  Hamiltonian's amplitudes (coherences included), not its mirror image. The
  back-action on the diagonal offsets the whole spectrum from the quantum one
  (by ``|V|`` for the dimer, ``2|V|`` for a ring).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .integrators import (
    IntegrationPlan,
    SecondOrderSystem,
    Trajectory,
    integrate_second_order,
)
from .linalg import SpectralDecomposition, eig_sym
from .models import Hamiltonian
from .quantum import amplitude_vector

SQRT2 = np.sqrt(2.0)

VARIANTS = ("bare", "spring")


@dataclass(frozen=True)
class RcaSystem:
    second_order: SecondOrderSystem
    omega_bar: float
    hamiltonian: Hamiltonian
    variant: str = "bare"

    @property
    def n(self) -> int:
        return self.second_order.n

    @property
    def coupling(self) -> np.ndarray:
        """Effective coupling ``S - diag(omega_n**2)`` (diagonal holds any spring back-action)."""
        w = self.second_order.natural_frequencies
        return self.second_order.stiffness - np.diag(w**2)


def build_q_coupled(h: Hamiltonian) -> RcaSystem:
    w_bar = h.omega_bar
    s = np.diag(h.omega**2) + 2.0 * w_bar * h.v
    return RcaSystem(SecondOrderSystem(s, np.zeros(h.n), h.omega), w_bar, h, "bare")


def build_q_coupled_spring(h: Hamiltonian) -> RcaSystem:
    w_bar = h.omega_bar
    k = -2.0 * w_bar * h.v
    s = np.diag(h.omega**2 + k.sum(axis=1)) - k
    return RcaSystem(SecondOrderSystem(s, np.zeros(h.n), h.omega), w_bar, h, "spring")


def build(h: Hamiltonian, variant: str) -> RcaSystem:
    if variant == "bare":
        return build_q_coupled(h)
    if variant == "spring":
        return build_q_coupled_spring(h)
    raise ValueError(f"unknown q-coupled variant {variant!r}; expected one of {VARIANTS}")


def build_damped(sys: RcaSystem, gamma) -> RcaSystem:
    """Add friction ``2 Gamma_n q_n'`` to each oscillator."""
    g = np.asarray(gamma, dtype=np.float64).reshape(-1)
    if g.size == 1:
        g = np.full(sys.n, float(g[0]))
    if g.shape != (sys.n,):
        raise ValueError(f"need one damping rate per oscillator ({sys.n}), got {g.shape[0]}")
    if np.any(g < 0):
        raise ValueError("damping rates must be non-negative")
    so = sys.second_order
    damped = SecondOrderSystem(so.stiffness, 2.0 * g, so.natural_frequencies)
    return dataclasses.replace(sys, second_order=damped)


def rca_effective_spectrum(sys: RcaSystem) -> SpectralDecomposition:
    """Spectrum of ``diag(omega_n) + coupling / (2 omega_bar)``.

    For the bare variant this is the source Hamiltonian itself.
    """
    w = sys.second_order.natural_frequencies
    m = np.diag(w) + sys.coupling / (2.0 * sys.omega_bar)
    m = np.triu(m) + np.triu(m, 1).T
    return eig_sym(m)


def _mode_basis(sys: RcaSystem):
    dec = eig_sym(sys.second_order.stiffness)
    return dec.eigenvectors, np.sqrt(np.clip(dec.eigenvalues, 0.0, None))


def rca_amplitudes(sys: RcaSystem, q, qdot, rule: str = "site") -> np.ndarray:
    """Complex amplitudes from positions and velocities.

    ``rule="site"``: ``z_n = (q_n + i q_n' / omega_bar) / sqrt 2``.
    ``rule="mode"``: divide each normal-mode velocity by its own frequency;
    exact for single-mode motion.
    """
    q = np.asarray(q, dtype=np.float64)
    qdot = np.asarray(qdot, dtype=np.float64)
    if rule == "site":
        return (q + 1j * qdot / sys.omega_bar) / SQRT2
    if rule == "mode":
        b, freqs = _mode_basis(sys)
        u = q @ b.T
        udot = qdot @ b.T
        return ((u + 1j * udot / freqs) / SQRT2) @ b
    raise ValueError(f"unknown amplitude rule {rule!r}")


def initial_conditions(sys: RcaSystem, c0, rule: str = "site"):
    """Invert ``rca_amplitudes``: positions and velocities that start at ``c0``."""
    c0 = amplitude_vector(c0)
    q0 = SQRT2 * c0.real
    if rule == "site":
        return q0, SQRT2 * c0.imag * sys.omega_bar
    b, freqs = _mode_basis(sys)
    return q0, (SQRT2 * (c0.imag @ b.T) * freqs) @ b


def rca_evolve(sys: RcaSystem, c0, plan: IntegrationPlan, rule: str = "site") -> Trajectory:
    """Integrate the q-coupled oscillators from ``c0`` and return amplitudes."""
    q0, v0 = initial_conditions(sys, c0, rule)
    traj = integrate_second_order(sys.second_order, q0, v0, plan)
    return Trajectory(traj.t, rca_amplitudes(sys, traj.q, traj.v, rule))


def phase_compensate(traj: Trajectory, delta_omega: float) -> Trajectory:
    """Multiply every sample by ``exp(i delta_omega t)``."""
    return Trajectory(traj.t, traj.z * np.exp(1j * delta_omega * traj.t)[:, None])


def spectral_shift(sys: RcaSystem) -> float:
    """Mean oscillator eigenfrequency minus mean quantum eigenvalue.

    This is the overall energy offset that ``phase_compensate`` removes.
    """
    freqs = sys.second_order.eigenfrequencies()
    return float(np.mean(freqs) - np.mean(sys.hamiltonian.spectrum.eigenvalues))


@dataclass(frozen=True)
class RcaValidity:
    ratio: float
    second_order_ratio: float
    nonrotating_scale: float
    regime: str

    @property
    def degrading(self) -> bool:
        return self.regime != "valid"


RCA_VALID_BELOW = 0.02
RCA_BROKEN_ABOVE = 0.2


def rca_validity_ratio(h: Hamiltonian) -> RcaValidity:
    """How small the couplings are against the mean frequency.

    ``ratio = max|V| / omega_bar``; ``second_order_ratio`` compares the
    neglected ``V @ V`` term against the kept ``2 omega_bar V`` term (max-norms).
    Regimes: ``valid`` below 0.02, ``degrading`` up to 0.2, ``invalid`` beyond.
    """
    v = h.v
    w_bar = h.omega_bar
    vmax = float(np.max(np.abs(v)))
    ratio = vmax / w_bar
    second = float(np.max(np.abs(v @ v)) / (2.0 * w_bar * vmax)) if vmax > 0 else 0.0
    scale = w_bar / vmax if vmax > 0 else float("inf")
    if ratio < RCA_VALID_BELOW:
        regime = "valid"
    elif ratio < RCA_BROKEN_ABOVE:
        regime = "degrading"
    else:
        regime = "invalid"
    return RcaValidity(ratio, second, scale, regime)
