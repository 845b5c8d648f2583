"""Propagation of the quantum coefficients c_n(t) under ``i c' = H c``."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .integrators import IntegrationPlan, Trajectory, rk4_linear_complex
from .models import Hamiltonian


def amplitude_vector(values, normalized: bool = False) -> np.ndarray:
    c = np.array(values, dtype=np.complex128).reshape(-1)
    if normalized and abs(np.vdot(c, c).real - 1.0) > 1e-10:
        raise ValueError(f"state is not normalized: |c|^2 = {np.vdot(c, c).real!r}")
    return c


def site_state(n: int, site: int) -> np.ndarray:
    """Excitation localized on ``site`` (0-based)."""
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for {n} sites")
    c = np.zeros(n, dtype=np.complex128)
    c[site] = 1.0
    return c


def _check_dims(h: Hamiltonian, c0):
    c0 = amplitude_vector(c0)
    if c0.shape != (h.n,):
        raise ValueError(f"initial state has {c0.shape[0]} entries, Hamiltonian has {h.n} sites")
    return c0


def propagate_spectral(h: Hamiltonian, c0, times) -> Trajectory:
    """Exact propagation ``c(t) = sum_k A_k B_k exp(-i E_k t)``, ``A_k = B_k . c0``."""
    c0 = _check_dims(h, c0)
    t = np.asarray(times, dtype=np.float64).reshape(-1)
    dec = h.spectrum
    a = dec.eigenvectors @ c0
    phases = np.exp(-1j * np.outer(t, dec.eigenvalues))
    return Trajectory(t, (phases * a) @ dec.eigenvectors)


def propagate_ode(h: Hamiltonian, c0, plan: IntegrationPlan) -> Trajectory:
    return rk4_linear_complex(h.matrix, _check_dims(h, c0), plan)


def propagate_damped(h: Hamiltonian, widths, c0, plan: IntegrationPlan) -> Trajectory:
    """RK4 on ``i c_n' = (eps_n - i gamma_n) c_n + sum_m V_nm c_m``."""
    gamma = np.asarray(widths, dtype=np.float64).reshape(-1)
    if gamma.shape != (h.n,):
        raise ValueError(f"need one width per level ({h.n}), got {gamma.shape[0]}")
    if np.any(gamma < 0):
        raise ValueError("level widths must be non-negative")
    return rk4_linear_complex(h.matrix, _check_dims(h, c0), plan, widths=gamma)


def damped_dimer_modes(epsilon: float, v: float, gamma1: float, gamma2: float):
    """Complex eigenpairs of ``[[eps - i g1, v], [v, eps - i g2]]``.

    These solve ``(E - eps_n + i g_n) B_n = sum_m V_nm B_m`` for the dimer.
    Returns ``(energies, vectors)`` with vectors as rows, normalized so that
    ``sum_n B_n**2 = 1`` (complex-symmetric normalization).
    """
    a = complex(epsilon, -gamma1)
    d = complex(epsilon, -gamma2)
    mean = 0.5 * (a + d)
    root = cmath.sqrt(0.25 * (a - d) ** 2 + v * v)
    energies = np.array([mean - root, mean + root])
    vectors = []
    for e in energies:
        if v != 0:
            vec = np.array([v, e - a], dtype=np.complex128)
        else:
            vec = np.array([1.0, 0.0] if abs(e - a) < abs(e - d) else [0.0, 1.0], dtype=np.complex128)
        vectors.append(vec / np.sqrt(np.sum(vec * vec)))
    return energies, np.array(vectors)


def dimer_closed_form(epsilon: float, v: float, times) -> Trajectory:
    """``c1 = e^{-i eps t} cos(v t)``, ``c2 = -i e^{-i eps t} sin(v t)`` from ``c(0) = (1, 0)``."""
    t = np.asarray(times, dtype=np.float64).reshape(-1)
    phase = np.exp(-1j * epsilon * t)
    z = np.column_stack([phase * np.cos(v * t), -1j * phase * np.sin(v * t)])
    return Trajectory(t, z)


def ring_transfer(n: int, epsilon: float, v: float, times) -> Trajectory:
    """Closed-form ring evolution from ``c_m(0) = delta_{m0}``."""
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    t = np.asarray(times, dtype=np.float64).reshape(-1)
    k = 2.0 * math.pi * np.arange(n) / n
    sites = np.arange(n)
    waves = np.exp(1j * np.outer(k, sites))  # (k, m)
    phases = np.exp(-1j * np.outer(t, 2.0 * v * np.cos(k)))  # (t, k)
    z = np.exp(-1j * epsilon * t)[:, None] * (phases @ waves) / n
    return Trajectory(t, z)


def energy_expectation(h: Hamiltonian, z) -> np.ndarray:
    """``<c|H|c>`` per sample (last axis = sites)."""
    z = np.asarray(z)
    return np.real(np.sum(np.conj(z) * (z @ h.matrix), axis=-1))
