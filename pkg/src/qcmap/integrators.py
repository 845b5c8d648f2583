"""Fixed-step integrators for the two linear systems used throughout.

First order, complex:   i c' = H c            (RK4, via its real form)
Second order, real:     q'' = -S q - D q'     (velocity Verlet if D == 0, RK4 otherwise)

Sample times are snapped to integer multiples of ``dt`` so every output row is
an exact integrator step; nothing is interpolated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .linalg import eig_sym, symmetric_matrix


@dataclass(frozen=True)
class IntegrationPlan:
    dt: float
    t_end: float
    steps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        steps = np.asarray(self.steps, dtype=np.int64)
        if steps.ndim != 1:
            raise ValueError("steps must be one-dimensional")
        if len(steps) and (steps[0] < 0 or np.any(np.diff(steps) <= 0)):
            raise ValueError("sample times collapse after snapping to dt; use fewer samples or a smaller dt")
        if len(steps) and steps[-1] > self.n_steps:
            raise ValueError("sample times exceed t_end")
        steps = np.ascontiguousarray(steps)
        steps.setflags(write=False)
        object.__setattr__(self, "steps", steps)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def sample_times(self) -> np.ndarray:
        return self.steps * self.dt

    @classmethod
    def from_times(cls, dt, times, t_end=None) -> "IntegrationPlan":
        times = np.asarray(times, dtype=np.float64)
        if np.any(times < 0):
            raise ValueError("sample times must be non-negative")
        if t_end is None:
            t_end = float(times.max()) if len(times) else 0.0
        t_end = round(t_end / dt) * dt
        steps = np.rint(times / dt).astype(np.int64)
        return cls(dt, t_end, steps)

    @classmethod
    def uniform(cls, dt, t_end, samples) -> "IntegrationPlan":
        """``samples`` points evenly spread over ``[0, t_end]`` (endpoints included)."""
        if samples < 1:
            raise ValueError("need at least one sample")
        if samples == 1:
            return cls.from_times(dt, [0.0], t_end)
        return cls.from_times(dt, np.linspace(0.0, t_end, samples), t_end)

    @classmethod
    def every_step(cls, dt, n_steps) -> "IntegrationPlan":
        return cls(dt, n_steps * dt, np.arange(n_steps + 1))


def propose_dt(frequencies, points_per_period: int = 1000) -> float:
    """``dt = min_period / points_per_period`` for the given angular frequencies."""
    top = float(np.max(np.abs(frequencies)))
    if top == 0.0:
        raise ValueError("cannot propose dt for an all-zero spectrum")
    return 2.0 * math.pi / top / points_per_period


@dataclass(frozen=True)
class Trajectory:
    """Complex amplitudes ``z`` sampled at times ``t``; shape ``(len(t), n)``."""

    t: np.ndarray
    z: np.ndarray

    def __len__(self):
        return len(self.t)

    @property
    def n(self) -> int:
        return self.z.shape[1]


@dataclass(frozen=True)
class SecondOrderTrajectory:
    t: np.ndarray
    q: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class SecondOrderSystem:
    """``q'' = -S q - D q'`` with diagonal ``D = 2 Gamma``.

    ``natural_frequencies`` is metadata (the bare omega_n) used when complex
    amplitudes are assembled from a trajectory.
    """

    stiffness: np.ndarray
    damping: np.ndarray
    natural_frequencies: np.ndarray

    def __post_init__(self):
        s = symmetric_matrix(self.stiffness)
        n = s.shape[0]
        d = np.array(self.damping, dtype=np.float64).reshape(-1)
        w = np.array(self.natural_frequencies, dtype=np.float64).reshape(-1)
        if d.shape != (n,) or w.shape != (n,):
            raise ValueError("damping and natural_frequencies must have one entry per oscillator")
        if np.any(d < 0):
            raise ValueError("damping must be non-negative")
        for a in (d, w):
            a.setflags(write=False)
        object.__setattr__(self, "stiffness", s)
        object.__setattr__(self, "damping", d)
        object.__setattr__(self, "natural_frequencies", w)
        if not self.is_damped and eig_sym(s).eigenvalues[0] <= 0:
            warnings.warn("stiffness matrix is not positive definite", RuntimeWarning, stacklevel=3)

    @property
    def n(self) -> int:
        return self.stiffness.shape[0]

    @property
    def is_damped(self) -> bool:
        return bool(np.any(self.damping > 0))

    def eigenfrequencies(self) -> np.ndarray:
        """Positive square roots of the stiffness eigenvalues, ascending."""
        lam = eig_sym(self.stiffness).eigenvalues
        return np.sqrt(np.clip(lam, 0.0, None))

    def energy(self, q, v):
        """``(v.v + q.S.q) / 2`` along the last axis."""
        q = np.asarray(q)
        v = np.asarray(v)
        return 0.5 * (np.sum(v * v, axis=-1) + np.sum(q * (q @ self.stiffness), axis=-1))


def _vec(x, n, name):
    a = np.ascontiguousarray(x, dtype=np.float64)
    if a.shape != (n,):
        raise ValueError(f"{name} has shape {a.shape}, expected ({n},)")
    return a


def rk4_hamilton(h, q0, p0, plan: IntegrationPlan, widths=None):
    """RK4 on ``q' = H p - g q``, ``p' = -H q - g p``; returns sampled ``(q, p)``.

    With ``z = (q + i p)/sqrt(2)`` this is exactly ``i z' = (H - i g) z``.
    """
    h = np.ascontiguousarray(symmetric_matrix(h))
    n = h.shape[0]
    g = np.zeros(n) if widths is None else _vec(widths, n, "widths")
    return kernels.rk4_hamilton(h, g, _vec(q0, n, "q0"), _vec(p0, n, "p0"), float(plan.dt), plan.steps)


def rk4_linear_complex(h, c0, plan: IntegrationPlan, widths=None) -> Trajectory:
    """Integrate ``i c' = (H - i diag(widths)) c`` with classical RK4."""
    c0 = np.asarray(c0, dtype=np.complex128)
    h = symmetric_matrix(h)
    if c0.shape != (h.shape[0],):
        raise ValueError(f"initial state has shape {c0.shape}, Hamiltonian is {h.shape[0]}x{h.shape[0]}")
    x, y = rk4_hamilton(h, c0.real, c0.imag, plan, widths)
    return Trajectory(plan.sample_times, x + 1j * y)


def verlet_second_order(sys: SecondOrderSystem, q0, v0, plan: IntegrationPlan) -> SecondOrderTrajectory:
    if sys.is_damped:
        raise ValueError("velocity Verlet is for undamped systems; use rk4_second_order")
    s = np.ascontiguousarray(sys.stiffness)
    q, v = kernels.verlet(s, _vec(q0, sys.n, "q0"), _vec(v0, sys.n, "v0"), float(plan.dt), plan.steps)
    return SecondOrderTrajectory(plan.sample_times, q, v)


def rk4_second_order(sys: SecondOrderSystem, q0, v0, plan: IntegrationPlan) -> SecondOrderTrajectory:
    s = np.ascontiguousarray(sys.stiffness)
    d = np.ascontiguousarray(sys.damping)
    q, v = kernels.rk4_second_order(s, d, _vec(q0, sys.n, "q0"), _vec(v0, sys.n, "v0"), float(plan.dt), plan.steps)
    return SecondOrderTrajectory(plan.sample_times, q, v)


def integrate_second_order(sys: SecondOrderSystem, q0, v0, plan: IntegrationPlan) -> SecondOrderTrajectory:
    """Verlet for undamped systems, RK4 when any damping is present."""
    if sys.is_damped:
        return rk4_second_order(sys, q0, v0, plan)
    return verlet_second_order(sys, q0, v0, plan)
