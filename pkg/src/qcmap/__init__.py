"""Map N-level quantum systems with real couplings onto classical oscillators.

Exact route: p&q-coupled oscillators (``classical_exact``).
Approximate route: q-coupled oscillators in the weak-coupling regime
(``classical_rca``). Reference dynamics: ``quantum``.
"""

from . import analysis, classical_exact, classical_rca, integrators, kernels, linalg, models, quantum
from .integrators import IntegrationPlan, SecondOrderSystem, Trajectory, propose_dt
from .models import Hamiltonian, build_dimer, build_ring, hamiltonian_from_dense

__version__ = "0.1.0"

__all__ = [
    "Hamiltonian",
    "IntegrationPlan",
    "SecondOrderSystem",
    "Trajectory",
    "analysis",
    "build_dimer",
    "build_ring",
    "classical_exact",
    "classical_rca",
    "hamiltonian_from_dense",
    "integrators",
    "kernels",
    "linalg",
    "models",
    "propose_dt",
    "quantum",
]
