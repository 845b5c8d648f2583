import math

import numpy as np
import pytest

from qcmap.analysis import classical_energy, norm_squared
from qcmap.classical_exact import (
    PhaseSpaceState,
    assemble_amplitudes,
    build_pq_system,
    exact_classical_evolve,
    integrate_hamilton,
    normal_mode_solution,
    pq_stiffness_terms,
    quantum_to_phase_space,
    reconstruct_momenta,
)
from qcmap.integrators import IntegrationPlan, propose_dt
from qcmap.linalg import SingularMatrixError
from qcmap.models import Hamiltonian, build_dimer, build_ring
from qcmap.quantum import propagate_spectral

from conftest import random_hamiltonian, random_state

R2 = math.sqrt(2.0)


def test_pq_stiffness_dimer():
    s = build_pq_system(build_dimer(1.0, 0.005)).stiffness
    np.testing.assert_allclose(s, [[1.000025, 0.01], [0.01, 1.000025]], rtol=1e-15)


def test_pq_stiffness_ring_next_nearest():
    s = build_pq_system(build_ring(6, 1.0, 0.1)).stiffness
    for i in range(6):
        assert s[i, i] == pytest.approx(1.02, rel=1e-15)
        assert s[i, (i + 1) % 6] == pytest.approx(0.2, rel=1e-15)
        assert s[i, (i + 2) % 6] == pytest.approx(0.01, rel=1e-14)
        assert s[i, (i + 3) % 6] == 0.0


def test_pq_stiffness_uncoupled():
    h = Hamiltonian(np.diag([0.9, 1.1]))
    np.testing.assert_allclose(build_pq_system(h).stiffness, np.diag([0.81, 1.21]), rtol=1e-15, atol=0)


def test_pq_stiffness_terms_sum_to_square():
    rng = np.random.default_rng(4)
    h = random_hamiltonian(rng, 4)
    d, lin, quad = pq_stiffness_terms(h)
    np.testing.assert_allclose(d + lin + quad, build_pq_system(h).stiffness, atol=1e-15)


def test_pq_eigenfrequencies_equal_abs_energies():
    rng = np.random.default_rng(6)
    for n in (2, 5, 9):
        h = random_hamiltonian(rng, n)
        freqs = build_pq_system(h).eigenfrequencies()
        np.testing.assert_allclose(freqs, np.sort(np.abs(h.spectrum.eigenvalues)), atol=1e-10)


def test_phase_space_mapping_examples():
    s = quantum_to_phase_space([1.0, 0.0])
    np.testing.assert_allclose(s.q, [R2, 0.0])
    np.testing.assert_array_equal(s.p, [0.0, 0.0])
    s = quantum_to_phase_space([1j / R2, 1 / R2])
    np.testing.assert_allclose(s.q, [0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(s.p, [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(assemble_amplitudes(PhaseSpaceState([R2, 0.0], [0.0, 0.0])), [1.0, 0.0], rtol=1e-15)


def test_phase_space_roundtrip_and_norm():
    rng = np.random.default_rng(1)
    c = random_state(rng, 6)
    s = quantum_to_phase_space(c)
    assert np.max(np.abs(assemble_amplitudes(s) - c)) <= 1e-15
    z = assemble_amplitudes(s)
    assert norm_squared(z) == pytest.approx((s.q @ s.q + s.p @ s.p) / 2, rel=1e-15)
    with pytest.raises(ValueError):
        PhaseSpaceState([1.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        PhaseSpaceState([np.nan], [0.0])


def test_dimer_beating_closed_form():
    eps, v, beta = 1.0, 0.005, -R2
    h = build_dimer(eps, v)
    wp, wm = eps + v, eps - v
    plan = IntegrationPlan.uniform(propose_dt([wp], 1000), 200.0, 201)
    tr = integrate_hamilton(h, PhaseSpaceState([beta, 0.0], [0.0, 0.0]), plan)
    t = tr.t
    # RK4 phase error ~ w (w dt)**4 t / 120 ~ 3e-9 here
    tol = 1e-8
    q1 = beta / 2 * (np.cos(wp * t) + np.cos(wm * t))
    q2 = beta / 2 * (np.cos(wp * t) - np.cos(wm * t))
    p1 = -beta / 2 * (np.sin(wp * t) + np.sin(wm * t))
    p2 = -beta / 2 * (np.sin(wp * t) - np.sin(wm * t))
    assert np.max(np.abs(tr.q - np.column_stack([q1, q2]))) <= tol
    assert np.max(np.abs(tr.p - np.column_stack([p1, p2]))) <= tol
    # beta = -sqrt2 reproduces the quantum c(t) from c0 = (-1, 0)
    z = tr.amplitudes().z
    zq = beta / (2 * R2) * np.column_stack(
        [np.exp(-1j * wp * t) + np.exp(-1j * wm * t), np.exp(-1j * wp * t) - np.exp(-1j * wm * t)]
    )
    assert np.max(np.abs(z - zq)) <= tol
    assert np.max(np.abs(z - propagate_spectral(h, [-1.0, 0.0], t).z)) <= tol


def test_eigenmode_start_stays_in_mode():
    rng = np.random.default_rng(2)
    h = random_hamiltonian(rng, 5)
    b = h.spectrum.eigenvectors[2]
    plan = IntegrationPlan.uniform(propose_dt(h.spectrum.eigenvalues), 50.0, 26)
    tr = integrate_hamilton(h, PhaseSpaceState(b, np.zeros(5)), plan)
    for q in tr.q:
        assert np.linalg.norm(q - (q @ b) * b) <= 1e-10


def test_reconstruct_momenta_examples():
    h = Hamiltonian(np.diag([0.5, 2.0]))
    np.testing.assert_allclose(reconstruct_momenta(h, [1.0, 1.0]), [2.0, 0.5], rtol=1e-15)
    d = build_dimer(1.0, 0.2)
    qdot = np.array([0.3, -0.7])
    p = reconstruct_momenta(d, qdot)
    assert p[0] + p[1] == pytest.approx((qdot[0] + qdot[1]) / 1.2, rel=1e-14)
    assert p[0] - p[1] == pytest.approx((qdot[0] - qdot[1]) / 0.8, rel=1e-14)
    rng = np.random.default_rng(3)
    h = random_hamiltonian(rng, 4)
    qdot = rng.normal(size=4)
    assert np.max(np.abs(h.matrix @ reconstruct_momenta(h, qdot) - qdot)) <= 1e-10
    stack = rng.normal(size=(3, 4))
    np.testing.assert_allclose(reconstruct_momenta(h, stack) @ h.matrix, stack, atol=1e-12)


def test_reconstruct_momenta_singular():
    # positive diagonal, but omega == |V| makes H singular
    h = Hamiltonian([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(SingularMatrixError):
        reconstruct_momenta(h, [1.0, 0.0])


def test_normal_modes():
    h = build_dimer(1.0, 0.005)
    nm = normal_mode_solution(h, [1.0, 0.0])
    np.testing.assert_allclose(np.abs(nm.coefficients), [1 / R2, 1 / R2], rtol=1e-14)
    np.testing.assert_allclose(nm.frequencies, h.spectrum.eigenvalues)
    np.testing.assert_allclose(nm.beta, [1.0, 1.0], rtol=1e-14)
    rng = np.random.default_rng(10)
    h = random_hamiltonian(rng, 6)
    nm = normal_mode_solution(h, h.spectrum.eigenvectors[3])
    np.testing.assert_allclose(nm.coefficients, np.eye(6)[3], atol=1e-14)
    c0 = random_state(rng, 6)
    t = np.linspace(0, 100, 101)
    nm = normal_mode_solution(h, c0)
    assert np.max(np.abs(nm.amplitudes(t).z - propagate_spectral(h, c0, t).z)) <= 1e-11
    # q_n = sum_k B_kn beta_k cos(Omega_k t - alpha_k)
    q = np.cos(np.outer(t, nm.frequencies) - nm.alpha) * nm.beta @ nm.eigenvectors
    np.testing.assert_allclose(nm.positions(t), q, atol=1e-12)


def test_exact_evolve_dimer_long_run():
    h = build_dimer(1.0, 0.005)
    plan = IntegrationPlan.uniform(2 * math.pi / 2000, 400 * math.pi, 401)
    z = exact_classical_evolve(h, [1.0, 0.0], plan).z
    assert np.max(np.abs(z - propagate_spectral(h, [1.0, 0.0], plan.sample_times).z)) <= 1e-8


def test_exact_evolve_uncoupled():
    h = Hamiltonian(np.diag([0.8, 1.0, 1.2]))
    c0 = np.array([0.6, 0.8j, 0.0])
    plan = IntegrationPlan.uniform(propose_dt([1.2]), 30.0, 31)
    z = exact_classical_evolve(h, c0, plan).z
    ref = c0 * np.exp(-1j * np.outer(plan.sample_times, [0.8, 1.0, 1.2]))
    assert np.max(np.abs(z - ref)) <= 1e-9


def test_exact_evolve_random_8x8():
    rng = np.random.default_rng(88)
    h = random_hamiltonian(rng, 8)
    c0 = random_state(rng, 8)
    plan = IntegrationPlan.uniform(propose_dt(h.spectrum.eigenvalues), 50.0, 501)
    z = exact_classical_evolve(h, c0, plan).z
    assert np.max(np.abs(z - propagate_spectral(h, c0, plan.sample_times).z)) <= 1e-7


def test_hamilton_and_verlet_routes_agree():
    rng = np.random.default_rng(17)
    h = random_hamiltonian(rng, 4)
    c0 = random_state(rng, 4)
    plan = IntegrationPlan.uniform(propose_dt(h.spectrum.eigenvalues, 20000), 10.0, 21)
    a = exact_classical_evolve(h, c0, plan, method="hamilton").z
    b = exact_classical_evolve(h, c0, plan, method="verlet").z
    assert np.max(np.abs(a - b)) <= 1e-7
    with pytest.raises(ValueError):
        exact_classical_evolve(h, c0, plan, method="euler")


def test_energy_and_norm_conserved():
    rng = np.random.default_rng(23)
    h = random_hamiltonian(rng, 6)
    c0 = random_state(rng, 6)
    s0 = quantum_to_phase_space(c0)
    e0 = classical_energy(h, s0.q, s0.p)
    assert e0 == pytest.approx(np.real(np.vdot(c0, h.matrix @ c0)), rel=1e-14)
    plan = IntegrationPlan.uniform(propose_dt(h.spectrum.eigenvalues), 200.0, 201)
    tr = integrate_hamilton(h, s0, plan)
    assert np.max(np.abs(classical_energy(h, tr.q, tr.p) / e0 - 1)) <= 1e-9
    assert np.max(np.abs(norm_squared(tr.amplitudes().z) - 1)) <= 1e-9


@pytest.mark.parametrize("v", [0.005, 0.05])
def test_sign_flip_leaves_populations(v):
    plan = IntegrationPlan.uniform(propose_dt([1.0 + v]), 300.0, 151)
    pos = exact_classical_evolve(build_dimer(1.0, v), [1.0, 0.0], plan).z
    neg = exact_classical_evolve(build_dimer(1.0, -v), [1.0, 0.0], plan).z
    assert np.max(np.abs(np.abs(pos) ** 2 - np.abs(neg) ** 2)) <= 1e-12
