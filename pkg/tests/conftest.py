import numpy as np
import pytest

from qcmap import kernels
from qcmap.models import hamiltonian_from_dense


@pytest.fixture(params=sorted(kernels.AVAILABLE))
def backend(request):
    """Run a test once per available kernel backend."""
    previous = kernels.BACKEND
    kernels.use(request.param)
    yield request.param
    kernels.use(previous)


def random_symmetric(rng, n, scale=1.0):
    a = rng.normal(scale=scale, size=(n, n))
    return a + a.T


def random_hamiltonian(rng, n, diag=(0.8, 1.2), off=0.05):
    m = np.diag(rng.uniform(*diag, n))
    upper = np.triu(rng.uniform(-off, off, (n, n)), 1)
    return hamiltonian_from_dense(m + upper + upper.T)


def random_state(rng, n):
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    return c / np.linalg.norm(c)


def expm_series(a, t=1.0, tol=1e-14):
    """exp(a t) by Taylor series; stops once a term drops below ``tol``.

    Large arguments are scaled by 2**-s first and squared back afterwards.
    """
    a = np.asarray(a, dtype=np.complex128) * t
    s = max(0, int(np.ceil(np.log2(max(np.max(np.abs(a)) * a.shape[0], 1e-300)))))
    if s > 0:
        out = expm_series(a / 2**s, 1.0, tol)
        for _ in range(s):
            out = out @ out
        return out
    out = np.eye(a.shape[0], dtype=np.complex128)
    term = out.copy()
    k = 0
    while True:
        k += 1
        term = term @ a / k
        out = out + term
        if np.max(np.abs(term)) < tol:
            return out


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
