"""Dense real-symmetric linear algebra.

Everything downstream (spectra, propagators, momentum reconstruction, the
p&q stiffness ``H @ H``) goes through the three operations here.
Eigendecomposition is cyclic Jacobi (see ``kernels``); no LAPACK is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels


class LinalgError(ArithmeticError):
    """Numeric failure in the dense kernel."""


class SingularMatrixError(LinalgError):
    pass


class ConvergenceError(LinalgError):
    pass


def symmetric_matrix(entries) -> np.ndarray:
    """Validate ``entries`` as a real symmetric matrix.

    Returns a read-only float64 copy. Symmetry must hold exactly; callers that
    accept nearly-symmetric input symmetrize first.
    """
    m = np.array(entries, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(m, m.T):
        raise ValueError("matrix is not exactly symmetric")
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and eigenvectors stored as rows.

    ``eigenvectors[k]`` is the vector B_k, so ``H = B.T @ diag(E) @ B``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        b = self.eigenvectors
        return (b.T * self.eigenvalues) @ b

    def to_modes(self, x):
        """Coefficients of ``x`` (last axis = sites) along each eigenvector."""
        return np.asarray(x) @ self.eigenvectors.T

    def from_modes(self, a):
        return np.asarray(a) @ self.eigenvectors


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # rows: largest-|component| positive, near-ties go to the lowest index
    out = vectors.copy()
    for k, row in enumerate(out):
        mag = np.abs(row)
        top = mag.max()
        j = int(np.flatnonzero(mag >= top * (1.0 - 1e-10))[0])
        if row[j] < 0:
            out[k] = -row
    return out


def eig_sym(m, max_sweeps: int = 50) -> SpectralDecomposition:
    """Eigendecomposition of a real symmetric matrix.

    Eigenvalues are sorted ascending. Each eigenvector's largest-magnitude
    component is made positive, so repeated runs give identical output.
    Within a degenerate eigenvalue the basis is whatever Jacobi converges to.
    """
    a = symmetric_matrix(m)
    w, v, sweeps = kernels.jacobi_eigh(np.ascontiguousarray(a), max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    order = np.argsort(w, kind="stable")
    w = np.asarray(w)[order]
    b = _fix_signs(np.asarray(v)[:, order].T)
    w.setflags(write=False)
    b.setflags(write=False)
    return SpectralDecomposition(w, b)


def solve_sym(m, b, decomposition: SpectralDecomposition | None = None) -> np.ndarray:
    """Solve ``M x = b`` for symmetric nonsingular ``M``.

    Works through the eigendecomposition with one refinement step. Raises
    SingularMatrixError when the smallest |eigenvalue| is at most 1e-12 of
    the largest.
    """
    a = symmetric_matrix(m)
    rhs = np.asarray(b, dtype=np.float64)
    if rhs.shape[0] != a.shape[0]:
        raise ValueError(f"rhs length {rhs.shape[0]} does not match matrix size {a.shape[0]}")
    dec = decomposition if decomposition is not None else eig_sym(a)
    mags = np.abs(dec.eigenvalues)
    if mags.max() == 0.0 or mags.min() <= 1e-12 * mags.max():
        raise SingularMatrixError(
            f"matrix is singular to working precision (|E| range {mags.min():.3g}..{mags.max():.3g})"
        )
    bvec = dec.eigenvectors

    def apply_inverse(r):
        return bvec.T @ ((bvec @ r) / dec.eigenvalues[(...,) + (None,) * (r.ndim - 1)])

    x = apply_inverse(rhs)
    x = x + apply_inverse(rhs - a @ x)
    return x


def mat_square(m) -> np.ndarray:
    """``M @ M`` with the result made exactly symmetric (upper triangle mirrored)."""
    a = symmetric_matrix(m)
    s = a @ a
    s = np.triu(s) + np.triu(s, 1).T
    s.setflags(write=False)
    return s
