"""Symmetric eigendecomposition with ascending eigenvalues.

Single numerical kernel consumed by every other module.  Eigenvector
columns follow a fixed sign convention (first non-negligible component
positive) so decompositions are stable across runs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NumericalError

ORTHO_TOL = 1e-10
RECONSTRUCT_TOL = 1e-8
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    """Orthonormal eigenvectors (columns of ``p``) and ascending eigenvalues."""

    p: np.ndarray
    lambdas: np.ndarray

    @property
    def n(self) -> int:
        return self.lambdas.size

    def reconstruct(self) -> np.ndarray:
        return (self.p * self.lambdas) @ self.p.T


def eig_sym(a: np.ndarray) -> SpectralDecomposition:
    """Decompose a real symmetric matrix as P diag(lambdas) P^T.

    Parameters
    ----------
    a : (n, n) array, symmetric within 1e-12 absolute, finite entries.

    Returns
    -------
    SpectralDecomposition with lambdas ascending, P orthonormal within
    1e-10 and reconstruction residual within 1e-8 * max(1, max|a|).

    Raises
    ------
    ContractError   if the input is not square/symmetric/finite.
    NumericalError  if the solver output fails the residual checks.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError("matrix has non-finite entries")
    asym = np.max(np.abs(a - a.T)) if a.size else 0.0
    if asym > SYMMETRY_TOL:
        raise ContractError(f"matrix asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.0e}")

    try:
        lambdas, p = np.linalg.eigh((a + a.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver failed: {exc}") from exc

    p = _fix_signs(p)

    ortho = np.max(np.abs(p.T @ p - np.eye(p.shape[0])))
    if ortho > ORTHO_TOL:
        raise NumericalError(f"eigenvector orthonormality residual {ortho:.3e}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    resid = np.max(np.abs((p * lambdas) @ p.T - a))
    if resid > RECONSTRUCT_TOL * scale:
        raise NumericalError(f"reconstruction residual {resid:.3e} (scale {scale:.3e})")

    return SpectralDecomposition(p=p, lambdas=lambdas)


def _fix_signs(p: np.ndarray) -> np.ndarray:
    p = p.copy()
    for j in range(p.shape[1]):
        col = p[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        k = nz[0] if nz.size else 0
        if col[k] < 0:
            p[:, j] = -col
    return p
