"""Dense complex linear algebra for small Hermitian systems.

Operators and states are plain NumPy arrays; the functions here validate the
contracts (Hermiticity, unit norm, matching dimensions) and delegate the
eigensolve to the kernel backend.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, DomainError, HermiticityError

HERM_TOL = 1e-12

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    m = np.ascontiguousarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise DomainError("matrix contains non-finite entries")
    return m


def as_hermitian(m, tol: float = HERM_TOL) -> np.ndarray:
    """Validate that m is Hermitian within `tol` (entrywise, absolute)."""
    m = as_matrix(m)
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise HermiticityError(f"matrix deviates from Hermitian by {dev:.3e} > {tol:g}")
    return m


def as_state(psi, norm_tol: float = 1e-9) -> np.ndarray:
    """Coerce to a complex vector and check unit norm within `norm_tol`."""
    psi = np.ascontiguousarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise DomainError(f"expected a vector, got shape {psi.shape}")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > norm_tol:
        raise DomainError(f"state norm {nrm:.12g} deviates from 1 beyond {norm_tol:g}")
    return psi


def normalize(psi) -> np.ndarray:
    """Scale psi to unit norm, preserving direction."""
    psi = np.ascontiguousarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if nrm <= 1e-14:
        raise DomainError(f"cannot normalize near-zero vector (norm {nrm:.3e})")
    return psi / nrm


def _check_dims(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(a.shape[0], b.shape[0], what)


def commutator(a, b) -> np.ndarray:
    """a b - b a. Anti-Hermitian when a and b are Hermitian."""
    a = as_matrix(a)
    b = as_matrix(b)
    _check_dims(a, b, "commutator operands")
    return a @ b - b @ a


def expectation(op, psi) -> float:
    """Real expectation value <psi|op|psi> of a Hermitian operator.

    The imaginary residue is asserted small (< 1e-10) and discarded.
    """
    op = as_matrix(op)
    psi = np.ascontiguousarray(psi, dtype=complex)
    _check_dims(op, psi, "operator and state")
    val = kernels.expect(op, psi)
    if abs(val.imag) > 1e-10:
        raise HermiticityError(
            f"expectation has imaginary part {val.imag:.3e}; operator not Hermitian enough"
        )
    return val.real


def expectation_complex(m, psi) -> complex:
    """<psi|m|psi> with no reality assumption (commutator expectations are imaginary)."""
    m = as_matrix(m)
    psi = np.ascontiguousarray(psi, dtype=complex)
    _check_dims(m, psi, "matrix and state")
    return kernels.expect(m, psi)


def eigh(op):
    """Eigendecomposition of a Hermitian operator.

    Returns (eigenvalues ascending, eigenvectors as orthonormal columns),
    deterministic for identical input; each column's first nonzero component
    is real positive.
    """
    op = as_hermitian(op)
    return kernels.eigh_herm(op)


def pauli_combo(cx: float, cy: float, cz: float, cid: float = 0.0) -> np.ndarray:
    """cx*sigma_x + cy*sigma_y + cz*sigma_z + cid*I (two-level operators)."""
    return np.array(
        [[cz + cid, cx - 1j * cy], [cx + 1j * cy, cid - cz]], dtype=complex
    )
