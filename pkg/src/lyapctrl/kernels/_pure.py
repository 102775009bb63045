"""Pure NumPy implementations of the hot kernels.

The compiled extension (`_speedups`) mirrors these functions one-to-one;
this module is the fallback and the reference for the parity tests.
"""

from __future__ import annotations

import math

import numpy as np

# Off-diagonal Frobenius norm below OFF_TOL * scale terminates the sweep.
OFF_TOL = 1e-14
MAX_SWEEPS = 60


def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first nonzero component is real positive."""
    for x in v:
        if abs(x) > 1e-12:
            return v * (abs(x) / x)
    return v


def _eigh2(a: np.ndarray):
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix."""
    a00 = a[0, 0].real
    a11 = a[1, 1].real
    b = a[0, 1]
    m = 0.5 * (a00 + a11)
    r = math.hypot(0.5 * (a00 - a11), abs(b))
    w = np.array([m - r, m + r])
    v = np.empty((2, 2), dtype=complex)
    if abs(b) > 1e-300 * max(1.0, abs(a00) + abs(a11)) and r > 0.0:
        v[:, 0] = (b, w[0] - a00)
        v[:, 1] = (b, w[1] - a00)
        for k in (0, 1):
            v[:, k] = _phase_fix(v[:, k] / np.linalg.norm(v[:, k]))
    else:
        # already diagonal; order columns with the ascending eigenvalues
        if a00 <= a11:
            v[:, 0] = (1.0, 0.0)
            v[:, 1] = (0.0, 1.0)
        else:
            v[:, 0] = (0.0, 1.0)
            v[:, 1] = (1.0, 0.0)
    return w, v


def eigh_herm(a: np.ndarray):
    """Eigendecomposition of a dense Hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvectors as orthonormal columns).
    Each eigenvector's first nonzero component is made real positive, so the
    output is deterministic for identical input.
    """
    a = np.ascontiguousarray(a, dtype=complex)
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real]), np.array([[1.0 + 0.0j]])
    if n == 2:
        return _eigh2(a)

    m = a.copy()
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(m))))
    for _ in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(m[p, q]) ** 2
        if math.sqrt(off) <= OFF_TOL * scale * n:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= OFF_TOL * scale * 1e-2:
                    continue
                app = m[p, p].real
                aqq = m[q, q].real
                phase = apq / abs(apq)
                tau = (aqq - app) / (2.0 * abs(apq))
                t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # unitary J = I except J[p,p]=c, J[p,q]=s, J[q,p]=-s/phase,
                # J[q,q]=c/phase; m <- J^H m J, v <- v J
                pf = np.conj(phase)
                colp = m[:, p].copy()
                colq = m[:, q].copy()
                m[:, p] = c * colp - s * pf * colq
                m[:, q] = s * colp + c * pf * colq
                rowp = m[p, :].copy()
                rowq = m[q, :].copy()
                m[p, :] = c * rowp - s * phase * rowq
                m[q, :] = s * rowp + c * phase * rowq
                m[p, q] = 0.0
                m[q, p] = 0.0
                colp = v[:, p].copy()
                colq = v[:, q].copy()
                v[:, p] = c * colp - s * pf * colq
                v[:, q] = s * colp + c * pf * colq

    w = np.array([m[k, k].real for k in range(n)])
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    for k in range(n):
        v[:, k] = _phase_fix(v[:, k])
    return w, v


def schrodinger_rhs(h: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Right-hand side -i H psi of the Schrodinger equation (hbar = 1)."""
    return -1j * (h @ psi)


def expect(m: np.ndarray, psi: np.ndarray) -> complex:
    """<psi| m |psi> without any reality assumption."""
    return complex(np.vdot(psi, m @ psi))
