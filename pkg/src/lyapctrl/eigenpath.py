"""Instantaneous eigenvalue/eigenvector tracking with a smooth gauge.

Frames along a time grid are chained: levels are matched to the previous
frame by maximum overlap and each eigenvector's phase is rotated so the
overlap with its predecessor is real positive (a discretized parallel
transport). Without a predecessor, levels are ordered by ascending energy
and the first nonzero component is made real positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegeneracyError, DomainError, GaugeTrackingError
from .models import RotatingFieldModel

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class EigenFrame:
    """Gauge-fixed instantaneous eigensystem of H0(t) at one time."""

    t: float
    energies: np.ndarray        # (dim,)
    states: np.ndarray          # (dim, dim), eigenvectors as columns

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def state(self, level: int) -> np.ndarray:
        return self.states[:, level]


def frame_at(model, t: float, prev: EigenFrame | None = None) -> EigenFrame:
    """Eigendecompose H0(t); order and phase by continuity when prev is given."""
    w, v = linalg.eigh(model.h0_at(t))
    if prev is None:
        return EigenFrame(t=t, energies=w, states=v)
    if prev.dim != v.shape[0]:
        raise DomainError(f"prev frame dim {prev.dim} != model dim {v.shape[0]}")
    if prev.t > t:
        raise DomainError(f"prev frame time {prev.t:g} is after t={t:g}")

    overlaps = prev.states.conj().T @ v  # overlaps[k, m] = <prev_k | v_m>
    n = v.shape[0]
    order = np.empty(n, dtype=int)
    used = np.zeros(n, dtype=bool)
    for k in range(n):
        row = np.abs(overlaps[k]).copy()
        row[used] = -1.0
        m = int(np.argmax(row))
        if row[m] < 0.5:
            raise GaugeTrackingError(t, float(row[m]))
        order[k] = m
        used[m] = True

    v = v[:, order]
    w = w[order]
    phases = overlaps[np.arange(n), order]
    v = v * np.where(np.abs(phases) > 0, np.abs(phases) / phases, 1.0)
    return EigenFrame(t=t, energies=w, states=v)


def eigenstate_derivative(model, t: float, n: int, frame: EigenFrame) -> np.ndarray:
    """d|n(t)>/dt in the <n|dn/dt> = 0 gauge, via the first-order
    perturbation sum over the other levels."""
    w = frame.energies
    dim = frame.dim
    for m in range(dim):
        if m != n and abs(w[n] - w[m]) <= DEGENERACY_TOL:
            raise DegeneracyError(t, n, m, abs(w[n] - w[m]))
    dh = model.dh0_dt(t)
    vn = frame.state(n)
    out = np.zeros(dim, dtype=complex)
    for m in range(dim):
        if m == n:
            continue
        vm = frame.state(m)
        out += vm * (np.vdot(vm, dh @ vn) / (w[n] - w[m]))
    return out


def analytic_rotating_eigs(model: RotatingFieldModel, t: float) -> EigenFrame:
    """Closed-form frame for the rotating-field model, in the convention
    |E+> = (cos(theta/2) e^{-i phi}, sin(theta/2)),
    |E-> = (-sin(theta/2) e^{-i phi}, cos(theta/2)), energies -/+ mu*B0."""
    if not isinstance(model, RotatingFieldModel):
        raise DomainError("analytic_rotating_eigs requires a RotatingFieldModel")
    phi = model.omega * t
    c = np.cos(model.theta / 2)
    s = np.sin(model.theta / 2)
    # with standard Pauli matrices the upper-right entry of H0 is
    # sin(theta) e^{-i phi}, so the rotating phase enters conjugated
    e = np.exp(-1j * phi)
    states = np.array([[-s * e, c * e], [c, s]], dtype=complex)
    energies = np.array([-model.mu_b0, model.mu_b0])
    return EigenFrame(t=t, energies=energies, states=states)
