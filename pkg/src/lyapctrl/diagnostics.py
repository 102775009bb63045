"""Observables and oracles: fidelity, total-Hamiltonian spectra, the
nonlinearity-vs-tunneling coefficients, minimum gap, and the closed-form
uncontrolled two-level solution used as an independent check."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import linalg
from .eigenpath import EigenFrame
from .errors import DomainError
from .models import RotatingFieldModel


def fidelity(frame: EigenFrame, psi: np.ndarray, level: int = 0) -> float:
    """|<level-state | psi>|^2; independent of the frame's gauge."""
    psi = np.ascontiguousarray(psi, dtype=complex)
    if frame.dim != len(psi):
        raise DomainError(f"frame dim {frame.dim} != state dim {len(psi)}")
    return abs(complex(np.vdot(frame.state(level), psi))) ** 2


def total_spectrum(h0: np.ndarray, controls: Sequence[np.ndarray],
                   fields: Sequence[float]) -> np.ndarray:
    """Ascending eigenvalues of H0 + sum_j f_j H_cj."""
    h = linalg.as_hermitian(h0)
    for f, hc in zip(fields, controls):
        h = h + f * linalg.as_hermitian(hc)
    w, _ = linalg.eigh(h)
    return w


def nonlinearity_vs_tunneling(model, t: float, frame: EigenFrame,
                              fields: Sequence[float],
                              controls: Sequence[np.ndarray],
                              dcontrols_dt: Sequence[np.ndarray]):
    """Two-level competition at time t between the feedback nonlinearity
    |<E-| sum_j f_j H_cj |E->| and the tunneling matrix element
    |<E-| dH0/dt + sum_j f_j dH_cj/dt |E+>|."""
    if frame.dim != 2:
        raise DomainError("nonlinearity_vs_tunneling is defined for two levels")
    ground = frame.state(0)
    excited = frame.state(1)
    h_fb = np.zeros((2, 2), dtype=complex)
    delta_h = np.asarray(model.dh0_dt(t), dtype=complex)
    for f, hc, dhc in zip(fields, controls, dcontrols_dt):
        h_fb = h_fb + f * hc
        delta_h = delta_h + f * dhc
    nonlinear = abs(complex(np.vdot(ground, h_fb @ ground)))
    tunneling = abs(complex(np.vdot(ground, delta_h @ excited)))
    return nonlinear, tunneling


def rabi_oracle(model: RotatingFieldModel, t: float) -> float:
    """Exact uncontrolled fidelity F(t) for the rotating-field model with the
    system prepared in the instantaneous ground state at t = 0.

    In the frame co-rotating at omega the Hamiltonian is static with
    effective field (mu*B0 sin(theta), 0, mu*B0 cos(theta) - omega/2); the
    Bloch vector precesses about it at rate 2*Omega.
    """
    if not isinstance(model, RotatingFieldModel):
        raise DomainError("rabi_oracle requires a RotatingFieldModel")
    st, ct = math.sin(model.theta), math.cos(model.theta)
    m_hat = np.array([-st, 0.0, -ct])
    b_eff = np.array([model.mu_b0 * st, 0.0, model.mu_b0 * ct - model.omega / 2.0])
    big_omega = float(np.linalg.norm(b_eff))
    if big_omega == 0.0:
        return 1.0
    n_hat = b_eff / big_omega
    cos_a = float(n_hat @ m_hat)
    sin2_a = 1.0 - cos_a * cos_a
    return 0.5 * (1.0 + cos_a * cos_a + sin2_a * math.cos(2.0 * big_omega * t))


def rabi_oracle_min(model: RotatingFieldModel) -> float:
    """Exact minimum of the uncontrolled fidelity: cos^2(alpha)."""
    st, ct = math.sin(model.theta), math.cos(model.theta)
    b_eff = np.array([model.mu_b0 * st, 0.0, model.mu_b0 * ct - model.omega / 2.0])
    nrm = float(np.linalg.norm(b_eff))
    if nrm == 0.0:
        return 1.0
    cos_a = float((b_eff / nrm) @ np.array([-st, 0.0, -ct]))
    return cos_a * cos_a


def min_gap(model, grid: Sequence[float]):
    """Minimum of E1(t) - E0(t) over the grid and its location."""
    grid = list(grid)
    if not grid:
        raise DomainError("min_gap needs a nonempty time grid")
    best_gap, best_t = math.inf, grid[0]
    for t in grid:
        w, _ = linalg.eigh(model.h0_at(t))
        gap = float(w[1] - w[0])
        if gap < best_gap:
            best_gap, best_t = gap, t
    return best_gap, best_t


def local_gap_minima(times: Sequence[float], gaps: Sequence[float]):
    """Indices of grid-local minima (strictly smaller than both neighbors)."""
    out = []
    for i in range(1, len(gaps) - 1):
        if gaps[i] < gaps[i - 1] and gaps[i] < gaps[i + 1]:
            out.append(i)
    return out
