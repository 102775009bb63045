"""Feedback control field synthesis and Lyapunov bookkeeping.

Scheme A drives V = <X>^2 with commuting control operators; scheme B drives
V = 1 - |<target|psi>|^2 toward a tracked instantaneous eigenstate. Both
schemes have one pivot channel whose denominator can vanish; below the
`epsilon` threshold the pivot field is held at its last valid value and the
sample is flagged `regularized`. All fields are clamped to +/- f_max and
flagged `clamped` when the clamp bites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DomainError

H0_CONTROL = "h0"  # sentinel: control operator tracks H0(t)/h0_scale


@dataclass(frozen=True)
class SchemeAConfig:
    x_op: np.ndarray
    controls: tuple = (H0_CONTROL,)
    pivot: int = 0
    sign: int = -1           # multiplier on the non-pivot feedback term;
                             # -1 makes dV/dt <= 0, +1 is the figure preset
    epsilon: float = 1e-6
    f_max: float = 1e3
    combined: bool = False   # single-control combined field form
    h0_scale: float = 1.0    # resolves the "h0" sentinel as H0(t)/h0_scale
    strict: bool = False     # require [H0, H_cj] = 0 at sampled times

    def __post_init__(self):
        object.__setattr__(self, "x_op", linalg.as_hermitian(self.x_op))
        object.__setattr__(
            self,
            "controls",
            tuple(
                c if isinstance(c, str) else linalg.as_hermitian(c)
                for c in self.controls
            ),
        )
        if not 0 <= self.pivot < len(self.controls):
            raise DomainError(
                f"pivot {self.pivot} out of range for {len(self.controls)} controls"
            )
        if self.sign not in (-1, 1):
            raise DomainError(f"sign must be +1 or -1, got {self.sign}")
        if self.combined and len(self.controls) != 1:
            raise DomainError("combined mode requires exactly one control operator")

    def resolved_controls(self, h0: np.ndarray) -> list:
        return [
            h0 / self.h0_scale if isinstance(c, str) else c for c in self.controls
        ]


@dataclass(frozen=True)
class SchemeBConfig:
    controls: tuple
    pivot: int = 0
    target_level: int = 0
    epsilon: float = 1e-6
    f_max: float = 1e3

    def __post_init__(self):
        object.__setattr__(
            self, "controls", tuple(linalg.as_hermitian(c) for c in self.controls)
        )
        if not 0 <= self.pivot < len(self.controls):
            raise DomainError(
                f"pivot {self.pivot} out of range for {len(self.controls)} controls"
            )


@dataclass(frozen=True)
class ControlSample:
    """Control fields and Lyapunov bookkeeping at one instant."""

    t: float
    fields: tuple
    lyapunov: float
    lyapunov_rate: float
    pivot_denominator: float
    regularized: bool = False
    clamped: bool = False


@dataclass
class ControlContext:
    """Per-trajectory mutable state: the held pivot value for regularization.

    Never shared between trajectories.
    """

    held_pivot: float = 0.0


ZERO_SAMPLE_FIELDS = ()


def _proportionality(h0: np.ndarray, hc: np.ndarray, tol: float = 1e-9):
    """Return c with h0 = c * hc (within tol, entrywise) or None."""
    num = np.vdot(hc, h0)
    den = np.vdot(hc, hc).real
    if den <= 0:
        return None
    c = num / den
    if abs(c.imag) > tol:
        return None
    c = c.real
    if np.max(np.abs(h0 - c * hc)) > tol:
        return None
    return c


def _check_commuting(h0: np.ndarray, controls: Sequence[np.ndarray],
                     tol: float = 1e-10) -> None:
    for j, hc in enumerate(controls):
        dev = float(np.max(np.abs(h0 @ hc - hc @ h0)))
        if dev > tol:
            raise DomainError(
                f"control {j} does not commute with H0 (|[H0, Hc]| = {dev:.3e})"
            )


def _effective_pivot(cfg, dens: Sequence[float], analytic: Sequence) -> int:
    """Re-pivot to another control when the configured pivot's denominator is
    below epsilon but some other channel's is not. Channels with an analytic
    (proportional) pivot value never need re-pivoting."""
    p = cfg.pivot
    if analytic[p] is not None or abs(dens[p]) >= cfg.epsilon:
        return p
    candidates = [j for j in range(len(dens)) if j != p and abs(dens[j]) >= cfg.epsilon]
    if candidates:
        return max(candidates, key=lambda j: abs(dens[j]))
    return p


def _clamp(fields: list, f_max: float):
    clamped = False
    out = []
    for f in fields:
        if f > f_max:
            f, clamped = f_max, True
        elif f < -f_max:
            f, clamped = -f_max, True
        out.append(f)
    return out, clamped


def scheme_a_fields(
    cfg: SchemeAConfig,
    psi: np.ndarray,
    h0: np.ndarray,
    t: float = 0.0,
    ctx: ControlContext | None = None,
) -> ControlSample:
    """Scheme A feedback fields: non-pivot channels carry
    sign * i <X> <[H_cj, X]>, the pivot cancels the drift via
    -<[H0, X]> / <[H_cj0, X]> (evaluated analytically when H0 is proportional
    to the pivot control, which is the 0/0 case at an eigenstate)."""
    psi = linalg.normalize(psi)
    controls = cfg.resolved_controls(h0)
    if cfg.strict:
        _check_commuting(h0, controls)
    x = cfg.x_op
    ex = np.vdot(psi, x @ psi).real
    dens = [np.vdot(psi, (hc @ x - x @ hc) @ psi).imag for hc in controls]
    # the "h0" sentinel is proportional to H0 by construction
    analytic = [
        cfg.h0_scale if isinstance(c, str) else _proportionality(h0, hc)
        for c, hc in zip(cfg.controls, controls)
    ]

    p = _effective_pivot(cfg, dens, analytic)
    regularized = False
    fields = [0.0] * len(controls)
    for j, hc in enumerate(controls):
        if j == p:
            continue
        # i <X> <[Hc, X]> with <[Hc,X]> = i*dens[j]  ->  -<X>*dens[j]
        fields[j] = cfg.sign * (-ex * dens[j])
    if analytic[p] is not None:
        fields[p] = -analytic[p]
        if ctx is not None:
            ctx.held_pivot = fields[p]
    elif abs(dens[p]) >= cfg.epsilon:
        num = np.vdot(psi, (h0 @ x - x @ h0) @ psi).imag
        fields[p] = -num / dens[p]
        if ctx is not None:
            ctx.held_pivot = fields[p]
    else:
        fields[p] = ctx.held_pivot if ctx is not None else 0.0
        regularized = True

    fields, clamped = _clamp(fields, cfg.f_max)
    h_total = h0 + sum(f * hc for f, hc in zip(fields, controls))
    rate = _rate_a(x, ex, psi, h_total)
    return ControlSample(
        t=t,
        fields=tuple(fields),
        lyapunov=ex * ex,
        lyapunov_rate=rate,
        pivot_denominator=dens[p],
        regularized=regularized,
        clamped=clamped,
    )


def scheme_a_combined(
    cfg: SchemeAConfig,
    psi: np.ndarray,
    h0: np.ndarray,
    t: float = 0.0,
    ctx: ControlContext | None = None,
) -> ControlSample:
    """Single-control combined field f = sign * i <X> <[Hc, X]> - <[H0, X]> / <[Hc, X]>.

    When H0 = c * Hc the ratio term reduces to the constant c, making the
    field singularity-free (the two-level rotating example with c = mu*B0).
    """
    if len(cfg.controls) != 1:
        raise DomainError("combined field requires exactly one control operator")
    psi = linalg.normalize(psi)
    if isinstance(cfg.controls[0], str):
        hc = h0 * (1.0 / cfg.h0_scale)
        c = cfg.h0_scale
    else:
        hc = cfg.controls[0]
        c = _proportionality(h0, hc)
    if cfg.strict:
        _check_commuting(h0, [hc])
    x = cfg.x_op
    ex = np.vdot(psi, x @ psi).real
    den = np.vdot(psi, (hc @ x - x @ hc) @ psi).imag
    term1 = cfg.sign * (-ex * den)

    regularized = False
    if c is not None:
        term2 = -c
        if ctx is not None:
            ctx.held_pivot = term2
    elif abs(den) >= cfg.epsilon:
        num = np.vdot(psi, (h0 @ x - x @ h0) @ psi).imag
        term2 = -num / den
        if ctx is not None:
            ctx.held_pivot = term2
    else:
        term2 = ctx.held_pivot if ctx is not None else 0.0
        regularized = True

    fields, clamped = _clamp([term1 + term2], cfg.f_max)
    h_total = h0 + fields[0] * hc
    rate = _rate_a(x, ex, psi, h_total)
    return ControlSample(
        t=t,
        fields=tuple(fields),
        lyapunov=ex * ex,
        lyapunov_rate=rate,
        pivot_denominator=den,
        regularized=regularized,
        clamped=clamped,
    )


def scheme_b_fields(
    cfg: SchemeBConfig,
    psi: np.ndarray,
    target: np.ndarray,
    target_dot: np.ndarray,
    t: float = 0.0,
    ctx: ControlContext | None = None,
) -> ControlSample:
    """Scheme B feedback fields toward a tracked eigenstate.

    Non-pivot: f_j = -2 Im(<psi|H'_cj|0><0|psi>); pivot:
    f_j0 = -Re(<0dot|psi><psi|0>) / Im(<0|H'_cj0|psi><psi|0>) with hbar = 1.
    All outputs are invariant under regauging of (target, target_dot).
    """
    psi = linalg.normalize(psi)
    target = linalg.normalize(target)
    ov = complex(np.vdot(target, psi))                    # <0|psi>
    zs = [complex(np.vdot(psi, hc @ target)) * ov for hc in cfg.controls]
    dens = [-z.imag for z in zs]  # Im(<0|H'|psi><psi|0>) = -Im z
    num = (complex(np.vdot(target_dot, psi)) * np.conj(ov)).real

    p = _effective_pivot(cfg, dens, [None] * len(dens))
    regularized = False
    fields = [0.0] * len(cfg.controls)
    for j in range(len(cfg.controls)):
        if j == p:
            continue
        fields[j] = -2.0 * zs[j].imag
    if abs(dens[p]) >= cfg.epsilon:
        fields[p] = -num / dens[p]
        if ctx is not None:
            ctx.held_pivot = fields[p]
    else:
        fields[p] = ctx.held_pivot if ctx is not None else 0.0
        regularized = True

    fields, clamped = _clamp(fields, cfg.f_max)
    v = 1.0 - abs(ov) ** 2
    rate = _rate_b(fields, zs, num)
    return ControlSample(
        t=t,
        fields=tuple(fields),
        lyapunov=v,
        lyapunov_rate=rate,
        pivot_denominator=dens[p],
        regularized=regularized,
        clamped=clamped,
    )


def _rate_a(x: np.ndarray, ex: float, psi: np.ndarray, h_total: np.ndarray) -> float:
    """dV/dt = 2i <X> <[H, X]> with hbar = 1."""
    comm = np.vdot(psi, (h_total @ x - x @ h_total) @ psi)
    return (2j * ex * comm).real


def _rate_b(fields: Sequence[float], zs: Sequence[complex], num: float) -> float:
    """dV/dt = 2 sum_j f_j Im z_j - 2 Re(<0dot|psi><psi|0>) with hbar = 1,
    z_j = <psi|H'_cj|0><0|psi>."""
    return 2.0 * sum(f * z.imag for f, z in zip(fields, zs)) - 2.0 * num


def lyapunov_value(cfg, psi: np.ndarray, target: np.ndarray | None = None) -> float:
    """V = <X>^2 for scheme A; V = 1 - |<target|psi>|^2 for scheme B."""
    psi = linalg.normalize(psi)
    if isinstance(cfg, SchemeAConfig):
        return linalg.expectation(cfg.x_op, psi) ** 2
    if isinstance(cfg, SchemeBConfig):
        if target is None:
            raise DomainError("scheme B Lyapunov value needs the target state")
        return 1.0 - abs(complex(np.vdot(linalg.normalize(target), psi))) ** 2
    raise DomainError(f"unknown scheme config {type(cfg).__name__}")


def lyapunov_rate(
    cfg,
    psi: np.ndarray,
    h_total: np.ndarray | None = None,
    target: np.ndarray | None = None,
    target_dot: np.ndarray | None = None,
    fields: Sequence[float] | None = None,
) -> float:
    """Analytic dV/dt for either scheme.

    Scheme A needs the assembled total Hamiltonian; scheme B needs the
    target, its derivative, and the current fields.
    """
    psi = linalg.normalize(psi)
    if isinstance(cfg, SchemeAConfig):
        if h_total is None:
            raise DomainError("scheme A rate needs the total Hamiltonian")
        return _rate_a(cfg.x_op, linalg.expectation(cfg.x_op, psi), psi, h_total)
    if isinstance(cfg, SchemeBConfig):
        if target is None or target_dot is None or fields is None:
            raise DomainError("scheme B rate needs target, target_dot and fields")
        ov = complex(np.vdot(target, psi))
        zs = [complex(np.vdot(psi, hc @ target)) * ov for hc in cfg.controls]
        num = (complex(np.vdot(target_dot, psi)) * np.conj(ov)).real
        return _rate_b(fields, zs, num)
    raise DomainError(f"unknown scheme config {type(cfg).__name__}")
