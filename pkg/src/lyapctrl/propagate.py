"""Fixed-step RK4 integration of the nonlinear feedback Schrodinger equation.

The control fields (and hence the total Hamiltonian) are recomputed at every
internal RK4 stage from the stage state and stage time, so the closed loop
is treated as a genuine autonomous nonlinear ODE. One trajectory is strictly
sequential (gauge chain plus the hold-last-value regularizer); distinct
trajectories share no mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import kernels, linalg
from .control import (
    ControlContext,
    ControlSample,
    SchemeAConfig,
    SchemeBConfig,
    scheme_a_combined,
    scheme_a_fields,
    scheme_b_fields,
)
from .eigenpath import EigenFrame, eigenstate_derivative, frame_at
from .errors import DomainError

SchemeConfig = Union[SchemeAConfig, SchemeBConfig, None]


@dataclass(frozen=True)
class IntegratorConfig:
    t0: float = 0.0
    t1: float = 3.0
    dt: float = 1e-3
    renormalize_every: int = 0   # 0 = never
    record_stride: int = 10

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise DomainError("t1 must exceed t0")
        if not 0 < self.dt <= (self.t1 - self.t0):
            raise DomainError("dt must be positive and at most t1 - t0")
        if self.record_stride < 1:
            raise DomainError("record_stride must be >= 1")

    def n_steps(self) -> int:
        return max(1, round((self.t1 - self.t0) / self.dt))

    def step(self) -> float:
        # uniform step that exactly tiles [t0, t1]
        return (self.t1 - self.t0) / self.n_steps()


@dataclass
class Trajectory:
    """Time-ordered record of one propagated run."""

    times: np.ndarray
    states: np.ndarray            # (n_rec, dim)
    controls: list                # ControlSample per record
    frames: list                  # EigenFrame per record
    model: object
    scheme: SchemeConfig
    max_norm_drift: float = 0.0
    renormalized: bool = False

    def __len__(self) -> int:
        return len(self.times)


def schrodinger_rhs(h_total: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """-i H psi (hbar = 1)."""
    return kernels.schrodinger_rhs(np.ascontiguousarray(h_total, dtype=complex),
                                   np.ascontiguousarray(psi, dtype=complex))


def _zero_sample(t: float) -> ControlSample:
    return ControlSample(t=t, fields=(), lyapunov=0.0, lyapunov_rate=0.0,
                         pivot_denominator=0.0)


class _StageEvaluator:
    """Builds the stage Hamiltonian (and sample) for one trajectory."""

    def __init__(self, model, scheme: SchemeConfig, ctx: ControlContext,
                 frame0: EigenFrame):
        self.model = model
        self.scheme = scheme
        self.ctx = ctx
        self.boundary_frame = frame0   # gauge-chain head, advanced per step

    def frame_for(self, t: float) -> EigenFrame:
        if t == self.boundary_frame.t:
            return self.boundary_frame
        return frame_at(self.model, t, prev=self.boundary_frame)

    def __call__(self, t: float, psi: np.ndarray):
        h0 = self.model.h0_at(t)
        s = self.scheme
        if s is None:
            return h0, _zero_sample(t)
        if isinstance(s, SchemeAConfig):
            fn = scheme_a_combined if s.combined else scheme_a_fields
            sample = fn(s, psi, h0, t=t, ctx=self.ctx)
            controls = s.resolved_controls(h0)
        else:
            fr = self.frame_for(t)
            target = fr.state(s.target_level)
            tdot = eigenstate_derivative(self.model, t, s.target_level, fr)
            sample = scheme_b_fields(s, psi, target, tdot, t=t, ctx=self.ctx)
            controls = list(s.controls)
        h = h0
        for f, hc in zip(sample.fields, controls):
            h = h + f * hc
        return h, sample

    def advance(self, t: float) -> None:
        self.boundary_frame = self.frame_for(t)


def rk4_step(model, scheme: SchemeConfig, psi: np.ndarray, t: float, dt: float,
             ctx: ControlContext | None = None,
             _evaluator: _StageEvaluator | None = None):
    """One classic RK4 step; fields recomputed at every internal stage.

    Returns (new state, beginning-of-step ControlSample).
    """
    ev = _evaluator
    if ev is None:
        ev = _StageEvaluator(model, scheme, ctx or ControlContext(),
                             frame_at(model, t))
    psi = np.ascontiguousarray(psi, dtype=complex)
    rhs = kernels.schrodinger_rhs
    h1, sample = ev(t, psi)
    k1 = rhs(np.ascontiguousarray(h1, dtype=complex), psi)
    y2 = psi + (dt / 2) * k1
    h2, _ = ev(t + dt / 2, y2)
    k2 = rhs(np.ascontiguousarray(h2, dtype=complex), y2)
    y3 = psi + (dt / 2) * k2
    h3, _ = ev(t + dt / 2, y3)
    k3 = rhs(np.ascontiguousarray(h3, dtype=complex), y3)
    y4 = psi + dt * k3
    h4, _ = ev(t + dt, y4)
    k4 = rhs(np.ascontiguousarray(h4, dtype=complex), y4)
    psi_next = psi + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi_next, sample


def propagate(model, scheme: SchemeConfig, psi0: np.ndarray,
              cfg: IntegratorConfig) -> Trajectory:
    """Integrate the (possibly nonlinear) Schrodinger equation and record the
    trajectory every `record_stride` steps, endpoints included."""
    psi = linalg.normalize(psi0)
    if len(psi) != model.dim:
        raise DomainError(f"state dim {len(psi)} != model dim {model.dim}")
    n = cfg.n_steps()
    h = cfg.step()
    ctx = ControlContext()
    frame = frame_at(model, cfg.t0)
    ev = _StageEvaluator(model, scheme, ctx, frame)
    needs_frames = isinstance(scheme, SchemeBConfig)

    times, states, samples, frames = [], [], [], []
    max_drift = 0.0
    renormalized = False

    def record(i: int, t: float, psi: np.ndarray, sample: ControlSample) -> None:
        times.append(t)
        states.append(psi.copy())
        samples.append(sample)
        frames.append(ev.boundary_frame)

    for i in range(n):
        t = cfg.t0 + i * h
        psi_next, sample = rk4_step(model, scheme, psi, t, h, _evaluator=ev)
        if i % cfg.record_stride == 0:
            record(i, t, psi, sample)
        psi = psi_next
        # advance the gauge chain with the exact next grid time so the next
        # stage-1 lookup hits the cached frame; schemes that never consult
        # the frame mid-step only need it at record times
        if needs_frames or (i + 1) % cfg.record_stride == 0 or i + 1 == n:
            ev.advance(cfg.t0 + (i + 1) * h)
        drift = abs(np.linalg.norm(psi) - 1.0)
        if drift > max_drift:
            max_drift = drift
        if cfg.renormalize_every and (i + 1) % cfg.renormalize_every == 0:
            psi = linalg.normalize(psi)
            renormalized = True

    # endpoint sample evaluated at t1 with the final state
    t1 = cfg.t0 + n * h
    _, final_sample = ev(t1, psi)
    record(n, t1, psi, final_sample)

    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        controls=samples,
        frames=frames,
        model=model,
        scheme=scheme,
        max_norm_drift=max_drift,
        renormalized=renormalized,
    )
