"""Time-dependent Hamiltonian models.

Three variants share the informal interface `dim`, `h0_at(t)`, `dh0_dt(t)`,
`t_range()`:

* RotatingFieldModel -- a spin-1/2 in a rotating magnetic field of constant
  polar angle; energy unit is mu*B0 (hbar = 1 throughout the package).
* InterpolatedModel  -- annealing-style interpolation (1-lambda) H_i + lambda H_f
  with a named monotone schedule.
* TabulatedModel     -- piecewise-linear interpolation of time-stamped matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .linalg import PAULI_X, PAULI_Y, as_hermitian, pauli_combo

_T_SLACK = 1e-12


@dataclass(frozen=True)
class RotatingFieldModel:
    """H0(t) = mu*B0 (sin(theta)cos(phi) sx + sin(theta)sin(phi) sy + cos(theta) sz),
    phi = omega*t."""

    mu_b0: float = 1.0
    theta: float = math.pi / 4
    omega: float = 4.0

    def __post_init__(self):
        if not self.mu_b0 > 0:
            raise DomainError(f"mu_b0 must be positive, got {self.mu_b0}")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")
        if not math.isfinite(self.omega):
            raise DomainError("omega must be finite")

    @property
    def dim(self) -> int:
        return 2

    def t_range(self):
        return (-math.inf, math.inf)

    def h0_at(self, t: float) -> np.ndarray:
        phi = self.omega * t
        st = math.sin(self.theta)
        return self.mu_b0 * pauli_combo(
            st * math.cos(phi), st * math.sin(phi), math.cos(self.theta)
        )

    def dh0_dt(self, t: float) -> np.ndarray:
        phi = self.omega * t
        pref = self.mu_b0 * self.omega * math.sin(self.theta)
        return pref * (-math.sin(phi) * PAULI_X + math.cos(phi) * PAULI_Y)

    def control_direction(self, t: float) -> np.ndarray:
        """H0(t)/(mu*B0): the commuting control operator of the two-level example."""
        return self.h0_at(t) / self.mu_b0


def _schedule_linear(u: float):
    return u, 1.0


def _schedule_smoothstep(u: float):
    return u * u * (3.0 - 2.0 * u), 6.0 * u * (1.0 - u)


@dataclass(frozen=True)
class PolylineSchedule:
    """User schedule as (t/T, lambda) knots; linear between knots,
    right-sided derivative at interior knots."""

    knots: tuple  # ((u0, l0), (u1, l1), ...)

    def __post_init__(self):
        ks = tuple((float(u), float(l)) for u, l in self.knots)
        object.__setattr__(self, "knots", ks)
        if len(ks) < 2:
            raise DomainError("polyline schedule needs at least two knots")
        us = [u for u, _ in ks]
        ls = [l for _, l in ks]
        if abs(us[0]) > _T_SLACK or abs(us[-1] - 1.0) > _T_SLACK:
            raise DomainError("polyline schedule must span u in [0, 1]")
        if any(b <= a for a, b in zip(us, us[1:])):
            raise DomainError("polyline knot times must strictly increase")
        if abs(ls[0]) > _T_SLACK or abs(ls[-1] - 1.0) > _T_SLACK:
            raise DomainError("polyline schedule must map 0 -> 0 and 1 -> 1")
        if any(b < a for a, b in zip(ls, ls[1:])):
            raise DomainError("polyline schedule must be monotone nondecreasing")

    def __call__(self, u: float):
        us = [k[0] for k in self.knots]
        i = min(max(np.searchsorted(us, u, side="right") - 1, 0), len(us) - 2)
        (u0, l0), (u1, l1) = self.knots[i], self.knots[i + 1]
        slope = (l1 - l0) / (u1 - u0)
        return l0 + slope * (u - u0), slope


_NAMED_SCHEDULES = {"linear": _schedule_linear, "smoothstep": _schedule_smoothstep}


@dataclass(frozen=True)
class InterpolatedModel:
    """H0(t) = (1 - lambda(t)) H_i + lambda(t) H_f over t in [0, T]."""

    h_i: np.ndarray
    h_f: np.ndarray
    total_time: float
    schedule: object = "linear"  # name or PolylineSchedule

    def __post_init__(self):
        object.__setattr__(self, "h_i", as_hermitian(self.h_i))
        object.__setattr__(self, "h_f", as_hermitian(self.h_f))
        if self.h_i.shape != self.h_f.shape:
            raise DomainError(
                f"h_i and h_f dims differ: {self.h_i.shape[0]} vs {self.h_f.shape[0]}"
            )
        if not self.total_time > 0:
            raise DomainError("total_time must be positive")
        if isinstance(self.schedule, str) and self.schedule not in _NAMED_SCHEDULES:
            raise DomainError(f"unknown schedule {self.schedule!r}")

    @property
    def dim(self) -> int:
        return self.h_i.shape[0]

    def t_range(self):
        return (0.0, self.total_time)

    def _check_t(self, t: float) -> None:
        if t < -_T_SLACK or t > self.total_time + _T_SLACK:
            raise DomainError(f"t={t:g} outside [0, {self.total_time:g}]")

    def schedule_eval(self, t: float):
        """Return (lambda, d lambda / dt) at time t."""
        self._check_t(t)
        u = min(max(t / self.total_time, 0.0), 1.0)
        fn = _NAMED_SCHEDULES.get(self.schedule, self.schedule)
        lam, dlam_du = fn(u)
        return lam, dlam_du / self.total_time

    def h0_at(self, t: float) -> np.ndarray:
        lam, _ = self.schedule_eval(t)
        return (1.0 - lam) * self.h_i + lam * self.h_f

    def dh0_dt(self, t: float) -> np.ndarray:
        _, dlam = self.schedule_eval(t)
        return dlam * (self.h_f - self.h_i)


@dataclass(frozen=True)
class TabulatedModel:
    """Piecewise-linear interpolation of a time-stamped operator list.

    Interpolated matrices are re-Hermitized as (A + A^H)/2 to guard against
    asymmetric input files; the derivative is the segment slope.
    """

    times: np.ndarray
    matrices: np.ndarray  # shape (n_times, dim, dim)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        mats = np.asarray(self.matrices, dtype=complex)
        if times.ndim != 1 or len(times) < 2:
            raise DomainError("tabulated model needs at least two time samples")
        if np.any(np.diff(times) <= 0):
            raise DomainError("tabulated times must strictly increase")
        if mats.shape[0] != len(times) or mats.shape[1] != mats.shape[2]:
            raise DomainError(f"bad tabulated matrices shape {mats.shape}")
        mats = 0.5 * (mats + np.conj(np.transpose(mats, (0, 2, 1))))
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def from_json(cls, doc) -> "TabulatedModel":
        """Build from {"times": [...], "matrices": [[[re, im], ...], ...]}."""
        if isinstance(doc, str):
            with open(doc) as fh:
                doc = json.load(fh)
        times = doc["times"]
        raw = np.asarray(doc["matrices"], dtype=float)
        if raw.ndim != 4 or raw.shape[-1] != 2:
            raise DomainError("matrices must be nested [re, im] pairs")
        return cls(times, raw[..., 0] + 1j * raw[..., 1])

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def t_range(self):
        return (float(self.times[0]), float(self.times[-1]))

    def _segment(self, t: float) -> int:
        if t < self.times[0] - _T_SLACK or t > self.times[-1] + _T_SLACK:
            raise DomainError(
                f"t={t:g} outside tabulated range [{self.times[0]:g}, {self.times[-1]:g}]"
            )
        return int(min(max(np.searchsorted(self.times, t, side="right") - 1, 0),
                       len(self.times) - 2))

    def h0_at(self, t: float) -> np.ndarray:
        i = self._segment(t)
        t0, t1 = self.times[i], self.times[i + 1]
        w = (t - t0) / (t1 - t0)
        m = (1.0 - w) * self.matrices[i] + w * self.matrices[i + 1]
        return 0.5 * (m + m.conj().T)

    def dh0_dt(self, t: float) -> np.ndarray:
        i = self._segment(t)
        t0, t1 = self.times[i], self.times[i + 1]
        return (self.matrices[i + 1] - self.matrices[i]) / (t1 - t0)


def fig1_model() -> RotatingFieldModel:
    """The figure preset: mu*B0 = 1, omega = 4, theta = pi/4."""
    return RotatingFieldModel(mu_b0=1.0, theta=math.pi / 4, omega=4.0)
