"""Deterministic file emission for trajectories.

Trajectory CSV: fixed header
``t,fidelity,V,gap,E_tot_0,...,f_0,...,nonlinear,tunneling,regularized,clamped``
with the energy columns sized by the model dimension and the field columns by
the control count. Floats are written as a 12-digit scientific mantissa with
an unpadded exponent (``1.000000000000e0``); flags as 0/1. The summary JSON
carries the RunReport; the optional SVG is a static single-panel line chart
of fidelity versus time.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .control import SchemeAConfig, SchemeBConfig
from .diagnostics import fidelity, nonlinearity_vs_tunneling
from .errors import DomainError
from .linalg import eigh
from .propagate import Trajectory


def format_float(x: float) -> str:
    """%.12e with the exponent stripped of padding: 1.0 -> '1.000000000000e0'."""
    x = float(x)
    if x == 0.0:
        x = 0.0  # normalize -0.0
    mantissa, exponent = f"{x:.12e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def csv_header(dim: int, n_fields: int) -> str:
    cols = ["t", "fidelity", "V", "gap"]
    cols += [f"E_tot_{k}" for k in range(dim)]
    cols += [f"f_{j}" for j in range(n_fields)]
    cols += ["nonlinear", "tunneling", "regularized", "clamped"]
    return ",".join(cols)


def _control_operators(traj: Trajectory, t: float):
    """Resolved control operators and their time derivatives at t."""
    scheme = traj.scheme
    model = traj.model
    if scheme is None:
        return [], []
    if isinstance(scheme, SchemeAConfig):
        h0 = model.h0_at(t)
        ops = scheme.resolved_controls(h0)
        dops = [
            model.dh0_dt(t) / scheme.h0_scale if isinstance(c, str)
            else np.zeros_like(h0)
            for c in scheme.controls
        ]
        return ops, dops
    ops = list(scheme.controls)
    return ops, [np.zeros_like(op) for op in ops]


def trajectory_rows(traj: Trajectory, columns: str = "basic"):
    """Yield the CSV data rows (lists of formatted cells)."""
    if len(traj) == 0:
        raise DomainError("cannot emit an empty trajectory")
    if columns not in ("basic", "full"):
        raise DomainError(f"columns must be 'basic' or 'full', got {columns!r}")
    for t, psi, sample, frame in zip(traj.times, traj.states, traj.controls,
                                     traj.frames):
        ops, dops = _control_operators(traj, t)
        h = traj.model.h0_at(t)
        for f, hc in zip(sample.fields, ops):
            h = h + f * hc
        energies, _ = eigh(h)
        gap = float(np.min(np.diff(energies))) if len(energies) > 1 else 0.0
        nonlinear = tunneling = 0.0
        if columns == "full" and traj.model.dim == 2:
            nonlinear, tunneling = nonlinearity_vs_tunneling(
                traj.model, t, frame, sample.fields, ops, dops)
        row = [format_float(t), format_float(fidelity(frame, psi)),
               format_float(sample.lyapunov), format_float(gap)]
        row += [format_float(e) for e in energies]
        row += [format_float(f) for f in sample.fields]
        row += [format_float(nonlinear), format_float(tunneling),
                str(int(sample.regularized)), str(int(sample.clamped))]
        yield row


def trajectory_csv(traj: Trajectory, columns: str = "basic") -> str:
    """The full CSV document (header plus newline-terminated rows)."""
    n_fields = len(traj.controls[0].fields) if len(traj) else 0
    lines = [csv_header(traj.model.dim, n_fields)]
    lines += [",".join(row) for row in trajectory_rows(traj, columns)]
    return "\n".join(lines) + "\n"


def states_csv(traj: Trajectory) -> str:
    """Debug dump: raw state amplitudes per record (re/im per component)."""
    dim = traj.model.dim
    cols = ["t"]
    for k in range(dim):
        cols += [f"re_{k}", f"im_{k}"]
    lines = [",".join(cols)]
    for t, psi in zip(traj.times, traj.states):
        cells = [format_float(t)]
        for k in range(dim):
            cells += [format_float(psi[k].real), format_float(psi[k].imag)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunReport:
    """Per-run summary statistics, recomputable from the trajectory CSV."""

    min_fidelity: float
    mean_fidelity: float
    final_fidelity: float
    min_gap: float
    regularized_fraction: float
    clamped_fraction: float
    wall_time_s: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def run_report(traj: Trajectory, wall_time_s: float = 0.0) -> RunReport:
    """Summarize a trajectory; statistics match the emitted CSV columns."""
    fids = []
    gaps = []
    for t, psi, sample, frame in zip(traj.times, traj.states, traj.controls,
                                     traj.frames):
        fids.append(fidelity(frame, psi))
        ops, _ = _control_operators(traj, t)
        h = traj.model.h0_at(t)
        for f, hc in zip(sample.fields, ops):
            h = h + f * hc
        energies, _ = eigh(h)
        gaps.append(float(np.min(np.diff(energies))) if len(energies) > 1 else 0.0)
    n = len(traj)
    return RunReport(
        min_fidelity=float(np.min(fids)),
        mean_fidelity=float(np.mean(fids)),
        final_fidelity=float(fids[-1]),
        min_gap=float(np.min(gaps)),
        regularized_fraction=sum(c.regularized for c in traj.controls) / n,
        clamped_fraction=sum(c.clamped for c in traj.controls) / n,
        wall_time_s=wall_time_s,
    )


def fidelity_svg(times, fidelities, width: int = 640, height: int = 400) -> str:
    """Static SVG 1.1 line chart of fidelity versus time (fixed 0..1 y-axis)."""
    times = np.asarray(times, dtype=float)
    fids = np.asarray(fidelities, dtype=float)
    if len(times) < 2:
        raise DomainError("SVG chart needs at least two samples")
    ml, mr, mt, mb = 50, 15, 15, 40
    pw, ph = width - ml - mr, height - mt - mb
    t0, t1 = float(times[0]), float(times[-1])
    span = t1 - t0 if t1 > t0 else 1.0

    def px(t):
        return ml + pw * (t - t0) / span

    def py(v):
        return mt + ph * (1.0 - min(max(v, 0.0), 1.0))

    pts = " ".join(f"{px(t):.2f},{py(v):.2f}" for t, v in zip(times, fids))
    yticks = "".join(
        f'<line x1="{ml}" y1="{py(v):.2f}" x2="{ml - 5}" y2="{py(v):.2f}" '
        f'stroke="black"/>'
        f'<text x="{ml - 8}" y="{py(v) + 4:.2f}" text-anchor="end" '
        f'font-size="11">{v:.1f}</text>'
        for v in (0.0, 0.25, 0.5, 0.75, 1.0)
    )
    n_xticks = 4
    xticks = "".join(
        f'<line x1="{px(t):.2f}" y1="{mt + ph}" x2="{px(t):.2f}" '
        f'y2="{mt + ph + 5}" stroke="black"/>'
        f'<text x="{px(t):.2f}" y="{mt + ph + 18}" text-anchor="middle" '
        f'font-size="11">{t:g}</text>'
        for t in (t0 + span * k / n_xticks for k in range(n_xticks + 1))
    )
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n'
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="black"/>\n'
        f"{yticks}{xticks}\n"
        f'<text x="{ml + pw / 2:.0f}" y="{height - 8}" text-anchor="middle" '
        f'font-size="12">t</text>\n'
        f'<text x="14" y="{mt + ph / 2:.0f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 14 {mt + ph / 2:.0f})">'
        f'fidelity</text>\n'
        f'<polyline points="{pts}" fill="none" stroke="#1f5fa8" '
        f'stroke-width="1.5"/>\n'
        "</svg>\n"
    )
