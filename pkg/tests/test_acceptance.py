"""Acceptance gate: one test per release criterion, each printing a single
PASS/FAIL line with the measured numbers.

The criterion 7 ratio sub-check is currently expected to fail on the stock
feedback preset: over the short run window the closed loop has not yet
developed the near-degenerate avoided crossings at which the feedback term
dominates the drive-induced coupling (the ratios at the two shallow gap
minima are below 1). The check is asserted literally rather than weakened;
see the printed diagnostics for the measured ratios and the gap-enlargement
fraction, which does hold.
"""

import json
import re
import time

import numpy as np
import pytest

from lyapctrl import linalg
from lyapctrl.cli import execute_run
from lyapctrl.control import (
    ControlContext,
    SchemeAConfig,
    SchemeBConfig,
    lyapunov_rate,
    scheme_a_fields,
    scheme_b_fields,
)
from lyapctrl.diagnostics import (
    fidelity,
    local_gap_minima,
    nonlinearity_vs_tunneling,
    rabi_oracle,
    rabi_oracle_min,
)
from lyapctrl.eigenpath import eigenstate_derivative, frame_at
from lyapctrl.models import fig1_model
from lyapctrl.output import csv_header
from lyapctrl.presets import preset
from lyapctrl.propagate import IntegratorConfig, propagate
from lyapctrl.scenario import parse_scenario


def _check(label: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'} {label}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def _run(scenario):
    """Propagate one sweep-free scenario; returns (model, trajectory, wall_s)."""
    model = scenario.build_model()
    scheme = scenario.build_scheme()
    cfg = scenario.build_integrator()
    psi0 = scenario.build_initial_state(model)
    start = time.perf_counter()
    traj = propagate(model, scheme, psi0, cfg)
    return model, traj, time.perf_counter() - start


def _with_spec(scenario, **sections):
    spec = json.loads(scenario.echo())
    for key, overrides in sections.items():
        spec[key] = {**spec.get(key, {}), **overrides}
    return parse_scenario(json.dumps(spec))


def _fidelities(traj):
    return np.array([fidelity(fr, st)
                     for fr, st in zip(traj.frames, traj.states)])


@pytest.fixture(scope="module")
def baseline():
    return _run(preset("fig1_baseline"))


@pytest.fixture(scope="module")
def feedback_sweep():
    """Closed-loop feedback runs at ratio R in {0, 3, 6, 9, 12} (one timer)."""
    names = {0: "fig1_e", 3: "fig1_d", 6: "fig1_c", 9: "fig1_b", 12: "fig1_a"}
    start = time.perf_counter()
    runs = {ratio: _run(preset(name)) for ratio, name in names.items()}
    return runs, time.perf_counter() - start


@pytest.fixture(scope="module")
def tracking_runs():
    """Eigenstate-tracking runs at mixing ratio r in {2, 4, 6, 8}."""
    names = {2: "fig2_b", 4: "fig2_c", 6: "fig2_d", 8: "fig2_e"}
    return {ratio: _run(preset(name)) for ratio, name in names.items()}


def test_criterion_01_uncontrolled_matches_oracle(baseline):
    model, traj, wall = baseline
    fids = _fidelities(traj)
    oracle = np.array([rabi_oracle(model, t) for t in traj.times])
    err = float(np.max(np.abs(fids - oracle)))
    _check("criterion 1: uncontrolled run matches the closed-form oracle",
           err <= 1e-6 and wall < 1.0,
           f"max |F - oracle| = {err:.3e}, wall {wall:.2f}s")


def test_criterion_02_fidelity_dip_depth(baseline):
    model, traj, _ = baseline
    sim_min = float(np.min(_fidelities(traj)))
    derived = rabi_oracle_min(model)
    _check("criterion 2: minimum uncontrolled fidelity equals the derived dip",
           abs(sim_min - derived) <= 1e-3,
           f"simulated {sim_min:.6f}, derived {derived:.6f}")


def test_criterion_03_initial_field_pin(feedback_sweep):
    runs, _ = feedback_sweep
    _, traj, _ = runs[12]
    f0 = traj.controls[0].fields[0]
    m = fig1_model()
    psi0 = frame_at(m, 0.0).state(0)
    cfg = SchemeAConfig(x_op=linalg.pauli_combo(1, 0, 12, 0),
                        controls=("h0", np.eye(2, dtype=complex)))
    sample = scheme_a_fields(cfg, psi0, m.h0_at(0.0), t=0.0)
    nonpivot = sample.fields[1]
    _check("criterion 3: combined field starts at -1, non-pivot field at 0",
           abs(f0 + 1.0) <= 1e-12 and abs(nonpivot) <= 1e-12,
           f"f(0) = {f0:.2e}, non-pivot f(0) = {nonpivot:.2e}")


def test_criterion_04_feedback_ratio_ordering(baseline, feedback_sweep):
    runs, wall = feedback_sweep
    model, _, _ = baseline
    means = {ratio: float(np.mean(_fidelities(traj)))
             for ratio, (_, traj, _) in runs.items()}
    ratios = sorted(means)
    monotone = all(means[b] - means[a] >= -1e-3
                   for a, b in zip(ratios, ratios[1:]))
    derived_uncontrolled = (1.0 + rabi_oracle_min(model)) / 2.0
    margin = means[12] - derived_uncontrolled
    table = ", ".join(f"R={r}: {means[r]:.4f}" for r in ratios)
    _check("criterion 4: mean fidelity is monotone in the feedback ratio",
           monotone and margin >= 0.2 and wall < 5.0,
           f"{table}; margin over uncontrolled {margin:.3f}, wall {wall:.2f}s")


def test_criterion_05_tracking_lyapunov_contract(rng):
    # step-resolved run: record every integration step so the monotonicity
    # clause sees every V(t) -> V(t+dt) pair
    scenario = _with_spec(preset("fig2_e"), integrator={"record_stride": 1})
    _, traj, _ = _run(scenario)
    clean_pairs = 0
    violations = 0
    for a, b in zip(traj.controls, traj.controls[1:]):
        if a.regularized or a.clamped or b.regularized or b.clamped:
            continue
        clean_pairs += 1
        if b.lyapunov > a.lyapunov + 1e-6:
            violations += 1
    # analytic rate property at 1000 random configurations
    controls = (linalg.pauli_combo(8, 0, 1, 0), linalg.pauli_combo(0, 0, 1, 0))
    cfg = SchemeBConfig(controls=controls, pivot=1, epsilon=1e-12)
    worst = -np.inf
    checked = 0
    for _ in range(1000):
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        target = rng.normal(size=2) + 1j * rng.normal(size=2)
        target /= np.linalg.norm(target)
        target_dot = rng.normal(size=2) + 1j * rng.normal(size=2)
        sample = scheme_b_fields(cfg, psi, target, target_dot)
        if sample.regularized or sample.clamped:
            continue
        rate = lyapunov_rate(cfg, psi, target=target, target_dot=target_dot,
                             fields=sample.fields)
        worst = max(worst, rate)
        checked += 1
    _check("criterion 5: tracking-scheme Lyapunov function never increases",
           violations == 0 and checked > 900 and worst <= 1e-12,
           f"{clean_pairs} unflagged step pairs, {violations} violations; "
           f"analytic rate at {checked} random states, worst {worst:.2e}")


def test_criterion_06_tracking_beats_uncontrolled(baseline, tracking_runs):
    _, base_traj, _ = baseline
    base_mean = float(np.mean(_fidelities(base_traj)))
    rows = []
    ok = True
    for ratio, (_, traj, _) in sorted(tracking_runs.items()):
        fids = _fidelities(traj)
        mean = float(np.mean(fids))
        rows.append(f"r={ratio}: mean {mean:.4f}, final {fids[-1]:.4f}")
        ok = ok and mean >= base_mean
    _check("criterion 6: tracking control beats the uncontrolled mean fidelity",
           ok, f"uncontrolled mean {base_mean:.4f}; " + "; ".join(rows))


def test_criterion_07_feedback_gap_diagnostics(feedback_sweep):
    runs, _ = feedback_sweep
    model, traj, _ = runs[12]
    gaps = []
    ratios = []
    for t, sample, frame in zip(traj.times, traj.controls, traj.frames):
        h0 = model.h0_at(t)
        f = sample.fields[0]
        energies, _ = linalg.eigh(h0 + f * h0)
        gaps.append(float(energies[1] - energies[0]))
        nl, tun = nonlinearity_vs_tunneling(
            model, t, frame, sample.fields, [h0], [model.dh0_dt(t)])
        ratios.append(nl / tun if tun > 0 else np.inf)
    uncontrolled_gap = 2.0 * model.mu_b0
    enlarged = float(np.mean(np.asarray(gaps) > uncontrolled_gap))
    minima = local_gap_minima(traj.times, gaps)
    at_minima = [(traj.times[i], gaps[i], ratios[i]) for i in minima]
    detail = "; ".join(f"t={t:.3f}: gap {g:.3f}, ratio {r:.3f}"
                       for t, g, r in at_minima)
    _check("criterion 7: feedback term dominates tunneling at every gap minimum",
           bool(at_minima) and all(r > 1.0 for _, _, r in at_minima),
           f"gap > {uncontrolled_gap:g} at {enlarged:.1%} of samples; {detail}")


def test_criterion_08_numerical_hygiene(baseline, feedback_sweep, tracking_runs):
    drifts = [baseline[1].max_norm_drift]
    drifts += [traj.max_norm_drift for _, traj, _ in feedback_sweep[0].values()]
    drifts += [traj.max_norm_drift for _, traj, _ in tracking_runs.values()]
    worst_drift = max(drifts)

    m = fig1_model()
    psi0 = frame_at(m, 0.0).state(0)
    sc = SchemeAConfig(x_op=linalg.pauli_combo(1, 0, 12, 0), combined=True,
                       sign=1)

    def final(dt):
        cfg = IntegratorConfig(t0=0.0, t1=0.1, dt=dt, record_stride=10 ** 9)
        return propagate(m, sc, psi0, cfg).states[-1]

    ref = final(1e-6)
    e1 = np.max(np.abs(final(2e-3) - ref))
    e2 = np.max(np.abs(final(1e-3) - ref))
    order = float(np.log2(e1 / e2))
    _check("criterion 8: norm drift bounded and integrator is fourth order",
           worst_drift <= 1e-9 and 3.7 <= order <= 4.3,
           f"worst drift {worst_drift:.2e}, order {order:.3f}")


def test_criterion_09_gauge_invariance(rng):
    m = fig1_model()
    controls = (linalg.pauli_combo(8, 0, 1, 0), linalg.pauli_combo(0, 0, 1, 0))
    cfg = SchemeBConfig(controls=controls, pivot=1, epsilon=1e-9)
    t = 0.9
    frame = frame_at(m, t)
    target = frame.state(0)
    target_dot = eigenstate_derivative(m, t, 0, frame)
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    ref_sample = scheme_b_fields(cfg, psi, target, target_dot)
    ref_fid = fidelity(frame, psi)
    worst = 0.0
    for _ in range(100):
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=2))
        regauged = frame.__class__(t=frame.t, energies=frame.energies,
                                   states=frame.states * phases)
        sample = scheme_b_fields(cfg, psi, phases[0] * target,
                                 phases[0] * target_dot)
        for f_ref, f_new in zip(ref_sample.fields, sample.fields):
            worst = max(worst, abs(f_ref - f_new))
        worst = max(worst, abs(fidelity(regauged, psi) - ref_fid))
    _check("criterion 9: fields and fidelity are gauge invariant",
           worst < 1e-10, f"worst change over 100 regaugings {worst:.2e}")


def test_criterion_10_determinism_and_format(tmp_path):
    a = execute_run(preset("fig1_a"), tmp_path / "a")
    execute_run(preset("fig1_a"), tmp_path / "b")
    csv_a = (tmp_path / "a" / "trajectory.csv").read_bytes()
    csv_b = (tmp_path / "b" / "trajectory.csv").read_bytes()
    identical = csv_a == csv_b
    lines = csv_a.decode().splitlines()
    header_ok = lines[0] == csv_header(dim=2, n_fields=1) == (
        "t,fidelity,V,gap,E_tot_0,E_tot_1,f_0,"
        "nonlinear,tunneling,regularized,clamped")
    float_re = re.compile(r"^-?\d\.\d{12}e-?\d+$")
    cells_ok = all(
        float_re.match(cell)
        for line in lines[1:]
        for cell in line.split(",")[:-2]
    ) and all(line.split(",")[-2] in "01" and line.split(",")[-1] in "01"
              for line in lines[1:])
    _check("criterion 10: reruns are byte-identical and the CSV format is exact",
           identical and header_ok and cells_ok and a.min_fidelity > 0.0,
           f"{len(lines) - 1} rows, header and cell format verified")
