import json
import math

import numpy as np
import pytest

from lyapctrl import linalg
from lyapctrl.errors import DomainError
from lyapctrl.models import (
    InterpolatedModel,
    PolylineSchedule,
    RotatingFieldModel,
    TabulatedModel,
    fig1_model,
)

PAULI_X, PAULI_Y, PAULI_Z = linalg.PAULI_X, linalg.PAULI_Y, linalg.PAULI_Z


def _fd_derivative(model, t, h=1e-6):
    return (model.h0_at(t + h) - model.h0_at(t - h)) / (2 * h)


def test_rotating_field_components():
    m = fig1_model()
    assert m.dim == 2
    h0 = m.h0_at(0.0)
    st, ct = math.sin(m.theta), math.cos(m.theta)
    assert np.allclose(h0, st * PAULI_X + ct * PAULI_Z, atol=1e-15)
    # constant field magnitude: eigenvalues always +/- mu*B0
    for t in (0.0, 0.3, 1.7, -2.0):
        w = np.linalg.eigvalsh(m.h0_at(t))
        assert np.allclose(w, [-1.0, 1.0], atol=1e-14)


def test_rotating_field_derivative_matches_fd():
    m = RotatingFieldModel(mu_b0=1.5, theta=0.9, omega=2.3)
    for t in (0.0, 0.4, 2.2):
        assert np.max(np.abs(m.dh0_dt(t) - _fd_derivative(m, t))) < 1e-8


def test_rotating_field_validation():
    with pytest.raises(DomainError):
        RotatingFieldModel(mu_b0=-1.0)
    with pytest.raises(DomainError):
        RotatingFieldModel(theta=4.0)


def test_control_direction_proportional():
    m = RotatingFieldModel(mu_b0=2.0)
    t = 0.7
    assert np.allclose(m.control_direction(t) * m.mu_b0, m.h0_at(t), atol=1e-15)


def test_interpolated_endpoints_and_fd():
    m = InterpolatedModel(h_i=PAULI_X, h_f=PAULI_Z, total_time=4.0)
    assert np.allclose(m.h0_at(0.0), PAULI_X, atol=1e-15)
    assert np.allclose(m.h0_at(4.0), PAULI_Z, atol=1e-15)
    for t in (0.5, 2.0, 3.5):
        assert np.max(np.abs(m.dh0_dt(t) - _fd_derivative(m, t))) < 1e-8
    with pytest.raises(DomainError):
        m.h0_at(5.0)


def test_smoothstep_schedule_flat_at_ends():
    m = InterpolatedModel(h_i=PAULI_X, h_f=PAULI_Z, total_time=2.0,
                          schedule="smoothstep")
    lam0, dlam0 = m.schedule_eval(0.0)
    lam1, dlam1 = m.schedule_eval(2.0)
    assert lam0 == 0.0 and lam1 == 1.0
    assert abs(dlam0) < 1e-15 and abs(dlam1) < 1e-15
    lam_mid, _ = m.schedule_eval(1.0)
    assert abs(lam_mid - 0.5) < 1e-15


def test_polyline_schedule():
    sched = PolylineSchedule(knots=((0.0, 0.0), (0.5, 0.8), (1.0, 1.0)))
    m = InterpolatedModel(h_i=PAULI_X, h_f=PAULI_Z, total_time=1.0,
                          schedule=sched)
    lam, dlam = m.schedule_eval(0.25)
    assert abs(lam - 0.4) < 1e-14
    assert abs(dlam - 1.6) < 1e-14
    with pytest.raises(DomainError):
        PolylineSchedule(knots=((0.0, 0.0), (1.0, 0.5)))
    with pytest.raises(DomainError):
        PolylineSchedule(knots=((0.0, 0.0), (0.5, 0.9), (1.0, 0.2)))


def test_interpolated_validation():
    with pytest.raises(DomainError):
        InterpolatedModel(h_i=PAULI_X, h_f=np.eye(3), total_time=1.0)
    with pytest.raises(DomainError):
        InterpolatedModel(h_i=PAULI_X, h_f=PAULI_Z, total_time=0.0)
    with pytest.raises(DomainError):
        InterpolatedModel(h_i=PAULI_X, h_f=PAULI_Z, total_time=1.0,
                          schedule="cubic")


def test_tabulated_interpolation_and_json(tmp_path):
    times = [0.0, 1.0, 2.0]
    mats = [PAULI_X, PAULI_Z, PAULI_Y]
    m = TabulatedModel(times, mats)
    assert np.allclose(m.h0_at(0.5), 0.5 * (PAULI_X + PAULI_Z), atol=1e-15)
    assert np.allclose(m.dh0_dt(1.5), PAULI_Y - PAULI_Z, atol=1e-15)

    doc = {"times": times,
           "matrices": [[[[z.real, z.imag] for z in row] for row in mat]
                        for mat in mats]}
    path = tmp_path / "model.json"
    path.write_text(json.dumps(doc))
    m2 = TabulatedModel.from_json(str(path))
    assert np.allclose(m2.h0_at(1.25), m.h0_at(1.25), atol=1e-15)


def test_tabulated_validation():
    with pytest.raises(DomainError):
        TabulatedModel([0.0], [PAULI_X])
    with pytest.raises(DomainError):
        TabulatedModel([0.0, 0.0], [PAULI_X, PAULI_Z])
    m = TabulatedModel([0.0, 1.0], [PAULI_X, PAULI_Z])
    with pytest.raises(DomainError):
        m.h0_at(1.5)


def test_tabulated_rehermitizes():
    skew = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    m = TabulatedModel([0.0, 1.0], [skew, skew])
    h = m.h0_at(0.5)
    assert np.allclose(h, h.conj().T, atol=1e-15)
