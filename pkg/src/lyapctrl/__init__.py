"""Lyapunov-controlled adiabatic evolution of small quantum systems."""

from .control import (
    ControlContext,
    ControlSample,
    SchemeAConfig,
    SchemeBConfig,
    lyapunov_rate,
    lyapunov_value,
    scheme_a_combined,
    scheme_a_fields,
    scheme_b_fields,
)
from .diagnostics import (
    fidelity,
    min_gap,
    nonlinearity_vs_tunneling,
    rabi_oracle,
    rabi_oracle_min,
    total_spectrum,
)
from .eigenpath import EigenFrame, analytic_rotating_eigs, eigenstate_derivative, frame_at
from .kernels import BACKEND as KERNEL_BACKEND
from .linalg import (
    commutator,
    eigh,
    expectation,
    expectation_complex,
    normalize,
    pauli_combo,
)
from .models import (
    InterpolatedModel,
    PolylineSchedule,
    RotatingFieldModel,
    TabulatedModel,
    fig1_model,
)
from .output import (
    RunReport,
    fidelity_svg,
    format_float,
    run_report,
    trajectory_csv,
)
from .presets import preset, preset_names
from .propagate import IntegratorConfig, Trajectory, propagate, rk4_step, schrodinger_rhs
from .scenario import Scenario, parse_scenario

__version__ = "0.1.0"
