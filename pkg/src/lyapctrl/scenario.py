"""Declarative run configurations.

A scenario is a JSON document describing the model, the control scheme, the
initial state, the integrator settings, an optional parameter sweep, and
output options. Parsing validates the document against the schema (unknown
keys are rejected with a path-qualified message), applies defaults, and
yields a `Scenario` whose `spec` is the fully-defaulted, JSON-serializable
form: `parse_scenario(json.dumps(s.spec))` reproduces `s` exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .control import H0_CONTROL, SchemeAConfig, SchemeBConfig
from .eigenpath import frame_at
from .errors import LyapctrlError, ScenarioError
from .models import InterpolatedModel, RotatingFieldModel, TabulatedModel

SWEEP_PARAMETERS = ("R", "r", "omega", "theta", "dt")

_TOP_KEYS = ("model", "scheme", "initial_state", "integrator", "sweep", "output")


def _require_dict(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ScenarioError(path, f"expected an object, got {type(node).__name__}")
    return node

def _check_keys(node: dict, allowed, path: str) -> None:
    for key in node:
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}" if path else key,
                                f"unknown key {key!r}")


def _number(node, path: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ScenarioError(path, f"expected a number, got {node!r}")
    if not math.isfinite(node):
        raise ScenarioError(path, f"number must be finite, got {node!r}")
    return float(node)


def _integer(node, path: str) -> int:
    if isinstance(node, bool) or not isinstance(node, int):
        raise ScenarioError(path, f"expected an integer, got {node!r}")
    return node


def _boolean(node, path: str) -> bool:
    if not isinstance(node, bool):
        raise ScenarioError(path, f"expected true/false, got {node!r}")
    return node


def _matrix_entry(node, path: str) -> complex:
    if not (isinstance(node, list) and len(node) == 2):
        raise ScenarioError(path, "matrix entries must be [re, im] pairs")
    return complex(_number(node[0], path + "[0]"), _number(node[1], path + "[1]"))


def operator_from_node(node, path: str) -> np.ndarray:
    """Parse an operator: a [cx, cy, cz, cid] Pauli-combination quadruple or
    an explicit matrix of [re, im] pairs. The result must be Hermitian."""
    if not isinstance(node, list) or not node:
        raise ScenarioError(path, "operator must be a coefficient quadruple "
                                  "or a matrix of [re, im] pairs")
    if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in node):
        if len(node) != 4:
            raise ScenarioError(
                path, f"coefficient form needs exactly 4 numbers, got {len(node)}")
        return linalg.pauli_combo(*(float(x) for x in node))
    dim = len(node)
    mat = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(node):
        if not (isinstance(row, list) and len(row) == dim):
            raise ScenarioError(f"{path}[{i}]", f"expected a row of {dim} entries")
        for j, entry in enumerate(row):
            mat[i, j] = _matrix_entry(entry, f"{path}[{i}][{j}]")
    try:
        return linalg.as_hermitian(mat)
    except LyapctrlError as exc:
        raise ScenarioError(path, str(exc)) from exc


def _operator_node(node, path: str):
    """Validate and echo the JSON form of an operator."""
    operator_from_node(node, path)
    if all(isinstance(x, (int, float)) for x in node):
        return [float(x) for x in node]
    return [[[float(e[0]), float(e[1])] for e in row] for row in node]


def _parse_model(node, path: str) -> dict:
    node = _require_dict(node, path)
    if "preset" in node:
        _check_keys(node, ("preset",), path)
        if node["preset"] != "fig1":
            raise ScenarioError(f"{path}.preset",
                                f"unknown model preset {node['preset']!r}")
        return {"preset": "fig1"}
    kind = node.get("type", "rotating")
    if kind == "rotating":
        _check_keys(node, ("type", "mu_b0", "omega", "theta"), path)
        return {
            "type": "rotating",
            "mu_b0": _number(node.get("mu_b0", 1.0), f"{path}.mu_b0"),
            "omega": _number(node.get("omega", 4.0), f"{path}.omega"),
            "theta": _number(node.get("theta", math.pi / 4), f"{path}.theta"),
        }
    if kind == "interpolated":
        _check_keys(node, ("type", "h_i", "h_f", "total_time", "schedule"), path)
        for key in ("h_i", "h_f", "total_time"):
            if key not in node:
                raise ScenarioError(path, f"interpolated model needs {key!r}")
        schedule = node.get("schedule", "linear")
        if schedule not in ("linear", "smoothstep"):
            raise ScenarioError(f"{path}.schedule",
                                f"unknown schedule {schedule!r}")
        return {
            "type": "interpolated",
            "h_i": _operator_node(node["h_i"], f"{path}.h_i"),
            "h_f": _operator_node(node["h_f"], f"{path}.h_f"),
            "total_time": _number(node["total_time"], f"{path}.total_time"),
            "schedule": schedule,
        }
    if kind == "tabulated":
        _check_keys(node, ("type", "times", "matrices"), path)
        for key in ("times", "matrices"):
            if key not in node:
                raise ScenarioError(path, f"tabulated model needs {key!r}")
        try:
            TabulatedModel.from_json({"times": node["times"],
                                      "matrices": node["matrices"]})
        except (LyapctrlError, ValueError, TypeError, KeyError) as exc:
            raise ScenarioError(path, f"bad tabulated model: {exc}") from exc
        return {"type": "tabulated", "times": [float(t) for t in node["times"]],
                "matrices": node["matrices"]}
    raise ScenarioError(f"{path}.type", f"unknown model type {kind!r}")


def _parse_scheme(node, path: str) -> dict:
    node = _require_dict(node, path)
    kind = node.get("type")
    if kind == "none":
        _check_keys(node, ("type",), path)
        return {"type": "none"}
    if kind == "A":
        _check_keys(node, ("type", "X", "controls", "pivot", "sign", "epsilon",
                           "f_max", "combined", "h0_scale", "strict"), path)
        if "X" not in node:
            raise ScenarioError(path, "scheme A needs the observable 'X'")
        controls = node.get("controls", [H0_CONTROL])
        if not isinstance(controls, list) or not controls:
            raise ScenarioError(f"{path}.controls",
                                "controls must be a nonempty list")
        echoed = []
        for j, c in enumerate(controls):
            if c == H0_CONTROL:
                echoed.append(H0_CONTROL)
            else:
                echoed.append(_operator_node(c, f"{path}.controls[{j}]"))
        spec = {
            "type": "A",
            "X": _operator_node(node["X"], f"{path}.X"),
            "controls": echoed,
            "pivot": _integer(node.get("pivot", 0), f"{path}.pivot"),
            "sign": _integer(node.get("sign", -1), f"{path}.sign"),
            "epsilon": _number(node.get("epsilon", 1e-6), f"{path}.epsilon"),
            "f_max": _number(node.get("f_max", 1e3), f"{path}.f_max"),
            "combined": _boolean(node.get("combined", False), f"{path}.combined"),
            "h0_scale": _number(node.get("h0_scale", 1.0), f"{path}.h0_scale"),
            "strict": _boolean(node.get("strict", False), f"{path}.strict"),
        }
        try:
            _build_scheme(spec)
        except LyapctrlError as exc:
            raise ScenarioError(path, str(exc)) from exc
        return spec
    if kind == "B":
        _check_keys(node, ("type", "controls", "pivot", "target_level",
                           "epsilon", "f_max"), path)
        controls = node.get("controls")
        if not isinstance(controls, list) or not controls:
            raise ScenarioError(f"{path}.controls",
                                "scheme B needs a nonempty control list")
        spec = {
            "type": "B",
            "controls": [_operator_node(c, f"{path}.controls[{j}]")
                         for j, c in enumerate(controls)],
            "pivot": _integer(node.get("pivot", 0), f"{path}.pivot"),
            "target_level": _integer(node.get("target_level", 0),
                                     f"{path}.target_level"),
            "epsilon": _number(node.get("epsilon", 1e-6), f"{path}.epsilon"),
            "f_max": _number(node.get("f_max", 1e3), f"{path}.f_max"),
        }
        try:
            _build_scheme(spec)
        except LyapctrlError as exc:
            raise ScenarioError(path, str(exc)) from exc
        return spec
    raise ScenarioError(f"{path}.type",
                        f"scheme type must be 'none', 'A' or 'B', got {kind!r}")


def _parse_initial_state(node, path: str) -> dict:
    node = _require_dict(node, path)
    if "amplitudes" in node:
        _check_keys(node, ("amplitudes",), path)
        amps = node["amplitudes"]
        if not isinstance(amps, list) or not amps:
            raise ScenarioError(f"{path}.amplitudes",
                                "expected a nonempty list of [re, im] pairs")
        vec = [_matrix_entry(a, f"{path}.amplitudes[{i}]")
               for i, a in enumerate(amps)]
        if float(np.linalg.norm(vec)) <= 1e-14:
            raise ScenarioError(f"{path}.amplitudes", "state has near-zero norm")
        return {"amplitudes": [[v.real, v.imag] for v in vec]}
    _check_keys(node, ("eigenstate",), path)
    level = _integer(node.get("eigenstate", 0), f"{path}.eigenstate")
    if level < 0:
        raise ScenarioError(f"{path}.eigenstate", "level must be nonnegative")
    return {"eigenstate": level}


def _parse_integrator(node, path: str) -> dict:
    node = _require_dict(node, path)
    _check_keys(node, ("t0", "t1", "dt", "record_stride", "renormalize_every"),
                path)
    spec = {
        "t0": _number(node.get("t0", 0.0), f"{path}.t0"),
        "t1": _number(node.get("t1", 3.0), f"{path}.t1"),
        "dt": _number(node.get("dt", 1e-3), f"{path}.dt"),
        "record_stride": _integer(node.get("record_stride", 10),
                                  f"{path}.record_stride"),
        "renormalize_every": _integer(node.get("renormalize_every", 0),
                                      f"{path}.renormalize_every"),
    }
    try:
        _build_integrator(spec)
    except LyapctrlError as exc:
        raise ScenarioError(path, str(exc)) from exc
    return spec


def _parse_sweep(node, path: str) -> dict:
    node = _require_dict(node, path)
    _check_keys(node, ("parameter", "values"), path)
    param = node.get("parameter")
    if param not in SWEEP_PARAMETERS:
        raise ScenarioError(f"{path}.parameter",
                            f"parameter must be one of {SWEEP_PARAMETERS}, "
                            f"got {param!r}")
    values = node.get("values")
    if not isinstance(values, list) or not values:
        raise ScenarioError(f"{path}.values", "sweep needs a nonempty value list")
    return {"parameter": param,
            "values": [_number(v, f"{path}.values[{i}]")
                       for i, v in enumerate(values)]}


def _parse_output(node, path: str) -> dict:
    node = _require_dict(node, path)
    _check_keys(node, ("columns", "svg", "state_dump"), path)
    columns = node.get("columns", "basic")
    if columns not in ("basic", "full"):
        raise ScenarioError(f"{path}.columns",
                            f"columns must be 'basic' or 'full', got {columns!r}")
    return {
        "columns": columns,
        "svg": _boolean(node.get("svg", True), f"{path}.svg"),
        "state_dump": _boolean(node.get("state_dump", False), f"{path}.state_dump"),
    }


@dataclass(frozen=True)
class Scenario:
    """A validated, fully-defaulted run configuration."""

    spec: dict

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.spec == other.spec

    def echo(self) -> str:
        """The canonical JSON form; parses back to an equal Scenario."""
        return json.dumps(self.spec, indent=2, sort_keys=True) + "\n"

    def build_model(self):
        return _build_model(self.spec["model"])

    def build_scheme(self):
        return _build_scheme(self.spec["scheme"])

    def build_integrator(self):
        return _build_integrator(self.spec["integrator"])

    def build_initial_state(self, model) -> np.ndarray:
        node = self.spec["initial_state"]
        if "amplitudes" in node:
            vec = np.array([complex(re, im) for re, im in node["amplitudes"]])
            if len(vec) != model.dim:
                raise ScenarioError("initial_state.amplitudes",
                                    f"state dim {len(vec)} != model dim {model.dim}")
            return linalg.normalize(vec)
        level = node["eigenstate"]
        if level >= model.dim:
            raise ScenarioError("initial_state.eigenstate",
                                f"level {level} out of range for dim {model.dim}")
        t0 = self.spec["integrator"]["t0"]
        return frame_at(model, t0).state(level)

    @property
    def sweep(self):
        """(parameter, values) or None."""
        node = self.spec.get("sweep")
        if node is None:
            return None
        return node["parameter"], list(node["values"])

    @property
    def output(self) -> dict:
        return dict(self.spec["output"])

    def with_sweep_value(self, parameter: str, value: float) -> "Scenario":
        """A sweep-free copy of this scenario with `parameter` set to `value`."""
        spec = json.loads(json.dumps(self.spec))
        spec.pop("sweep", None)
        if parameter == "R":
            scheme = spec["scheme"]
            if scheme["type"] != "A" or not _is_quadruple(scheme.get("X")):
                raise ScenarioError(
                    "sweep.parameter",
                    "'R' sweeps need scheme A with a coefficient-quadruple X")
            scheme["X"][2] = float(value)
        elif parameter == "r":
            scheme = spec["scheme"]
            if scheme["type"] != "B" or not _is_quadruple(scheme["controls"][0]):
                raise ScenarioError(
                    "sweep.parameter",
                    "'r' sweeps need scheme B with a coefficient-quadruple "
                    "first control")
            scheme["controls"][0][0] = float(value)
        elif parameter in ("omega", "theta"):
            model = spec["model"]
            if model.get("preset") == "fig1":
                model = {"type": "rotating", "mu_b0": 1.0, "omega": 4.0,
                         "theta": math.pi / 4}
                spec["model"] = model
            if model.get("type") != "rotating":
                raise ScenarioError("sweep.parameter",
                                    f"{parameter!r} sweeps need a rotating model")
            model[parameter] = float(value)
        elif parameter == "dt":
            spec["integrator"]["dt"] = float(value)
        else:
            raise ScenarioError("sweep.parameter",
                                f"unknown sweep parameter {parameter!r}")
        return parse_scenario(json.dumps(spec))


def _is_quadruple(node) -> bool:
    return (isinstance(node, list) and len(node) == 4
            and all(isinstance(x, (int, float)) for x in node))


def _build_model(node: dict):
    if node.get("preset") == "fig1":
        return RotatingFieldModel(mu_b0=1.0, theta=math.pi / 4, omega=4.0)
    kind = node["type"]
    if kind == "rotating":
        return RotatingFieldModel(mu_b0=node["mu_b0"], theta=node["theta"],
                                  omega=node["omega"])
    if kind == "interpolated":
        return InterpolatedModel(
            h_i=operator_from_node(node["h_i"], "model.h_i"),
            h_f=operator_from_node(node["h_f"], "model.h_f"),
            total_time=node["total_time"],
            schedule=node["schedule"],
        )
    return TabulatedModel.from_json({"times": node["times"],
                                     "matrices": node["matrices"]})


def _build_scheme(node: dict):
    kind = node["type"]
    if kind == "none":
        return None
    if kind == "A":
        controls = tuple(
            c if c == H0_CONTROL else operator_from_node(c, "scheme.controls")
            for c in node["controls"]
        )
        return SchemeAConfig(
            x_op=operator_from_node(node["X"], "scheme.X"),
            controls=controls,
            pivot=node["pivot"],
            sign=node["sign"],
            epsilon=node["epsilon"],
            f_max=node["f_max"],
            combined=node["combined"],
            h0_scale=node["h0_scale"],
            strict=node["strict"],
        )
    return SchemeBConfig(
        controls=tuple(operator_from_node(c, "scheme.controls")
                       for c in node["controls"]),
        pivot=node["pivot"],
        target_level=node["target_level"],
        epsilon=node["epsilon"],
        f_max=node["f_max"],
    )


def _build_integrator(node: dict):
    from .propagate import IntegratorConfig

    return IntegratorConfig(
        t0=node["t0"], t1=node["t1"], dt=node["dt"],
        record_stride=node["record_stride"],
        renormalize_every=node["renormalize_every"],
    )


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario JSON document.

    Unknown keys anywhere in the document are rejected; defaults are applied
    (dt = 1e-3, t in [0, 3], model preset 'fig1', scheme 'none').
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("$", f"not valid JSON: {exc}") from exc
    doc = _require_dict(doc, "$")
    _check_keys(doc, _TOP_KEYS, "")
    spec = {
        "model": _parse_model(doc.get("model", {"preset": "fig1"}), "model"),
        "scheme": _parse_scheme(doc.get("scheme", {"type": "none"}), "scheme"),
        "initial_state": _parse_initial_state(
            doc.get("initial_state", {"eigenstate": 0}), "initial_state"),
        "integrator": _parse_integrator(doc.get("integrator", {}), "integrator"),
        "output": _parse_output(doc.get("output", {}), "output"),
    }
    if "sweep" in doc and doc["sweep"] is not None:
        spec["sweep"] = _parse_sweep(doc["sweep"], "sweep")
    return Scenario(spec=spec)
