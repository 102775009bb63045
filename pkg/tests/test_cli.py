import csv
import json
import re
import xml.etree.ElementTree as ET

import numpy as np

from lyapctrl.cli import execute_run, main
from lyapctrl.output import format_float
from lyapctrl.presets import preset, preset_names

FLOAT_RE = re.compile(r"^-?\d\.\d{12}e-?\d+$")


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_format_float_examples():
    assert format_float(1.0) == "1.000000000000e0"
    assert format_float(-1.0) == "-1.000000000000e0"
    assert format_float(0.01) == "1.000000000000e-2"
    assert format_float(0.0) == "0.000000000000e0"
    assert format_float(-0.0) == "0.000000000000e0"
    assert format_float(12345.678) == "1.234567800000e4"


def test_preset_catalog():
    names = preset_names()
    assert "fig1_baseline" in names and "fig3" in names
    for letter, ratio in zip("abcde", (12, 9, 6, 3, 0)):
        s = preset(f"fig1_{letter}")
        assert s.spec["scheme"]["X"][2] == ratio
    for letter, ratio in zip("abcde", (0, 2, 4, 6, 8)):
        s = preset(f"fig2_{letter}")
        assert s.spec["scheme"]["controls"][0][0] == ratio
    assert preset("fig3").spec["output"]["columns"] == "full"


def test_baseline_run_outputs(tmp_path):
    out = tmp_path / "base"
    report = execute_run(preset("fig1_baseline"), out)
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert len(lines) == 302  # header + 301 samples
    header = ("t,fidelity,V,gap,E_tot_0,E_tot_1,"
              "nonlinear,tunneling,regularized,clamped")
    assert lines[0] == header
    first = lines[1].split(",")
    assert first[0] == "0.000000000000e0"
    assert first[1] == "1.000000000000e0"
    for cell in first[:-2]:
        assert FLOAT_RE.match(cell), cell
    assert first[-2:] == ["0", "0"]
    assert abs(report.min_fidelity - 0.0790) < 1e-3
    summary = json.loads((out / "summary.json").read_text())
    assert abs(summary["min_fidelity"] - report.min_fidelity) < 1e-15
    assert (out / "fidelity.svg").exists()
    assert (out / "scenario.json").exists()


def test_summary_recomputable_from_csv(tmp_path):
    out = tmp_path / "f2c"
    report = execute_run(preset("fig2_c"), out)
    rows = _read_csv(out / "trajectory.csv")
    fids = [float(r["fidelity"]) for r in rows]
    gaps = [float(r["gap"]) for r in rows]
    assert abs(report.min_fidelity - min(fids)) < 1e-12
    assert abs(report.mean_fidelity - sum(fids) / len(fids)) < 1e-12
    assert abs(report.final_fidelity - fids[-1]) < 1e-12
    assert abs(report.min_gap - min(gaps)) < 1e-12
    assert abs(report.regularized_fraction
               - np.mean([r["regularized"] == "1" for r in rows])) < 1e-12


def test_fig1a_field_starts_at_minus_one(tmp_path):
    out = tmp_path / "f1a"
    execute_run(preset("fig1_a"), out)
    rows = _read_csv(out / "trajectory.csv")
    assert rows[0]["f_0"] == "-1.000000000000e0"
    # at t=0 the total Hamiltonian vanishes
    assert rows[0]["gap"] == "0.000000000000e0"


def test_rerun_is_byte_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    execute_run(preset("fig1_b"), a)
    execute_run(preset("fig1_b"), b)
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()


def test_state_dump_recomputes_fidelity(tmp_path):
    doc = json.loads(preset("fig1_c").echo())
    doc["output"] = {"state_dump": True, "svg": False}
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    out = tmp_path / "out"
    assert main(["run", "--scenario", str(path), "--out", str(out)]) == 0
    rows = _read_csv(out / "trajectory.csv")
    states = _read_csv(out / "states.csv")
    from lyapctrl.eigenpath import frame_at
    from lyapctrl.models import fig1_model
    from lyapctrl.diagnostics import fidelity

    m = fig1_model()
    prev = None
    for row, srow in zip(rows, states):
        t = float(row["t"])
        psi = np.array([complex(float(srow["re_0"]), float(srow["im_0"])),
                        complex(float(srow["re_1"]), float(srow["im_1"]))])
        prev = frame_at(m, t, prev=prev)
        assert abs(fidelity(prev, psi) - float(row["fidelity"])) < 1e-12


def test_svg_is_wellformed_xml(tmp_path):
    out = tmp_path / "svg"
    execute_run(preset("fig1_baseline"), out)
    root = ET.parse(out / "fidelity.svg").getroot()
    assert root.tag.endswith("svg")
    assert root.attrib["version"] == "1.1"


def test_sweep_comparison_table(tmp_path):
    doc = {
        "scheme": {"type": "A", "X": [1, 0, 12, 0], "combined": True, "sign": 1},
        "integrator": {"dt": 1e-3, "record_stride": 10},
        "sweep": {"parameter": "R", "values": [6, 0]},
        "output": {"svg": False},
    }
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(doc))
    out = tmp_path / "out"
    assert main(["sweep", "--scenario", str(path), "--out", str(out)]) == 0
    lines = (out / "comparison.csv").read_text().splitlines()
    assert lines[0] == "value,min_fidelity,mean_fidelity,final_fidelity"
    values = [float(line.split(",")[0]) for line in lines[1:]]
    assert values == sorted(values) == [0.0, 6.0]
    assert (out / "R_0" / "trajectory.csv").exists()
    assert (out / "R_6" / "trajectory.csv").exists()
    # sweep runs match isolated runs byte for byte
    solo = tmp_path / "solo"
    sub = preset("fig1_c")  # same scenario as R=6 of the sweep
    doc_solo = json.loads(sub.echo())
    doc_solo["integrator"] = {"dt": 1e-3, "record_stride": 10}
    doc_solo["output"] = {"svg": False}
    p2 = tmp_path / "solo.json"
    p2.write_text(json.dumps(doc_solo))
    assert main(["run", "--scenario", str(p2), "--out", str(solo)]) == 0
    assert ((out / "R_6" / "trajectory.csv").read_bytes()
            == (solo / "trajectory.csv").read_bytes())


def test_cli_presets_commands(capsys):
    assert main(["presets", "list"]) == 0
    assert capsys.readouterr().out.splitlines() == preset_names()
    assert main(["presets", "show", "fig2_e"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["scheme"]["type"] == "B"


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schme": {}}')
    assert main(["run", "--scenario", str(bad), "--out", str(tmp_path / "o")]) == 2
    missing = tmp_path / "nope.json"
    assert main(["run", "--scenario", str(missing),
                 "--out", str(tmp_path / "o")]) == 2
    # numerical failure: degenerate eigenstate derivative in scheme B
    doc = {
        "model": {"type": "interpolated", "h_i": [0, 0, 1, 0],
                  "h_f": [0, 0, -1, 0], "total_time": 3.0},
        "scheme": {"type": "B", "controls": [[1, 0, 0, 0]]},
        "integrator": {"dt": 1e-3, "t1": 3.0},
    }
    path = tmp_path / "degenerate.json"
    path.write_text(json.dumps(doc))
    assert main(["run", "--scenario", str(path),
                 "--out", str(tmp_path / "o2")]) == 3
    capsys.readouterr()


def test_cli_run_with_preset_flag(tmp_path):
    out = tmp_path / "p"
    assert main(["run", "--preset", "fig1_e", "--out", str(out)]) == 0
    assert (out / "trajectory.csv").exists()
    assert main(["run", "--preset", "nope", "--out", str(out)]) == 2
