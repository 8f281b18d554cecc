"""Scenario parsing, CSV emission, command dispatch, and exit codes."""

import io
import json
import math

import numpy as np
import pytest

from harmonia import ParseError, PotentialSpec, ValidationError
from harmonia.cli import (
    EXIT_ERROR,
    EXIT_OK,
    cmd_cc_check,
    cmd_family,
    cmd_reproduce,
    cmd_saari,
    cmd_simulate,
    csv_header,
    main,
    parse_scenario,
    read_trajectory_csv,
)

MINIMAL = {
    "masses": [1.0, 1.0],
    "positions": [[-1.0, 0.0], [1.0, 0.0]],
    "potential": {"kind": "harmonic"},
}

THEOREM2 = {
    "masses": [1.0, 1.0, 1.0, 1.0],
    "positions": [[0.0, 0.7071067811865476], [0.0, 0.0], [0.0, 0.0],
                  [0.0, -0.7071067811865476]],
    "velocities": [[0.0, 0.0], [-1.4142135623730951, 0.0],
                   [1.4142135623730951, 0.0], [0.0, 0.0]],
    "potential": {"kind": "harmonic"},
    "integrator": {"method": "rk4", "dt": 1e-3, "t_end": 2.0 * math.pi, "stride": 10},
}


def scenario_text(doc):
    return json.dumps(doc)


def test_parse_minimal_document():
    scenario = parse_scenario(scenario_text(MINIMAL))
    assert np.all(scenario.velocities == 0.0)
    assert scenario.potential.kind == "harmonic"
    assert scenario.integrator is None
    assert scenario.tolerances == {}


def test_parse_accepts_bytes():
    scenario = parse_scenario(scenario_text(MINIMAL).encode())
    assert scenario.masses.n == 2


def test_parse_rejects_malformed_json():
    with pytest.raises(ParseError):
        parse_scenario("{not json")
    with pytest.raises(ParseError):
        parse_scenario("[1, 2]")


def test_parse_missing_masses():
    doc = dict(MINIMAL)
    del doc["masses"]
    with pytest.raises(ValidationError) as err:
        parse_scenario(scenario_text(doc))
    assert err.value.field == "masses"


def test_parse_negative_mass_names_entry():
    doc = dict(MINIMAL)
    doc["masses"] = [-1.0, 1.0]
    with pytest.raises(ValidationError) as err:
        parse_scenario(scenario_text(doc))
    assert err.value.field == "masses[0]"


def test_parse_rejects_unknown_keys():
    doc = dict(MINIMAL)
    doc["masss"] = [1.0]
    with pytest.raises(ValidationError) as err:
        parse_scenario(scenario_text(doc))
    assert err.value.field == "masss"


def test_parse_rejects_bad_integrator():
    doc = dict(MINIMAL)
    doc["integrator"] = {"method": "rk4", "dt": -1e-3, "t_end": 1.0}
    with pytest.raises(ValidationError) as err:
        parse_scenario(scenario_text(doc))
    assert err.value.field == "integrator.dt"
    doc["integrator"] = {"method": "leapfrog", "dt": 1e-3, "t_end": 1.0}
    with pytest.raises(ValidationError) as err:
        parse_scenario(scenario_text(doc))
    assert err.value.field == "integrator.method"


def test_parse_rejects_length_mismatch():
    doc = dict(MINIMAL)
    doc["velocities"] = [[0.0, 0.0]]
    with pytest.raises(ValidationError) as err:
        parse_scenario(scenario_text(doc))
    assert err.value.field == "velocities"


def test_parse_verlet_alias():
    doc = dict(MINIMAL)
    doc["integrator"] = {"method": "verlet", "dt": 1e-3, "t_end": 1.0}
    scenario = parse_scenario(scenario_text(doc))
    assert scenario.integrator.method == "velocity_verlet"


def test_parse_tolerances():
    doc = dict(MINIMAL)
    doc["tolerances"] = {"cc": 1e-8}
    assert parse_scenario(scenario_text(doc)).tolerances == {"cc": 1e-8}
    doc["tolerances"] = {"bogus": 1.0}
    with pytest.raises(ValidationError) as err:
        parse_scenario(scenario_text(doc))
    assert err.value.field == "tolerances.bogus"


def test_simulate_theorem2_inertia_column_constant():
    scenario = parse_scenario(scenario_text(THEOREM2))
    sink = io.StringIO()
    report = cmd_simulate(scenario, sink)
    assert report.exit_status == EXIT_OK
    lines = sink.getvalue().splitlines()
    assert lines[0] == csv_header(4)
    inertia = np.array([float(line.split(",")[-3]) for line in lines[1:]])
    assert np.abs(inertia - inertia[0]).max() <= 1e-8


def test_simulate_single_step_emits_two_rows():
    doc = dict(MINIMAL)
    doc["integrator"] = {"method": "rk4", "dt": 0.5, "t_end": 0.5}
    sink = io.StringIO()
    cmd_simulate(parse_scenario(scenario_text(doc)), sink)
    lines = sink.getvalue().splitlines()
    assert len(lines) == 3  # header plus two samples


def test_simulate_newtonian_collision_is_clean(tmp_path, capsys):
    doc = {
        "masses": [1.0, 1.0],
        "positions": [[0.0, 0.0], [1e-13, 0.0]],
        "potential": {"kind": "newtonian"},
        "integrator": {"method": "rk4", "dt": 1e-3, "t_end": 1.0},
    }
    path = tmp_path / "infall.json"
    path.write_text(scenario_text(doc))
    out = tmp_path / "out.csv"
    code = main(["simulate", str(path), "--out", str(out)])
    assert code == EXIT_ERROR
    assert "error:" in capsys.readouterr().out


def test_csv_round_trip():
    scenario = parse_scenario(scenario_text(THEOREM2))
    sink = io.StringIO()
    cmd_simulate(scenario, sink)
    text = sink.getvalue()
    traj = read_trajectory_csv(text, scenario.masses, scenario.potential)
    # recomputed I, U, E columns must match the printed ones bit exactly
    from harmonia import moment_of_inertia, potential_energy, total_energy
    for line, state in zip(text.splitlines()[1:], traj.samples):
        cells = line.split(",")
        assert float(cells[-3]) == moment_of_inertia(state.config, traj.m)
        assert float(cells[-2]) == potential_energy(traj.potential, state.config, traj.m)
        assert float(cells[-1]) == total_energy(traj.potential, state, traj.m)


def test_simulate_deterministic(tmp_path, capsys):
    path = tmp_path / "scenario.json"
    path.write_text(scenario_text(THEOREM2))
    outputs = []
    reports = []
    for run in range(2):
        out = tmp_path / f"run{run}.csv"
        code = main(["simulate", str(path), "--out", str(out)])
        assert code == EXIT_OK
        outputs.append(out.read_bytes())
        reports.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
    assert reports[0] == reports[1]


def test_cc_check_reports_without_asserting(rng):
    doc = {
        "masses": [1.0, 1.0, 1.0],
        "positions": rng.uniform(-2, 2, size=(3, 2)).tolist(),
        "potential": {"kind": "newtonian"},
    }
    report = cmd_cc_check(parse_scenario(scenario_text(doc)))
    assert report.exit_status == EXIT_OK
    assert "is_cc = false" in report.render()


def test_cc_check_harmonic_is_cc():
    report = cmd_cc_check(parse_scenario(scenario_text(MINIMAL)))
    assert "is_cc = true" in report.render()
    assert report.measurements["omega_squared"] == pytest.approx(1.0, abs=1e-12)


def test_cc_refine_cli(tmp_path, capsys):
    doc = {
        "masses": [1.0, 1.0, 1.0],
        "positions": [[0.02, -0.01], [1.03, 0.04], [0.48, 0.83]],
        "potential": {"kind": "newtonian"},
    }
    path = tmp_path / "jitter.json"
    path.write_text(scenario_text(doc))
    code = main(["cc-refine", str(path), "--k", "1.0"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "omega_squared" in out


def test_family_command():
    report = cmd_family(1.0, 8)
    assert report.exit_status == EXIT_OK
    assert report.verdicts["continuum"]
    assert len([d for d in report.details if d.startswith("eta")]) == 8


def test_saari_command_classifies_theorem2():
    scenario = parse_scenario(scenario_text(THEOREM2))
    report = cmd_saari(scenario)
    assert report.exit_status == EXIT_OK
    assert "classification = constant_inertia_not_re" in report.render()


def test_reproduce_theorem1(capsys):
    code = main(["reproduce", "theorem1"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "[PASS] continuum_of_central_configurations" in out
    assert out.count("eta = ") == 64


def test_reproduce_theorem2(capsys):
    code = main(["reproduce", "theorem2"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "[PASS] not_a_relative_equilibrium" in out
    assert "r14_squared_swing" in out


def test_reproduce_reports_are_deterministic(capsys):
    first = cmd_reproduce("theorem1").render()
    second = cmd_reproduce("theorem1").render()
    assert first == second


def test_missing_file_is_runtime_error(capsys):
    code = main(["cc-check", "/nonexistent/path.json"])
    assert code == EXIT_ERROR
    assert "error:" in capsys.readouterr().out
