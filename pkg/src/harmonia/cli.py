"""Command-line interface: scenario ingestion, dispatch, and report/CSV output.

Scenario files are JSON documents:

    {
      "masses":    [1.0, 1.0],
      "positions": [[-1.0, 0.0], [1.0, 0.0]],
      "velocities": [[0.0, 0.0], [0.0, 0.0]],          optional, default zero
      "potential": {"kind": "harmonic"},                optional, default harmonic
      "integrator": {"method": "rk4", "dt": 1e-3,
                     "t_end": 6.283, "stride": 10},     required by simulate/saari
      "tolerances": {"cc": 1e-9}                        optional overrides
    }

Unknown keys are rejected. CSV output carries t, per-body qx/qy/vx/vy
columns (1-based body labels), then I, U, E, all printed with 17
significant digits so values round-trip bit exactly.

Exit codes: 0 pass, 1 runtime or validation error, 2 verification failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .central_config import cc_residual, refine_cc, verify_continuum
from .core import (
    MassVector,
    PhaseState,
    PlanarConfiguration,
    PotentialSpec,
    moment_of_inertia,
    mutual_distances,
    potential_energy,
    total_energy,
)
from .dynamics import (
    RK4,
    VELOCITY_VERLET,
    IntegratorSpec,
    Trajectory,
    energy_drift,
    integrate,
)
from .errors import HarmoniaError, ParseError, ValidationError, ZeroInertia
from .saari import inertia_variation, saari_check, verify_counterexample

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2

_SCENARIO_KEYS = {"masses", "positions", "velocities", "potential", "integrator", "tolerances"}
_POTENTIAL_KEYS = {"kind", "exponent", "coupling"}
_INTEGRATOR_KEYS = {"method", "dt", "t_end", "stride"}
_TOLERANCE_KEYS = {"cc", "inertia", "rigidity", "refine"}
_METHOD_ALIASES = {"verlet": VELOCITY_VERLET, "rk4": RK4}


@dataclass(frozen=True)
class Scenario:
    """Validated simulation request parsed from a scenario file."""

    masses: MassVector
    positions: PlanarConfiguration
    velocities: np.ndarray
    potential: PotentialSpec
    integrator: IntegratorSpec | None
    tolerances: dict

    def initial_state(self) -> PhaseState:
        return PhaseState(self.positions, self.velocities, 0.0)


@dataclass
class RunReport:
    """Outcome of one CLI command: echo, measurements, verdicts, exit status."""

    command: str
    measurements: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    details: list = field(default_factory=list)
    exit_status: int = EXIT_OK

    def lines(self) -> list:
        out = [f"command: {self.command}"]
        for key, value in self.measurements.items():
            out.append(f"{key} = {_fmt(value)}")
        for key, value in self.verdicts.items():
            out.append(f"[{'PASS' if value else 'FAIL'}] {key}")
        out.extend(self.details)
        return out

    def render(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _number(value, fieldname: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(fieldname, "expected a number")
    out = float(value)
    if not math.isfinite(out):
        raise ValidationError(fieldname, "must be finite")
    return out


def _point_array(value, fieldname: str, expected_len: int | None) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ValidationError(fieldname, "expected a nonempty array of [x, y] pairs")
    rows = []
    for i, item in enumerate(value):
        if not isinstance(item, list) or len(item) != 2:
            raise ValidationError(f"{fieldname}[{i}]", "expected an [x, y] pair")
        rows.append([_number(item[0], f"{fieldname}[{i}][0]"),
                     _number(item[1], f"{fieldname}[{i}][1]")])
    if expected_len is not None and len(rows) != expected_len:
        raise ValidationError(fieldname, f"length must match masses ({expected_len})")
    return np.array(rows)


def _parse_potential(doc) -> PotentialSpec:
    if not isinstance(doc, dict):
        raise ValidationError("potential", "expected an object")
    unknown = sorted(set(doc) - _POTENTIAL_KEYS)
    if unknown:
        raise ValidationError(f"potential.{unknown[0]}", "unknown key")
    kind = doc.get("kind")
    if kind not in ("harmonic", "newtonian", "power"):
        raise ValidationError("potential.kind", "must be harmonic, newtonian, or power")
    if kind == "power":
        if "exponent" not in doc:
            raise ValidationError("potential.exponent", "required for power law")
        if "coupling" not in doc:
            raise ValidationError("potential.coupling", "required for power law")
        exponent = _number(doc["exponent"], "potential.exponent")
        coupling = _number(doc["coupling"], "potential.coupling")
        if exponent == 0.0:
            raise ValidationError("potential.exponent", "must be nonzero")
        if coupling <= 0.0:
            raise ValidationError("potential.coupling", "must be positive")
        return PotentialSpec.power(exponent, coupling)
    if "exponent" in doc or "coupling" in doc:
        raise ValidationError("potential.kind", f"{kind} takes no parameters")
    return PotentialSpec(kind)


def _parse_integrator(doc) -> IntegratorSpec:
    if not isinstance(doc, dict):
        raise ValidationError("integrator", "expected an object")
    unknown = sorted(set(doc) - _INTEGRATOR_KEYS)
    if unknown:
        raise ValidationError(f"integrator.{unknown[0]}", "unknown key")
    method = doc.get("method")
    if method not in _METHOD_ALIASES:
        raise ValidationError("integrator.method", "must be 'verlet' or 'rk4'")
    if "dt" not in doc:
        raise ValidationError("integrator.dt", "required")
    if "t_end" not in doc:
        raise ValidationError("integrator.t_end", "required")
    dt = _number(doc["dt"], "integrator.dt")
    if dt <= 0.0:
        raise ValidationError("integrator.dt", "must be positive")
    t_end = _number(doc["t_end"], "integrator.t_end")
    if t_end < dt:
        raise ValidationError("integrator.t_end", "must cover at least one step")
    stride = doc.get("stride", 10)
    if isinstance(stride, bool) or not isinstance(stride, int) or stride < 1:
        raise ValidationError("integrator.stride", "must be a positive integer")
    return IntegratorSpec(_METHOD_ALIASES[method], dt, t_end, stride)


def parse_scenario(text) -> Scenario:
    """Parse and validate a scenario document (str or bytes)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    unknown = sorted(set(doc) - _SCENARIO_KEYS)
    if unknown:
        raise ValidationError(unknown[0], "unknown key")

    if "masses" not in doc:
        raise ValidationError("masses", "required")
    raw_masses = doc["masses"]
    if not isinstance(raw_masses, list) or len(raw_masses) < 2:
        raise ValidationError("masses", "expected an array of at least two masses")
    values = []
    for i, item in enumerate(raw_masses):
        value = _number(item, f"masses[{i}]")
        if value <= 0.0:
            raise ValidationError(f"masses[{i}]", "must be positive")
        values.append(value)
    masses = MassVector(np.array(values))

    if "positions" not in doc:
        raise ValidationError("positions", "required")
    positions = PlanarConfiguration(_point_array(doc["positions"], "positions", masses.n))

    if "velocities" in doc:
        velocities = _point_array(doc["velocities"], "velocities", masses.n)
    else:
        velocities = np.zeros((masses.n, 2))

    potential = _parse_potential(doc["potential"]) if "potential" in doc \
        else PotentialSpec.harmonic()
    integrator = _parse_integrator(doc["integrator"]) if "integrator" in doc else None

    tolerances = {}
    if "tolerances" in doc:
        raw = doc["tolerances"]
        if not isinstance(raw, dict):
            raise ValidationError("tolerances", "expected an object")
        unknown = sorted(set(raw) - _TOLERANCE_KEYS)
        if unknown:
            raise ValidationError(f"tolerances.{unknown[0]}", "unknown key")
        for key, item in raw.items():
            value = _number(item, f"tolerances.{key}")
            if value <= 0.0:
                raise ValidationError(f"tolerances.{key}", "must be positive")
            tolerances[key] = value

    return Scenario(masses, positions, velocities, potential, integrator, tolerances)


def load_scenario(path) -> Scenario:
    with open(path, "rb") as handle:
        return parse_scenario(handle.read())


def csv_header(n: int) -> str:
    cols = ["t"]
    for i in range(1, n + 1):
        cols.extend([f"qx{i}", f"qy{i}", f"vx{i}", f"vy{i}"])
    cols.extend(["I", "U", "E"])
    return ",".join(cols)


def write_trajectory_csv(traj: Trajectory, sink) -> None:
    """Emit the trajectory as CSV with derived I, U, E columns."""
    sink.write(csv_header(traj.m.n) + "\n")
    for state in traj.samples:
        inertia = moment_of_inertia(state.config, traj.m)
        u = potential_energy(traj.potential, state.config, traj.m)
        e = total_energy(traj.potential, state, traj.m)
        row = [state.t]
        for body in range(traj.m.n):
            row.extend([state.config.q[body, 0], state.config.q[body, 1],
                        state.v[body, 0], state.v[body, 1]])
        row.extend([inertia, u, e])
        sink.write(",".join(format(x, ".17g") for x in row) + "\n")


def read_trajectory_csv(text: str, m, potential: PotentialSpec) -> Trajectory:
    """Parse a CSV produced by write_trajectory_csv back into a Trajectory."""
    lines = [line for line in text.splitlines() if line]
    if not lines:
        raise ParseError("empty CSV")
    masses = m if isinstance(m, MassVector) else MassVector(np.asarray(m, dtype=float))
    if lines[0] != csv_header(masses.n):
        raise ParseError("unexpected CSV header")
    samples = []
    for line in lines[1:]:
        cells = [float(c) for c in line.split(",")]
        if len(cells) != 4 * masses.n + 4:
            raise ParseError("row width does not match header")
        t = cells[0]
        body_cells = np.array(cells[1:1 + 4 * masses.n]).reshape(masses.n, 4)
        samples.append(PhaseState(PlanarConfiguration(body_cells[:, 0:2]),
                                  body_cells[:, 2:4], t))
    return Trajectory(tuple(samples), potential, masses)


def cmd_simulate(scenario: Scenario, sink) -> RunReport:
    """Integrate the scenario and stream the sampled trajectory as CSV."""
    if scenario.integrator is None:
        raise ValidationError("integrator", "required for simulate")
    traj = integrate(scenario.initial_state(), scenario.integrator,
                     scenario.potential, scenario.masses)
    write_trajectory_csv(traj, sink)
    report = RunReport("simulate")
    report.measurements["samples"] = len(traj)
    report.measurements["t_final"] = traj.samples[-1].t
    report.measurements["energy_drift"] = energy_drift(traj)
    try:
        report.measurements["inertia_variation"] = inertia_variation(traj)
    except ZeroInertia:
        report.details.append("inertia_variation undefined: zero inertia at start")
    return report


def cmd_cc_check(scenario: Scenario) -> RunReport:
    """Measure the central-configuration residual of the scenario positions."""
    tol = scenario.tolerances.get("cc", 1e-9)
    rep = cc_residual(scenario.positions, scenario.masses, scenario.potential, tol)
    report = RunReport("cc-check")
    report.measurements["residual"] = rep.residual
    report.measurements["omega_squared"] = rep.omega_squared
    report.measurements["tol"] = rep.tol
    report.details.append(f"is_cc = {_fmt(rep.is_cc)}")
    return report


def cmd_cc_refine(scenario: Scenario, k: float) -> RunReport:
    """Refine the scenario positions to a central configuration on I = k."""
    tol = scenario.tolerances.get("refine", 1e-10)
    refined = refine_cc(scenario.positions, scenario.masses, scenario.potential,
                        k, max_iter=200, tol=tol)
    rep = cc_residual(refined, scenario.masses, scenario.potential,
                      scenario.tolerances.get("cc", 1e-9))
    report = RunReport("cc-refine")
    report.measurements["k"] = float(k)
    report.measurements["residual"] = rep.residual
    report.measurements["omega_squared"] = rep.omega_squared
    report.measurements["I"] = moment_of_inertia(refined, scenario.masses)
    table = mutual_distances(refined).r
    n = scenario.masses.n
    for i in range(n):
        for j in range(i + 1, n):
            report.measurements[f"r{i + 1}{j + 1}"] = float(table[i, j])
    for i, (x, y) in enumerate(refined.q, start=1):
        report.details.append(f"body{i} = {_fmt(float(x))},{_fmt(float(y))}")
    return report


def cmd_family(k: float, n_samples: int) -> RunReport:
    """Sample the isosceles continuum and certify pairwise inequivalence."""
    result = verify_continuum(k, n_samples, tol=1e-12)
    report = RunReport("family")
    report.measurements["k"] = result.k
    report.measurements["samples"] = len(result.samples)
    report.verdicts["continuum"] = result.verdict
    for s in result.samples:
        report.details.append(
            f"eta = {_fmt(s.eta)}  residual = {_fmt(s.report.residual)}  "
            f"r23 = {_fmt(s.r23)}")
    report.details.extend(result.failures)
    report.exit_status = EXIT_OK if result.verdict else EXIT_VERIFICATION_FAILED
    return report


def cmd_saari(scenario: Scenario) -> RunReport:
    """Integrate the scenario and classify the resulting trajectory."""
    if scenario.integrator is None:
        raise ValidationError("integrator", "required for saari")
    traj = integrate(scenario.initial_state(), scenario.integrator,
                     scenario.potential, scenario.masses)
    rep = saari_check(traj,
                      tol_inertia=scenario.tolerances.get("inertia", 1e-8),
                      tol_rigidity=scenario.tolerances.get("rigidity", 1e-6))
    report = RunReport("saari")
    report.measurements["inertia_variation"] = rep.inertia_variation
    report.measurements["rigidity_defect"] = rep.rigidity_defect
    report.details.append(f"classification = {rep.classification}")
    report.details.append(
        f"certificate: pair {rep.certificate_pair} varies by "
        f"{_fmt(rep.certificate_variation)} (worst fit at t = {_fmt(rep.certificate_time)})")
    return report


def cmd_reproduce(which: str) -> RunReport:
    """Re-run one of the two headline verifications end to end."""
    report = RunReport(f"reproduce {which}")
    if which == "theorem1":
        result = verify_continuum(1.0, 64, tol=1e-12)
        base_lengths = [s.r23 for s in result.samples]
        monotone = all(b > a for a, b in zip(base_lengths, base_lengths[1:]))
        report.measurements["samples"] = len(result.samples)
        report.measurements["max_residual"] = max(s.report.residual for s in result.samples)
        report.verdicts["continuum_of_central_configurations"] = result.verdict
        report.verdicts["base_length_strictly_monotone"] = monotone
        for s in result.samples:
            report.details.append(f"eta = {_fmt(s.eta)}  residual = {_fmt(s.report.residual)}")
        report.details.extend(result.failures)
        passed = result.verdict and monotone
    elif which == "theorem2":
        result = verify_counterexample(1.0, 2.0 * math.pi, 1e-3)
        report.measurements["eom_max_error"] = result.eom_max_error
        report.measurements["inertia_variation_closed"] = result.inertia_variation_closed
        report.measurements["inertia_variation_integrated"] = result.inertia_variation_integrated
        report.measurements["rigidity_defect"] = result.rigidity.defect
        report.measurements["witness_defect_at_quarter_period"] = result.witness_defect
        report.measurements["r14_squared_swing"] = result.r14_squared_swing
        report.verdicts["closed_form_solves_equations_of_motion"] = result.passed_equations
        report.verdicts["moment_of_inertia_constant"] = result.passed_inertia
        report.verdicts["not_a_relative_equilibrium"] = result.passed_not_re
        report.verdicts["r14_swing_certificate"] = result.passed_certificate
        for pair, t in result.collision_pairs:
            report.details.append(f"pass-through collision: pair {pair} at t = {_fmt(t)}")
        passed = result.verdict
    else:
        raise ValidationError("which", "must be theorem1 or theorem2")
    report.exit_status = EXIT_OK if passed else EXIT_VERIFICATION_FAILED
    return report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonia",
        description="Planar n-body laboratory: simulate, check central "
                    "configurations, and verify constant-inertia certificates.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("simulate", help="integrate a scenario and write CSV")
    p.add_argument("file")
    p.add_argument("--out", required=True, help="CSV output path")

    p = sub.add_parser("cc-check", help="central-configuration residual of a scenario")
    p.add_argument("file")

    p = sub.add_parser("cc-refine", help="refine a scenario onto a central configuration")
    p.add_argument("file")
    p.add_argument("--k", type=float, required=True, help="target moment of inertia")

    p = sub.add_parser("family", help="sample the isosceles continuum")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)

    p = sub.add_parser("saari", help="classify a trajectory by inertia and rigidity")
    p.add_argument("file")

    p = sub.add_parser("reproduce", help="re-run a headline verification")
    p.add_argument("which", choices=["theorem1", "theorem2"])

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "simulate":
            scenario = load_scenario(args.file)
            with open(args.out, "w", encoding="utf-8") as sink:
                report = cmd_simulate(scenario, sink)
        elif args.verb == "cc-check":
            report = cmd_cc_check(load_scenario(args.file))
        elif args.verb == "cc-refine":
            report = cmd_cc_refine(load_scenario(args.file), args.k)
        elif args.verb == "family":
            report = cmd_family(args.k, args.samples)
        elif args.verb == "saari":
            report = cmd_saari(load_scenario(args.file))
        else:
            report = cmd_reproduce(args.which)
    except HarmoniaError as exc:
        sys.stdout.write(f"error: {exc}\n")
        return EXIT_ERROR
    except OSError as exc:
        sys.stdout.write(f"error: {exc}\n")
        return EXIT_ERROR
    sys.stdout.write(report.render())
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
