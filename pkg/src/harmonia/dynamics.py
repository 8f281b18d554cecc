"""Equations of motion, fixed-step integrators, and closed-form flows.

Two integrators are provided: velocity_verlet (symplectic, time reversible)
and rk4 (classical fourth order). Collisions of the harmonic flow are not
singular; bodies pass through each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    HARMONIC,
    MassVector,
    PhaseState,
    PlanarConfiguration,
    PotentialSpec,
    _gradient_rows,
    as_configuration,
    as_mass_vector,
    center_of_mass,
    rotation,
    total_energy,
)
from .errors import CMNotAtOrigin, NonFiniteState, ValidationError

VELOCITY_VERLET = "velocity_verlet"
RK4 = "rk4"
INTEGRATION_METHODS = (VELOCITY_VERLET, RK4)


@dataclass(frozen=True)
class IntegratorSpec:
    """Fixed-step integration request.

    The run covers round(t_end / dt) steps. Samples are retained every
    ``sample_stride`` steps; the initial and final states are always kept.
    """

    method: str
    dt: float
    t_end: float
    sample_stride: int = 10

    def __post_init__(self) -> None:
        if self.method not in INTEGRATION_METHODS:
            raise ValidationError("method", f"unknown integrator {self.method!r}")
        if not np.isfinite(self.dt) or self.dt <= 0.0:
            raise ValidationError("dt", "step size must be positive")
        if not np.isfinite(self.t_end) or self.t_end < self.dt:
            raise ValidationError("t_end", "must cover at least one step")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise ValidationError("sample_stride", "must be a positive integer")
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "t_end", float(self.t_end))
        object.__setattr__(self, "sample_stride", int(self.sample_stride))


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered phase-space samples of one solution."""

    samples: tuple
    potential: PotentialSpec
    m: MassVector

    def __post_init__(self) -> None:
        samples = tuple(self.samples)
        if not samples:
            raise ValidationError("samples", "trajectory must be nonempty")
        m = as_mass_vector(self.m)
        for s in samples:
            if not isinstance(s, PhaseState):
                raise ValidationError("samples", "entries must be PhaseState values")
            if s.n != m.n:
                raise ValidationError("samples", "body count must match masses")
        times = np.array([s.t for s in samples])
        if len(times) > 1 and not np.all(np.diff(times) > 0.0):
            raise ValidationError("samples", "times must be strictly increasing")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "m", m)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def positions(self) -> np.ndarray:
        """Stacked positions, shape (n_samples, n, 2)."""
        return np.array([s.config.q for s in self.samples])

    def velocities(self) -> np.ndarray:
        return np.array([s.v for s in self.samples])


def accelerations(potential: PotentialSpec, config, m) -> np.ndarray:
    """Per-body acceleration a_i = -(1/m_i) dU/dq_i, one row per body."""
    config = as_configuration(config)
    m = as_mass_vector(m)
    grad = _gradient_rows(potential, config.q, m.m)
    return -grad / m.m[:, None]


def _acceleration_function(potential: PotentialSpec, m: MassVector):
    mass = m.m
    total = m.total
    if potential.kind == HARMONIC:
        # a_i = -M (q_i - q_cm), independent of the body's own mass
        def accel(q: np.ndarray) -> np.ndarray:
            return (mass @ q) - total * q

        return accel

    inv = 1.0 / mass[:, None]

    def accel(q: np.ndarray) -> np.ndarray:
        return -inv * _gradient_rows(potential, q, mass)

    return accel


def integrate(state0: PhaseState, integrator: IntegratorSpec,
              potential: PotentialSpec, m) -> Trajectory:
    """Integrate the equations of motion m_i q''_i = -dU/dq_i from ``state0``.

    Raises NonFiniteState if any coordinate leaves IEEE range and
    CollisionSingularity if a singular potential sees a pair separation
    below the collision threshold.
    """
    m = as_mass_vector(m)
    if not isinstance(state0, PhaseState):
        raise ValidationError("state0", "expected a PhaseState")
    if state0.n != m.n:
        raise ValidationError("state0", "body count must match masses")
    if not isinstance(integrator, IntegratorSpec):
        raise ValidationError("integrator", "expected an IntegratorSpec")

    accel = _acceleration_function(potential, m)
    dt = integrator.dt
    stride = integrator.sample_stride
    n_steps = max(1, int(round(integrator.t_end / dt)))
    t0 = state0.t

    q = np.array(state0.config.q)
    v = np.array(state0.v)
    kept = [(0, q.copy(), v.copy())]

    def check_finite(step: int) -> None:
        if not (np.isfinite(q).all() and np.isfinite(v).all()):
            raise NonFiniteState(f"non-finite state at step {step} (t={t0 + step * dt:g})")

    # overflow on a diverging state is reported through NonFiniteState
    with np.errstate(over="ignore", invalid="ignore"):
        if integrator.method == VELOCITY_VERLET:
            a = accel(q)
            for i in range(1, n_steps + 1):
                v += 0.5 * dt * a
                q += dt * v
                a = accel(q)
                v += 0.5 * dt * a
                check_finite(i)
                if i % stride == 0 or i == n_steps:
                    kept.append((i, q.copy(), v.copy()))
        else:
            for i in range(1, n_steps + 1):
                k1v = accel(q)
                k2v = accel(q + 0.5 * dt * v)
                k2q = v + 0.5 * dt * k1v
                k3v = accel(q + 0.5 * dt * k2q)
                k3q = v + 0.5 * dt * k2v
                k4v = accel(q + dt * k3q)
                k4q = v + dt * k3v
                q = q + (dt / 6.0) * (v + 2.0 * k2q + 2.0 * k3q + k4q)
                v = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
                check_finite(i)
                if i % stride == 0 or i == n_steps:
                    kept.append((i, q.copy(), v.copy()))

    samples = tuple(
        PhaseState(PlanarConfiguration(qq), vv, t0 + i * dt) for i, qq, vv in kept)
    return Trajectory(samples, potential, m)


def energy_drift(traj: Trajectory) -> float:
    """Worst relative excursion of the total energy along the trajectory."""
    values = [total_energy(traj.potential, s, traj.m) for s in traj.samples]
    h0 = values[0]
    scale = max(1.0, abs(h0))
    return max(abs(h - h0) for h in values) / scale


def rhombus_masses() -> MassVector:
    return MassVector(np.ones(4))


def closed_form_rhombus(k: float, t: float) -> PhaseState:
    """Exact rhombus solution of the four-body harmonic problem at time t.

    Bodies 1 and 4 sit on the y axis at +/- y1, bodies 2 and 3 on the x
    axis at -/+ x3, with y1 = sqrt(k/2) cos(2t) and x3 = sqrt(k/2) sin(2t).
    The moment of inertia equals k for every t while the shape breathes
    between the two degenerate segments, so the motion is a genuine
    solution with constant inertia that never rotates rigidly.
    """
    if not np.isfinite(k) or k <= 0.0:
        raise ValidationError("k", "must be positive")
    amp = math.sqrt(k / 2.0)
    c = math.cos(2.0 * t)
    s = math.sin(2.0 * t)
    y1 = amp * c
    x3 = amp * s
    vy1 = -2.0 * amp * s
    vx3 = 2.0 * amp * c
    q = np.array([[0.0, y1], [-x3, 0.0], [x3, 0.0], [0.0, -y1]])
    v = np.array([[0.0, vy1], [-vx3, 0.0], [vx3, 0.0], [0.0, -vy1]])
    return PhaseState(PlanarConfiguration(q), v, float(t))


def rhombus_trajectory(k: float, times) -> Trajectory:
    """Closed-form rhombus solution sampled at the given times."""
    samples = tuple(closed_form_rhombus(k, float(t)) for t in np.asarray(times, dtype=float))
    return Trajectory(samples, PotentialSpec.harmonic(), rhombus_masses())


def rotating_re_solution(config0, m, t: float) -> PhaseState:
    """Rigidly rotating harmonic solution through ``config0`` at time t.

    With the center of mass at the origin every body obeys
    q''_i = -M q_i, so q_i(t) = R(sqrt(M) t) q_i(0) solves the equations
    of motion exactly while all mutual distances stay fixed: the canonical
    positive control for relative-equilibrium detection.
    """
    config0 = as_configuration(config0)
    m = as_mass_vector(m)
    qcm = center_of_mass(config0, m)
    if float(np.hypot(*qcm)) > 1e-12:
        raise CMNotAtOrigin(f"|q_cm| = {float(np.hypot(*qcm)):.3e} exceeds 1e-12")
    omega = math.sqrt(m.total)
    rot = rotation(omega * t)
    q = config0.q @ rot.T
    # velocity is omega * J q with J the quarter-turn generator
    v = omega * np.column_stack([-q[:, 1], q[:, 0]])
    return PhaseState(PlanarConfiguration(q), v, float(t))


def rotating_re_trajectory(config0, m, times) -> Trajectory:
    """Rigidly rotating solution sampled at the given times."""
    config0 = as_configuration(config0)
    m = as_mass_vector(m)
    samples = tuple(rotating_re_solution(config0, m, float(t))
                    for t in np.asarray(times, dtype=float))
    return Trajectory(samples, PotentialSpec.harmonic(), m)
