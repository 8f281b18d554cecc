"""Rigid-motion fitting, inertia monitoring, and the counterexample verifier."""

import math

import numpy as np
import pytest

from harmonia import (
    CONSTANT_INERTIA_NOT_RE,
    RELATIVE_EQUILIBRIUM,
    VARYING_INERTIA,
    IntegratorSpec,
    MassVector,
    PhaseState,
    PlanarConfiguration,
    PotentialSpec,
    Trajectory,
    ZeroInertia,
    build_theorem2_state,
    closed_form_rhombus,
    inertia_variation,
    integrate,
    is_relative_equilibrium,
    moment_of_inertia,
    rhombus_masses,
    rhombus_trajectory,
    rigid_fit,
    rotating_re_trajectory,
    rotation,
    saari_check,
    total_energy,
    verify_counterexample,
)

HARMONIC = PotentialSpec.harmonic()
M4 = rhombus_masses()

CENTERED_TRIANGLE = PlanarConfiguration(
    [[0.0, 1.0], [-math.sqrt(3.0) / 2.0, -0.5], [math.sqrt(3.0) / 2.0, -0.5]])
M3 = MassVector([1.0, 1.0, 1.0])


def oracle_fit_residual(a, b, masses, steps=20000):
    """Brute-force scan over angles and both determinant branches."""
    w = masses.m
    best = math.inf
    flip = np.diag([1.0, -1.0])
    for theta in np.linspace(0.0, 2.0 * math.pi, steps, endpoint=False):
        rot = rotation(float(theta))
        for omega in (rot, rot @ flip):
            d = a.q - b.q @ omega.T
            best = min(best, float(w @ (d * d).sum(axis=1)))
    return math.sqrt(best / float(w.sum()))


def test_rigid_fit_identity():
    fit = rigid_fit(CENTERED_TRIANGLE, CENTERED_TRIANGLE, M3)
    assert fit.residual == 0.0
    assert fit.omega == pytest.approx(np.eye(2), abs=1e-15)
    assert fit.det_sign == 1


def test_rigid_fit_recovers_exact_rotation(rng):
    config = PlanarConfiguration(rng.uniform(-3, 3, size=(5, 2)))
    masses = MassVector(rng.uniform(0.5, 4.0, size=5))
    fit = rigid_fit(config.rotated(math.pi / 2.0), config, masses)
    assert fit.residual <= 1e-12
    assert fit.omega == pytest.approx(rotation(math.pi / 2.0), abs=1e-12)


def test_rigid_fit_recovers_random_orthogonal_maps(rng):
    flip = np.diag([1.0, -1.0])
    for _ in range(100):
        n = int(rng.integers(2, 7))
        config = PlanarConfiguration(rng.uniform(-5, 5, size=(n, 2)))
        masses = MassVector(rng.uniform(0.1, 10.0, size=n))
        angle = float(rng.uniform(0, 2 * math.pi))
        reflect = bool(rng.integers(0, 2))
        omega = rotation(angle) @ flip if reflect else rotation(angle)
        mapped = PlanarConfiguration(config.q @ omega.T)
        fit = rigid_fit(mapped, config, masses)
        scale = math.sqrt(moment_of_inertia(config, masses))
        assert fit.residual <= 1e-12 * max(1.0, scale)
        assert fit.det_sign == (-1 if reflect else 1)


def test_rigid_fit_rhombus_quarter_turn_defect():
    a = closed_form_rhombus(1.0, math.pi / 4.0).config
    b = closed_form_rhombus(1.0, 0.0).config
    fit = rigid_fit(a, b, M4)
    assert fit.residual > 0.0
    # the label pattern swaps which pair is extended, so no orthogonal map
    # fits; the oracle scan agrees with the closed-form minimum
    assert fit.residual == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert fit.residual <= oracle_fit_residual(a, b, M4) + 1e-6


def test_rigid_fit_invariant_under_joint_rotation(rng):
    config = PlanarConfiguration(rng.uniform(-2, 2, size=(4, 2)))
    other = PlanarConfiguration(rng.uniform(-2, 2, size=(4, 2)))
    masses = MassVector(rng.uniform(0.5, 2.0, size=4))
    base = rigid_fit(config, other, masses).residual
    for angle in (0.4, 1.9, 5.0):
        a = config.rotated(angle)
        b = other.rotated(angle)
        assert abs(rigid_fit(a, b, masses).residual - base) <= 1e-12


def test_rigid_fit_degenerate_reference():
    ref = PlanarConfiguration(np.zeros((3, 2)))
    fit = rigid_fit(CENTERED_TRIANGLE, ref, M3)
    assert fit.omega == pytest.approx(np.eye(2), abs=1e-15)
    assert fit.residual == pytest.approx(1.0, rel=1e-12)  # sqrt(I_cart / M)


def test_inertia_variation_closed_form():
    traj = rhombus_trajectory(1.0, np.linspace(0.0, 2.0 * math.pi, 2001))
    assert inertia_variation(traj) <= 1e-12


def test_inertia_variation_single_sample():
    traj = Trajectory((closed_form_rhombus(1.0, 0.0),), HARMONIC, M4)
    assert inertia_variation(traj) == 0.0


def test_inertia_variation_generic_trajectory(rng):
    config = PlanarConfiguration(rng.uniform(-1.5, 1.5, size=(3, 2)))
    state = PhaseState(config, rng.uniform(-1.0, 1.0, size=(3, 2)))
    traj = integrate(state, IntegratorSpec("rk4", 1e-3, 2.0), HARMONIC, M3)
    assert inertia_variation(traj) > 1e-3


def test_inertia_variation_zero_inertia():
    state = PhaseState([[0.0, 0.0]] * 2, np.zeros((2, 2)))
    traj = Trajectory((state,), HARMONIC, MassVector([1.0, 1.0]))
    with pytest.raises(ZeroInertia):
        inertia_variation(traj)


def test_rotating_control_is_relative_equilibrium():
    times = np.linspace(0.0, 2.0 * math.pi / math.sqrt(3.0), 257)
    traj = rotating_re_trajectory(CENTERED_TRIANGLE, M3, times)
    result = is_relative_equilibrium(traj, tol=1e-6)
    assert result.is_re
    assert result.defect <= 1e-9
    # necessary condition: mutual distances essentially frozen
    assert result.max_pair_variation <= 10.0 * 1e-6 * math.sqrt(
        moment_of_inertia(CENTERED_TRIANGLE, M3))


def test_rhombus_is_not_relative_equilibrium():
    traj = rhombus_trajectory(1.0, np.linspace(0.0, 2.0 * math.pi, 1001))
    result = is_relative_equilibrium(traj, tol=1e-6)
    assert not result.is_re
    assert result.worst_pair == (1, 4)
    # r14 = 2 |y1| swings between 0 and sqrt(2k)
    assert result.max_pair_variation == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_constant_trajectory_is_relative_equilibrium():
    state = closed_form_rhombus(1.0, 0.0)
    frozen = tuple(PhaseState(state.config, state.v, t) for t in (0.0, 0.5, 1.0))
    traj = Trajectory(frozen, HARMONIC, M4)
    result = is_relative_equilibrium(traj, tol=1e-6)
    assert result.is_re
    assert result.defect == 0.0


def test_r14_swing_matches_cosine_law():
    k = 3.7
    times = np.linspace(0.0, 2.0 * math.pi, 1001)
    traj = rhombus_trajectory(k, times)
    pos = traj.positions()
    r14_sq = ((pos[:, 0, :] - pos[:, 3, :]) ** 2).sum(axis=1)
    expected = 2.0 * k * np.cos(2.0 * times) ** 2
    assert np.abs(r14_sq - expected).max() <= 1e-12 * k


def test_saari_check_classifications(rng):
    rhombus = rhombus_trajectory(1.0, np.linspace(0.0, 2.0 * math.pi, 501))
    assert saari_check(rhombus).classification == CONSTANT_INERTIA_NOT_RE

    rotating = rotating_re_trajectory(
        CENTERED_TRIANGLE, M3, np.linspace(0.0, 3.0, 301))
    assert saari_check(rotating).classification == RELATIVE_EQUILIBRIUM

    config = PlanarConfiguration(rng.uniform(-1.5, 1.5, size=(3, 2)))
    state = PhaseState(config, rng.uniform(-1.0, 1.0, size=(3, 2)))
    generic = integrate(state, IntegratorSpec("rk4", 1e-3, 2.0), HARMONIC, M3)
    assert saari_check(generic).classification == VARYING_INERTIA


def test_saari_report_consistency():
    # 1000 intervals put both t = 0 and t = pi/4 on the grid, so the pair
    # variations tie exactly and the certificate names the first pair
    report = saari_check(rhombus_trajectory(1.0, np.linspace(0.0, 2.0 * math.pi, 1001)))
    assert report.inertia_variation <= report.tol_inertia
    assert report.rigidity_defect > report.tol_rigidity
    assert report.certificate_pair == (1, 4)


def test_build_theorem2_state_values():
    state = build_theorem2_state(1.0)
    amp = math.sqrt(0.5)
    assert state.config.q == pytest.approx(
        np.array([[0.0, amp], [0.0, 0.0], [0.0, 0.0], [0.0, -amp]]), abs=1e-15)
    assert state.v == pytest.approx(
        np.array([[0.0, 0.0], [-math.sqrt(2.0), 0.0], [math.sqrt(2.0), 0.0], [0.0, 0.0]]),
        abs=1e-15)
    assert moment_of_inertia(state.config, M4) == pytest.approx(1.0, rel=1e-15)


def test_theorem2_energy_constant_along_flow():
    state = build_theorem2_state(1.0)
    h0 = total_energy(HARMONIC, state, M4)
    assert h0 == pytest.approx(4.0, rel=1e-14)
    traj = integrate(state, IntegratorSpec("rk4", 1e-3, 2.0 * math.pi), HARMONIC, M4)
    for s in traj.samples:
        assert abs(total_energy(HARMONIC, s, M4) - h0) <= 1e-8


def test_verify_counterexample_default():
    report = verify_counterexample(1.0, 2.0 * math.pi, 1e-3)
    assert report.verdict
    assert report.passed_equations and report.passed_inertia
    assert report.passed_not_re and report.passed_certificate
    assert report.r14_squared_swing == pytest.approx(2.0, abs=1e-10)
    assert report.witness_defect > 1e-2
    pairs = {pair for pair, _ in report.collision_pairs}
    assert pairs == {(1, 4), (2, 3)}


def test_verify_counterexample_scales_with_k():
    report = verify_counterexample(5.0, 2.0 * math.pi, 1e-3)
    assert report.verdict
    assert report.r14_squared_swing == pytest.approx(10.0, abs=1e-10)


@pytest.mark.parametrize("k", [0.1, 1.0, 10.0])
def test_counterexample_robustness_rk4(k):
    assert verify_counterexample(k, 2.0 * math.pi, 1e-3, method="rk4").verdict


@pytest.mark.parametrize("k", [0.1, 1.0, 10.0])
def test_counterexample_robustness_verlet(k):
    # verlet needs a finer step: its invariant-ellipse distortion scales
    # with dt^2 and must stay below the 1e-8 inertia bound
    assert verify_counterexample(k, math.pi, 5e-5, method="velocity_verlet").verdict


def test_rotating_control_defeats_check_c():
    # negative control: the rigid rotation IS a relative equilibrium, so
    # the non-rigidity check must reject it
    times = np.linspace(0.0, 2.0 * math.pi / math.sqrt(3.0), 257)
    traj = rotating_re_trajectory(CENTERED_TRIANGLE, M3, times)
    result = is_relative_equilibrium(traj, tol=1e-6)
    assert result.is_re
    assert not ((not result.is_re) and result.defect > 1e-2)
