"""Planar n-body laboratory for the harmonic potential.

Core objects: configurations, masses, potentials, and their scalar
invariants (moment of inertia, potential and total energy) with exact
gradients. On top of those sit fixed-step integrators, central-
configuration machinery (the residual test, constrained refinement, and
the one-parameter isosceles continuum), and rigidity analysis that
classifies trajectories as relative equilibria or as constant-inertia
counterexamples.
"""

from .core import (
    COLLISION_EPS,
    HARMONIC,
    NEWTONIAN,
    POWER,
    MassVector,
    MutualDistanceTable,
    PhaseState,
    PlanarConfiguration,
    PotentialSpec,
    as_configuration,
    as_mass_vector,
    center_of_mass,
    inertia_gradient,
    kinetic_energy,
    moment_of_inertia,
    moment_of_inertia_cartesian,
    mutual_distances,
    potential_energy,
    potential_gradient,
    rotation,
    total_energy,
    total_mass,
)
from .dynamics import (
    RK4,
    VELOCITY_VERLET,
    IntegratorSpec,
    Trajectory,
    accelerations,
    closed_form_rhombus,
    energy_drift,
    integrate,
    rhombus_masses,
    rhombus_trajectory,
    rotating_re_solution,
    rotating_re_trajectory,
)
from .central_config import (
    CCReport,
    ContinuumReport,
    FamilySample,
    cc_residual,
    family_masses,
    refine_cc,
    rotationally_equivalent,
    theorem1_family,
    verify_continuum,
)
from .saari import (
    CONSTANT_INERTIA_NOT_RE,
    RELATIVE_EQUILIBRIUM,
    VARYING_INERTIA,
    CounterexampleReport,
    RigidFitResult,
    RigidityResult,
    SaariReport,
    build_theorem2_state,
    inertia_variation,
    is_relative_equilibrium,
    rigid_fit,
    saari_check,
    verify_counterexample,
)
from .errors import (
    CMNotAtOrigin,
    CollisionSingularity,
    DegenerateGradient,
    HarmoniaError,
    NoConvergence,
    NonFiniteState,
    ParseError,
    ValidationError,
    ZeroInertia,
)
from .sampling import corpus_rng, corpus_seed, random_configuration, random_masses

__version__ = "0.1.0"
