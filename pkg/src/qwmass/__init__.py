"""Dirac quantum walk, accelerated frames, variable-mass dynamics and the gravitational Bohr atom."""
from .bohr import AtomSpec, coulomb_expectations, grav_expectations, mass_scaling_report
from .frames import (
    MassTauPacket,
    Trajectory,
    bargmann_compose,
    conjugate_grids,
    egt_phase,
    free_gaussian,
    gaussian_mass_packet,
    lorentz_compose,
    packet_uncertainty,
    paradox_shift,
    verify_boost_covariance,
)
from .varmass import (
    BindingSpec,
    DecaySpec,
    GaugeProblem,
    IntegratorConfig,
    VarMassState,
    binding_run,
    decay_run,
    free_run,
    gauge_solve,
)
from .walk import (
    RepresentationError,
    SingularPointError,
    SpinorField,
    WalkParams,
    eigensystem,
    evolve,
    group_velocity,
    hamiltonian,
    omega,
    step,
    to_momentum,
    to_position,
)
from .wavepacket import GaussianSpec, make_packet, measure_group_velocity

__version__ = "0.1.0"
