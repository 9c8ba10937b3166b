"""Stochastic approximation Hamiltonian Monte Carlo.

An HMC variant that adaptively flattens energy barriers: the energy range is
cut into regions, each region gets a log-weight theta that is learned on the
fly by stochastic approximation, and the Metropolis test is biased by the
weight difference so the chain crosses between modes far more often than
plain HMC. Plain HMC is the special case of a single region with no
adaptation.
"""

from .core import (
    EnergyPartition,
    GainSchedule,
    MassMatrix,
    SamplerConfig,
    TargetDensity,
    ThetaRangeError,
    ThetaWeights,
    region_index,
    theta_update,
)
from .diagnostics import (
    EssReport,
    ModeReport,
    barrier_profile,
    ess,
    ess_report,
    frequency_error,
    min_energy,
    mode_assignment,
    mode_report,
    posterior_risk,
    theta_convergence_check,
)
from .harness import (
    ExperimentConfig,
    ResultTable,
    compare_summary,
    emit_plot_data,
    load_record,
    parse_config,
    run_experiment,
    save_record,
)
from .integrator import DivergentTrajectory, PhasePoint, hamiltonian, kinetic_energy, leapfrog
from .quadrature import QuadratureError, occupancy_from_masses, region_masses
from .samplers import (
    ChainState,
    RunRecord,
    hmc_step,
    run_chain,
    run_parallel,
    sahmc_accept_ratio,
    sahmc_step,
)
from .targets import (
    bimodal_1d,
    harmonic_oscillator,
    mixture_8,
    mixture_8_modes,
    standard_normal,
    trimodal_2d,
)

__version__ = "0.1.0"

__all__ = [
    "ChainState",
    "DivergentTrajectory",
    "EnergyPartition",
    "EssReport",
    "ExperimentConfig",
    "GainSchedule",
    "MassMatrix",
    "ModeReport",
    "PhasePoint",
    "QuadratureError",
    "ResultTable",
    "RunRecord",
    "SamplerConfig",
    "TargetDensity",
    "ThetaRangeError",
    "ThetaWeights",
    "barrier_profile",
    "bimodal_1d",
    "compare_summary",
    "emit_plot_data",
    "ess",
    "ess_report",
    "frequency_error",
    "hamiltonian",
    "harmonic_oscillator",
    "hmc_step",
    "kinetic_energy",
    "leapfrog",
    "load_record",
    "min_energy",
    "mixture_8",
    "mixture_8_modes",
    "mode_assignment",
    "mode_report",
    "occupancy_from_masses",
    "parse_config",
    "posterior_risk",
    "region_index",
    "region_masses",
    "run_chain",
    "run_experiment",
    "run_parallel",
    "sahmc_accept_ratio",
    "sahmc_step",
    "save_record",
    "standard_normal",
    "theta_convergence_check",
    "theta_update",
    "trimodal_2d",
]
