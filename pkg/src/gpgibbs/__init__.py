"""Sampling laboratory for tamed Gibbs measures of the 1D focusing
Gross-Pitaevskii field in a harmonic trap.

Hermite spectral discretization, Gaussian reference fields with Wick
renormalization, constrained ground states, shell-conditioned samplers,
and the three low-temperature experiments (free energy, shell entropy,
orbit concentration).
"""

__version__ = "0.1.0"

from .errors import (
    CalibrationError,
    ConvergenceError,
    DiagnosticError,
    GpGibbsError,
    ParameterError,
)
from .spectral import (
    HermiteBasis,
    analyze,
    build_basis,
    gns_ratio,
    norm_lp,
    norm_sobolev,
    synthesize,
)
from .fields import (
    GibbsParams,
    gaussian_logdensity,
    renorm_constant,
    sample_gaussian,
    sample_gaussian_batch,
    wick_mass,
)
from .energy import (
    CalibrationResult,
    EnergyBreakdown,
    calibrate_A,
    grand_hamiltonian,
    gradient_h,
    hamiltonian,
    laplace_rate,
    mass,
    quartic_integral,
    rate_jd,
    tamed_potential,
)
from .soliton import (
    MinimizeOptions,
    OrbitDistance,
    SolitonResult,
    ThresholdScan,
    minimize_constrained,
    minimize_unconstrained_hg,
    orbit_distance,
    scan_mass_threshold,
)
from .mcmc import (
    ChainConfig,
    ChainResult,
    Estimate,
    default_step_beta,
    estimate_partition,
    estimate_shell_probability,
    make_shell_init,
    pcn_step,
    run_chain,
    run_conditioned_chain,
)
from .oracle import OracleGrid, quadrature_oracle
from .ldp import (
    ExperimentReport,
    RateFit,
    concentration_experiment,
    entropy_experiment,
    fit_rate,
    free_energy_experiment,
    shell_rate_target,
)

__all__ = [
    "__version__",
    "GpGibbsError", "ParameterError", "DiagnosticError", "ConvergenceError",
    "CalibrationError",
    "HermiteBasis", "build_basis", "synthesize", "analyze", "norm_sobolev",
    "norm_lp", "gns_ratio",
    "GibbsParams", "sample_gaussian", "sample_gaussian_batch",
    "renorm_constant", "wick_mass", "gaussian_logdensity",
    "EnergyBreakdown", "mass", "quartic_integral", "hamiltonian",
    "grand_hamiltonian", "tamed_potential", "gradient_h", "rate_jd",
    "laplace_rate", "CalibrationResult", "calibrate_A",
    "MinimizeOptions", "SolitonResult", "ThresholdScan", "OrbitDistance",
    "minimize_constrained", "scan_mass_threshold",
    "minimize_unconstrained_hg", "orbit_distance",
    "ChainConfig", "ChainResult", "Estimate", "default_step_beta",
    "pcn_step", "run_chain", "run_conditioned_chain", "make_shell_init",
    "estimate_partition", "estimate_shell_probability",
    "OracleGrid", "quadrature_oracle",
    "RateFit", "ExperimentReport", "fit_rate", "shell_rate_target",
    "free_energy_experiment", "entropy_experiment",
    "concentration_experiment",
]
