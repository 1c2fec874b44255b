"""Attractor dimension bounds for the Dirichlet complex Ginzburg-Landau equation."""

from .bounds import (
    CGLParams,
    DimensionReport,
    TrivialRegimeError,
    baseline_dimension_bound,
    build_report,
    classify_regime,
    constant_A,
    constant_B,
    constant_c1,
    constant_c2,
    dimension_bound,
    melas_gamma_threshold,
)
from .geometry import Domain, inertia_ball_lower_bound, moment_of_inertia, unit_ball_volume, volume
from .simulator import (
    CGLSimulator,
    SimConfig,
    SimulationBlowUp,
    State,
    Trajectory,
    delta_estimate,
    empirical_qm,
    lieb_thirring_witness,
)
from .spectrum import (
    MethodConstants,
    Spectrum,
    doubled_spectrum,
    doubled_sum_lower_bound,
    enumerate_eigenvalues,
    li_yau_lower_bound,
    melas_lower_bound,
    verify_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "baseline_dimension_bound",
    "build_report",
    "CGLParams",
    "CGLSimulator",
    "classify_regime",
    "constant_A",
    "constant_B",
    "constant_c1",
    "constant_c2",
    "delta_estimate",
    "dimension_bound",
    "DimensionReport",
    "Domain",
    "doubled_spectrum",
    "doubled_sum_lower_bound",
    "empirical_qm",
    "enumerate_eigenvalues",
    "inertia_ball_lower_bound",
    "li_yau_lower_bound",
    "lieb_thirring_witness",
    "melas_gamma_threshold",
    "melas_lower_bound",
    "MethodConstants",
    "moment_of_inertia",
    "SimConfig",
    "SimulationBlowUp",
    "Spectrum",
    "State",
    "Trajectory",
    "TrivialRegimeError",
    "unit_ball_volume",
    "verify_bounds",
    "volume",
]
