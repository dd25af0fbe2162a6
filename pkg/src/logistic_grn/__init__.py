"""Logistic-function gene regulatory network toolkit.

Sigmoid analytics, product-of-sigmoid network models with Lipschitz bounds,
ODE/DDE simulation, equilibrium and bifurcation analysis, and calibration of
logistic parameters from linear activation models.
"""

from .analysis import (
    BistabilityReport,
    EquilibriumReport,
    HopfReport,
    Regime,
    Stability,
    autoreg_fixed_points,
    find_equilibrium,
    hill_alpha_crit,
    hopf_critical_delay,
    logistic_saddle_nodes,
)
from .calibration import (
    CalibrationResult,
    FitConfig,
    FitProblem,
    FreeParameter,
    LinearActivationReference,
    LinearActivationSpec,
    Strategy,
    derive_activation_params,
    derive_activation_params_general,
    derive_weighted_params,
    fit_least_squares,
)
from .dynamics import ConstantHistory, IntegratorConfig, Trajectory, measure_escape_time, simulate_dde, simulate_ode
from .errors import (
    ConvergenceError,
    DegenerateDelayError,
    DelayedNetworkError,
    DomainError,
    FitDivergenceError,
    GRNError,
    HillSingularityError,
    HistoryError,
    IntegrationError,
    ModelFileError,
    NoBistableBandError,
    OrientationError,
    SingularJacobianError,
    UnsupportedCoefficientError,
    UnsupportedEdgeError,
)
from .network import GeneNode, LipschitzReport, Network, RegulationEdge, lipschitz_report
from .sigmoid import (
    HillSpec,
    LogisticSpec,
    Orientation,
    basal_rate,
    hill_eval,
    logistic_derivative,
    logistic_eval,
    logistic_inverse,
    match_steepness,
)

__version__ = "0.1.0"
