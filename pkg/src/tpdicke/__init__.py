"""Mean-field steady states, stability and phase diagrams of the dissipative two-photon Dicke model."""

from .dynamics import NORMAL_STATE, MeanFieldState, Trajectory, integrate, jacobian, rhs, settle
from .model import (
    DerivedRates,
    DickeError,
    ModelParams,
    ParameterError,
    QuadraturePotential,
    collapse_coupling,
    derived_rates,
    quadrature_potential,
    validate_params,
)
from .stability import PhaseLabel, StabilityReport, classify, eigenvalues, jacobian_normal, jacobian_superradiant
from .steady import SteadyStateBranch, is_physical, normal_branch, refine_fixed_point, superradiant_branches

__version__ = "0.1.0"
