"""Numerical laboratory for damped inertial gradient dynamics.

The continuous object of study is the second-order system

    x'' + gamma(t) x' + beta(t) Hess f(x) x' + b(t) grad f(x) = 0,

with time-dependent viscous damping gamma, Hessian damping beta, and gradient
rescaling b. The package integrates trajectories, derives Lyapunov
certificates for several damping recipes, checks the associated sufficient
condition systems on grids, tests claimed convergence rates against computed
trajectories, and runs the matching inertial proximal recursion.
"""

from .errors import (
    InertiaLabError, ConfigError, DivergentTailError, DomainError, GridError,
    ParamError, QuadratureError, WindowError, InsufficientDataError,
    MissingArgminError, MissingProxError, MissingCertificateError,
    NonmonotoneBError, NotPSDError, UnsupportedRecipeError,
)
from .schedules import (
    Schedule, Const, Power, AlphaOverT, ExpPower, Sum, Prod, Quot,
    TableSchedule, IntegralProfile, constant, power, alpha_over_t_power,
    exp_power, sum_schedule, product_schedule, table_schedule, from_config,
    is_nondecreasing, is_log_concave, schedule_is_zero,
)
from .problems import (
    Objective, make_quadratic, make_log_barrier, make_custom, hvp_fd,
    objective_from_config,
)
from .certificates import (
    Certificate, ConditionReport, CONDITION_SETS,
    derive_gamma_certificate, derive_model_certificate, derive_p_certificate,
    check_conditions, energy, energy_batch, recovery_residuals,
    values_weight, weight_q, upsilon, make_grid,
)
from .dynamics import DynamicsSpec, IntegratorConfig, Trajectory, integrate, rhs
from . import dynamics as _dynamics
from .analysis import (
    RateClaim, RateVerdict, FitResult, bound_check, check_monotone,
    default_window, fit_power_rate, fit_exp_rate, oscillation_count,
)
from .algorithms import (
    Rule, IPConfig, IterateSequence, alpha_constant, alpha_one_minus_over_k,
    lambda_constant, lambda_power, prox_step, inertial_proximal, t_sequence,
)
from .presets import PRESETS, get_preset

# dynamics.energy evaluates the certificate energy along a trajectory point;
# exported under a distinct name because certificates.energy takes schedules
energy_at = _dynamics.energy

__version__ = "0.1.0"

__all__ = [
    "InertiaLabError", "ConfigError", "DivergentTailError", "DomainError",
    "GridError", "ParamError", "QuadratureError", "WindowError",
    "InsufficientDataError",
    "MissingArgminError", "MissingProxError", "MissingCertificateError",
    "NonmonotoneBError", "NotPSDError", "UnsupportedRecipeError",
    "Schedule", "Const", "Power", "AlphaOverT", "ExpPower", "Sum", "Prod",
    "Quot", "TableSchedule", "IntegralProfile", "constant", "power",
    "alpha_over_t_power", "exp_power", "sum_schedule", "product_schedule",
    "table_schedule", "from_config", "is_nondecreasing", "is_log_concave",
    "schedule_is_zero",
    "Objective", "make_quadratic", "make_log_barrier", "make_custom",
    "hvp_fd", "objective_from_config",
    "Certificate", "ConditionReport", "CONDITION_SETS",
    "derive_gamma_certificate", "derive_model_certificate",
    "derive_p_certificate", "check_conditions", "energy", "energy_batch",
    "energy_at", "recovery_residuals", "values_weight", "weight_q",
    "upsilon", "make_grid",
    "DynamicsSpec", "IntegratorConfig", "Trajectory", "integrate", "rhs",
    "RateClaim", "RateVerdict", "FitResult", "bound_check", "check_monotone",
    "default_window", "fit_power_rate", "fit_exp_rate", "oscillation_count",
    "Rule", "IPConfig", "IterateSequence", "alpha_constant",
    "alpha_one_minus_over_k", "lambda_constant", "lambda_power", "prox_step",
    "inertial_proximal", "t_sequence",
    "PRESETS", "get_preset",
    "__version__",
]
