"""Iteration, fixed points, stability and limit behaviour of gonosomal evolution operators."""
from .exceptions import (
    DimensionMismatch,
    GonodynError,
    IdentityViolated,
    InvariantViolation,
    NegativeCoefficient,
    NegativeCoordinate,
    NoConvergence,
    NormalizationViolation,
    NotAFixedPoint,
    NotOnSupportedSubspace,
    ParameterConditionViolated,
    ParameterError,
    SingularJacobianAtSeed,
    StateOverflow,
)
from .fixed_points import (
    FixedPoint,
    Form,
    all_fixed_points,
    closed_form_fixed_points,
    damped_newton,
    form_of,
    solve_interior_fixed_points,
)
from .limits import (
    LimitPrediction,
    Outcome,
    PredictorConfig,
    Region,
    classify_region,
    closed_form_axis_trajectory,
    predict_limit,
    predict_limit_general,
    simulate_until,
)
from .operator import (
    GeneralOperator,
    HemophiliaParams,
    Termination,
    Trajectory,
    apply,
    apply_general,
    hemophilia_to_general,
    iterate,
    load_params,
    preset,
    random_params,
    residual,
    save_params,
)
from .spectral import (
    CharCoeffs,
    Stability,
    StabilityClass,
    char_coeffs,
    classify,
    eigenvalues_closed_form,
    eigenvalues_numeric,
    jacobian,
)

__version__ = "0.1.0"
