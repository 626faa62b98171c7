"""Lower bounds on lq-minimization recovery thresholds (sectional, strong, weak)."""

from .errors import (
    ConfigurationError,
    DegenerateInstanceError,
    DomainError,
    LqthrError,
    OptimizationFailure,
    RangeError,
    UnboundedObjectiveError,
)
from .inner_opt import (
    InnerSolution,
    coordinate_max_minus,
    coordinate_max_plus,
    coordinate_max_q0,
    coordinate_max_q_half,
    coordinate_max_shifted,
    cubic_stationary_q_half,
)
from .nullspace_check import (
    ConditionReport,
    ProblemInstance,
    SignPattern,
    sectional_margin,
    strong_margin,
    verify_condition,
    weak_margin,
)
from .special_math import QuadratureSpec, erfinv, half_normal_expectation, signed_normal_expectation
from .width_bound import (
    CurvePoint,
    DualParams,
    ExpectationPair,
    StrongRegionSplit,
    ThresholdKind,
    WeakSignal,
    alpha_for_beta,
    beta_for_alpha,
    curve,
    expectations_sectional,
    expectations_strong,
    expectations_weak,
    gordon_success_probability,
    minimize_duals,
    objective_sectional,
    objective_strong,
    objective_weak,
    sectional_alpha_q0,
    strong_alpha_q0,
)
from .tables import TABLES, ReferenceTable, TableRow

__version__ = "0.1.0"
