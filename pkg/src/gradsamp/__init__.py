"""Gradient sampling for nonsmooth min-max objectives.

A sampling-based descent method for minimizing f(x) = max_theta F(x, theta)
when f is only reachable through an approximate inner-maximization oracle,
together with a distributionally robust 1-D coverage benchmark family and
analytic stress objectives for testing.
"""

from .core import (
    DescentViolationError,
    GsParams,
    GsState,
    IterationRecord,
    NonsmoothPolicy,
    NonsmoothSampleError,
    ParamError,
    ProblemOracle,
    StepKind,
    Termination,
    Trace,
    accuracy_to_distance,
    regularization_rho,
    validate_params,
)
from .coverage import (
    CoverageProblem,
    coverage_c_jacobian,
    coverage_c_vector,
    coverage_grad_x,
    in_D_coverage,
    inner_lp_max,
    make_coverage_oracle,
    penalty,
    theta_feasible,
    two_agent_cost,
)
from .driver import (
    LineSearchOutcome,
    Rng,
    build_bundle,
    gradient_descent_baseline,
    line_search,
    random_unit_direction,
    run,
    sample_ball,
    step,
)
from .minnorm import MinNormResult, min_norm_bruteforce, min_norm_point
from .testfns import (
    CantorStressProblem,
    FiniteMaxProblem,
    MaxPiece,
    abs_value_problem,
    cantor_stress_oracle,
    finite_max_oracle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
