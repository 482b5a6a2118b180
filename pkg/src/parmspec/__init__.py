"""Spectral approximation of parameterized linear systems A(s) x(s) = b(s), s in [-1, 1]."""

from .analysis import (
    ConvergenceEntry,
    ConvergenceRecord,
    RateFit,
    cramer_oracle,
    ellipse_parameter,
    fit_geometric_rate,
    residual_l2,
    true_error_l2,
)
from .errors import (
    ConfigurationError,
    ConvergenceError,
    EvaluationError,
    InputError,
    InsufficientCoefficientsError,
    InsufficientDataError,
    NodeSolveError,
    NumericalError,
    PoleInsideDomainError,
    SingularSystemError,
    SpectralError,
    UnsupportedFormError,
)
from .fem import FemProblem, assemble_fem
from .galerkin import GalerkinSystem, assemble_jacobi, assemble_quadrature, exactness_order, galerkin_solve
from .orthopoly import (
    Family,
    JacobiMatrix,
    QuadratureRule,
    RecurrenceTable,
    eval_basis,
    gauss_quadrature,
    gauss_rule,
    jacobi_matrix,
    matrix_function_quad,
    quad_integrate,
    recurrence_table,
)
from .paramops import ParamMatrix, ParamVector, operator_on_jacobi, truncate_general_to_polynomial
from .pseudospectral import (
    CollocationSolves,
    Method,
    SpectralSolution,
    collocate,
    evaluate_lagrange,
    pseudospectral_solve,
    to_spectral,
)

__version__ = "0.1.0"
