"""Deformed-calculus toolkit.

Local metric derivatives, a series-level fractional operator with
Mittag-Leffler eigenfunctions, nonlocal reference oracles, ODE solvers on
deformed clocks, and a verification harness tying them together.

The computational core is re-exported here.  Figure rendering lives in
:mod:`metriq.plotting` and the command-line front end in :mod:`metriq.cli`;
both import matplotlib, so they are left out of the package root.
"""

from .axiomatic import (
    GeneralizedPowerSeries,
    chain_defect,
    d_alpha,
    eigen_check,
    leibniz_defect,
    ml_series,
    parse_series_literal,
    series_literal,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    MetriqError,
    ParseError,
    PoleError,
    RangeOverflow,
    SeriesBlowup,
    ToleranceNotMet,
)
from .exprparse import Expr, diff, evaluate, parse, to_source
from .harness import (
    DefectReport,
    HarnessConfig,
    SuiteSummary,
    fit_loglog,
    reports_to_json,
    reports_to_table,
    run_axiom_suite,
    scan_verdict,
)
from .localops import (
    FractalityParams,
    OperatorKind,
    apply_closed,
    apply_limit,
    bridge_params,
    bridge_params_inv,
    multiplier,
)
from .nonlocalops import (
    QuadratureSpec,
    caputo,
    grunwald_letnikov,
    local_vs_caputo_gap,
)
from .odesolve import SolveResult, solve_caputo, solve_local
from .specfun import (
    MlArgs,
    MlResult,
    SeriesTolerance,
    gamma,
    log_gamma,
    mittag_leffler,
    q_exponential,
    stretched_exp,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DefectReport",
    "DomainError",
    "Expr",
    "FractalityParams",
    "GeneralizedPowerSeries",
    "HarnessConfig",
    "MetriqError",
    "MlArgs",
    "MlResult",
    "OperatorKind",
    "ParseError",
    "PoleError",
    "QuadratureSpec",
    "RangeOverflow",
    "SeriesBlowup",
    "SeriesTolerance",
    "SolveResult",
    "SuiteSummary",
    "ToleranceNotMet",
    "apply_closed",
    "apply_limit",
    "bridge_params",
    "bridge_params_inv",
    "caputo",
    "chain_defect",
    "d_alpha",
    "diff",
    "eigen_check",
    "evaluate",
    "fit_loglog",
    "gamma",
    "grunwald_letnikov",
    "leibniz_defect",
    "local_vs_caputo_gap",
    "log_gamma",
    "mittag_leffler",
    "ml_series",
    "multiplier",
    "parse",
    "parse_series_literal",
    "q_exponential",
    "reports_to_json",
    "reports_to_table",
    "run_axiom_suite",
    "scan_verdict",
    "series_literal",
    "solve_caputo",
    "solve_local",
    "stretched_exp",
    "to_source",
    "__version__",
]
