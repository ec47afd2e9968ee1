"""Stability analysis and simulation of three-component fractional
linear systems whose equations carry distinct Caputo derivative orders.

The layers, bottom up:

  model     system data types and validation
  config    TOML/JSON loading
  charfn    characteristic function: expansion, reduction, axis values
  classify  the 20-case table of vanishing-pattern conditions
  criteria  sign- and threshold-based stability criteria
  oracle    winding-number zero count (independent ground truth)
  solver    product-integration time stepping and decay diagnostics
  svgplot   dependency-free line plots
  cli       command line front end (`fracstab`)
"""

__version__ = "0.1.0"

from .charfn import (
    GeneralCharFn,
    SimpleCharFn,
    SineRatios,
    axis_real_from_ratios,
    build_general,
    sine_ratios,
    to_simple,
)
from .classify import (
    CaseMatch,
    classification_report,
    classify,
    extract_simple,
    predicted_exponents,
)
from .config import load_system, system_from_mapping
from .criteria import CriterionResult, StabilityReport, Verdict, assess
from .errors import (
    BadForcingTable,
    BadNonlinearity,
    ConfigError,
    CriterionOracleMismatch,
    FracstabError,
    GridMisaligned,
    InternalContradiction,
    LinearPartNotCertified,
    NewtonDivergence,
    NonFiniteEntry,
    NotReducible,
    OrderOutOfRange,
    SamplingInconclusive,
    SineRatiosUndefined,
    StepTooLarge,
    ZeroAtOrigin,
    ZeroOnAxis,
)
from .model import (
    ConstantForcing,
    MultiOrder,
    MultiOrderSystem,
    NonlinearitySpec,
    PiecewisePowerForcing,
    PolynomialTerm,
    SystemMatrix,
    TableForcing,
    ZeroForcing,
    validate,
)
from .oracle import (
    AxisRoot,
    ContourSpec,
    WindingResult,
    auto_contour,
    count_rhp_zeros,
    scan_imaginary_axis,
)
from .solver import (
    BasinRun,
    DecayDiagnostic,
    SolverConfig,
    Trajectory,
    decay_diagnostic,
    fractional_weights,
    integrate,
    simulate_nonlinear_basin,
)

__all__ = [
    "__version__",
    "AxisRoot",
    "BadForcingTable",
    "BadNonlinearity",
    "BasinRun",
    "CaseMatch",
    "ConfigError",
    "ConstantForcing",
    "ContourSpec",
    "CriterionOracleMismatch",
    "CriterionResult",
    "DecayDiagnostic",
    "FracstabError",
    "GeneralCharFn",
    "GridMisaligned",
    "InternalContradiction",
    "LinearPartNotCertified",
    "MultiOrder",
    "MultiOrderSystem",
    "NewtonDivergence",
    "NonFiniteEntry",
    "NonlinearitySpec",
    "NotReducible",
    "OrderOutOfRange",
    "PiecewisePowerForcing",
    "PolynomialTerm",
    "SamplingInconclusive",
    "SimpleCharFn",
    "SineRatios",
    "SineRatiosUndefined",
    "SolverConfig",
    "StabilityReport",
    "StepTooLarge",
    "SystemMatrix",
    "TableForcing",
    "Trajectory",
    "Verdict",
    "WindingResult",
    "ZeroAtOrigin",
    "ZeroForcing",
    "ZeroOnAxis",
    "assess",
    "auto_contour",
    "axis_real_from_ratios",
    "build_general",
    "classification_report",
    "classify",
    "count_rhp_zeros",
    "decay_diagnostic",
    "extract_simple",
    "fractional_weights",
    "integrate",
    "load_system",
    "predicted_exponents",
    "scan_imaginary_axis",
    "simulate_nonlinear_basin",
    "sine_ratios",
    "system_from_mapping",
    "to_simple",
    "validate",
]
