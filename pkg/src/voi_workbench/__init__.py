"""Decision-model workbench.

Evaluate discrete single-decision models, attach second-order confidence
distributions and assessment costs to their parameters, and decide which
parameters are worth refining by comparing Monte Carlo value-of-perfect-
information estimates against assessment cost.
"""

from .confidence import (
    BetaDistribution,
    CoherenceWarning,
    Degenerate,
    FractilePair,
    PiecewiseLinearCdf,
    SecondOrderAnnotation,
    SecondOrderDistribution,
    coherence_check,
    fit_beta_from_fractiles,
    fit_sketch,
)
from .errors import (
    AnnotationError,
    FitError,
    ModelFileError,
    ModelValidationError,
    OutOfSupportError,
    ParamRefError,
    RefineError,
    SubstitutionError,
    UnresolvedRefError,
    WorkbenchError,
)
from .intervals import BoundsReport, ProbabilityInterval, conjunction_bounds, marginal_bounds
from .model import (
    ChanceVariable,
    DecisionModel,
    DecisionVariable,
    Diagnostic,
    OptimalChoice,
    UtilityTable,
)
from .modelio import load_model, model_from_dict, model_to_dict, save_model
from .paramref import ParamRef, ProbabilityRef, UtilityRef, parse_ref
from .sensitivity import SweepResult, emit_plot_data, sweep
from .voi import (
    FocusReport,
    ObservationalVpiReport,
    cluster_cost,
    meta_vpi,
    observational_vpi,
    rank_parameters,
    recommend,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationError",
    "BetaDistribution",
    "BoundsReport",
    "ChanceVariable",
    "CoherenceWarning",
    "Degenerate",
    "DecisionModel",
    "DecisionVariable",
    "Diagnostic",
    "FitError",
    "FocusReport",
    "FractilePair",
    "ModelFileError",
    "ModelValidationError",
    "ObservationalVpiReport",
    "OptimalChoice",
    "OutOfSupportError",
    "ParamRef",
    "ParamRefError",
    "PiecewiseLinearCdf",
    "ProbabilityInterval",
    "ProbabilityRef",
    "RefineError",
    "SecondOrderAnnotation",
    "SecondOrderDistribution",
    "SubstitutionError",
    "SweepResult",
    "UnresolvedRefError",
    "UtilityRef",
    "UtilityTable",
    "WorkbenchError",
    "cluster_cost",
    "coherence_check",
    "conjunction_bounds",
    "emit_plot_data",
    "fit_beta_from_fractiles",
    "fit_sketch",
    "load_model",
    "marginal_bounds",
    "meta_vpi",
    "model_from_dict",
    "model_to_dict",
    "observational_vpi",
    "parse_ref",
    "rank_parameters",
    "recommend",
    "save_model",
    "sweep",
]
