"""Nonparametric regression by Lipschitz/Hölder interpolation with lazily
adapted constants, plus guarantee calculators, an adaptive-control simulator
and a benchmark harness.
"""

from .core import (
    Dataset,
    DimensionMismatchError,
    InputMetric,
    KiConfig,
    LackiState,
    Prediction,
    PredictionUndefinedError,
    estimate_constant_batch,
    fit,
)
from .holder import (
    HolderDescriptor,
    abs_of,
    add,
    compose,
    constant_map,
    envelope,
    multiply,
    reciprocal,
    scale,
    weaken,
)
from .guarantees import (
    BoundReport,
    ErrorSystem,
    SampleComplexity,
    Variant2Result,
    assemble_error_system,
    bound_report,
    bound_variant_1,
    bound_variant_2,
    bound_variant_3,
    sample_complexity,
    simulate_recurrence,
)
from .mrac import (
    WING_ROCK_B,
    WING_ROCK_W,
    CampaignRandomization,
    MracConfig,
    ReferenceModel,
    Simulation,
    TrialRecord,
    WingRockPlant,
    run_campaign,
    run_trial,
)
from .bench import (
    ExperimentSpec,
    LinearModel,
    MetricBundle,
    linear_baseline_fit,
    run_dimension_sweep,
    run_experiment,
    target_f1,
    target_f2,
)

__version__ = "0.1.0"

__all__ = [
    # core
    "Dataset", "DimensionMismatchError", "InputMetric", "KiConfig",
    "LackiState", "Prediction", "PredictionUndefinedError",
    "estimate_constant_batch", "fit",
    # regularity combinators
    "HolderDescriptor", "abs_of", "add", "compose", "constant_map",
    "envelope", "multiply", "reciprocal", "scale", "weaken",
    # guarantees
    "BoundReport", "ErrorSystem", "SampleComplexity", "Variant2Result",
    "assemble_error_system", "bound_report", "bound_variant_1",
    "bound_variant_2", "bound_variant_3", "sample_complexity",
    "simulate_recurrence",
    # adaptive control
    "WING_ROCK_B", "WING_ROCK_W", "CampaignRandomization", "MracConfig",
    "ReferenceModel", "Simulation", "TrialRecord", "WingRockPlant",
    "run_campaign", "run_trial",
    # benchmarks
    "ExperimentSpec", "LinearModel", "MetricBundle", "linear_baseline_fit",
    "run_dimension_sweep", "run_experiment", "target_f1", "target_f2",
]
