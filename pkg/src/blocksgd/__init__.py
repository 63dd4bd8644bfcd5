"""Block-sampled mini-batch SGD with multiplier-bootstrap confidence intervals.

Designed for dependent (weakly mixing) data streams: the estimator averages
two projected SGD trajectories fed by alternating, growing blocks of the
stream, and an ensemble of multiplier-weighted copies turns the single pass
into quantile confidence intervals.
"""

from .block_stream import (
    ArraySource,
    Batch,
    BlockPair,
    BlockPairStream,
    HorizonPlan,
    IteratorSource,
    StreamExhausted,
    as_source,
    plan_horizon,
)
from .bootstrap import (
    BootstrapEnsemble,
    CiConfig,
    CiResult,
    ConfidenceReport,
    WeightDistribution,
    confidence_interval,
    derive_rng,
    draw_weight,
    ensemble_step,
    make_ensemble,
    run_with_ci,
    run_vanilla_with_ci,
    write_samples_csv,
)
from .estimator import (
    EstimatorConfig,
    EstimatorState,
    VanillaState,
    batch_gradient,
    initial_state,
    initial_vanilla_state,
    run,
    step,
    vanilla_step,
    weighted_step,
)
from .models import DataError, LossModel, Observation, finite_diff_check
from .schedules import BlockSchedule, LearningRateSchedule, ParamBox

__all__ = [
    "ArraySource",
    "Batch",
    "BlockPair",
    "BlockPairStream",
    "BlockSchedule",
    "BootstrapEnsemble",
    "CiConfig",
    "CiResult",
    "ConfidenceReport",
    "DataError",
    "EstimatorConfig",
    "EstimatorState",
    "HorizonPlan",
    "IteratorSource",
    "LearningRateSchedule",
    "LossModel",
    "Observation",
    "ParamBox",
    "StreamExhausted",
    "VanillaState",
    "WeightDistribution",
    "as_source",
    "batch_gradient",
    "confidence_interval",
    "derive_rng",
    "draw_weight",
    "ensemble_step",
    "finite_diff_check",
    "initial_state",
    "initial_vanilla_state",
    "make_ensemble",
    "plan_horizon",
    "run",
    "run_with_ci",
    "run_vanilla_with_ci",
    "step",
    "vanilla_step",
    "weighted_step",
    "write_samples_csv",
]
