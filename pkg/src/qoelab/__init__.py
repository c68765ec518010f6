"""Subjective video-quality analysis toolkit.

Refines raw 0-100 opinion scores through two-step observer screening,
computes mean opinion scores with Fisher-transform confidence intervals,
and checks observed coding operating points against Blahut-Arimoto
capacity and rate-distortion bounds.
"""

from .scores import (
    MOSRecord,
    ScoreFileError,
    ScoreMatrix,
    TestCondition,
    dump_scores,
    load_conditions,
    load_scores,
    map_scale,
    mos,
    mos_table,
)
from .screening import (
    AllObserversRejected,
    NormalityResult,
    ObserverVerdict,
    ScreeningConfig,
    ScreeningError,
    ScreeningReport,
    condition_thresholds,
    count_deviations,
    kurtosis,
    screen,
)
from .stats import (
    CIResult,
    ComparisonRecord,
    compare_refining,
    fisher_ci,
    pearson,
)
from .rate_distortion import (
    CapacityResult,
    ConvergenceError,
    DiscreteChannel,
    DistortionMatrix,
    RDPoint,
    SourceModel,
    channel_capacity,
    empirical_source,
    frame_distortion,
    operating_point_check,
    rd_curve,
    rd_point,
)

__version__ = "0.1.0"
