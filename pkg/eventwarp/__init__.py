"""
eventwarp: registration and clustering of event-time curves by time warping.

Each subject's cumulative event curve is aligned with every other subject's
by dynamic time warping; the pairwise maps are averaged into an estimate of
the subject's warping, which registers its events onto a common internal
clock and serves as the feature for warping-based clustering.

Operations return ``Ok``/``Err`` results; errors are logged through loguru
when they are created.
"""

__version__ = "0.1.0"

from . import cluster, dtw, pairwise, registration, result, synth
from .cluster import (
    Clustering,
    DistanceMatrix,
    distance_matrix,
    frechet_medoid,
    interpret_silhouette,
    kmedoids,
    select_k,
    silhouette,
    warp_distance,
)
from .config import (
    PipelineConfig,
    configure,
    configure_pipeline,
    get_config,
    get_pipeline_config,
    load_config,
    reset_config,
)
from .curves import (
    Domain,
    EventCurve,
    WarpingFunction,
    anchor_curve,
    build_curve,
    prepare_curve,
)
from .dtw import Alignment, AlignmentCost, align, enumerate_alignments
from .errors import WarpError
from .pairwise import (
    PairwiseWarp,
    extract_correspondence,
    warp_pair,
    warp_times,
    warps_from_alignment,
)
from .registration import (
    MeanCurve,
    RegisteredCurve,
    WarpingEstimate,
    estimate_warpings,
    group_means,
    mean_curve,
    register,
    register_sample,
    to_common_grid,
)
from .result import Err, Ok, Result
from .synth import WarpScenario, sample_warping, simulate_sample

__all__ = [
    "Alignment",
    "AlignmentCost",
    "Clustering",
    "DistanceMatrix",
    "Domain",
    "Err",
    "EventCurve",
    "MeanCurve",
    "Ok",
    "PairwiseWarp",
    "PipelineConfig",
    "RegisteredCurve",
    "Result",
    "WarpError",
    "WarpScenario",
    "WarpingEstimate",
    "WarpingFunction",
    "align",
    "anchor_curve",
    "build_curve",
    "cluster",
    "configure",
    "configure_pipeline",
    "distance_matrix",
    "dtw",
    "enumerate_alignments",
    "estimate_warpings",
    "extract_correspondence",
    "frechet_medoid",
    "get_config",
    "get_pipeline_config",
    "group_means",
    "interpret_silhouette",
    "kmedoids",
    "load_config",
    "mean_curve",
    "pairwise",
    "prepare_curve",
    "register",
    "register_sample",
    "registration",
    "reset_config",
    "result",
    "sample_warping",
    "select_k",
    "silhouette",
    "simulate_sample",
    "synth",
    "to_common_grid",
    "warp_distance",
    "warp_pair",
    "warp_times",
    "warps_from_alignment",
]
