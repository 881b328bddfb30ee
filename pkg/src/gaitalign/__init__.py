"""Skeleton-guided gait silhouette alignment.

Rotates each silhouette about the neck so the spine is vertical, then
scale-normalizes and anchors the neck at a fixed canvas position.
Baseline strategies (minimum-area-rectangle, restricted random, none),
standard preprocessing, sequence-coherent augmentation, gait energy
images, alignment quality metrics, a synthetic oracle generator, and
dataset I/O round out the library; the ``gaitalign`` command drives it
all from the shell.
"""

from .align import (
    AlignedFrame,
    AlignmentConfig,
    ReportRow,
    Strategy,
    align_frame_minbbox,
    align_frame_none,
    align_frame_random,
    align_frame_skeleton,
    align_sequence,
    config_for_strategy,
)
from .analysis import (
    AlignmentMetrics,
    compare_strategies,
    compute_metrics,
    gei,
    gei_sharpness,
    sequence_metrics,
)
from .augment import (
    AugmentConfig,
    AugmentDecisions,
    augment_sequence,
    draw_decisions,
    horizontal_flip,
    sequence_rng,
)
from .errors import (
    AllFramesEmptyError,
    DuplicateSequenceError,
    EmptyMaskError,
    GaitAlignError,
    MalformedPoseError,
    OutOfBoundsError,
    RejectedMaskError,
    SingularMapError,
    UnsupportedSchemaError,
)
from .geometry import (
    DEFAULT_EPSILON,
    IDENTITY,
    AffineMap,
    compose,
    invert,
    rotation_about,
    rotation_angle,
    scale_about,
    translation,
)
from .preprocess import PreprocessConfig, standard_preprocess
from .raster import (
    BBox,
    ForegroundStats,
    Mask,
    RotatedRect,
    crop,
    foreground_bbox,
    foreground_hull,
    foreground_stats,
    min_area_rect,
    paste_centered,
    resize,
    warp,
)
from .skeleton import (
    JOINT_NAMES,
    SkeletonFrame,
    SpineEndpoints,
    frame_spine_angle,
    spine_endpoints,
    transform_skeleton,
)
from .synth import (
    FigureSpec,
    Perturbation,
    SynthSequence,
    capsule_area_sum,
    figure_joints,
    make_sequence,
    perturb,
    perturbation_map,
    random_perturbations,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "AlignedFrame",
    "AlignmentConfig",
    "AlignmentMetrics",
    "AllFramesEmptyError",
    "AugmentConfig",
    "AugmentDecisions",
    "BBox",
    "DEFAULT_EPSILON",
    "DuplicateSequenceError",
    "EmptyMaskError",
    "FigureSpec",
    "ForegroundStats",
    "GaitAlignError",
    "IDENTITY",
    "JOINT_NAMES",
    "MalformedPoseError",
    "Mask",
    "OutOfBoundsError",
    "Perturbation",
    "PreprocessConfig",
    "RejectedMaskError",
    "ReportRow",
    "RotatedRect",
    "SingularMapError",
    "SkeletonFrame",
    "SpineEndpoints",
    "Strategy",
    "SynthSequence",
    "UnsupportedSchemaError",
    "align_frame_minbbox",
    "align_frame_none",
    "align_frame_random",
    "align_frame_skeleton",
    "align_sequence",
    "augment_sequence",
    "capsule_area_sum",
    "compare_strategies",
    "compose",
    "compute_metrics",
    "config_for_strategy",
    "crop",
    "draw_decisions",
    "figure_joints",
    "foreground_bbox",
    "foreground_hull",
    "foreground_stats",
    "frame_spine_angle",
    "gei",
    "gei_sharpness",
    "horizontal_flip",
    "invert",
    "make_sequence",
    "min_area_rect",
    "paste_centered",
    "perturb",
    "perturbation_map",
    "random_perturbations",
    "render",
    "resize",
    "rotation_about",
    "rotation_angle",
    "scale_about",
    "sequence_metrics",
    "sequence_rng",
    "spine_endpoints",
    "standard_preprocess",
    "transform_skeleton",
    "translation",
    "warp",
]
