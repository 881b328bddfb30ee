"""Gait energy images and alignment-quality metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import align as align_mod
from .align import AlignmentConfig, ReportRow, Strategy
from .raster import Mask
from .skeleton import SkeletonFrame


def gei(frames: Sequence[Mask]) -> np.ndarray:
    """Gait energy image: per-pixel temporal mean of a binary sequence.

    Returns float64 values in [0, 1].  Raises ValueError for an empty
    list or mixed frame dimensions.
    """
    if len(frames) == 0:
        raise ValueError("cannot average an empty frame list")
    shape = frames[0].shape
    for f in frames:
        if f.shape != shape:
            raise ValueError("frames must share dimensions")
    acc = np.zeros(shape, dtype=np.float64)
    for f in frames:
        acc += f
    return acc / len(frames)


def gei_sharpness(g: np.ndarray) -> float:
    """Mean distance of supported GEI values from 0.5, rescaled to [0, 1].

    Support is the set of pixels that are foreground in at least one
    frame (value > 0).  A perfectly binary GEI scores 1; heavy temporal
    blur pulls values toward 0.5 and the score toward 0.  An empty
    support (all-background GEI) is defined as 1.0.
    """
    support = g > 0.0
    if not np.any(support):
        return 1.0
    return float(np.mean(np.abs(2.0 * g[support] - 1.0)))


@dataclass(frozen=True)
class AlignmentMetrics:
    """Per-sequence alignment quality summary.

    Angle statistics are over rows with a residual spine angle; position
    and height statistics are over kept, non-degenerate rows.  Variances
    are population variances (a single row yields zero).  Fields are NaN
    when no row qualifies.
    """

    spine_angle_mean_abs: float
    spine_angle_var: float
    neck_var_x: float
    neck_var_y: float
    fg_height_var: float
    degenerate_fraction: float
    gei_sharpness: float


def _var(values: list[float]) -> float:
    if len(values) == 0:
        return math.nan
    return float(np.var(np.asarray(values, dtype=np.float64)))


def compute_metrics(rows: Sequence[ReportRow], g: np.ndarray) -> AlignmentMetrics:
    if len(rows) == 0:
        raise ValueError("no rows to summarize")
    kept = [r for r in rows if r.fg_height_out > 0 and not r.degenerate]
    angles = [r.spine_angle_out for r in kept if r.spine_angle_out is not None]
    mean_abs = float(np.mean(np.abs(angles))) if angles else math.nan
    flagged = sum(1 for r in rows if r.degenerate or r.fg_height_out == 0)
    return AlignmentMetrics(
        spine_angle_mean_abs=mean_abs,
        spine_angle_var=_var(angles),
        neck_var_x=_var([r.neck_out[0] for r in kept]),
        neck_var_y=_var([r.neck_out[1] for r in kept]),
        fg_height_var=_var([float(r.fg_height_out) for r in kept]),
        degenerate_fraction=flagged / len(rows),
        gei_sharpness=gei_sharpness(g),
    )


def sequence_metrics(
    frames: Sequence[tuple[Mask, SkeletonFrame | None]],
    cfg: AlignmentConfig,
) -> tuple[AlignmentMetrics, list[ReportRow], np.ndarray]:
    """Align a sequence and summarize it: (metrics, rows, gei)."""
    aligned, rows = align_mod.align_sequence(frames, cfg)
    g = gei([f.mask for f in aligned])
    return compute_metrics(rows, g), rows, g


def compare_strategies(
    frames: Sequence[tuple[Mask, SkeletonFrame | None]],
    cfg: AlignmentConfig,
    strategies: Sequence[Strategy] = tuple(Strategy),
) -> list[tuple[Strategy, AlignmentMetrics]]:
    """Metrics for the same sequence under several strategies.

    All runs share cfg's normalization parameters and seed; only the
    strategy differs.
    """
    out = []
    for strat in strategies:
        metrics, _, _ = sequence_metrics(frames, align_mod.config_for_strategy(cfg, strat))
        out.append((strat, metrics))
    return out
