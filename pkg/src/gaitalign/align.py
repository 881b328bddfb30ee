"""Silhouette alignment strategies.

Every strategy produces frames on a fixed canvas by composing an optional
straightening rotation with a scale-and-anchor normalization, applied to
the raster in a single resampling pass:

* ``skeleton``: rotate about the neck so the spine becomes vertical.
* ``minbbox``: rotate about the minimum-area rectangle center so the
  rectangle's long side becomes vertical.
* ``random``: restricted random baseline; rotate about the foreground
  centroid by a bounded random angle directed toward the emptier side.
* ``none``: no rotation, normalization only.

Normalization scales the (rotated) foreground so its bbox height equals
body_height_ratio * target_h and pastes it so the strategy's anchor point
(neck, rectangle center, or foreground bbox top-center) lands at the
configured anchor position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np

from . import geometry, raster, skeleton as skel_mod
from .errors import AllFramesEmptyError, EmptyMaskError
from .geometry import AffineMap, Point
from .raster import Mask
from .skeleton import SkeletonFrame


class Strategy(str, Enum):
    NONE = "none"
    SKELETON = "skeleton"
    MIN_BBOX = "minbbox"
    RANDOM = "random"


@dataclass(frozen=True)
class AlignmentConfig:
    strategy: Strategy = Strategy.SKELETON
    target_h: int = 64
    target_w: int = 44
    # Fraction of target_h the foreground should span after alignment.
    body_height_ratio: float = 0.9
    # Anchor position as fractions of (target_w, target_h).
    neck_anchor: tuple[float, float] = (0.5, 0.18)
    # Cap for the restricted-random rotation magnitude, degrees.
    rand_max_deg: float = 10.0
    seed: int = 0
    min_conf: float = skel_mod.DEFAULT_MIN_CONF
    epsilon: float = geometry.DEFAULT_EPSILON

    def __post_init__(self):
        if self.target_h < 2 or self.target_w < 1:
            raise ValueError("target dimensions too small")
        if not 0.0 < self.body_height_ratio <= 1.0:
            raise ValueError("body_height_ratio must be in (0, 1]")
        if self.body_height_ratio * self.target_h <= 1.0:
            raise ValueError("body_height_ratio * target_h must exceed 1 px")
        if self.rand_max_deg < 0.0:
            raise ValueError("rand_max_deg must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if isinstance(self.strategy, str) and not isinstance(self.strategy, Strategy):
            object.__setattr__(self, "strategy", Strategy(self.strategy))


@dataclass(frozen=True)
class AlignedFrame:
    mask: Mask
    skeleton: SkeletonFrame | None
    applied_map: AffineMap
    degenerate: bool


@dataclass(frozen=True)
class ReportRow:
    """One row per input frame of an aligned sequence.

    theta_applied is the rotation baked into the applied map;
    spine_angle_out is the residual straightening angle of the transformed
    skeleton (None without a usable skeleton).  Dropped frames (empty
    input) keep a row with fg_height_out == 0 and degenerate == True.
    """

    frame_index: int
    theta_applied: float
    spine_angle_out: float | None
    neck_out: Point
    fg_height_out: int
    degenerate: bool


def _anchor_target(cfg: AlignmentConfig) -> Point:
    return (cfg.neck_anchor[0] * cfg.target_w, cfg.neck_anchor[1] * cfg.target_h)


def _transformed_coords(mask: Mask, m: AffineMap) -> tuple[np.ndarray, np.ndarray]:
    ys, xs = np.nonzero(mask)
    x1 = m.r00 * xs + m.r01 * ys + m.tx
    y1 = m.r10 * xs + m.r11 * ys + m.ty
    return x1, y1


def _finish(
    mask: Mask,
    skeleton: SkeletonFrame | None,
    base: AffineMap,
    anchor_pt: Point,
    cfg: AlignmentConfig,
    degenerate: bool,
) -> AlignedFrame:
    """Compose scale + anchor onto ``base`` and rasterize once.

    ``anchor_pt`` is given in base-transformed coordinates; scaling is
    performed about it so it stays fixed, then it is translated onto the
    configured anchor position.
    """
    _, y1 = _transformed_coords(mask, base)
    span = float(y1.max() - y1.min())
    want = cfg.body_height_ratio * cfg.target_h - 1.0
    factor = want / span if span > 1e-9 else 1.0
    target = _anchor_target(cfg)
    m = geometry.compose(geometry.scale_about(anchor_pt, factor), base)
    m = geometry.compose(
        geometry.translation(target[0] - anchor_pt[0], target[1] - anchor_pt[1]), m
    )
    out = raster.warp(mask, m, cfg.target_w, cfg.target_h)
    out_skel = skel_mod.transform_skeleton(skeleton, m) if skeleton is not None else None
    return AlignedFrame(out, out_skel, m, degenerate)


def _bbox_top_center(mask: Mask, base: AffineMap) -> Point:
    x1, y1 = _transformed_coords(mask, base)
    return (float((x1.min() + x1.max()) / 2.0), float(y1.min()))


def _require_foreground(mask: Mask):
    if not np.any(mask):
        raise EmptyMaskError("cannot align an empty mask")


def align_frame_skeleton(mask: Mask, skeleton: SkeletonFrame | None, cfg: AlignmentConfig) -> AlignedFrame:
    """Skeleton-guided alignment of one frame.

    A frame whose spine joints are missing or below cfg.min_conf falls
    back to the degenerate path: no rotation, scale + anchor using the
    silhouette bbox top-center as surrogate anchor, and the frame is
    flagged rather than dropped.
    """
    _require_foreground(mask)
    sp = skel_mod.spine_endpoints(skeleton, cfg.min_conf) if skeleton is not None else None
    if sp is None or not sp.valid:
        anchor = _bbox_top_center(mask, geometry.IDENTITY)
        return _finish(mask, skeleton, geometry.IDENTITY, anchor, cfg, degenerate=True)
    theta = geometry.rotation_angle(sp.neck, sp.hip, cfg.epsilon)
    base = geometry.rotation_about(sp.neck, theta)
    # The neck is the rotation center, so it is unchanged by ``base``.
    return _finish(mask, skeleton, base, sp.neck, cfg, degenerate=False)


def _minbbox_theta(rect: raster.RotatedRect) -> float:
    """Smallest-magnitude rotation that turns the rect's long side vertical."""

    def straighten(axis: tuple[float, float]) -> float:
        ux, uy = axis
        if uy == 0.0:
            return math.pi / 2.0 if ux >= 0.0 else -math.pi / 2.0
        return math.atan(ux / uy)

    w_axis = (math.cos(rect.angle), math.sin(rect.angle))
    h_axis = (-math.sin(rect.angle), math.cos(rect.angle))
    if abs(rect.half_w - rect.half_h) < 1e-9:
        # Square: both axes qualify as the long side; pick the smaller turn.
        return min(straighten(h_axis), straighten(w_axis), key=abs)
    long_axis = h_axis if rect.half_h > rect.half_w else w_axis
    return straighten(long_axis)


def align_frame_minbbox(mask: Mask, cfg: AlignmentConfig, skeleton: SkeletonFrame | None = None) -> AlignedFrame:
    """Rotate so the minimum-area rectangle's long side is vertical."""
    _require_foreground(mask)
    rect = raster.min_area_rect(mask)
    theta = _minbbox_theta(rect)
    base = geometry.rotation_about(rect.center, theta)
    # The rect center is the rotation center; its image anchors the frame.
    return _finish(mask, skeleton, base, rect.center, cfg, degenerate=False)


def align_frame_random(
    mask: Mask,
    cfg: AlignmentConfig,
    frame_index: int,
    skeleton: SkeletonFrame | None = None,
) -> AlignedFrame:
    """Restricted-random baseline rotation.

    The magnitude is uniform in [0, rand_max_deg]; the sign moves mass
    toward the emptier side (a left-heavy mask rotates the upper body
    rightward, i.e. positive theta; ties rotate positive).  Draws are
    deterministic in (cfg.seed, frame_index).
    """
    _require_foreground(mask)
    stats = raster.foreground_stats(mask)
    sign = 1.0 if stats.left_count >= stats.right_count else -1.0
    rng = np.random.default_rng([cfg.seed, frame_index])
    theta = sign * math.radians(rng.uniform(0.0, cfg.rand_max_deg))
    base = geometry.rotation_about(stats.centroid, theta)
    anchor = _bbox_top_center(mask, base)
    return _finish(mask, skeleton, base, anchor, cfg, degenerate=False)


def align_frame_none(mask: Mask, cfg: AlignmentConfig, skeleton: SkeletonFrame | None = None) -> AlignedFrame:
    """Normalization only: scale + anchor at the foreground bbox top-center."""
    _require_foreground(mask)
    anchor = _bbox_top_center(mask, geometry.IDENTITY)
    return _finish(mask, skeleton, geometry.IDENTITY, anchor, cfg, degenerate=False)


def _spine_angle_out(frame: AlignedFrame, cfg: AlignmentConfig) -> float | None:
    if frame.skeleton is None:
        return None
    return skel_mod.frame_spine_angle(frame.skeleton, cfg.min_conf, cfg.epsilon)


def _neck_out(frame: AlignedFrame, cfg: AlignmentConfig) -> Point:
    if frame.skeleton is not None:
        sp = skel_mod.spine_endpoints(frame.skeleton, cfg.min_conf)
        if sp.valid:
            return sp.neck
    return _anchor_target(cfg)


def align_sequence(
    frames: Sequence[tuple[Mask, SkeletonFrame | None]],
    cfg: AlignmentConfig,
) -> tuple[list[AlignedFrame], list[ReportRow]]:
    """Align a whole sequence under cfg.strategy.

    Returns the aligned frames (empty inputs are dropped) and one report
    row per input frame.  The skeleton strategy requires at least one
    frame with a usable skeleton.
    """
    if len(frames) == 0:
        raise ValueError("sequence is empty")
    if cfg.strategy == Strategy.SKELETON:
        usable = any(
            s is not None and skel_mod.spine_endpoints(s, cfg.min_conf).valid
            for _, s in frames
        )
        if not usable:
            raise ValueError(
                "skeleton strategy requires pose data on at least one frame"
            )

    aligned: list[AlignedFrame] = []
    rows: list[ReportRow] = []
    any_fg = False
    for idx, (mask, sk) in enumerate(frames):
        if not np.any(mask):
            rows.append(ReportRow(idx, 0.0, None, (0.0, 0.0), 0, True))
            continue
        any_fg = True
        if cfg.strategy == Strategy.SKELETON:
            frame = align_frame_skeleton(mask, sk, cfg)
        elif cfg.strategy == Strategy.MIN_BBOX:
            frame = align_frame_minbbox(mask, cfg, sk)
        elif cfg.strategy == Strategy.RANDOM:
            frame = align_frame_random(mask, cfg, idx, sk)
        else:
            frame = align_frame_none(mask, cfg, sk)
        bbox = raster.foreground_bbox(frame.mask)
        rows.append(
            ReportRow(
                idx,
                frame.applied_map.rotation_part(),
                _spine_angle_out(frame, cfg),
                _neck_out(frame, cfg),
                bbox.height if bbox is not None else 0,
                frame.degenerate,
            )
        )
        aligned.append(frame)
    if not any_fg:
        raise AllFramesEmptyError("every frame in the sequence is empty")
    return aligned, rows


def config_for_strategy(cfg: AlignmentConfig, strategy: Strategy) -> AlignmentConfig:
    """Same configuration with a different strategy."""
    return replace(cfg, strategy=strategy)
