"""COCO-17 keypoint frames and the neck/hip spine segment.

A skeleton frame is a (17, 3) float array of (x, y, confidence) rows in
the COCO keypoint order.  Only four joints matter for alignment: the two
shoulders (5, 6), whose midpoint is the neck, and the two hips (11, 12),
whose midpoint is the hip center.  Midpoints are plain averages; no
confidence weighting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .geometry import AffineMap, Point

JOINT_NAMES = (
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
)
JOINT_COUNT = 17

LEFT_SHOULDER = 5
RIGHT_SHOULDER = 6
LEFT_HIP = 11
RIGHT_HIP = 12
SPINE_JOINTS = (LEFT_SHOULDER, RIGHT_SHOULDER, LEFT_HIP, RIGHT_HIP)

DEFAULT_MIN_CONF = 0.3


@dataclass(frozen=True)
class SkeletonFrame:
    """One pose frame: joints is (17, 3) float64 of (x, y, confidence)."""

    joints: np.ndarray
    frame_index: int = 0

    def __post_init__(self):
        arr = np.asarray(self.joints, dtype=np.float64)
        if arr.shape != (JOINT_COUNT, 3):
            raise ValueError(f"joints must have shape (17, 3), got {arr.shape}")
        if np.any(arr[:, 2] < 0.0):
            raise ValueError("joint confidences must be non-negative")
        visible = arr[:, 2] > 0.0
        if not np.all(np.isfinite(arr[visible, :2])):
            raise ValueError("visible joints must have finite coordinates")
        object.__setattr__(self, "joints", arr)


@dataclass(frozen=True)
class SpineEndpoints:
    """Neck and hip midpoints; valid is False when confidences are too low."""

    neck: Point
    hip: Point
    valid: bool


def spine_endpoints(frame: SkeletonFrame, min_conf: float = DEFAULT_MIN_CONF) -> SpineEndpoints:
    """Neck/hip midpoints of a frame.

    valid is False when any of the four spine joints falls below
    ``min_conf`` or when the two midpoints coincide (no spine direction);
    the midpoints are still reported from the raw coordinates when they
    are finite, and are (0, 0) otherwise.
    """
    j = frame.joints
    ok = bool(np.all(j[list(SPINE_JOINTS), 2] >= min_conf))
    coords = j[list(SPINE_JOINTS), :2]
    if not np.all(np.isfinite(coords)):
        return SpineEndpoints((0.0, 0.0), (0.0, 0.0), False)
    neck = (
        0.5 * float(j[LEFT_SHOULDER, 0] + j[RIGHT_SHOULDER, 0]),
        0.5 * float(j[LEFT_SHOULDER, 1] + j[RIGHT_SHOULDER, 1]),
    )
    hip = (
        0.5 * float(j[LEFT_HIP, 0] + j[RIGHT_HIP, 0]),
        0.5 * float(j[LEFT_HIP, 1] + j[RIGHT_HIP, 1]),
    )
    return SpineEndpoints(neck, hip, ok and neck != hip)


def frame_spine_angle(
    frame: SkeletonFrame,
    min_conf: float = DEFAULT_MIN_CONF,
    eps: float = geometry.DEFAULT_EPSILON,
) -> float | None:
    """Straightening angle of the frame's spine, or None when invalid."""
    sp = spine_endpoints(frame, min_conf)
    if not sp.valid:
        return None
    return geometry.rotation_angle(sp.neck, sp.hip, eps)


def transform_skeleton(frame: SkeletonFrame, m: AffineMap) -> SkeletonFrame:
    """Apply an affine map to all joint coordinates; confidences unchanged."""
    j = frame.joints
    out = j.copy()
    out[:, 0] = m.r00 * j[:, 0] + m.r01 * j[:, 1] + m.tx
    out[:, 1] = m.r10 * j[:, 0] + m.r11 * j[:, 1] + m.ty
    return SkeletonFrame(out, frame.frame_index)
