"""Synthetic stick figures with exactly known joints.

The figure is a union of capsules (segments with radius): head disc,
torso, and one straight capsule per arm and leg.  Joint positions are
analytic, so rendered frames come with a ground-truth skeleton at
confidence 1.0, an exactly vertical spine, and a closed-form capsule
area.  Perturbed copies carry their (phi, scale, shift) ground truth for
recovery tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import geometry, raster, skeleton as skel_mod
from .errors import OutOfBoundsError
from .geometry import AffineMap
from .raster import Mask
from .skeleton import (
    JOINT_COUNT,
    LEFT_HIP,
    LEFT_SHOULDER,
    RIGHT_HIP,
    RIGHT_SHOULDER,
    SkeletonFrame,
)

FIT_MARGIN = 2  # required free pixels between figure and canvas border


@dataclass(frozen=True)
class FigureSpec:
    canvas_w: int = 160
    canvas_h: int = 160
    neck_x: float = 80.0
    neck_y: float = 44.0
    spine_len: float = 30.0
    head_radius: float = 6.0
    head_lift: float = 11.5  # head center this far above the neck
    torso_radius: float = 6.0
    limb_radius: float = 2.4
    arm_len: float = 24.0
    leg_len: float = 28.0
    shoulder_halfwidth: float = 7.6
    hip_halfwidth: float = 7.4
    # Limbs fan outward by the spread angle; the swing amplitude widens one
    # side while narrowing the other as the phase advances.  Keeping swing
    # below spread means limbs never cross the torso or each other, so the
    # capsule overlap stays a small, stable fraction of the total area.
    arm_spread_deg: float = 20.0
    arm_swing_deg: float = 8.0
    leg_spread_deg: float = 14.0
    leg_swing_deg: float = 6.0
    phase: float = 0.0


@dataclass(frozen=True)
class Perturbation:
    """Rigid-ish disturbance: rotate by phi (radians) about the neck,
    scale about the neck, then translate by shift pixels."""

    phi: float = 0.0
    scale: float = 1.0
    shift: tuple[float, float] = (0.0, 0.0)


def figure_joints(spec: FigureSpec) -> np.ndarray:
    """Exact COCO-17 joints for a spec, (17, 3) with confidence 1.

    "left" joints sit at smaller x (figure seen from behind).  Arms and
    legs are straight capsules; elbows and knees lie at their midpoints.
    Limb swing angles vary with cos(phase), so advancing the phase by pi
    mirrors the pose about the spine axis.
    """
    nx, ny = spec.neck_x, spec.neck_y
    hip_y = ny + spec.spine_len
    head = (nx, ny - spec.head_lift)

    arm_mod = math.radians(spec.arm_swing_deg) * math.cos(spec.phase)
    leg_mod = math.radians(spec.leg_swing_deg) * math.cos(spec.phase)
    arm_spread = math.radians(spec.arm_spread_deg)
    leg_spread = math.radians(spec.leg_spread_deg)
    # Legs oppose arms, as in a natural gait cycle; advancing the phase by
    # pi negates both modulations, which mirrors the pose about the spine.
    a_l, a_r = -(arm_spread + arm_mod), arm_spread - arm_mod
    b_l, b_r = -(leg_spread - leg_mod), leg_spread + leg_mod

    def down(angle: float) -> tuple[float, float]:
        # Unit vector pointing downward, tilted by ``angle`` toward +x.
        return (math.sin(angle), math.cos(angle))

    j = np.zeros((JOINT_COUNT, 3), dtype=np.float64)
    j[:, 2] = 1.0

    j[0, :2] = head  # nose
    j[1, :2] = (head[0] - 2.2, head[1] - 1.5)  # left eye
    j[2, :2] = (head[0] + 2.2, head[1] - 1.5)  # right eye
    j[3, :2] = (head[0] - 3.8, head[1] - 0.5)  # left ear
    j[4, :2] = (head[0] + 3.8, head[1] - 0.5)  # right ear

    sh_l = (nx - spec.shoulder_halfwidth, ny)
    sh_r = (nx + spec.shoulder_halfwidth, ny)
    j[LEFT_SHOULDER, :2] = sh_l
    j[RIGHT_SHOULDER, :2] = sh_r

    d_al, d_ar = down(a_l), down(a_r)
    j[7, :2] = (sh_l[0] + 0.5 * spec.arm_len * d_al[0], sh_l[1] + 0.5 * spec.arm_len * d_al[1])
    j[8, :2] = (sh_r[0] + 0.5 * spec.arm_len * d_ar[0], sh_r[1] + 0.5 * spec.arm_len * d_ar[1])
    j[9, :2] = (sh_l[0] + spec.arm_len * d_al[0], sh_l[1] + spec.arm_len * d_al[1])
    j[10, :2] = (sh_r[0] + spec.arm_len * d_ar[0], sh_r[1] + spec.arm_len * d_ar[1])

    hp_l = (nx - spec.hip_halfwidth, hip_y)
    hp_r = (nx + spec.hip_halfwidth, hip_y)
    j[LEFT_HIP, :2] = hp_l
    j[RIGHT_HIP, :2] = hp_r

    d_bl, d_br = down(b_l), down(b_r)
    j[13, :2] = (hp_l[0] + 0.5 * spec.leg_len * d_bl[0], hp_l[1] + 0.5 * spec.leg_len * d_bl[1])
    j[14, :2] = (hp_r[0] + 0.5 * spec.leg_len * d_br[0], hp_r[1] + 0.5 * spec.leg_len * d_br[1])
    j[15, :2] = (hp_l[0] + spec.leg_len * d_bl[0], hp_l[1] + spec.leg_len * d_bl[1])
    j[16, :2] = (hp_r[0] + spec.leg_len * d_br[0], hp_r[1] + spec.leg_len * d_br[1])
    return j


def _capsules(spec: FigureSpec, joints: np.ndarray):
    nx, ny = spec.neck_x, spec.neck_y
    head = (nx, ny - spec.head_lift)
    hip_c = (nx, ny + spec.spine_len)
    return [
        (head, head, spec.head_radius),
        ((nx, ny), hip_c, spec.torso_radius),
        (tuple(joints[LEFT_SHOULDER, :2]), tuple(joints[9, :2]), spec.limb_radius),
        (tuple(joints[RIGHT_SHOULDER, :2]), tuple(joints[10, :2]), spec.limb_radius),
        (tuple(joints[LEFT_HIP, :2]), tuple(joints[15, :2]), spec.limb_radius),
        (tuple(joints[RIGHT_HIP, :2]), tuple(joints[16, :2]), spec.limb_radius),
    ]


def capsule_area_sum(spec: FigureSpec) -> float:
    """Closed-form sum of the individual capsule areas (2*r*len + pi*r^2).

    Overlaps where limbs meet the torso are intentionally small in the
    default proportions, so the rendered foreground count tracks this sum
    closely.
    """
    joints = figure_joints(spec)
    total = 0.0
    for p0, p1, r in _capsules(spec, joints):
        length = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
        total += 2.0 * r * length + math.pi * r * r
    return total


def render(spec: FigureSpec) -> tuple[Mask, SkeletonFrame]:
    """Rasterize the figure: pixel centers within any capsule are foreground.

    Raises ValueError when the figure does not fit the canvas with a
    2-pixel margin.
    """
    joints = figure_joints(spec)
    h, w = spec.canvas_h, spec.canvas_w
    xx = np.arange(w, dtype=np.float64)[None, :]
    yy = np.arange(h, dtype=np.float64)[:, None]
    fg = np.zeros((h, w), dtype=bool)
    for p0, p1, r in _capsules(spec, joints):
        vx, vy = p1[0] - p0[0], p1[1] - p0[1]
        dx = xx - p0[0]
        dy = yy - p0[1]
        norm2 = vx * vx + vy * vy
        if norm2 == 0.0:
            d2 = dx * dx + dy * dy
        else:
            t = np.clip((dx * vx + dy * vy) / norm2, 0.0, 1.0)
            d2 = (dx - t * vx) ** 2 + (dy - t * vy) ** 2
        fg |= d2 <= r * r
    mask = fg.astype(np.uint8)

    bbox = raster.foreground_bbox(mask)
    if (
        bbox.min_x < FIT_MARGIN
        or bbox.min_y < FIT_MARGIN
        or bbox.max_x >= w - FIT_MARGIN
        or bbox.max_y >= h - FIT_MARGIN
    ):
        raise ValueError("figure does not fit the canvas with a 2 px margin")
    return mask, SkeletonFrame(joints)


def perturbation_map(p: Perturbation, neck: tuple[float, float]) -> AffineMap:
    """Affine map realizing a perturbation about the given neck point."""
    m = geometry.rotation_about(neck, p.phi)
    m = geometry.compose(geometry.scale_about(neck, p.scale), m)
    return geometry.compose(geometry.translation(p.shift[0], p.shift[1]), m)


def perturb(mask: Mask, skeleton: SkeletonFrame, p: Perturbation) -> tuple[Mask, SkeletonFrame]:
    """Apply a perturbation to a rendered frame (mask and joints alike).

    Raises OutOfBoundsError when any foreground pixel would leave the
    canvas, so ground truth is never silently clipped.
    """
    if p.scale <= 0.0:
        raise ValueError("perturbation scale must be positive")
    sp = skel_mod.spine_endpoints(skeleton, min_conf=0.0)
    m = perturbation_map(p, sp.neck)
    h, w = mask.shape
    ys, xs = np.nonzero(mask)
    x1 = m.r00 * xs + m.r01 * ys + m.tx
    y1 = m.r10 * xs + m.r11 * ys + m.ty
    if x1.min() < -0.5 or x1.max() >= w - 0.5 or y1.min() < -0.5 or y1.max() >= h - 0.5:
        raise OutOfBoundsError("perturbed silhouette leaves the canvas")
    out = raster.warp(mask, m, w, h)
    return out, skel_mod.transform_skeleton(skeleton, m)


@dataclass(frozen=True)
class SynthSequence:
    """Perturbed frames plus everything needed to check them."""

    frames: list[tuple[Mask, SkeletonFrame]]
    truth: list[Perturbation]
    spec: FigureSpec


def make_sequence(
    spec: FigureSpec,
    perturbations: Sequence[Perturbation],
    phase_step: float = math.tau / 16.0,
) -> SynthSequence:
    """One frame per perturbation, with the walking phase advancing."""
    if len(perturbations) == 0:
        raise ValueError("at least one perturbation is required")
    frames = []
    for t, p in enumerate(perturbations):
        frame_spec = replace(spec, phase=spec.phase + t * phase_step)
        mask, skel = render(frame_spec)
        pm, ps = perturb(mask, skel, p)
        frames.append((pm, SkeletonFrame(ps.joints, frame_index=t)))
    return SynthSequence(frames, list(perturbations), spec)


def random_perturbations(
    n: int,
    rng: np.random.Generator,
    max_phi_deg: float = 30.0,
    scale_range: tuple[float, float] = (0.7, 1.4),
    max_shift: float = 10.0,
) -> list[Perturbation]:
    """Independent uniform draws within the given ranges."""
    out = []
    for _ in range(n):
        out.append(
            Perturbation(
                phi=math.radians(rng.uniform(-max_phi_deg, max_phi_deg)),
                scale=float(rng.uniform(scale_range[0], scale_range[1])),
                shift=(
                    float(rng.uniform(-max_shift, max_shift)),
                    float(rng.uniform(-max_shift, max_shift)),
                ),
            )
        )
    return out
