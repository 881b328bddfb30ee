"""Sequence-level silhouette augmentation.

Three independent augmentations, each triggered with its own probability:
horizontal flip, a combined affine + perspective jitter, and random
rectangle erasure.  All decisions are drawn once per sequence so every
frame flips, tilts, or loses the same region coherently, and all draws
are a pure function of (seed, epoch, sequence id), which keeps results
identical under any parallel schedule.  When several trigger, they apply
in the order flip, jitter, erase.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .raster import Mask

DEFAULT_PROBABILITY = 0.2


@dataclass(frozen=True)
class AugmentConfig:
    p_flip: float = DEFAULT_PROBABILITY
    p_affine: float = DEFAULT_PROBABILITY
    p_erase: float = DEFAULT_PROBABILITY
    # Rotation cap for the jitter, degrees, about the image center.
    max_rot_deg: float = 10.0
    # Per-corner perspective displacement cap as a fraction of each dim.
    max_persp_frac: float = 0.1
    # Erased rectangle area as a fraction of the image, uniform in range.
    erase_area_frac: tuple[float, float] = (0.02, 0.33)
    seed: int = 0

    def __post_init__(self):
        for name in ("p_flip", "p_affine", "p_erase"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        lo, hi = self.erase_area_frac
        if not 0.0 < lo <= hi < 1.0:
            raise ValueError("erase_area_frac bounds must satisfy 0 < lo <= hi < 1")
        if self.max_rot_deg < 0.0:
            raise ValueError("max_rot_deg must be non-negative")
        if not 0.0 <= self.max_persp_frac <= 0.2:
            raise ValueError("max_persp_frac must be in [0, 0.2]")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class JitterParams:
    rot_deg: float
    # (4, 2) corner offsets as fractions of (w, h), order: top-left,
    # top-right, bottom-right, bottom-left.
    corner_frac: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class EraseParams:
    area_frac: float
    aspect: float  # height / width of the erased rectangle
    u_x: float  # unit-interval position draws, resolved against the dims
    u_y: float


@dataclass(frozen=True)
class AugmentDecisions:
    flip: bool
    jitter: JitterParams | None
    erase: EraseParams | None


def _stable_id(seq_id) -> int:
    digest = hashlib.sha256(str(seq_id).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def sequence_rng(seed: int, epoch: int, seq_id) -> np.random.Generator:
    """Generator whose stream depends only on (seed, epoch, sequence id)."""
    return np.random.default_rng([seed, epoch, _stable_id(seq_id)])


def draw_decisions(cfg: AugmentConfig, epoch: int, seq_id) -> AugmentDecisions:
    """Draw the per-sequence augmentation decisions."""
    rng = sequence_rng(cfg.seed, epoch, seq_id)
    flip = bool(rng.random() < cfg.p_flip)
    do_jitter = rng.random() < cfg.p_affine
    do_erase = rng.random() < cfg.p_erase
    jitter = None
    if do_jitter:
        rot = float(rng.uniform(-cfg.max_rot_deg, cfg.max_rot_deg))
        corners = tuple(
            (
                float(rng.uniform(-cfg.max_persp_frac, cfg.max_persp_frac)),
                float(rng.uniform(-cfg.max_persp_frac, cfg.max_persp_frac)),
            )
            for _ in range(4)
        )
        jitter = JitterParams(rot, corners)
    erase = None
    if do_erase:
        lo, hi = cfg.erase_area_frac
        erase = EraseParams(
            area_frac=float(rng.uniform(lo, hi)),
            aspect=float(math.exp(rng.uniform(math.log(0.3), math.log(1.0 / 0.3)))),
            u_x=float(rng.random()),
            u_y=float(rng.random()),
        )
    return AugmentDecisions(flip, jitter, erase)


def horizontal_flip(mask: Mask) -> Mask:
    """Mirror left-right; a pixel at column x moves to (w - 1) - x."""
    return np.ascontiguousarray(mask[:, ::-1])


def _solve_homography(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """3x3 homography H with H @ (x, y, 1) ~ dst for four point pairs."""
    a = np.zeros((8, 8), dtype=np.float64)
    b = np.zeros(8, dtype=np.float64)
    for i in range(4):
        x, y = src[i]
        u, v = dst[i]
        a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -x * u, -y * u]
        b[2 * i] = u
        a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -x * v, -y * v]
        b[2 * i + 1] = v
    h = np.linalg.solve(a, b)
    return np.array(
        [[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], 1.0]], dtype=np.float64
    )


def apply_jitter(mask: Mask, params: JitterParams) -> Mask:
    """Rotate about the image center, then displace the four corners.

    The perspective part is a full 3x3 homography; sampling is nearest
    neighbor with out-of-bounds reads as background, so the result stays
    binary and keeps the input dimensions.
    """
    h, w = mask.shape
    no_persp = all(fx == 0.0 and fy == 0.0 for fx, fy in params.corner_frac)
    if params.rot_deg == 0.0 and no_persp:
        return mask.copy()

    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    t = math.radians(params.rot_deg)
    c, s = math.cos(t), math.sin(t)
    # Inverse rotation about the center, as a homography.
    rot_inv = np.array(
        [
            [c, s, (1.0 - c) * cx - s * cy],
            [-s, c, (1.0 - c) * cy + s * cx],
            [0.0, 0.0, 1.0],
        ],
        dtype=np.float64,
    )
    corners = np.array(
        [[0.0, 0.0], [w - 1.0, 0.0], [w - 1.0, h - 1.0], [0.0, h - 1.0]],
        dtype=np.float64,
    )
    if no_persp:
        total_inv = rot_inv
    else:
        offsets = np.array(params.corner_frac, dtype=np.float64) * np.array([w, h])
        persp_inv = _solve_homography(corners + offsets, corners)
        total_inv = rot_inv @ persp_inv

    us = np.arange(w, dtype=np.float64)
    vs = np.arange(h, dtype=np.float64)[:, None]
    denom = total_inv[2, 0] * us + total_inv[2, 1] * vs + total_inv[2, 2]
    xs = (total_inv[0, 0] * us + total_inv[0, 1] * vs + total_inv[0, 2]) / denom
    ys = (total_inv[1, 0] * us + total_inv[1, 1] * vs + total_inv[1, 2]) / denom
    xi = np.floor(xs + 0.5).astype(np.int64)
    yi = np.floor(ys + 0.5).astype(np.int64)
    inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
    out = np.zeros_like(mask)
    out[inside] = mask[yi[inside], xi[inside]]
    return out


def erase_rect(shape: tuple[int, int], params: EraseParams, area_range: tuple[float, float]) -> tuple[int, int, int, int]:
    """Resolve erase params to a concrete (x0, y0, w, h) rectangle.

    The integer rectangle is nudged so its realized area stays inside
    ``area_range`` whenever the dimensions allow it.
    """
    h, w = shape
    total = h * w
    target = params.area_frac * total
    rh = int(round(math.sqrt(target * params.aspect)))
    rh = max(1, min(h, rh))
    lo, hi = area_range[0] * total, area_range[1] * total

    def clamp_w(x: int) -> int:
        return max(1, min(w, x))

    rw = clamp_w(int(round(target / rh)))
    if not lo <= rh * rw <= hi:
        candidates = [clamp_w(rw + d) for d in (-1, 0, 1)]
        in_range = [x for x in candidates if lo <= rh * x <= hi]
        pool = in_range or candidates
        rw = min(pool, key=lambda x: abs(rh * x - target))
    x0 = int(math.floor(params.u_x * (w - rw + 1)))
    y0 = int(math.floor(params.u_y * (h - rh + 1)))
    return x0, y0, rw, rh


def apply_erase(mask: Mask, params: EraseParams, area_range: tuple[float, float]) -> Mask:
    x0, y0, rw, rh = erase_rect(mask.shape, params, area_range)
    out = mask.copy()
    out[y0 : y0 + rh, x0 : x0 + rw] = 0
    return out


def apply_decisions(frames: Sequence[Mask], decisions: AugmentDecisions, cfg: AugmentConfig) -> list[Mask]:
    """Apply drawn decisions to every frame of a sequence."""
    if len(frames) == 0:
        return []
    shape = frames[0].shape
    for f in frames:
        if f.shape != shape:
            raise ValueError("sequence frames must share dimensions")
    out = list(frames)
    if decisions.flip:
        out = [horizontal_flip(f) for f in out]
    if decisions.jitter is not None:
        out = [apply_jitter(f, decisions.jitter) for f in out]
    if decisions.erase is not None:
        rect = erase_rect(shape, decisions.erase, cfg.erase_area_frac)
        x0, y0, rw, rh = rect
        erased = []
        for f in out:
            g = f.copy()
            g[y0 : y0 + rh, x0 : x0 + rw] = 0
            erased.append(g)
        out = erased
    return out


def augment_sequence(frames: Sequence[Mask], cfg: AugmentConfig, epoch: int, seq_id=0) -> list[Mask]:
    """Draw per-sequence decisions and apply them to all frames."""
    return apply_decisions(frames, draw_decisions(cfg, epoch, seq_id), cfg)
