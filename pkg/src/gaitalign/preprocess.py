"""Standard silhouette cutting: crop, scale to height, center, fix width.

This is the conventional preparation step used by gait pipelines before
any alignment: the figure is cropped to its vertical extent, scaled so it
spans the full output height, and shifted so its centroid column sits at
the horizontal center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry, raster
from .errors import RejectedMaskError
from .geometry import AffineMap
from .raster import Mask

# Foreground shorter than this is treated as a segmentation failure.
MIN_FOREGROUND_HEIGHT = 8


@dataclass(frozen=True)
class PreprocessConfig:
    target_h: int = 64
    target_w: int = 44
    min_fg_height: int = MIN_FOREGROUND_HEIGHT
    # "centroid" centers the foreground mean column; "bbox" centers the
    # bbox midpoint instead.
    center_mode: str = "centroid"

    def __post_init__(self):
        if self.target_h < 2 or self.target_w < 1:
            raise ValueError("target dimensions too small")
        if self.center_mode not in ("centroid", "bbox"):
            raise ValueError(f"unknown center_mode: {self.center_mode!r}")


def standard_preprocess(mask: Mask, cfg: PreprocessConfig = PreprocessConfig()) -> tuple[Mask, AffineMap]:
    """Normalize one silhouette to (target_h, target_w).

    Steps, fused into a single affine map and one resampling pass:
    crop rows to the foreground extent, scale uniformly so the foreground
    spans the full output height, shift so the reference column (centroid
    or bbox center) sits at target_w / 2, then rasterize at the output
    size.  Returns the mask together with the coordinate map so that
    keypoints estimated on the input can be carried along.

    Raises RejectedMaskError("empty") for empty masks and
    RejectedMaskError("too_short") when the foreground is shorter than
    cfg.min_fg_height pixels.
    """
    bbox = raster.foreground_bbox(mask)
    if bbox is None:
        raise RejectedMaskError("empty")
    if bbox.height < cfg.min_fg_height:
        raise RejectedMaskError(
            "too_short",
            f"foreground height {bbox.height} px below minimum {cfg.min_fg_height}",
        )

    if cfg.center_mode == "centroid":
        ys, xs = np.nonzero(mask)
        ref_x = float(xs.mean())
    else:
        ref_x = (bbox.min_x + bbox.max_x) / 2.0

    # Endpoint-aligned scale: the top foreground row maps exactly to output
    # row 0 and the bottom one to row target_h - 1, so the figure touches
    # both borders by construction.
    if bbox.height > 1:
        factor = (cfg.target_h - 1) / (bbox.height - 1)
    else:
        factor = 1.0
    m = geometry.compose(
        geometry.scale_about((0.0, 0.0), factor),
        geometry.translation(-ref_x, -float(bbox.min_y)),
    )
    m = geometry.compose(geometry.translation(cfg.target_w / 2.0, 0.0), m)
    out = raster.warp(mask, m, cfg.target_w, cfg.target_h)
    return out, m
