"""Binary silhouette rasters: warping, cropping, and foreground geometry.

Masks are 2-D uint8 arrays of {0, 1}, indexed [row, col].  A pixel at
column x, row y has its center at coordinates (x, y); spatial extents and
centroids below are computed over pixel centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import OutOfBoundsError
from .geometry import AffineMap, Point

Mask = np.ndarray


def as_mask(a) -> Mask:
    """Coerce an array-like to a {0, 1} uint8 mask (any nonzero -> 1)."""
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
    return (arr != 0).astype(np.uint8)


@dataclass(frozen=True)
class BBox:
    """Inclusive pixel-index bounds of a foreground region."""

    min_x: int
    min_y: int
    max_x: int
    max_y: int

    @property
    def width(self) -> int:
        return self.max_x - self.min_x + 1

    @property
    def height(self) -> int:
        return self.max_y - self.min_y + 1


@dataclass(frozen=True)
class RotatedRect:
    """Rectangle with the width axis along (cos angle, sin angle).

    half_w is the half-extent along the width axis, half_h along the
    perpendicular; angle is canonical in (-pi/2, pi/2].
    """

    center: Point
    half_w: float
    half_h: float
    angle: float


@dataclass(frozen=True)
class ForegroundStats:
    count: int
    centroid: Point
    left_count: int
    right_count: int


def foreground_bbox(mask: Mask) -> BBox | None:
    """Tight inclusive bbox of nonzero pixels, or None for an empty mask."""
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        return None
    return BBox(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))


def foreground_stats(mask: Mask) -> ForegroundStats:
    """Count, centroid, and left/right split of the foreground.

    The split line sits at half the mask width; a pixel belongs to the
    left side when its center is at or left of the line (2*x + 1 <= w),
    so for odd widths the middle column counts as left.  An empty mask
    reports count 0 and centroid (0, 0).
    """
    ys, xs = np.nonzero(mask)
    n = int(xs.size)
    if n == 0:
        return ForegroundStats(0, (0.0, 0.0), 0, 0)
    w = mask.shape[1]
    left = int(np.count_nonzero(2 * xs + 1 <= w))
    return ForegroundStats(
        n,
        (float(xs.mean()), float(ys.mean())),
        left,
        n - left,
    )


def warp(mask: Mask, m: AffineMap, out_w: int, out_h: int, method: str = "nearest") -> Mask:
    """Resample a mask under an affine map into an (out_h, out_w) canvas.

    Output pixel (u, v) takes the input value at the inverse-mapped
    position; reads outside the input are background.  "nearest" keeps
    the mask binary by construction; "bilinear" interpolates the four
    neighbors and thresholds at 0.5.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError("output dimensions must be positive")
    inv = geometry.invert(m)
    h, w = mask.shape
    us = np.arange(out_w, dtype=np.float64)
    vs = np.arange(out_h, dtype=np.float64)[:, None]
    xs = inv.r00 * us + inv.r01 * vs + inv.tx
    ys = inv.r10 * us + inv.r11 * vs + inv.ty
    if method == "nearest":
        xi = np.floor(xs + 0.5).astype(np.int64)
        yi = np.floor(ys + 0.5).astype(np.int64)
        inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        out = np.zeros((out_h, out_w), dtype=np.uint8)
        out[inside] = mask[yi[inside], xi[inside]]
        return out
    if method == "bilinear":
        x0 = np.floor(xs).astype(np.int64)
        y0 = np.floor(ys).astype(np.int64)
        fx = xs - x0
        fy = ys - y0
        val = np.zeros((out_h, out_w), dtype=np.float64)
        for dx, dy, wgt in (
            (0, 0, (1 - fx) * (1 - fy)),
            (1, 0, fx * (1 - fy)),
            (0, 1, (1 - fx) * fy),
            (1, 1, fx * fy),
        ):
            xc = x0 + dx
            yc = y0 + dy
            inside = (xc >= 0) & (xc < w) & (yc >= 0) & (yc < h)
            tap = np.zeros((out_h, out_w), dtype=np.float64)
            tap[inside] = mask[yc[inside], xc[inside]]
            val += wgt * tap
        return (val >= 0.5).astype(np.uint8)
    raise ValueError(f"unknown resampling method: {method!r}")


def resize(mask: Mask, out_w: int, out_h: int) -> Mask:
    """Nearest-neighbor resize with endpoint-aligned index mapping.

    Output index i samples source index round(i * (src - 1) / (dst - 1)),
    so the first and last rows/columns of the source map exactly onto the
    first and last of the output.  Resizing to identical dims is the
    identity bit-for-bit.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError("output dimensions must be positive")
    h, w = mask.shape

    def axis_map(src: int, dst: int) -> np.ndarray:
        if dst == 1:
            return np.array([(src - 1) // 2], dtype=np.int64)
        pos = np.arange(dst, dtype=np.float64) * (src - 1) / (dst - 1)
        return np.floor(pos + 0.5).astype(np.int64)

    rows = axis_map(h, out_h)
    cols = axis_map(w, out_w)
    return np.ascontiguousarray(mask[rows[:, None], cols[None, :]])


def crop(mask: Mask, box: BBox) -> Mask:
    """Copy of the region inside ``box``; the box must lie within the mask."""
    h, w = mask.shape
    if not (0 <= box.min_x <= box.max_x < w and 0 <= box.min_y <= box.max_y < h):
        raise OutOfBoundsError(f"crop box {box} outside mask of shape {mask.shape}")
    return mask[box.min_y : box.max_y + 1, box.min_x : box.max_x + 1].copy()


def paste_centered(mask: Mask, out_w: int, out_h: int, src_point: Point, dst_point: Point) -> Mask:
    """Place a mask on a fresh canvas so src_point lands on dst_point.

    The shift is rounded to whole pixels; content falling outside the
    canvas is discarded.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError("output dimensions must be positive")
    h, w = mask.shape
    ox = int(math.floor(dst_point[0] - src_point[0] + 0.5))
    oy = int(math.floor(dst_point[1] - src_point[1] + 0.5))
    out = np.zeros((out_h, out_w), dtype=np.uint8)
    x0, x1 = max(0, ox), min(out_w, ox + w)
    y0, y1 = max(0, oy), min(out_h, oy + h)
    if x0 < x1 and y0 < y1:
        out[y0:y1, x0:x1] = mask[y0 - oy : y1 - oy, x0 - ox : x1 - ox]
    return out


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Andrew monotone chain over (N, 2) points; returns hull vertices.

    Collinear points are dropped, so the result has >= 3 vertices unless
    the input is a single point or a segment.
    """
    pts = np.unique(points, axis=0)  # sorts lexicographically by (x, y)
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1], dtype=np.float64)
    if len(hull) < 3:  # all points collinear
        return np.array([pts[0], pts[-1]], dtype=np.float64)
    return hull


def foreground_hull(mask: Mask) -> np.ndarray:
    """Convex hull of foreground pixel centers as (M, 2) float (x, y)."""
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        return np.empty((0, 2), dtype=np.float64)
    return _convex_hull(np.column_stack([xs, ys]).astype(np.float64))


def min_area_rect(mask: Mask) -> RotatedRect | None:
    """Minimum-area rotated rectangle over foreground pixel centers.

    Rotating calipers over the convex hull: the optimal rectangle has a
    side collinear with some hull edge, so only hull-edge directions are
    evaluated.  Returns None for an empty mask.
    """
    hull = foreground_hull(mask)
    if len(hull) == 0:
        return None
    if len(hull) == 1:
        return RotatedRect((float(hull[0, 0]), float(hull[0, 1])), 0.0, 0.0, 0.0)
    if len(hull) == 2:
        d = hull[1] - hull[0]
        angle = math.atan2(d[1], d[0]) % math.pi
        if angle > math.pi / 2.0:
            angle -= math.pi
        mid = (hull[0] + hull[1]) / 2.0
        return RotatedRect(
            (float(mid[0]), float(mid[1])),
            float(np.hypot(d[0], d[1]) / 2.0),
            0.0,
            angle,
        )

    edges = np.roll(hull, -1, axis=0) - hull
    angles = np.mod(np.arctan2(edges[:, 1], edges[:, 0]), math.pi / 2.0)
    angles = np.unique(np.round(angles, 12))

    xs = hull[:, 0]
    ys = hull[:, 1]
    best = None
    for a in angles:
        c = math.cos(a)
        s = math.sin(a)
        u = xs * c + ys * s  # coordinate along the width axis
        v = -xs * s + ys * c
        w_ext = u.max() - u.min()
        h_ext = v.max() - v.min()
        area = w_ext * h_ext
        if best is None or area < best[0]:
            best = (area, a, u.min(), u.max(), v.min(), v.max())

    _, a, u0, u1, v0, v1 = best
    cu = (u0 + u1) / 2.0
    cv = (v0 + v1) / 2.0
    c = math.cos(a)
    s = math.sin(a)
    center = (cu * c - cv * s, cu * s + cv * c)
    angle = float(a) if a <= math.pi / 2.0 else float(a - math.pi)
    return RotatedRect(center, float((u1 - u0) / 2.0), float((v1 - v0) / 2.0), angle)
