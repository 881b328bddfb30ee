"""Planar affine maps used to straighten gait silhouettes.

Coordinates follow the raster convention: x grows to the right, y grows
downward, and the origin is the center of the top-left pixel.  Under
these axes a positive rotation angle turns the figure clockwise on
screen, i.e. it moves the upper body toward +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SingularMapError

# Guards the arctangent denominator when the spine is nearly horizontal.
DEFAULT_EPSILON = 1e-6

# |det| at or below this counts as non-invertible.
DET_THRESHOLD = 1e-12

Point = tuple[float, float]


@dataclass(frozen=True)
class AffineMap:
    """Map (x, y) -> (r00*x + r01*y + tx, r10*x + r11*y + ty)."""

    r00: float
    r01: float
    r10: float
    r11: float
    tx: float
    ty: float

    def apply(self, point: Point) -> Point:
        x, y = point
        return (
            self.r00 * x + self.r01 * y + self.tx,
            self.r10 * x + self.r11 * y + self.ty,
        )

    def det(self) -> float:
        return self.r00 * self.r11 - self.r01 * self.r10

    def rotation_part(self) -> float:
        """Rotation angle of the linear block, assuming positive uniform scale."""
        return math.atan2(self.r10, self.r00)


IDENTITY = AffineMap(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def translation(dx: float, dy: float) -> AffineMap:
    return AffineMap(1.0, 0.0, 0.0, 1.0, float(dx), float(dy))


def rotation_about(center: Point, theta: float) -> AffineMap:
    """Rotation by ``theta`` radians that keeps ``center`` fixed.

    The translation column is (1-cos)*cx + sin*cy, (1-cos)*cy - sin*cx,
    which is exactly the closed form obtained by conjugating the plain
    rotation with translations to and from the center.
    """
    cx, cy = center
    c = math.cos(theta)
    s = math.sin(theta)
    return AffineMap(c, -s, s, c, (1.0 - c) * cx + s * cy, (1.0 - c) * cy - s * cx)


def scale_about(center: Point, factor: float) -> AffineMap:
    """Uniform scaling by ``factor`` that keeps ``center`` fixed."""
    cx, cy = center
    f = float(factor)
    return AffineMap(f, 0.0, 0.0, f, (1.0 - f) * cx, (1.0 - f) * cy)


def rotation_angle(neck: Point, hip: Point, eps: float = DEFAULT_EPSILON) -> float:
    """Angle that makes the neck->hip segment vertical when applied about the neck.

    Computed as atan((x_neck - x_hip) / (y_neck - y_hip + eps)).  For an
    upright figure the denominator is a large negative number (neck above
    hip under y-down axes) and the angle is near zero.  ``eps`` keeps the
    ratio finite when the segment degenerates to horizontal.
    """
    dx = neck[0] - hip[0]
    denom = neck[1] - hip[1] + eps
    if denom == 0.0:
        # The eps guard cancelled exactly; fall back to the limit values.
        return 0.0 if dx == 0.0 else math.copysign(math.pi / 2.0, dx)
    return math.atan(dx / denom)


def compose(outer: AffineMap, inner: AffineMap) -> AffineMap:
    """Map equal to applying ``inner`` first, then ``outer``."""
    return AffineMap(
        outer.r00 * inner.r00 + outer.r01 * inner.r10,
        outer.r00 * inner.r01 + outer.r01 * inner.r11,
        outer.r10 * inner.r00 + outer.r11 * inner.r10,
        outer.r10 * inner.r01 + outer.r11 * inner.r11,
        outer.r00 * inner.tx + outer.r01 * inner.ty + outer.tx,
        outer.r10 * inner.tx + outer.r11 * inner.ty + outer.ty,
    )


def invert(m: AffineMap) -> AffineMap:
    """Inverse map; raises SingularMapError when |det| <= 1e-12."""
    d = m.det()
    if abs(d) <= DET_THRESHOLD:
        raise SingularMapError(f"affine map is singular (det={d!r})")
    a = m.r11 / d
    b = -m.r01 / d
    c = -m.r10 / d
    e = m.r00 / d
    return AffineMap(a, b, c, e, -(a * m.tx + b * m.ty), -(c * m.tx + e * m.ty))
