"""Geometry oracles and properties.

The numeric expectations here were computed by hand (matrix arithmetic
and a high-precision calculator) before the implementation existed; they
must not be regenerated from the code under test.
"""

import math

import numpy as np
import pytest

from gaitalign import geometry
from gaitalign.errors import SingularMapError
from gaitalign.geometry import (
    AffineMap,
    IDENTITY,
    compose,
    invert,
    rotation_about,
    rotation_angle,
    scale_about,
    translation,
)

# Frozen hand-derived values.
VERTICAL_SPINE_THETA = 0.0
TILTED_SPINE_THETA = -0.09966865  # arctan(2 / (-20 + 1e-6))
HORIZONTAL_SPINE_THETA = -math.pi / 2.0  # arctan(-2 / 1e-6) in the limit


def test_rotation_angle_vertical_spine_is_zero():
    assert rotation_angle((10.0, 5.0), (10.0, 25.0)) == VERTICAL_SPINE_THETA


def test_rotation_angle_tilted_spine_hand_value():
    theta = rotation_angle((12.0, 5.0), (10.0, 25.0))
    assert theta == pytest.approx(TILTED_SPINE_THETA, abs=1e-7)


def test_rotation_angle_horizontal_spine_near_quarter_turn():
    theta = rotation_angle((10.0, 5.0), (12.0, 5.0))
    assert theta == pytest.approx(HORIZONTAL_SPINE_THETA, abs=1e-6)
    # The regularizer keeps it strictly inside (-pi/2, pi/2).
    assert -math.pi / 2.0 < theta < 0.0


def test_rotation_angle_epsilon_default_matches_explicit():
    assert rotation_angle((12.0, 5.0), (10.0, 25.0)) == rotation_angle(
        (12.0, 5.0), (10.0, 25.0), eps=geometry.DEFAULT_EPSILON
    )


def test_rotation_about_zero_angle_is_identity():
    m = rotation_about((10.0, 5.0), 0.0)
    assert m == IDENTITY


def test_rotation_about_quarter_turn_matrix_hand_values():
    m = rotation_about((10.0, 5.0), math.pi / 2.0)
    np.testing.assert_allclose(
        [[m.r00, m.r01], [m.r10, m.r11]], [[0.0, -1.0], [1.0, 0.0]], atol=1e-12
    )
    np.testing.assert_allclose([m.tx, m.ty], [15.0, -5.0], atol=1e-12)


def test_rotation_about_quarter_turn_maps_hip_hand_value():
    m = rotation_about((10.0, 5.0), math.pi / 2.0)
    np.testing.assert_allclose(m.apply((10.0, 25.0)), (-10.0, 5.0), atol=1e-12)


def test_apply_identity():
    assert IDENTITY.apply((3.0, 7.0)) == (3.0, 7.0)


def test_apply_pure_translation():
    assert translation(2.0, -3.0).apply((0.0, 0.0)) == (2.0, -3.0)


def test_center_is_fixed_point():
    rng = np.random.default_rng(11)
    for _ in range(500):
        cx, cy = rng.uniform(-200.0, 200.0, size=2)
        theta = rng.uniform(-math.pi, math.pi)
        m = rotation_about((cx, cy), theta)
        x, y = m.apply((cx, cy))
        assert math.hypot(x - cx, y - cy) <= 1e-9


def test_verticalization_bounds_spine_x_offset():
    rng = np.random.default_rng(12)
    for _ in range(500):
        neck = tuple(rng.uniform(-100.0, 100.0, size=2))
        angle = rng.uniform(-math.pi, math.pi)
        length = rng.uniform(5.0, 200.0)
        hip = (neck[0] + length * math.sin(angle), neck[1] + length * math.cos(angle))
        theta = rotation_angle(neck, hip)
        m = rotation_about(neck, theta)
        nx, _ = m.apply(neck)
        hx, _ = m.apply(hip)
        assert abs(hx - nx) <= 1e-6 * length


def test_compose_with_identity_is_noop():
    m = rotation_about((3.0, -4.0), 0.7)
    assert compose(IDENTITY, m) == m
    assert compose(m, IDENTITY) == m


def test_compose_rotations_adds_angles():
    rng = np.random.default_rng(13)
    for _ in range(200):
        c = tuple(rng.uniform(-50.0, 50.0, size=2))
        a, b = rng.uniform(-2.0, 2.0, size=2)
        lhs = compose(rotation_about(c, a), rotation_about(c, b))
        rhs = rotation_about(c, a + b)
        np.testing.assert_allclose(
            [lhs.r00, lhs.r01, lhs.r10, lhs.r11, lhs.tx, lhs.ty],
            [rhs.r00, rhs.r01, rhs.r10, rhs.r11, rhs.tx, rhs.ty],
            atol=1e-9,
        )


def test_compose_applies_inner_first():
    m = compose(translation(0.0, 5.0), rotation_about((0.0, 0.0), math.pi / 2.0))
    np.testing.assert_allclose(m.apply((1.0, 0.0)), (0.0, 6.0), atol=1e-12)


def test_invert_identity():
    assert invert(IDENTITY) == IDENTITY


def test_invert_pure_translation_exact():
    m = invert(translation(2.0, -3.0))
    assert (m.r00, m.r01, m.r10, m.r11) == (1.0, 0.0, 0.0, 1.0)
    assert (m.tx, m.ty) == (-2.0, 3.0)


def test_invert_rotation_matches_negated_angle():
    rng = np.random.default_rng(14)
    for _ in range(200):
        c = tuple(rng.uniform(-50.0, 50.0, size=2))
        theta = rng.uniform(-3.0, 3.0)
        lhs = invert(rotation_about(c, theta))
        rhs = rotation_about(c, -theta)
        np.testing.assert_allclose(
            [lhs.r00, lhs.r01, lhs.r10, lhs.r11, lhs.tx, lhs.ty],
            [rhs.r00, rhs.r01, rhs.r10, rhs.r11, rhs.tx, rhs.ty],
            atol=1e-9,
        )


def test_invert_round_trip_on_mixed_maps():
    rng = np.random.default_rng(15)
    for _ in range(300):
        c = tuple(rng.uniform(-100.0, 100.0, size=2))
        m = rotation_about(c, rng.uniform(-math.pi, math.pi))
        m = compose(scale_about(c, rng.uniform(0.5, 2.0)), m)
        m = compose(translation(*rng.uniform(-50.0, 50.0, size=2)), m)
        back = compose(invert(m), m)
        p = tuple(rng.uniform(-100.0, 100.0, size=2))
        x, y = back.apply(p)
        assert math.hypot(x - p[0], y - p[1]) <= 1e-9


def test_invert_singular_map_raises():
    degenerate = AffineMap(1.0, 0.0, 1.0, 0.0, 0.0, 0.0)
    with pytest.raises(SingularMapError):
        invert(degenerate)


def test_scale_about_fixes_center_and_scales_offsets():
    m = scale_about((4.0, 6.0), 2.0)
    assert m.apply((4.0, 6.0)) == (4.0, 6.0)
    assert m.apply((5.0, 6.0)) == (6.0, 6.0)
    assert m.apply((4.0, 4.0)) == (4.0, 2.0)


def test_rotation_part_reads_back_angle():
    for theta in (-1.2, -0.3, 0.0, 0.4, 1.5):
        m = rotation_about((7.0, -2.0), theta)
        assert m.rotation_part() == pytest.approx(theta, abs=1e-12)
    scaled = compose(scale_about((0.0, 0.0), 3.0), rotation_about((0.0, 0.0), 0.7))
    assert scaled.rotation_part() == pytest.approx(0.7, abs=1e-12)


def test_det_of_rotation_is_one():
    m = rotation_about((1.0, 2.0), 0.9)
    assert m.det() == pytest.approx(1.0, abs=1e-12)
