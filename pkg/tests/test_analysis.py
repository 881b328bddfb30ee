"""GEI computation, sharpness, and strategy comparison metrics."""

import math

import numpy as np
import pytest

from gaitalign.align import AlignmentConfig, ReportRow, Strategy
from gaitalign.analysis import (
    compare_strategies,
    compute_metrics,
    gei,
    gei_sharpness,
    sequence_metrics,
)
from gaitalign.synth import FigureSpec, Perturbation, make_sequence, random_perturbations


def row(theta=0.0, angle=0.0, neck=(22.0, 11.52), height=56, degenerate=False):
    return ReportRow(
        frame_index=0,
        theta_applied=theta,
        spine_angle_out=angle,
        neck_out=neck,
        fg_height_out=height,
        degenerate=degenerate,
    )


def perturbed_sequence(seed=0, n=8, max_phi=25.0):
    rng = np.random.default_rng(seed)
    perts = random_perturbations(n, rng, max_phi_deg=max_phi, scale_range=(0.85, 1.2), max_shift=6.0)
    return make_sequence(FigureSpec(), perts)


# -- gei ---------------------------------------------------------------------


def test_gei_of_repeated_mask_is_that_mask():
    mask = np.zeros((6, 5), dtype=np.uint8)
    mask[1:5, 2:4] = 1
    g = gei([mask] * 7)
    np.testing.assert_array_equal(g, mask.astype(np.float64))


def test_gei_of_complementary_masks_is_half():
    a = np.zeros((4, 4), dtype=np.uint8)
    a[:2] = 1
    b = 1 - a
    np.testing.assert_array_equal(gei([a, b]), np.full((4, 4), 0.5))


def test_gei_of_all_zero_frames_is_zero():
    z = np.zeros((3, 3), dtype=np.uint8)
    np.testing.assert_array_equal(gei([z, z]), np.zeros((3, 3)))


def test_gei_rejects_empty_and_mixed():
    with pytest.raises(ValueError):
        gei([])
    with pytest.raises(ValueError):
        gei([np.zeros((3, 3), dtype=np.uint8), np.zeros((4, 3), dtype=np.uint8)])


def test_gei_is_order_invariant():
    rng = np.random.default_rng(1)
    frames = [(rng.random((8, 8)) > 0.5).astype(np.uint8) for _ in range(5)]
    g1 = gei(frames)
    g2 = gei(frames[::-1])
    np.testing.assert_array_equal(g1, g2)
    assert g1.min() >= 0.0 and g1.max() <= 1.0


# -- sharpness -----------------------------------------------------------------


def test_sharpness_of_binary_gei_is_one():
    g = np.zeros((5, 5))
    g[1:4, 1:4] = 1.0
    assert gei_sharpness(g) == 1.0


def test_sharpness_of_uniform_half_support_is_zero():
    g = np.zeros((5, 5))
    g[2, :] = 0.5
    assert gei_sharpness(g) == 0.0


def test_sharpness_of_empty_support_is_one():
    assert gei_sharpness(np.zeros((4, 4))) == 1.0


def test_sharpness_intermediate_value():
    g = np.zeros((2, 2))
    g[0, 0] = 0.75
    assert gei_sharpness(g) == pytest.approx(0.5)


# -- compute_metrics -----------------------------------------------------------


def test_identical_rows_give_zero_variances():
    rows = [row(angle=0.01) for _ in range(5)]
    m = compute_metrics(rows, np.ones((2, 2)))
    assert m.spine_angle_var == 0.0
    assert m.neck_var_x == 0.0
    assert m.neck_var_y == 0.0
    assert m.fg_height_var == 0.0
    assert m.degenerate_fraction == 0.0


def test_two_point_angle_statistics():
    a = 0.05
    rows = [row(angle=a), row(angle=-a)]
    m = compute_metrics(rows, np.ones((2, 2)))
    assert m.spine_angle_mean_abs == pytest.approx(a, abs=1e-15)
    assert m.spine_angle_var == pytest.approx(a * a, abs=1e-15)


def test_single_row_gives_zero_variances():
    m = compute_metrics([row(angle=0.2)], np.ones((2, 2)))
    assert m.spine_angle_var == 0.0
    assert m.fg_height_var == 0.0


def test_binary_gei_scores_sharpness_one():
    m = compute_metrics([row()], np.eye(3))
    assert m.gei_sharpness == 1.0


def test_degenerate_rows_excluded_but_counted():
    rows = [row(angle=0.01), row(angle=5.0, degenerate=True), row(angle=0.01)]
    m = compute_metrics(rows, np.ones((2, 2)))
    assert m.spine_angle_mean_abs == pytest.approx(0.01)
    assert m.degenerate_fraction == pytest.approx(1.0 / 3.0)


def test_dropped_rows_count_as_flagged():
    rows = [row(), row(height=0)]
    m = compute_metrics(rows, np.ones((2, 2)))
    assert m.degenerate_fraction == pytest.approx(0.5)


def test_no_qualifying_rows_yield_nan():
    rows = [row(degenerate=True), row(height=0)]
    m = compute_metrics(rows, np.ones((2, 2)))
    assert math.isnan(m.spine_angle_mean_abs)
    assert math.isnan(m.neck_var_x)
    assert m.degenerate_fraction == 1.0


def test_empty_rows_raise():
    with pytest.raises(ValueError):
        compute_metrics([], np.ones((2, 2)))


# -- sequence_metrics and compare_strategies ------------------------------------


def test_sequence_metrics_shapes_and_consistency():
    seq = perturbed_sequence(seed=3)
    cfg = AlignmentConfig()
    metrics, rows, g = sequence_metrics(seq.frames, cfg)
    assert len(rows) == len(seq.frames)
    assert g.shape == (cfg.target_h, cfg.target_w)
    assert metrics.gei_sharpness == pytest.approx(gei_sharpness(g))
    assert metrics.degenerate_fraction == 0.0


def test_aligned_gei_sharper_than_unaligned():
    seq = perturbed_sequence(seed=5, max_phi=25.0)
    cfg = AlignmentConfig()
    aligned, _, _ = sequence_metrics(seq.frames, cfg)
    unaligned, _, _ = sequence_metrics(seq.frames, AlignmentConfig(strategy=Strategy.NONE))
    assert aligned.gei_sharpness > unaligned.gei_sharpness


def test_strategy_ordering_on_perturbed_sequence():
    seq = perturbed_sequence(seed=7, n=10)
    table = dict(compare_strategies(seq.frames, AlignmentConfig()))
    skel = table[Strategy.SKELETON].spine_angle_mean_abs
    minbox = table[Strategy.MIN_BBOX].spine_angle_mean_abs
    none = table[Strategy.NONE].spine_angle_mean_abs
    assert skel < minbox < none


def test_unperturbed_sequence_near_zero_variances():
    perts = [Perturbation(0.0, 1.0, (0.0, 0.0))] * 6
    seq = make_sequence(FigureSpec(), perts, phase_step=0.0)
    for _, metrics in compare_strategies(seq.frames, AlignmentConfig(rand_max_deg=0.0)):
        assert metrics.neck_var_x <= 1.0
        assert metrics.neck_var_y <= 1.0
        assert metrics.fg_height_var <= 1.0
        assert metrics.spine_angle_var <= 1e-6


def test_random_cap_zero_row_equals_none_row():
    seq = perturbed_sequence(seed=9)
    cfg = AlignmentConfig(rand_max_deg=0.0)
    table = dict(compare_strategies(seq.frames, cfg))
    assert table[Strategy.RANDOM] == table[Strategy.NONE]
