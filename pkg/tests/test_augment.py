"""Sequence-coherent augmentation: determinism, coherence, statistics."""

import numpy as np
import pytest

from gaitalign.augment import (
    AugmentConfig,
    AugmentDecisions,
    EraseParams,
    JitterParams,
    apply_decisions,
    apply_erase,
    apply_jitter,
    augment_sequence,
    draw_decisions,
    erase_rect,
    horizontal_flip,
)


def body_mask(h=64, w=44):
    mask = np.zeros((h, w), dtype=np.uint8)
    mask[8:56, 14:30] = 1
    mask[4:10, 18:26] = 1
    return mask


def frames(n=6):
    base = body_mask()
    out = []
    for i in range(n):
        f = base.copy()
        f[30 + i, 10:14] = 1  # small per-frame variation
        out.append(f)
    return out


# -- config validation -----------------------------------------------------


def test_config_rejects_bad_probability():
    with pytest.raises(ValueError):
        AugmentConfig(p_flip=1.5)
    with pytest.raises(ValueError):
        AugmentConfig(p_erase=-0.1)


def test_config_rejects_bad_erase_range():
    with pytest.raises(ValueError):
        AugmentConfig(erase_area_frac=(0.4, 0.2))
    with pytest.raises(ValueError):
        AugmentConfig(erase_area_frac=(0.0, 0.3))


def test_config_rejects_bad_jitter_caps():
    with pytest.raises(ValueError):
        AugmentConfig(max_rot_deg=-1.0)
    with pytest.raises(ValueError):
        AugmentConfig(max_persp_frac=0.25)


# -- flip -------------------------------------------------------------------


def test_double_flip_is_identity_exactly():
    mask = body_mask()
    np.testing.assert_array_equal(horizontal_flip(horizontal_flip(mask)), mask)


def test_flip_moves_column_zero_to_last():
    mask = np.zeros((10, 44), dtype=np.uint8)
    mask[3, 0] = 1
    flipped = horizontal_flip(mask)
    assert flipped[3, 43] == 1
    assert flipped[3, 0] == 0


def test_flip_leaves_symmetric_mask_unchanged():
    mask = np.zeros((8, 9), dtype=np.uint8)
    mask[2:6, 3:6] = 1  # symmetric about column 4
    np.testing.assert_array_equal(horizontal_flip(mask), mask)


# -- jitter ------------------------------------------------------------------


def test_jitter_with_zero_params_is_identity():
    mask = body_mask()
    params = JitterParams(0.0, ((0.0, 0.0),) * 4)
    np.testing.assert_array_equal(apply_jitter(mask, params), mask)


def test_jitter_preserves_dims_and_binarity():
    mask = body_mask()
    params = JitterParams(7.0, ((0.02, -0.03), (-0.01, 0.05), (0.04, 0.0), (0.0, -0.02)))
    out = apply_jitter(mask, params)
    assert out.shape == mask.shape
    assert set(np.unique(out)) <= {0, 1}


def test_jitter_pure_rotation_roughly_conserves_area():
    mask = body_mask()
    out = apply_jitter(mask, JitterParams(10.0, ((0.0, 0.0),) * 4))
    assert abs(int(out.sum()) - int(mask.sum())) <= 0.05 * mask.sum()


def test_zero_caps_draw_identity_even_when_triggered():
    cfg = AugmentConfig(p_flip=0.0, p_affine=1.0, p_erase=0.0, max_rot_deg=0.0, max_persp_frac=0.0)
    d = draw_decisions(cfg, 0, "seq")
    assert d.jitter is not None
    assert d.jitter.rot_deg == 0.0
    assert all(fx == 0.0 and fy == 0.0 for fx, fy in d.jitter.corner_frac)
    mask = body_mask()
    np.testing.assert_array_equal(apply_jitter(mask, d.jitter), mask)


# -- erase -------------------------------------------------------------------


def test_erase_rect_area_stays_in_range():
    rng = np.random.default_rng(3)
    shape = (64, 44)
    area_range = (0.02, 0.33)
    total = shape[0] * shape[1]
    for _ in range(200):
        params = EraseParams(
            area_frac=float(rng.uniform(*area_range)),
            aspect=float(np.exp(rng.uniform(np.log(0.3), np.log(1 / 0.3)))),
            u_x=float(rng.random()),
            u_y=float(rng.random()),
        )
        x0, y0, rw, rh = erase_rect(shape, params, area_range)
        assert 0 <= x0 and x0 + rw <= shape[1]
        assert 0 <= y0 and y0 + rh <= shape[0]
        assert area_range[0] * total <= rw * rh <= area_range[1] * total


def test_erase_only_removes_foreground():
    mask = body_mask()
    params = EraseParams(0.1, 1.0, 0.3, 0.3)
    out = apply_erase(mask, params, (0.02, 0.33))
    assert out.sum() <= mask.sum()
    assert np.all(out <= mask)


# -- sequence coherence ------------------------------------------------------


def test_flip_decision_applies_to_every_frame():
    decisions = AugmentDecisions(flip=True, jitter=None, erase=None)
    seq = frames()
    out = apply_decisions(seq, decisions, AugmentConfig())
    for before, after in zip(seq, out):
        np.testing.assert_array_equal(after, horizontal_flip(before))


def test_erase_decision_uses_one_rect_for_all_frames():
    params = EraseParams(0.08, 0.8, 0.6, 0.4)
    decisions = AugmentDecisions(flip=False, jitter=None, erase=params)
    cfg = AugmentConfig()
    seq = frames()
    out = apply_decisions(seq, decisions, cfg)
    x0, y0, rw, rh = erase_rect(seq[0].shape, params, cfg.erase_area_frac)
    for after in out:
        assert after[y0 : y0 + rh, x0 : x0 + rw].sum() == 0
    # Outside the rectangle nothing changed.
    for before, after in zip(seq, out):
        keep = np.ones_like(before, dtype=bool)
        keep[y0 : y0 + rh, x0 : x0 + rw] = False
        np.testing.assert_array_equal(after[keep], before[keep])


def test_mixed_frame_dims_raise():
    seq = [body_mask(), body_mask(h=32, w=44)]
    with pytest.raises(ValueError):
        apply_decisions(seq, AugmentDecisions(True, None, None), AugmentConfig())


def test_empty_sequence_passes_through():
    assert augment_sequence([], AugmentConfig(), epoch=0, seq_id="s") == []


# -- determinism and statistics ----------------------------------------------


def test_same_seed_epoch_id_is_bit_identical():
    cfg = AugmentConfig(p_flip=1.0, p_affine=1.0, p_erase=1.0, seed=11)
    a = augment_sequence(frames(), cfg, epoch=2, seq_id="subj/seq01")
    b = augment_sequence(frames(), cfg, epoch=2, seq_id="subj/seq01")
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_epoch_changes_the_draw():
    cfg = AugmentConfig(p_flip=1.0, p_affine=1.0, p_erase=1.0, seed=11)
    d0 = draw_decisions(cfg, 0, "subj/seq01")
    d1 = draw_decisions(cfg, 1, "subj/seq01")
    assert d0 != d1


def test_decisions_do_not_depend_on_draw_order():
    cfg = AugmentConfig(seed=4)
    ids = [f"s{i}" for i in range(20)]
    forward = {i: draw_decisions(cfg, 0, i) for i in ids}
    backward = {i: draw_decisions(cfg, 0, i) for i in reversed(ids)}
    assert forward == backward


def test_zero_probability_is_identity():
    cfg = AugmentConfig(p_flip=0.0, p_affine=0.0, p_erase=0.0)
    seq = frames()
    out = augment_sequence(seq, cfg, epoch=5, seq_id="anything")
    for before, after in zip(seq, out):
        np.testing.assert_array_equal(after, before)


def test_trigger_rates_match_binomial_bounds():
    # n = 2000, p = 0.2: mean 400, sigma ~17.9, +/-3 sigma = [346, 454].
    cfg = AugmentConfig(seed=0)
    nf = nj = ne = 0
    for i in range(2000):
        d = draw_decisions(cfg, 0, f"seq{i:04d}")
        nf += d.flip
        nj += d.jitter is not None
        ne += d.erase is not None
    for n in (nf, nj, ne):
        assert 346 <= n <= 454
