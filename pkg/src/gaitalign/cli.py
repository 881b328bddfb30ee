"""Command-line interface.

Usage:
    gaitalign synth --output DIR [--subjects N --sequences M --frames K]
    gaitalign align --input DIR --output DIR [--strategy S --profile P]
    gaitalign gei --input DIR --output DIR [--aligned --grid]
    gaitalign report --input DIR --output DIR [--limit N --strategy S]
    gaitalign augment-preview --input DIR --output DIR [--epoch N]

Progress and diagnostics go to stderr; machine-readable outputs are files
under the output directory.  Every processing run writes the resolved
configuration next to its outputs.  Exit codes: 0 full success, 1 when
some sequences failed, 2 for fatal errors (bad configuration, unreadable
dataset).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import shutil
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import analysis, augment as augment_mod, dataset_io, synth as synth_mod
from .align import AlignmentConfig, Strategy, align_sequence
from .augment import AugmentConfig
from .errors import GaitAlignError, RejectedMaskError
from .preprocess import PreprocessConfig, standard_preprocess
from .skeleton import SkeletonFrame, transform_skeleton

log = logging.getLogger("gaitalign")

# Named resolutions: (target_h, target_w).
PROFILES = {"gait3d": (64, 44), "square64": (64, 64)}

RESOLVED_CONFIG_FILE = "resolved_config.json"


@dataclass(frozen=True)
class RunConfig:
    alignment: AlignmentConfig
    preprocess: PreprocessConfig
    augment: AugmentConfig


def _build_section(cls, data: dict, section: str):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"unknown keys in config section '{section}': {', '.join(unknown)}")
    coerced = dict(data)
    for key in ("neck_anchor", "erase_area_frac"):
        if key in coerced and isinstance(coerced[key], list):
            coerced[key] = tuple(coerced[key])
    return cls(**coerced)


def load_run_config(args) -> RunConfig:
    """Defaults, overlaid by --config, --profile, then explicit flags."""
    sections = {"alignment": {}, "preprocess": {}, "augment": {}}
    if getattr(args, "config", None):
        raw = json.loads(Path(args.config).read_text())
        unknown = sorted(set(raw) - set(sections))
        if unknown:
            raise ValueError(f"unknown config sections: {', '.join(unknown)}")
        for name in sections:
            sections[name].update(raw.get(name, {}))
    if getattr(args, "profile", None):
        target_h, target_w = PROFILES[args.profile]
        for name in ("alignment", "preprocess"):
            sections[name]["target_h"] = target_h
            sections[name]["target_w"] = target_w
    if getattr(args, "seed", None) is not None:
        sections["alignment"]["seed"] = args.seed
        sections["augment"]["seed"] = args.seed
    if getattr(args, "strategy", None):
        sections["alignment"]["strategy"] = args.strategy
    return RunConfig(
        alignment=_build_section(AlignmentConfig, sections["alignment"], "alignment"),
        preprocess=_build_section(PreprocessConfig, sections["preprocess"], "preprocess"),
        augment=_build_section(AugmentConfig, sections["augment"], "augment"),
    )


def write_resolved_config(rc: RunConfig, out_dir: Path) -> None:
    """Record the semantic knobs of a run (no paths, so reruns are bit-identical)."""
    payload = {
        "alignment": asdict(rc.alignment),
        "preprocess": asdict(rc.preprocess),
        "augment": asdict(rc.augment),
    }
    payload["alignment"]["strategy"] = rc.alignment.strategy.value
    (out_dir / RESOLVED_CONFIG_FILE).write_text(
        json.dumps(payload, indent=1, sort_keys=True) + "\n"
    )


def _check_roots(args) -> tuple[Path, Path]:
    in_root = Path(args.input)
    out_root = Path(args.output)
    if not in_root.is_dir():
        raise ValueError(f"input directory does not exist: {in_root}")
    if in_root.resolve() == out_root.resolve():
        raise ValueError("input and output directories must differ")
    out_root.mkdir(parents=True, exist_ok=True)
    return in_root, out_root


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


# ---------------------------------------------------------------------------
# align


def _preprocess_frames(frames, pcfg):
    """Run standard preprocessing; returns (kept pairs, kept positions, rejects)."""
    kept, kept_pos, rejected = [], [], []
    for pos, (mask, sk) in enumerate(frames):
        try:
            pm, m = standard_preprocess(mask, pcfg)
        except RejectedMaskError as exc:
            rejected.append((pos, exc.reason))
            continue
        psk = transform_skeleton(sk, m) if sk is not None else None
        kept.append((pm, psk))
        kept_pos.append(pos)
    return kept, kept_pos, rejected


def _align_one_sequence(in_root: str, out_root: str, record, rc: RunConfig) -> dict:
    """Worker: preprocess + align + write one sequence (temp dir, then rename)."""
    frames = dataset_io.load_sequence(in_root, record)
    file_indices = [f.index for f in record.frames]
    kept, kept_pos, rejected = _preprocess_frames(frames, rc.preprocess)
    if not kept:
        raise RejectedMaskError("empty", f"{record.subject}/{record.sequence}: every frame was rejected")
    aligned, rows = align_sequence(kept, rc.alignment)

    subject_dir = Path(out_root) / record.subject
    subject_dir.mkdir(parents=True, exist_ok=True)
    final_dir = subject_dir / record.sequence
    tmp_dir = subject_dir / f".{record.sequence}.tmp"
    if tmp_dir.exists():
        shutil.rmtree(tmp_dir)
    (tmp_dir / dataset_io.MASK_DIR).mkdir(parents=True)

    out_frames = []
    out_skels = []
    by_position = {kept_pos[r.frame_index]: r for r in rows}
    for frame, row in zip(aligned, rows):
        idx = file_indices[kept_pos[row.frame_index]]
        rel = dataset_io.frame_filename(idx)
        dataset_io.write_mask(tmp_dir / rel, frame.mask)
        out_frames.append((idx, rel))
        if frame.skeleton is not None:
            out_skels.append(SkeletonFrame(frame.skeleton.joints, frame_index=idx))

    with open(tmp_dir / "rows.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "frame_index",
                "theta_applied",
                "spine_angle_out",
                "neck_x",
                "neck_y",
                "fg_height_out",
                "degenerate",
                "status",
            ]
        )
        rejected_by_pos = dict(rejected)
        for pos, idx in enumerate(file_indices):
            if pos in rejected_by_pos:
                writer.writerow([idx, "", "", "", "", 0, True, f"rejected:{rejected_by_pos[pos]}"])
                continue
            row = by_position[pos]
            writer.writerow(
                [
                    idx,
                    _fmt(row.theta_applied),
                    _fmt(row.spine_angle_out),
                    _fmt(row.neck_out[0]),
                    _fmt(row.neck_out[1]),
                    row.fg_height_out,
                    row.degenerate,
                    "kept",
                ]
            )

    if out_skels:
        dataset_io.write_pose(tmp_dir / dataset_io.POSE_FILE, out_skels)
    if final_dir.exists():
        shutil.rmtree(final_dir)
    tmp_dir.replace(final_dir)
    return {
        "subject": record.subject,
        "sequence": record.sequence,
        "frames_in": len(file_indices),
        "kept": len(out_frames),
        "rejected": len(rejected),
        "frame_entries": out_frames,
        "has_pose": bool(out_skels),
    }


def cmd_align(args) -> int:
    rc = load_run_config(args)
    in_root, out_root = _check_roots(args)
    manifest = dataset_io.scan(in_root)
    if not manifest.records:
        raise ValueError(f"{in_root}: dataset contains no sequences")
    log.info("aligning %d sequences (strategy=%s, workers=%d)",
             len(manifest.records), rc.alignment.strategy.value, args.workers)

    results: dict[tuple[str, str], dict] = {}
    failures: dict[tuple[str, str], str] = {}
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futs = {
                rec.key: pool.submit(_align_one_sequence, str(in_root), str(out_root), rec, rc)
                for rec in manifest.records
            }
            for key, fut in futs.items():
                try:
                    results[key] = fut.result()
                except (GaitAlignError, ValueError) as exc:
                    failures[key] = str(exc)
    else:
        for rec in manifest.records:
            try:
                results[rec.key] = _align_one_sequence(str(in_root), str(out_root), rec, rc)
            except (GaitAlignError, ValueError) as exc:
                failures[rec.key] = str(exc)

    for key, msg in sorted(failures.items()):
        log.error("sequence %s/%s failed: %s", key[0], key[1], msg)

    out_records = []
    for rec in manifest.records:
        summary = results.get(rec.key)
        if summary is None:
            continue
        out_records.append(
            dataset_io.SequenceRecord(
                subject=summary["subject"],
                sequence=summary["sequence"],
                frames=tuple(
                    dataset_io.FrameEntry(idx, rel) for idx, rel in summary["frame_entries"]
                ),
                resolution=(rc.alignment.target_w, rc.alignment.target_h),
                has_pose=summary["has_pose"],
                has_truth=False,
            )
        )
    dataset_io.write_manifest(dataset_io.build_manifest(out_records), out_root / dataset_io.MANIFEST_FILE)

    with open(out_root / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject", "sequence", "frames_in", "kept", "rejected", "status"])
        for rec in manifest.records:
            if rec.key in results:
                s = results[rec.key]
                writer.writerow(
                    [s["subject"], s["sequence"], s["frames_in"], s["kept"], s["rejected"], "ok"]
                )
            else:
                writer.writerow([rec.subject, rec.sequence, len(rec.frames), 0, 0, "failed"])
    write_resolved_config(rc, out_root)
    log.info("aligned %d/%d sequences", len(results), len(manifest.records))
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# gei


def _aligned_masks(frames, rc: RunConfig):
    kept, _, _ = _preprocess_frames(frames, rc.preprocess)
    if not kept:
        raise RejectedMaskError("empty", "every frame was rejected")
    aligned, _ = align_sequence(kept, rc.alignment)
    return [f.mask for f in aligned]


def cmd_gei(args) -> int:
    rc = load_run_config(args)
    in_root, out_root = _check_roots(args)
    manifest = dataset_io.scan(in_root)
    failures = 0
    for rec in manifest.records:
        frames = dataset_io.load_sequence(in_root, rec)
        raw = [m for m, _ in frames if np.any(m)]
        try:
            if not raw:
                raise RejectedMaskError("empty", "sequence has no foreground")
            if args.aligned:
                g = analysis.gei(_aligned_masks(frames, rc))
            else:
                g = analysis.gei(raw)
        except (GaitAlignError, ValueError) as exc:
            log.error("gei %s/%s failed: %s", rec.subject, rec.sequence, exc)
            failures += 1
            continue
        subject_dir = out_root / rec.subject
        subject_dir.mkdir(parents=True, exist_ok=True)
        dataset_io.write_energy_image(subject_dir / f"{rec.sequence}_gei.png", g)
        if args.grid:
            g_raw = analysis.gei(raw)
            _write_gei_grid(
                subject_dir / f"{rec.sequence}_grid.png",
                [("input", g_raw), ("output", g)],
            )
    write_resolved_config(rc, out_root)
    return 1 if failures else 0


def _write_gei_grid(path: Path, panels) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, len(panels), figsize=(2.2 * len(panels), 3.2))
    if len(panels) == 1:
        axes = [axes]
    for ax, (title, img) in zip(axes, panels):
        ax.imshow(img, cmap="gray", vmin=0.0, vmax=1.0, interpolation="nearest")
        ax.set_title(title, fontsize=9)
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# ---------------------------------------------------------------------------
# report


METRIC_FIELDS = (
    "spine_angle_mean_abs",
    "spine_angle_var",
    "neck_var_x",
    "neck_var_y",
    "fg_height_var",
    "degenerate_fraction",
    "gei_sharpness",
)


def cmd_report(args) -> int:
    rc = load_run_config(args)
    in_root, out_root = _check_roots(args)
    manifest = dataset_io.scan(in_root)
    records = list(manifest.records[: args.limit] if args.limit else manifest.records)
    if not records:
        raise ValueError(f"{in_root}: dataset contains no sequences")
    strategies = [Strategy(args.strategy)] if args.strategy else list(Strategy)
    if Strategy.SKELETON in strategies and not all(r.has_pose for r in records):
        missing = [f"{r.subject}/{r.sequence}" for r in records if not r.has_pose][:5]
        raise ValueError(
            "skeleton strategy requested but these sequences have no pose data: "
            + ", ".join(missing)
        )

    per_sequence = []  # (record, strategy, metrics)
    first_gei: dict[Strategy, np.ndarray] = {}
    for pos, rec in enumerate(records):
        frames = dataset_io.load_sequence(in_root, rec)
        kept, _, _ = _preprocess_frames(frames, rc.preprocess)
        if not kept:
            log.warning("report: %s/%s skipped (all frames rejected)", rec.subject, rec.sequence)
            continue
        for strat in strategies:
            cfg = replace(rc.alignment, strategy=strat)
            metrics, _, g = analysis.sequence_metrics(kept, cfg)
            per_sequence.append((rec, strat, metrics))
            if pos == 0:
                first_gei[strat] = g

    if not per_sequence:
        raise ValueError("report: no sequence could be processed")

    out_root.mkdir(parents=True, exist_ok=True)
    with open(out_root / "report.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject", "sequence", "strategy", *METRIC_FIELDS])
        for rec, strat, metrics in per_sequence:
            writer.writerow(
                [rec.subject, rec.sequence, strat.value]
                + [_fmt(getattr(metrics, f)) for f in METRIC_FIELDS]
            )

    aggregates: dict[Strategy, dict[str, float]] = {}
    for strat in strategies:
        block = {}
        for field in METRIC_FIELDS:
            values = [
                getattr(m, field)
                for _, s, m in per_sequence
                if s == strat and math.isfinite(getattr(m, field))
            ]
            block[field] = float(np.mean(values)) if values else math.nan
        aggregates[strat] = block

    payload = {
        "sequences": len({(r.subject, r.sequence) for r, _, _ in per_sequence}),
        "strategies": {s.value: aggregates[s] for s in strategies},
    }
    (out_root / "metrics.json").write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")

    widths = [14] + [22] * len(METRIC_FIELDS)
    header = ["strategy", *METRIC_FIELDS]
    lines = ["".join(h.ljust(w) for h, w in zip(header, widths))]
    for strat in strategies:
        cells = [strat.value] + [f"{aggregates[strat][f]:.6g}" for f in METRIC_FIELDS]
        lines.append("".join(c.ljust(w) for c, w in zip(cells, widths)))
    (out_root / "report.txt").write_text("\n".join(lines) + "\n")

    _write_report_figures(out_root, strategies, aggregates, first_gei)
    write_resolved_config(rc, out_root)
    return 0


def _write_report_figures(out_root: Path, strategies, aggregates, first_gei) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = [s.value for s in strategies]
    angles = [math.degrees(aggregates[s]["spine_angle_mean_abs"]) for s in strategies]
    fig, ax = plt.subplots(figsize=(4.0, 3.0))
    ax.bar(names, angles, color="#4878a8")
    ax.set_ylabel("mean |spine angle| (deg)")
    ax.set_title("residual spine tilt by strategy")
    fig.tight_layout()
    fig.savefig(out_root / "fig_spine_angle.png", dpi=150)
    plt.close(fig)

    if first_gei:
        panels = [(s.value, first_gei[s]) for s in strategies if s in first_gei]
        _write_gei_grid(out_root / "fig_gei_grid.png", panels)


# ---------------------------------------------------------------------------
# synth


def cmd_synth(args) -> int:
    out_root = Path(args.output)
    out_root.mkdir(parents=True, exist_ok=True)
    rng_labels = [(s, q) for s in range(args.subjects) for q in range(args.sequences)]
    log.info("generating %d synthetic sequences", len(rng_labels))
    for s, q in rng_labels:
        subject = f"s{s + 1:03d}"
        sequence = f"seq{q + 1:02d}"
        rng = np.random.default_rng([args.seed, s, q])
        torso_radius = 6.0 * rng.uniform(0.9, 1.1)
        spec = synth_mod.FigureSpec(
            spine_len=30.0 * rng.uniform(0.9, 1.1),
            arm_len=24.0 * rng.uniform(0.9, 1.1),
            leg_len=28.0 * rng.uniform(0.9, 1.1),
            torso_radius=torso_radius,
            # Joints track the torso so the junction clearance (and with it
            # the capsule overlap fraction) stays the same for every body.
            shoulder_halfwidth=torso_radius + 1.6,
            hip_halfwidth=torso_radius + 1.4,
            phase=float(rng.uniform(0.0, math.tau)),
        )
        perts = synth_mod.random_perturbations(
            args.frames,
            rng,
            max_phi_deg=args.max_phi,
            scale_range=(args.scale_min, args.scale_max),
            max_shift=args.max_shift,
        )
        seq = synth_mod.make_sequence(spec, perts)
        seq_dir = out_root / subject / sequence
        (seq_dir / dataset_io.MASK_DIR).mkdir(parents=True, exist_ok=True)
        skels = []
        for t, (mask, skel) in enumerate(seq.frames):
            dataset_io.write_mask(seq_dir / dataset_io.frame_filename(t), mask)
            skels.append(skel)
        dataset_io.write_pose(seq_dir / dataset_io.POSE_FILE, skels)
        dataset_io.write_truth(seq_dir / dataset_io.TRUTH_FILE, seq.truth)
    manifest = dataset_io.scan(out_root)
    dataset_io.write_manifest(manifest, out_root / dataset_io.MANIFEST_FILE)
    return 0


# ---------------------------------------------------------------------------
# augment-preview


def cmd_augment_preview(args) -> int:
    rc = load_run_config(args)
    in_root, out_root = _check_roots(args)
    manifest = dataset_io.scan(in_root)
    records = list(manifest.records[: args.limit] if args.limit else manifest.records)
    counts = {"flip": 0, "jitter": 0, "erase": 0}
    for rec in records:
        seq_id = f"{rec.subject}/{rec.sequence}"
        frames = [m for m, _ in dataset_io.load_sequence(in_root, rec)]
        decisions = augment_mod.draw_decisions(rc.augment, args.epoch, seq_id)
        out_masks = augment_mod.apply_decisions(frames, decisions, rc.augment)
        counts["flip"] += decisions.flip
        counts["jitter"] += decisions.jitter is not None
        counts["erase"] += decisions.erase is not None
        seq_dir = out_root / rec.subject / rec.sequence
        (seq_dir / dataset_io.MASK_DIR).mkdir(parents=True, exist_ok=True)
        for entry, mask in zip(rec.frames, out_masks):
            dataset_io.write_mask(seq_dir / entry.file, mask)
    write_resolved_config(rc, out_root)
    n = len(records)
    print(f"sequences: {n}")
    for name in ("flip", "jitter", "erase"):
        rate = counts[name] / n if n else 0.0
        print(f"{name}: {counts[name]} ({rate:.1%})")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaitalign", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="dataset root to read")
        p.add_argument("--output", required=True, help="directory for results")
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--profile", choices=sorted(PROFILES), help="named output resolution")
        p.add_argument("--seed", type=int, help="override the configured seeds")

    p_align = sub.add_parser("align", help="preprocess and align a dataset")
    common(p_align)
    p_align.add_argument("--strategy", choices=[s.value for s in Strategy])
    p_align.add_argument("--workers", type=int, default=1, help="parallel sequence workers")
    p_align.set_defaults(func=cmd_align)

    p_gei = sub.add_parser("gei", help="write one gait energy image per sequence")
    common(p_gei)
    p_gei.add_argument("--aligned", action="store_true", help="align before averaging")
    p_gei.add_argument("--grid", action="store_true", help="also write input/output figure")
    p_gei.add_argument("--strategy", choices=[s.value for s in Strategy])
    p_gei.set_defaults(func=cmd_gei)

    p_rep = sub.add_parser("report", help="strategy comparison metrics and figures")
    common(p_rep)
    p_rep.add_argument("--limit", type=int, default=0, help="use only the first N sequences")
    p_rep.add_argument("--strategy", choices=[s.value for s in Strategy], help="single strategy")
    p_rep.set_defaults(func=cmd_report)

    p_syn = sub.add_parser("synth", help="generate a synthetic dataset with ground truth")
    p_syn.add_argument("--output", required=True)
    p_syn.add_argument("--subjects", type=int, default=2)
    p_syn.add_argument("--sequences", type=int, default=2)
    p_syn.add_argument("--frames", type=int, default=12)
    p_syn.add_argument("--seed", type=int, default=0)
    p_syn.add_argument("--max-phi", type=float, default=20.0, help="rotation cap, degrees")
    p_syn.add_argument("--scale-min", type=float, default=0.9)
    p_syn.add_argument("--scale-max", type=float, default=1.15)
    p_syn.add_argument("--max-shift", type=float, default=8.0, help="translation cap, px")
    p_syn.set_defaults(func=cmd_synth)

    p_aug = sub.add_parser("augment-preview", help="apply augmentation at a fixed seed")
    common(p_aug)
    p_aug.add_argument("--epoch", type=int, default=0)
    p_aug.add_argument("--limit", type=int, default=0)
    p_aug.set_defaults(func=cmd_augment_preview)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (GaitAlignError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
