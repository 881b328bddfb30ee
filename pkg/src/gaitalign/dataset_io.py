"""Dataset layout, mask/pose serialization, and the manifest.

Layout::

    root/
      manifest.json                      (optional until written)
      <subject>/<sequence>/sils/0000.png ...
      <subject>/<sequence>/pose.json     (optional keypoints)
      <subject>/<sequence>/truth.json    (optional synthetic ground truth)

Masks are 8-bit grayscale PNGs: foreground is written as 255 and read
back as value >= 128, so write -> read is bit-exact.  Pose and truth
files are JSON with full-precision floats (Python repr round-trips
float64 exactly).  Manifest and pose files keep frame lists sorted by
index so trees written from the same inputs are byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image

from .errors import (
    DuplicateSequenceError,
    MalformedPoseError,
    UnsupportedSchemaError,
)
from .raster import Mask
from .skeleton import JOINT_COUNT, SkeletonFrame
from .synth import Perturbation

SCHEMA_NAME = "coco17"
MANIFEST_SCHEMA_VERSION = 1
MASK_DIR = "sils"
POSE_FILE = "pose.json"
TRUTH_FILE = "truth.json"
MANIFEST_FILE = "manifest.json"


def write_mask(path: str | Path, mask: Mask) -> None:
    arr = (np.asarray(mask, dtype=np.uint8) != 0).astype(np.uint8) * 255
    Image.fromarray(arr, mode="L").save(str(path), format="PNG")


def read_mask(path: str | Path) -> Mask:
    with Image.open(str(path)) as img:
        arr = np.asarray(img.convert("L"))
    return (arr >= 128).astype(np.uint8)


def mask_size(path: str | Path) -> tuple[int, int]:
    """(width, height) from the image header, without decoding pixels."""
    with Image.open(str(path)) as img:
        return img.size


def write_energy_image(path: str | Path, values: np.ndarray) -> None:
    """Write a [0, 1] float image as 8-bit grayscale (value = round(255 * v))."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"energy image must be 2-d, got shape {arr.shape}")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("energy image values must lie in [0, 1]")
    quantized = np.floor(arr * 255.0 + 0.5).astype(np.uint8)
    Image.fromarray(quantized, mode="L").save(str(path), format="PNG")


def write_pose(path: str | Path, frames: Iterable[SkeletonFrame]) -> None:
    ordered = sorted(frames, key=lambda f: f.frame_index)
    payload = {
        "schema": SCHEMA_NAME,
        "joint_count": JOINT_COUNT,
        "frames": [
            {
                "index": f.frame_index,
                "keypoints": [[float(x), float(y), float(c)] for x, y, c in f.joints],
            }
            for f in ordered
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def read_pose(path: str | Path) -> dict[int, SkeletonFrame]:
    """Read a pose file into {frame_index: SkeletonFrame}.

    Raises UnsupportedSchemaError for unknown schemas and
    MalformedPoseError for structural violations (wrong joint count,
    negative confidence, non-finite visible coordinates, duplicate
    indices).
    """
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedPoseError(f"{path}: cannot parse pose file: {exc}") from exc
    schema = payload.get("schema")
    if schema != SCHEMA_NAME:
        raise UnsupportedSchemaError(f"{path}: unsupported keypoint schema {schema!r}")
    if payload.get("joint_count") != JOINT_COUNT:
        raise MalformedPoseError(
            f"{path}: schema {SCHEMA_NAME} requires joint_count {JOINT_COUNT}"
        )
    out: dict[int, SkeletonFrame] = {}
    for entry in payload.get("frames", []):
        idx = entry.get("index")
        if not isinstance(idx, int):
            raise MalformedPoseError(f"{path}: frame index must be an integer")
        if idx in out:
            raise MalformedPoseError(f"{path}: duplicate frame index {idx}")
        kps = entry.get("keypoints")
        if not isinstance(kps, list) or len(kps) != JOINT_COUNT:
            raise MalformedPoseError(
                f"{path}: frame {idx} must carry exactly {JOINT_COUNT} keypoints"
            )
        arr = np.asarray(kps, dtype=np.float64)
        if arr.shape != (JOINT_COUNT, 3):
            raise MalformedPoseError(f"{path}: frame {idx} keypoints must be (x, y, c) triples")
        if np.any(arr[:, 2] < 0.0):
            raise MalformedPoseError(f"{path}: frame {idx} has a negative confidence")
        visible = arr[:, 2] > 0.0
        if not np.all(np.isfinite(arr[visible, :2])):
            raise MalformedPoseError(f"{path}: frame {idx} has non-finite visible coordinates")
        out[idx] = SkeletonFrame(arr, frame_index=idx)
    return out


def write_truth(path: str | Path, perturbations: Sequence[Perturbation]) -> None:
    payload = {
        "frames": [
            {
                "index": i,
                "phi": float(p.phi),
                "scale": float(p.scale),
                "shift": [float(p.shift[0]), float(p.shift[1])],
            }
            for i, p in enumerate(perturbations)
        ]
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def read_truth(path: str | Path) -> list[Perturbation]:
    payload = json.loads(Path(path).read_text())
    frames = sorted(payload["frames"], key=lambda e: e["index"])
    out = []
    for entry in frames:
        phi = float(entry["phi"])
        scale = float(entry["scale"])
        shift = (float(entry["shift"][0]), float(entry["shift"][1]))
        if not (math.isfinite(phi) and math.isfinite(scale)):
            raise MalformedPoseError(f"{path}: non-finite ground-truth values")
        out.append(Perturbation(phi=phi, scale=scale, shift=shift))
    return out


@dataclass(frozen=True)
class FrameEntry:
    index: int
    file: str  # relative to the sequence directory, e.g. "sils/0000.png"


@dataclass(frozen=True)
class SequenceRecord:
    subject: str
    sequence: str
    frames: tuple[FrameEntry, ...]
    resolution: tuple[int, int]  # (width, height)
    has_pose: bool
    has_truth: bool

    @property
    def key(self) -> tuple[str, str]:
        return (self.subject, self.sequence)

    def directory(self, root: str | Path) -> Path:
        return Path(root) / self.subject / self.sequence


@dataclass(frozen=True)
class Manifest:
    records: tuple[SequenceRecord, ...]
    schema_version: int = MANIFEST_SCHEMA_VERSION


def build_manifest(records: Iterable[SequenceRecord]) -> Manifest:
    """Collect records in stable order; duplicate identities are an error."""
    seen: dict[tuple[str, str], SequenceRecord] = {}
    for rec in records:
        if rec.key in seen:
            raise DuplicateSequenceError(f"duplicate sequence {rec.subject}/{rec.sequence}")
        seen[rec.key] = rec
    ordered = tuple(sorted(seen.values(), key=lambda r: r.key))
    return Manifest(ordered)


def frame_filename(index: int) -> str:
    if not 0 <= index <= 9999:
        raise ValueError("frame index must fit a zero-padded 4-digit name")
    return f"{MASK_DIR}/{index:04d}.png"


def _scan_sequence(root: Path, subject: str, sequence: str) -> SequenceRecord:
    seq_dir = root / subject / sequence
    sils = seq_dir / MASK_DIR
    if not sils.is_dir():
        raise ValueError(f"{seq_dir}: missing {MASK_DIR}/ directory")
    frames = []
    resolution: tuple[int, int] | None = None
    for png in sorted(sils.glob("*.png")):
        stem = png.stem
        if len(stem) != 4 or not stem.isdigit():
            raise ValueError(f"{png}: mask files must use zero-padded 4-digit names")
        size = mask_size(png)
        if resolution is None:
            resolution = size
        elif size != resolution:
            raise ValueError(f"{png}: resolution {size} differs from {resolution}")
        frames.append(FrameEntry(int(stem), f"{MASK_DIR}/{png.name}"))
    if not frames:
        raise ValueError(f"{sils}: contains no mask frames")
    return SequenceRecord(
        subject=subject,
        sequence=sequence,
        frames=tuple(frames),
        resolution=resolution,
        has_pose=(seq_dir / POSE_FILE).is_file(),
        has_truth=(seq_dir / TRUTH_FILE).is_file(),
    )


def scan(root: str | Path) -> Manifest:
    """Walk a dataset tree into a Manifest with stable record ordering."""
    rootp = Path(root)
    if not rootp.is_dir():
        raise ValueError(f"{root}: not a directory")
    records = []
    for subject_dir in sorted(p for p in rootp.iterdir() if p.is_dir()):
        for seq_dir in sorted(p for p in subject_dir.iterdir() if p.is_dir()):
            records.append(_scan_sequence(rootp, subject_dir.name, seq_dir.name))
    return build_manifest(records)


def write_manifest(manifest: Manifest, path: str | Path) -> None:
    payload = {
        "schema_version": manifest.schema_version,
        "sequences": [
            {
                "subject": r.subject,
                "sequence": r.sequence,
                "resolution": [r.resolution[0], r.resolution[1]],
                "frames": [{"index": f.index, "file": f.file} for f in r.frames],
                "pose": r.has_pose,
                "truth": r.has_truth,
            }
            for r in manifest.records
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def read_manifest(path: str | Path) -> Manifest:
    payload = json.loads(Path(path).read_text())
    version = payload.get("schema_version")
    if version != MANIFEST_SCHEMA_VERSION:
        raise UnsupportedSchemaError(f"{path}: unsupported manifest schema {version!r}")
    records = []
    for entry in payload["sequences"]:
        records.append(
            SequenceRecord(
                subject=entry["subject"],
                sequence=entry["sequence"],
                frames=tuple(FrameEntry(f["index"], f["file"]) for f in entry["frames"]),
                resolution=(entry["resolution"][0], entry["resolution"][1]),
                has_pose=bool(entry["pose"]),
                has_truth=bool(entry["truth"]),
            )
        )
    return build_manifest(records)


def load_sequence(root: str | Path, record: SequenceRecord) -> list[tuple[Mask, SkeletonFrame | None]]:
    """Masks plus per-frame skeletons (None where the pose file has no entry)."""
    seq_dir = record.directory(root)
    poses: dict[int, SkeletonFrame] = {}
    if record.has_pose:
        poses = read_pose(seq_dir / POSE_FILE)
    out = []
    for frame in record.frames:
        mask = read_mask(seq_dir / frame.file)
        out.append((mask, poses.get(frame.index)))
    return out
