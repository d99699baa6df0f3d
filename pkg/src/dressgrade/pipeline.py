"""Scene assembly, the quality gate, and deterministic batch runs.

A batch never aborts on one bad image: decode failures and gate
rejections become per-image rejection records, so a corpus run is
auditable and restartable.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .attributes import AttributeSet
from .classify import SceneAnnotation, Thresholds, classify_all
from .errors import DressgradeError, EmptyMaskError
from .keypoints import ARM_CHAINS, LEG_CHAINS, KeypointSet, read_keypoints
from .mask import (
    CANONICAL_SIZE,
    LabelMap,
    bounding_box,
    largest_component,
    read_label_map,
    rescale_label_map,
    threshold_mask,
)
from . import lip


class RejectionReason(Enum):
    EMPTY_DRESS = "empty_dress"
    FRAGMENTED_MASK = "fragmented_mask"
    MISSING_KEYPOINTS = "missing_keypoints"
    LOW_CONFIDENCE = "low_confidence"
    INPUT_ERROR = "input_error"


@dataclass(frozen=True)
class RejectionRecord:
    image_id: str
    reason: RejectionReason
    detail: str


@dataclass(frozen=True)
class GateConfig:
    """Quality-gate policy: what counts as a pristine scene."""

    min_dress_area_fraction: float = 0.02
    min_component_dominance: float = 0.9
    min_keypoint_confidence: float = 0.3

    def __post_init__(self):
        for name in ("min_dress_area_fraction", "min_component_dominance"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"{name} must be in (0, 1]")


@dataclass(frozen=True)
class PipelineConfig:
    thresholds: Thresholds = field(default_factory=Thresholds)
    gate: GateConfig = field(default_factory=GateConfig)
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class SceneStats:
    """Mask accounting the gate needs beyond the scene itself."""

    component_count: int
    total_dress_pixels: int


def build_scene(
    label_map: LabelMap, keypoints: KeypointSet, cfg: PipelineConfig = PipelineConfig()
) -> tuple[SceneAnnotation, SceneStats]:
    """Fuse one image's inputs into a canonical-frame scene.

    Rescales both inputs to the canonical frame, thresholds the dress
    class, keeps the largest connected component, and attaches the
    bounding box. Raises EmptyMaskError when the image has no dress
    pixel at all.
    """
    scaled_map = rescale_label_map(label_map, CANONICAL_SIZE)
    scaled_kp = keypoints.scaled(
        CANONICAL_SIZE / label_map.width, CANONICAL_SIZE / label_map.height
    )
    dress = threshold_mask(scaled_map, lip.DRESS)
    if dress.is_empty:
        raise EmptyMaskError("no dress pixels in label map")
    total = dress.on_count
    main, count = largest_component(dress)
    scene = SceneAnnotation(mask=main, box=bounding_box(main), keypoints=scaled_kp)
    return scene, SceneStats(component_count=count, total_dress_pixels=total)


def _chains_satisfied(kp: KeypointSet, ok) -> bool:
    hips = ok(kp["l_hip"]) and ok(kp["r_hip"])
    arm = any(all(ok(kp[n]) for n in chain) for chain in ARM_CHAINS.values())
    leg = any(all(ok(kp[n]) for n in chain) for chain in LEG_CHAINS.values())
    return hips and arm and leg


def quality_gate(
    scene: SceneAnnotation,
    stats: SceneStats,
    cfg: PipelineConfig = PipelineConfig(),
    image_id: str = "",
) -> RejectionRecord | None:
    """Accept (None) or reject a built scene.

    Checks run in a fixed order: fragmentation first, then dress area,
    then the required keypoint chains (at least one full arm, one full
    leg, and both hips, all at usable confidence).
    """
    gate = cfg.gate
    dominance = scene.mask.on_count / stats.total_dress_pixels
    if dominance < gate.min_component_dominance:
        return RejectionRecord(
            image_id,
            RejectionReason.FRAGMENTED_MASK,
            f"largest component holds {dominance:.3f} of dress pixels "
            f"({stats.component_count} components)",
        )
    area_fraction = scene.mask.on_count / (scene.frame * scene.frame)
    if area_fraction < gate.min_dress_area_fraction:
        return RejectionRecord(
            image_id,
            RejectionReason.EMPTY_DRESS,
            f"dress covers {area_fraction:.4f} of the frame",
        )
    kp = scene.keypoints
    confident = lambda p: p.confidence >= gate.min_keypoint_confidence
    if not _chains_satisfied(kp, confident):
        if _chains_satisfied(kp, lambda p: p.present):
            return RejectionRecord(
                image_id,
                RejectionReason.LOW_CONFIDENCE,
                f"required chains present only below confidence "
                f"{gate.min_keypoint_confidence}",
            )
        return RejectionRecord(
            image_id,
            RejectionReason.MISSING_KEYPOINTS,
            "no usable hip pair / arm chain / leg chain",
        )
    return None


@dataclass(frozen=True)
class ManifestEntry:
    image_id: str
    label_map_path: str
    keypoints_path: str


def read_manifest(path) -> list[ManifestEntry]:
    """Load a CSV manifest with columns image_id, label_map_path, keypoints_path."""
    entries = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"image_id", "label_map_path", "keypoints_path"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(
                f"manifest must have columns {sorted(required)}, "
                f"got {reader.fieldnames}"
            )
        for row in reader:
            entries.append(
                ManifestEntry(
                    row["image_id"], row["label_map_path"], row["keypoints_path"]
                )
            )
    return entries


def write_manifest(path, entries: list[ManifestEntry]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image_id", "label_map_path", "keypoints_path"])
        for e in entries:
            writer.writerow([e.image_id, e.label_map_path, e.keypoints_path])


@dataclass(frozen=True)
class ItemOutcome:
    """Exactly one of ``attributes`` / ``rejection`` is set per image."""

    image_id: str
    attributes: AttributeSet | None = None
    rejection: RejectionRecord | None = None

    def __post_init__(self):
        if (self.attributes is None) == (self.rejection is None):
            raise ValueError("outcome must be exactly one of result or rejection")


def process_entry(entry: ManifestEntry, cfg: PipelineConfig) -> ItemOutcome:
    """Classify one manifest entry, mapping every failure to a rejection."""
    try:
        label_map = read_label_map(entry.label_map_path)
        keypoints = read_keypoints(entry.keypoints_path)
    except (OSError, ValueError, DressgradeError) as exc:
        return ItemOutcome(
            entry.image_id,
            rejection=RejectionRecord(
                entry.image_id, RejectionReason.INPUT_ERROR, str(exc)
            ),
        )
    try:
        scene, stats = build_scene(label_map, keypoints, cfg)
    except EmptyMaskError as exc:
        return ItemOutcome(
            entry.image_id,
            rejection=RejectionRecord(
                entry.image_id, RejectionReason.EMPTY_DRESS, str(exc)
            ),
        )
    rejection = quality_gate(scene, stats, cfg, image_id=entry.image_id)
    if rejection is not None:
        return ItemOutcome(entry.image_id, rejection=rejection)
    return ItemOutcome(entry.image_id, attributes=classify_all(scene, cfg.thresholds))


def run_batch(
    manifest: list[ManifestEntry], cfg: PipelineConfig = PipelineConfig()
) -> list[ItemOutcome]:
    """Process a manifest, one outcome per entry, in manifest order.

    Worker count affects only wall time; outcomes are collected in
    input order so the output is identical for any parallelism.
    """
    if cfg.workers == 1:
        return [process_entry(entry, cfg) for entry in manifest]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(lambda e: process_entry(e, cfg), manifest))


def split_outcomes(
    outcomes: list[ItemOutcome],
) -> tuple[list[tuple[str, AttributeSet]], list[RejectionRecord]]:
    """Separate classified results from rejections, both in batch order."""
    results = [(o.image_id, o.attributes) for o in outcomes if o.attributes is not None]
    rejections = [o.rejection for o in outcomes if o.rejection is not None]
    return results, rejections
