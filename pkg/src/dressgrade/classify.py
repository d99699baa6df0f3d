"""Rule-based grading of hem length, sleeve length, and hem type.

All three graders consume a SceneAnnotation: the dress mask (largest
component only), its bounding box, and the body keypoints, everything
in the 320x320 canonical frame. Pixel tolerances below are defined in
that frame and are meaningless at other resolutions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .attributes import AttributeSet, Classified, HemLength, HemType, SleeveLength, rank
from .errors import (
    DegenerateLegsError,
    HemEndNotFoundError,
    MissingKeypointError,
    NoPixelInBandError,
)
from .keypoints import ARM_CHAINS, KeypointSet, Polyline, midpoint
from .mask import CANONICAL_SIZE, BinaryMask, BoundingBox, bounding_box, lowest_on_y_in_band

# Reason codes carried by unclassified results.
REASON_BAND_GAP = "band_gap"
REASON_OUT_OF_RANGE = "out_of_range"
REASON_NON_FINITE = "non_finite"
REASON_MISSING_KEYPOINT = "missing_keypoint"
REASON_DEGENERATE_LEGS = "degenerate_legs"
REASON_HEM_END_NOT_FOUND = "hem_end_not_found"


@dataclass(frozen=True)
class Thresholds:
    """Decision constants for the three graders.

    ``hem_length_edges`` are the upper-to-lower band boundaries of the
    hem-length ratio; band i is [edges[i], edges[i-1]) and the list must
    stay strictly decreasing. Pixel tolerances apply in the canonical
    320x320 frame.
    """

    hem_length_edges: tuple[float, ...] = (
        1.05,
        0.9,
        0.75,
        0.675,
        0.6,
        0.515,
        0.475,
        0.375,
        0.3,
    )
    sleeve_tolerance_px: float = 5.0
    hem_end_tolerance_px: float = 5.0
    hem_asymmetry_gap_px: float = 5.0
    aline_min_width_px: float = 110.0
    end_band_half_width_px: float = 10.0
    arm_search_radius_px: float = 12.0

    def __post_init__(self):
        if len(self.hem_length_edges) != len(HemLength) - 1:
            raise ValueError("hem_length_edges must define one band per hem class")
        if any(a <= b for a, b in zip(self.hem_length_edges, self.hem_length_edges[1:])):
            raise ValueError("hem_length_edges must be strictly decreasing")
        for name in (
            "sleeve_tolerance_px",
            "hem_end_tolerance_px",
            "hem_asymmetry_gap_px",
            "end_band_half_width_px",
            "arm_search_radius_px",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def load_thresholds(path) -> Thresholds:
    """Read threshold overrides from a JSON config file.

    Keys match Thresholds field names; absent keys keep their defaults.
    Unknown keys are rejected so typos cannot silently change nothing.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("thresholds config must be a JSON object")
    known = {f.name for f in fields(Thresholds)}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown thresholds config keys: {sorted(unknown)}")
    if "hem_length_edges" in doc:
        doc["hem_length_edges"] = tuple(float(v) for v in doc["hem_length_edges"])
    return replace(Thresholds(), **doc)


@dataclass(frozen=True)
class SceneAnnotation:
    """Fused per-image input to the graders, in the canonical frame."""

    mask: BinaryMask
    box: BoundingBox
    keypoints: KeypointSet
    frame: int = CANONICAL_SIZE

    def __post_init__(self):
        if self.mask.width != self.frame or self.mask.height != self.frame:
            raise ValueError("scene mask is not in the canonical frame")
        if self.box != bounding_box(self.mask):
            raise ValueError("scene box must equal the mask bounding box")


def check_scene(scene: SceneAnnotation) -> SceneAnnotation:
    """Validation helper for estimator-style entry points."""
    if not isinstance(scene, SceneAnnotation):
        raise TypeError(f"expected SceneAnnotation, got {type(scene).__name__}")
    return scene


def locate_dress_end(scene: SceneAnnotation) -> int:
    """The lowest dress pixel's y (box bottom in this y-down frame)."""
    return scene.box.y_max


def hem_ratio(scene: SceneAnnotation) -> float:
    """Vertical hip-to-hem extent over vertical hip-to-ankle extent.

    Hip reference is the midpoint of both hips; ankle reference is the
    lower (max-y) of the present ankles. Vertical distances keep the
    ratio independent of skirt flare. A hem above the hip clamps to 0.
    """
    kp = scene.keypoints
    hip_y = midpoint(kp.get_present("l_hip"), kp.get_present("r_hip"))[1]
    ankles = [kp[n] for n in ("l_ankle", "r_ankle") if kp[n].present]
    if not ankles:
        raise MissingKeypointError("both ankles are missing")
    ankle_y = max(p.y for p in ankles)
    if ankle_y <= hip_y:
        raise DegenerateLegsError(f"ankle y {ankle_y} not below hip y {hip_y}")
    ratio = (locate_dress_end(scene) - hip_y) / (ankle_y - hip_y)
    return max(ratio, 0.0)


def classify_hem_length(
    ratio: float, thresholds: Thresholds = Thresholds()
) -> Classified[HemLength]:
    """Map a hem ratio to its hem-length band.

    Bands are half-open, inclusive on the lower edge, and tile [0, inf)
    so every finite non-negative ratio classifies.
    """
    if not math.isfinite(ratio):
        return Classified.unclassified(REASON_NON_FINITE)
    if ratio < 0:
        return Classified.unclassified(REASON_OUT_OF_RANGE)
    members = list(HemLength)
    for i, edge in enumerate(thresholds.hem_length_edges):
        if ratio >= edge:
            return Classified.of(members[i])
    return Classified.of(members[-1])


def arm_polyline(kp: KeypointSet, side: str) -> Polyline:
    """Shoulder-elbow-wrist chain of one side as a polyline."""
    names = ARM_CHAINS[side]
    return Polyline([kp.get_present(n).xy for n in names])


def locate_sleeve_end(
    scene: SceneAnnotation, side: str, thresholds: Thresholds = Thresholds()
) -> float:
    """Arc-length position of the farthest dress pixel along one arm.

    Scans the dress mask for pixels within the arm search radius of the
    shoulder-elbow-wrist polyline and takes the maximum arc position;
    a bare arm (no dress pixel in reach) yields 0.
    """
    line = arm_polyline(scene.keypoints, side)
    ys, xs = np.nonzero(scene.mask.pixels)
    if ys.size == 0:
        return 0.0
    arc, dist = line.project(np.column_stack([xs, ys]).astype(float))
    near = dist <= thresholds.arm_search_radius_px
    if not near.any():
        return 0.0
    return float(arc[near].max())


def classify_sleeve_one_arm(
    sleeve_end: float,
    s_shoulder: float,
    s_mid_upper: float,
    s_elbow: float,
    s_mid_lower: float,
    s_wrist: float,
    tolerance: float = 5.0,
) -> Classified[SleeveLength]:
    """Band the sleeve-end arc position against one arm's landmarks.

    Landmarks are arc-length positions along the arm: shoulder, the
    upper-arm midpoint, elbow, the forearm midpoint, wrist. Tests run
    longest-first and the gaps between bands are a legitimate
    non-answer.
    """
    if not s_shoulder < s_mid_upper < s_elbow < s_mid_lower < s_wrist:
        raise ValueError("arm landmarks must be strictly increasing along the arm")
    if sleeve_end > s_mid_lower + tolerance:
        return Classified.of(SleeveLength.LONG)
    if s_mid_lower - tolerance < sleeve_end <= s_mid_lower + tolerance:
        return Classified.of(SleeveLength.BRACELET)
    if s_elbow - tolerance < sleeve_end <= s_elbow + tolerance:
        return Classified.of(SleeveLength.ELBOW)
    if s_mid_upper - tolerance < sleeve_end <= s_mid_upper + tolerance:
        return Classified.of(SleeveLength.SHORT)
    if sleeve_end <= s_shoulder + tolerance:
        return Classified.of(SleeveLength.CAP)
    return Classified.unclassified(REASON_BAND_GAP)


def arm_landmarks(kp: KeypointSet, side: str) -> tuple[float, float, float, float, float]:
    """Arc positions of shoulder, mid-upper, elbow, mid-forearm, wrist.

    The midpoints are geometric midpoints of adjacent joints projected
    to arc length; for straight segments the projection is exact.
    """
    names = ARM_CHAINS[side]
    shoulder, elbow, wrist = (kp.get_present(n) for n in names)
    line = Polyline([shoulder.xy, elbow.xy, wrist.xy])
    upper, lower = line.segment_lengths
    s_elbow = float(line.cumulative[1])
    # The geometric midpoint of a segment's endpoints lies on the segment,
    # so its arc position is exactly half the segment length.
    return (0.0, upper / 2.0, s_elbow, s_elbow + lower / 2.0, float(line.length))


def classify_sleeve_side(
    scene: SceneAnnotation, side: str, thresholds: Thresholds = Thresholds()
) -> Classified[SleeveLength]:
    landmarks = arm_landmarks(scene.keypoints, side)
    sleeve_end = locate_sleeve_end(scene, side, thresholds)
    return classify_sleeve_one_arm(
        sleeve_end, *landmarks, tolerance=thresholds.sleeve_tolerance_px
    )


def classify_sleeve(
    scene: SceneAnnotation, thresholds: Thresholds = Thresholds()
) -> Classified[SleeveLength]:
    """Grade both arms and fuse the verdicts.

    Agreement wins; disagreement resolves to the longer class; a single
    classifiable arm stands alone. No complete arm chain at all is an
    error rather than a non-answer.
    """
    verdicts = []
    for side in ("left", "right"):
        if scene.keypoints.chain_present(ARM_CHAINS[side]):
            verdicts.append(classify_sleeve_side(scene, side, thresholds))
    if not verdicts:
        raise MissingKeypointError("no complete arm chain")
    classified = [v for v in verdicts if v.is_classified]
    if not classified:
        return verdicts[0]
    longest = min(classified, key=lambda v: rank(v.value))
    return longest


def locate_hem_ends(
    scene: SceneAnnotation, thresholds: Thresholds = Thresholds()
) -> tuple[int, int]:
    """Lowest dress pixel near each leg, as (left y, right y).

    The column used per side is the ankle's x when the ankle is
    present, else the knee's.
    """
    ends = {}
    for side, (ankle, knee) in (("left", ("l_ankle", "l_knee")), ("right", ("r_ankle", "r_knee"))):
        kp = scene.keypoints
        if kp[ankle].present:
            x_center = kp[ankle].x
        elif kp[knee].present:
            x_center = kp[knee].x
        else:
            raise MissingKeypointError(f"{side} leg has neither ankle nor knee")
        try:
            ends[side] = lowest_on_y_in_band(
                scene.mask, x_center, thresholds.end_band_half_width_px
            )
        except NoPixelInBandError as exc:
            raise HemEndNotFoundError(f"{side} side: {exc}") from exc
    return ends["left"], ends["right"]


def classify_hem_type_from_measurements(
    box_bottom: float,
    end_left: float,
    end_right: float,
    box_width: float,
    thresholds: Thresholds = Thresholds(),
) -> Classified[HemType]:
    """Hem-style decision on already-measured quantities.

    When a leg-side hem end reaches the box bottom the verdict is the
    asymmetry test; otherwise the box width decides flare vs straight.
    """
    values = (box_bottom, end_left, end_right, box_width)
    if not all(math.isfinite(v) for v in values):
        return Classified.unclassified(REASON_NON_FINITE)
    tol = thresholds.hem_end_tolerance_px
    if abs(box_bottom - end_left) <= tol or abs(box_bottom - end_right) <= tol:
        if abs(end_left - end_right) >= thresholds.hem_asymmetry_gap_px:
            return Classified.of(HemType.ASYMMETRICAL)
        return Classified.of(HemType.HIGH_LOW)
    if box_width >= thresholds.aline_min_width_px:
        return Classified.of(HemType.ALINE)
    return Classified.of(HemType.STRAIGHT)


def classify_hem_type(
    scene: SceneAnnotation,
    end_left: float,
    end_right: float,
    thresholds: Thresholds = Thresholds(),
) -> Classified[HemType]:
    return classify_hem_type_from_measurements(
        scene.box.y_max, end_left, end_right, scene.box.width, thresholds
    )


def classify_all(
    scene: SceneAnnotation, thresholds: Thresholds = Thresholds()
) -> AttributeSet:
    """Run all three graders; failures degrade per attribute, never abort.

    A missing arm chain leaves the hem verdicts intact, degenerate leg
    geometry only loses the hem length, and so on. The result is total:
    this function does not raise on any valid scene.
    """
    ratio: float | None = None
    try:
        ratio = hem_ratio(scene)
        hem_length = classify_hem_length(ratio, thresholds)
    except MissingKeypointError:
        hem_length = Classified.unclassified(REASON_MISSING_KEYPOINT)
    except DegenerateLegsError:
        hem_length = Classified.unclassified(REASON_DEGENERATE_LEGS)

    try:
        sleeve = classify_sleeve(scene, thresholds)
    except MissingKeypointError:
        sleeve = Classified.unclassified(REASON_MISSING_KEYPOINT)

    try:
        end_left, end_right = locate_hem_ends(scene, thresholds)
        hem_type = classify_hem_type(scene, end_left, end_right, thresholds)
    except MissingKeypointError:
        hem_type = Classified.unclassified(REASON_MISSING_KEYPOINT)
    except HemEndNotFoundError:
        hem_type = Classified.unclassified(REASON_HEM_END_NOT_FOUND)

    return AttributeSet(
        hem_length=hem_length,
        sleeve_length=sleeve,
        hem_type=hem_type,
        hem_ratio=ratio if hem_length.is_classified else None,
    )
