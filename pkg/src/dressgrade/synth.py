"""Procedural figure generator with analytically-known attributes.

Each generated figure is a (label map, keypoint set, ground truth)
triple. The ground truth is evaluated from the figure's parameters,
never from the rendered pixels, so round-tripping a figure through the
classification pipeline is a real end-to-end check rather than a
tautology. Rasterization error is absorbed by keeping every sampled
parameter a margin away from every decision threshold it is graded
against.

Geometry notes (canonical 320x320 frame, all constraints verified by
the round-trip test suite):

* Arms hang outward-down at a per-sleeve-class angle. Steep angles
  (cap/short) keep dress-bodice pixels near the shoulder from
  projecting past the cap tolerance along the arm; shallow angles
  (long/bracelet) keep sleeve tips inside the narrow-skirt width
  budget. Body pixels that do project onto the arm always land below
  the target band's ceiling, so they never change the verdict.
* Shoulders sit wide (+-33) so sleeve strips stay clear of the leg
  bands used by the hem-end locator.
* Arms are short enough that no sleeve can reach below the shortest
  hem, keeping the box bottom owned by the hem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from PIL import Image, ImageDraw

from . import lip
from .attributes import AttributeSet, HemLength, HemType, SleeveLength
from .classify import (
    Thresholds,
    classify_hem_length,
    classify_hem_type_from_measurements,
    classify_sleeve_one_arm,
)
from .errors import InfeasibleSpecError, InfeasibleTargetError
from .keypoints import KEYPOINT_NAMES, Keypoint, KeypointSet, Polyline
from .mask import CANONICAL_SIZE, LabelMap

FRAME = CANONICAL_SIZE
CENTER_X = FRAME // 2

SHOULDER_HALF = 33
HIP_HALF = 14
WAIST_HALF = 16
UPPER_ARM = 26.0
LOWER_ARM = 34.0
ARM_LENGTH = UPPER_ARM + LOWER_ARM
SLEEVE_HALF_WIDTH = 7.0
LIMB_HALF_WIDTH = 5.0
ARMHOLE_DROP = 12
ARMHOLE_INSET = 6
DIP_FLAT_HALF = 30

# Degrees from vertical, keyed by target sleeve class; see module notes.
ARM_ANGLES = {
    SleeveLength.CAP: (50.0, 1.0),
    SleeveLength.SHORT: (22.0, 1.0),
    SleeveLength.ELBOW: (12.0, 1.0),
    SleeveLength.BRACELET: (8.0, 0.5),
    SleeveLength.LONG: (5.0, 1.0),
}

# Feasible hem-ratio extremes: the top band is capped by the frame, the
# bottom band by sleeve clearance above the hem (enforced dynamically).
HEM_RATIO_MAX = 1.15
HEM_RATIO_MIN = 0.12

WIDTH_BANDS = {
    HemType.ALINE: (110.0, 150.0),
    HemType.STRAIGHT: (80.0, 110.0),
}
STEP_ASYMMETRICAL = (5.0, 20.0)
STEP_HIGH_LOW = (0.0, 5.0)
SIDE_DIP_RANGE = (5.0, 14.0)


class HemShape(Enum):
    """Hem silhouettes the generator can render.

    STEPPED hems end flat under each leg at two depths (equal depths
    give the flat hem); SIDE_DIP hems are flat across both legs and
    curve down at the outer corners, so the box bottom sits below both
    measured hem ends.
    """

    STEPPED = "stepped"
    SIDE_DIP = "side_dip"


@dataclass(frozen=True)
class FigureSpec:
    """Complete parameterization of one synthetic figure."""

    shoulder_y: int
    hip_y: int
    knee_y: int
    ankle_y: int
    hem_half: int
    hem_ratio_target: float
    sleeve_arc_fraction: float
    hem_shape: HemShape
    hem_offset_px: int
    deep_side: str = "left"
    arm_angle_deg: float = 12.0
    arm_bend_deg: float = 0.0
    shoulder_half: int = SHOULDER_HALF
    hip_half: int = HIP_HALF
    waist_half: int = WAIST_HALF
    upper_arm: float = UPPER_ARM
    lower_arm: float = LOWER_ARM
    frame: int = FRAME
    margin: float = 0.5
    occlusion_frac: float | None = None

    @property
    def leg_length(self) -> int:
        return self.ankle_y - self.hip_y

    @property
    def arm_length(self) -> float:
        return self.upper_arm + self.lower_arm

    @property
    def sleeve_arc(self) -> float:
        return self.sleeve_arc_fraction * self.arm_length

    @property
    def hem_bottom_y(self) -> int:
        """Lowest dress row: the rounded hem-ratio target."""
        return self.hip_y + round(self.hem_ratio_target * self.leg_length)


def margin_interval(lo: float, hi: float, margin: float) -> tuple[float, float]:
    """Central sub-interval of [lo, hi] that stays ``margin`` clear of both ends.

    margin is a fraction of the band half-width: 0 keeps the whole
    band, 0.5 the middle half, 1 collapses to the midpoint.
    """
    if not 0.0 <= margin <= 1.0:
        raise ValueError("margin must be in [0, 1]")
    mid = (lo + hi) / 2.0
    half = (hi - lo) / 2.0 * (1.0 - margin)
    return (mid - half, mid + half)


def _arm_landmarks() -> tuple[float, float, float, float, float]:
    return (0.0, UPPER_ARM / 2.0, UPPER_ARM, UPPER_ARM + LOWER_ARM / 2.0, ARM_LENGTH)


def sleeve_bands(thresholds: Thresholds = Thresholds()) -> dict[SleeveLength, tuple[float, float]]:
    """Arc-length interval per sleeve class for the fixed arm skeleton."""
    s_s, s_se, s_e, s_ew, s_w = _arm_landmarks()
    tol = thresholds.sleeve_tolerance_px
    return {
        SleeveLength.LONG: (s_ew + tol, s_w),
        SleeveLength.BRACELET: (s_ew - tol, s_ew + tol),
        SleeveLength.ELBOW: (s_e - tol, s_e + tol),
        SleeveLength.SHORT: (s_se - tol, s_se + tol),
        SleeveLength.CAP: (s_s, s_s + tol),
    }


def hem_ratio_band(
    target: HemLength,
    hem_cap: float = HEM_RATIO_MAX,
    hem_floor: float = HEM_RATIO_MIN,
    thresholds: Thresholds = Thresholds(),
) -> tuple[float, float]:
    """Ratio interval for a hem class, with the open ends made finite."""
    edges = (hem_cap,) + thresholds.hem_length_edges + (hem_floor,)
    idx = list(HemLength).index(target)
    return (edges[idx + 1], edges[idx])


def predicted_box_width(spec: FigureSpec) -> float:
    """Box width implied by the spec: skirt, sleeve tips, or bodice."""
    angle = math.radians(spec.arm_angle_deg)
    sleeve_reach = max(
        math.sin(angle) * spec.sleeve_arc + SLEEVE_HALF_WIDTH * math.cos(angle),
        SLEEVE_HALF_WIDTH,
    )
    half = max(spec.hem_half, spec.shoulder_half + sleeve_reach, spec.shoulder_half)
    return 2.0 * half


def _sleeve_bottom_y(spec: FigureSpec) -> float:
    angle = math.radians(spec.arm_angle_deg)
    return spec.shoulder_y + math.cos(angle) * spec.sleeve_arc + SLEEVE_HALF_WIDTH


def analytic_measurements(spec: FigureSpec) -> tuple[float, float, float, float]:
    """(box bottom, left hem end, right hem end, box width) from parameters."""
    bottom = spec.hip_y + spec.hem_ratio_target * spec.leg_length
    if spec.hem_shape is HemShape.SIDE_DIP:
        end_left = end_right = bottom - spec.hem_offset_px
    elif spec.deep_side == "left":
        end_left, end_right = bottom, bottom - spec.hem_offset_px
    else:
        end_left, end_right = bottom - spec.hem_offset_px, bottom
    return bottom, end_left, end_right, predicted_box_width(spec)


def analytic_truth(
    spec: FigureSpec, thresholds: Thresholds = Thresholds()
) -> AttributeSet:
    """Ground-truth attributes evaluated on the spec's parameters."""
    hem_length = classify_hem_length(spec.hem_ratio_target, thresholds)
    sleeve = classify_sleeve_one_arm(
        spec.sleeve_arc, *_arm_landmarks(), tolerance=thresholds.sleeve_tolerance_px
    )
    bottom, end_left, end_right, width = analytic_measurements(spec)
    hem_type = classify_hem_type_from_measurements(
        bottom, end_left, end_right, width, thresholds
    )
    return AttributeSet(
        hem_length=hem_length,
        sleeve_length=sleeve,
        hem_type=hem_type,
        hem_ratio=spec.hem_ratio_target if hem_length.is_classified else None,
    )


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise InfeasibleSpecError(message)


def validate_spec(spec: FigureSpec, thresholds: Thresholds = Thresholds()) -> None:
    """Reject specs that leave the frame or crowd a decision threshold."""
    _check(spec.frame == FRAME, "only the canonical frame is supported")
    _check(0 < spec.shoulder_y < spec.hip_y < spec.ankle_y < spec.frame, "skeleton out of order")
    _check(spec.hip_y < spec.knee_y < spec.ankle_y, "knee must sit between hip and ankle")
    _check(spec.upper_arm > 0 and spec.lower_arm > 0, "arm segments must be positive")
    _check(0.0 <= spec.sleeve_arc_fraction <= 1.0, "sleeve fraction outside [0, 1]")
    _check(3.0 <= spec.arm_angle_deg <= 60.0, "arm angle outside supported envelope")
    _check(spec.deep_side in ("left", "right"), "deep_side must be left or right")
    _check(spec.hem_offset_px >= 0, "hem offset must be >= 0")
    _check(spec.hem_half + CENTER_X < spec.frame, "skirt leaves the frame")
    min_hem_half = DIP_FLAT_HALF + 6 if spec.hem_shape is HemShape.SIDE_DIP else 30
    _check(spec.hem_half >= min_hem_half, "skirt too narrow for hem-end bands")
    _check(spec.hem_bottom_y <= spec.frame - 4, "hem bottom leaves the frame")
    _check(spec.hem_bottom_y > spec.hip_y + 4, "hem bottom must sit below the hips")
    _check(
        _sleeve_bottom_y(spec) + 2.0 <= spec.hem_bottom_y - 2.0,
        "sleeves would reach below the hem and own the box bottom",
    )

    m = spec.margin
    hem_target = classify_hem_length(spec.hem_ratio_target, thresholds)
    _check(hem_target.is_classified, "hem ratio target outside all bands")
    lo, hi = hem_ratio_band(hem_target.value, thresholds=thresholds)
    band_lo, band_hi = margin_interval(lo, hi, m)
    _check(band_lo <= spec.hem_ratio_target <= band_hi, "hem ratio too close to a band edge")

    sleeve_target = classify_sleeve_one_arm(
        spec.sleeve_arc, *_arm_landmarks(), tolerance=thresholds.sleeve_tolerance_px
    )
    _check(sleeve_target.is_classified, "sleeve arc target falls in a band gap")
    lo, hi = sleeve_bands(thresholds)[sleeve_target.value]
    band_lo, band_hi = margin_interval(lo, hi, m)
    _check(band_lo <= spec.sleeve_arc <= band_hi, "sleeve arc too close to a band edge")

    if spec.hem_shape is HemShape.SIDE_DIP:
        lo, hi = SIDE_DIP_RANGE
        band_lo, band_hi = margin_interval(lo, hi, m)
        _check(band_lo - 0.51 <= spec.hem_offset_px <= band_hi + 0.51, "dip depth out of band")
        width = predicted_box_width(spec)
        aline = width >= thresholds.aline_min_width_px
        lo, hi = WIDTH_BANDS[HemType.ALINE if aline else HemType.STRAIGHT]
        band_lo, band_hi = margin_interval(lo, hi, m)
        _check(band_lo <= width <= band_hi, "box width too close to the flare threshold")
    else:
        band = STEP_ASYMMETRICAL if spec.hem_offset_px >= 5 else STEP_HIGH_LOW
        band_lo, band_hi = margin_interval(*band, m)
        _check(
            band_lo - 0.51 <= spec.hem_offset_px <= band_hi + 0.51,
            "hem step too close to the asymmetry threshold",
        )

    if spec.occlusion_frac is not None:
        _check(0.2 <= spec.occlusion_frac <= 0.8, "occlusion split outside (0.2, 0.8)")


def _keypoints(spec: FigureSpec) -> KeypointSet:
    sy, hy = spec.shoulder_y, spec.hip_y
    angle = math.radians(spec.arm_angle_deg)
    bend = math.radians(spec.arm_angle_deg + spec.arm_bend_deg)
    elbow_dx = math.sin(angle) * spec.upper_arm
    elbow_dy = math.cos(angle) * spec.upper_arm
    wrist_dx = elbow_dx + math.sin(bend) * spec.lower_arm
    wrist_dy = elbow_dy + math.cos(bend) * spec.lower_arm

    # The subject's right side renders on the viewer's left (negative x).
    def at(dx: float, y: float) -> tuple[float, float]:
        return (CENTER_X + dx, y)

    coords = {
        "nose": at(0, sy - 24),
        "neck": at(0, sy),
        "r_shoulder": at(-spec.shoulder_half, sy),
        "r_elbow": at(-spec.shoulder_half - elbow_dx, sy + elbow_dy),
        "r_wrist": at(-spec.shoulder_half - wrist_dx, sy + wrist_dy),
        "l_shoulder": at(spec.shoulder_half, sy),
        "l_elbow": at(spec.shoulder_half + elbow_dx, sy + elbow_dy),
        "l_wrist": at(spec.shoulder_half + wrist_dx, sy + wrist_dy),
        "r_hip": at(-spec.hip_half, hy),
        "r_knee": at(-spec.hip_half, spec.knee_y),
        "r_ankle": at(-spec.hip_half, spec.ankle_y),
        "l_hip": at(spec.hip_half, hy),
        "l_knee": at(spec.hip_half, spec.knee_y),
        "l_ankle": at(spec.hip_half, spec.ankle_y),
        "r_eye": at(-3, sy - 27),
        "l_eye": at(3, sy - 27),
        "r_ear": at(-8, sy - 24),
        "l_ear": at(8, sy - 24),
    }
    return KeypointSet(
        tuple(Keypoint(*coords[name], 1.0) for name in KEYPOINT_NAMES)
    )


def _dress_polygon(spec: FigureSpec) -> list[tuple[int, int]]:
    sy, hy = spec.shoulder_y, spec.hip_y
    bottom = spec.hem_bottom_y
    right: list[tuple[int, int]] = [
        (CENTER_X + spec.shoulder_half, sy),
        (CENTER_X + spec.shoulder_half - ARMHOLE_INSET, sy + ARMHOLE_DROP),
        (CENTER_X + spec.waist_half, hy),
    ]
    left = [(2 * CENTER_X - x, y) for x, y in right]

    if spec.hem_shape is HemShape.SIDE_DIP:
        flat = bottom - spec.hem_offset_px
        hem = [
            (CENTER_X + spec.hem_half, bottom),
            (CENTER_X + DIP_FLAT_HALF, flat),
            (CENTER_X - DIP_FLAT_HALF, flat),
            (CENTER_X - spec.hem_half, bottom),
        ]
    else:
        deep, shallow = bottom, bottom - spec.hem_offset_px
        if spec.deep_side == "left":  # subject-left renders at positive x
            hem = [
                (CENTER_X + spec.hem_half, deep),
                (CENTER_X + 4, deep),
                (CENTER_X - 4, shallow),
                (CENTER_X - spec.hem_half, shallow),
            ]
        else:
            hem = [
                (CENTER_X + spec.hem_half, shallow),
                (CENTER_X + 4, shallow),
                (CENTER_X - 4, deep),
                (CENTER_X - spec.hem_half, deep),
            ]
    top = [(CENTER_X - spec.shoulder_half, sy)]
    return top + right + hem + list(reversed(left))


def _polygon_mask(vertices: list[tuple[int, int]]) -> np.ndarray:
    img = Image.new("1", (FRAME, FRAME), 0)
    ImageDraw.Draw(img).polygon(vertices, fill=1, outline=1)
    return np.array(img, dtype=bool)


def _ellipse_mask(cx: float, cy: float, rx: float, ry: float) -> np.ndarray:
    img = Image.new("1", (FRAME, FRAME), 0)
    ImageDraw.Draw(img).ellipse([cx - rx, cy - ry, cx + rx, cy + ry], fill=1)
    return np.array(img, dtype=bool)


def _capsule_mask(
    points: list[tuple[float, float]], half_width: float, max_arc: float | None = None
) -> np.ndarray:
    """Pixels within half_width of a polyline, optionally arc-limited."""
    line = Polyline(points)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    pad = half_width + 2
    x0, x1 = max(0, int(min(xs) - pad)), min(FRAME - 1, int(max(xs) + pad))
    y0, y1 = max(0, int(min(ys) - pad)), min(FRAME - 1, int(max(ys) + pad))
    gx, gy = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1))
    pts = np.column_stack([gx.ravel(), gy.ravel()]).astype(float)
    arc, dist = line.project(pts)
    inside = dist <= half_width
    if max_arc is not None:
        inside &= arc <= max_arc
    window = inside.reshape(gy.shape)
    mask = np.zeros((FRAME, FRAME), dtype=bool)
    mask[y0 : y1 + 1, x0 : x1 + 1] = window
    return mask


def _apply_occlusion(grid: np.ndarray, split_frac: float) -> None:
    """Blank a 6-row band so the dress splits near ``split_frac`` by area."""
    dress_rows = (grid == lip.DRESS).sum(axis=1)
    total = int(dress_rows.sum())
    cumulative = np.cumsum(dress_rows)
    split_row = int(np.searchsorted(cumulative, split_frac * total))
    grid[split_row : split_row + 6, :] = lip.BACKGROUND


def generate_figure(
    spec: FigureSpec, seed: int = 0
) -> tuple[LabelMap, KeypointSet, AttributeSet]:
    """Render a figure and return it with its analytic ground truth.

    The seed drives cosmetic-only variation (hair shape); everything
    that the graders measure is a pure function of the spec.
    """
    validate_spec(spec)
    rng = np.random.default_rng(seed)
    keypoints = _keypoints(spec)

    grid = np.full((FRAME, FRAME), lip.BACKGROUND, dtype=np.uint8)
    sy = spec.shoulder_y
    hair_rx = 10 + float(rng.uniform(0.0, 2.0))
    layers = [
        (_ellipse_mask(CENTER_X, sy - 31, hair_rx, 9), lip.HAIR),
        (_ellipse_mask(CENTER_X, sy - 22, 8, 11), lip.FACE),
    ]
    for side, arm_cls, leg_cls in (
        ("r", lip.RIGHT_ARM, lip.RIGHT_LEG),
        ("l", lip.LEFT_ARM, lip.LEFT_LEG),
    ):
        arm_pts = [
            keypoints[f"{side}_shoulder"].xy,
            keypoints[f"{side}_elbow"].xy,
            keypoints[f"{side}_wrist"].xy,
        ]
        leg_pts = [
            keypoints[f"{side}_hip"].xy,
            (keypoints[f"{side}_ankle"].x, keypoints[f"{side}_ankle"].y + 6),
        ]
        layers.append((_capsule_mask(arm_pts, LIMB_HALF_WIDTH), arm_cls))
        layers.append((_capsule_mask(leg_pts, LIMB_HALF_WIDTH), leg_cls))

    layers.append((_polygon_mask(_dress_polygon(spec)), lip.DRESS))
    for side in ("r", "l"):
        arm_pts = [
            keypoints[f"{side}_shoulder"].xy,
            keypoints[f"{side}_elbow"].xy,
            keypoints[f"{side}_wrist"].xy,
        ]
        layers.append(
            (_capsule_mask(arm_pts, SLEEVE_HALF_WIDTH, max_arc=spec.sleeve_arc), lip.DRESS)
        )

    for mask_arr, cls in layers:
        grid[mask_arr] = cls

    if spec.occlusion_frac is not None:
        _apply_occlusion(grid, spec.occlusion_frac)

    return LabelMap(grid), keypoints, analytic_truth(spec)


def sample_spec(
    targets: tuple[HemLength, SleeveLength, HemType],
    rng: np.random.Generator | int,
    margin: float = 0.5,
) -> FigureSpec:
    """Draw a figure spec whose analytic truth equals ``targets``.

    Parameters are sampled uniformly inside the margin-restricted band
    of each target. Raises InfeasibleTargetError if the drawn spec does
    not evaluate back to the targets (defensive; no such combination is
    known).
    """
    hem_target, sleeve_target, type_target = targets
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    shoulder_y = int(rng.integers(68, 75))
    hip_y = int(rng.integers(128, 133))
    leg = int(rng.integers(150, 166))
    ankle_y = hip_y + leg
    knee_y = hip_y + leg // 2 + int(rng.integers(-2, 3))

    base_angle, jitter = ARM_ANGLES[sleeve_target]
    arm_angle = base_angle + float(rng.uniform(-jitter, jitter))
    arm_bend = float(rng.uniform(-1.0, 1.0))

    lo, hi = sleeve_bands()[sleeve_target]
    sleeve_arc = float(rng.uniform(*margin_interval(lo, hi, margin)))

    # The hem ratio band is capped dynamically: the hem must stay in
    # frame and below the lowest sleeve pixel.
    hem_cap = min(HEM_RATIO_MAX, (FRAME - 4 - hip_y) / leg)
    sleeve_bottom = shoulder_y + math.cos(math.radians(arm_angle)) * sleeve_arc
    hem_floor = max(HEM_RATIO_MIN, (sleeve_bottom + SLEEVE_HALF_WIDTH + 4 - hip_y) / leg)
    lo, hi = hem_ratio_band(hem_target, hem_cap=hem_cap, hem_floor=hem_floor)
    if not lo < hi:
        raise InfeasibleTargetError(f"empty hem band for {hem_target}")
    hem_ratio_target = float(rng.uniform(*margin_interval(lo, hi, margin)))

    deep_side = "left"
    if type_target in WIDTH_BANDS:
        hem_shape = HemShape.SIDE_DIP
        hem_offset = round(float(rng.uniform(*margin_interval(*SIDE_DIP_RANGE, margin))))
        lo, hi = WIDTH_BANDS[type_target]
        width = float(rng.uniform(*margin_interval(lo, hi, margin)))
        hem_half = round(width / 2.0)
    else:
        hem_shape = HemShape.STEPPED
        band = STEP_ASYMMETRICAL if type_target is HemType.ASYMMETRICAL else STEP_HIGH_LOW
        hem_offset = round(float(rng.uniform(*margin_interval(*band, margin))))
        hem_half = int(rng.integers(36, 51))
        deep_side = "left" if rng.random() < 0.5 else "right"

    spec = FigureSpec(
        shoulder_y=shoulder_y,
        hip_y=hip_y,
        knee_y=knee_y,
        ankle_y=ankle_y,
        hem_half=hem_half,
        hem_ratio_target=hem_ratio_target,
        sleeve_arc_fraction=sleeve_arc / ARM_LENGTH,
        hem_shape=hem_shape,
        hem_offset_px=hem_offset,
        deep_side=deep_side,
        arm_angle_deg=arm_angle,
        arm_bend_deg=arm_bend,
        margin=margin,
    )
    validate_spec(spec)
    truth = analytic_truth(spec)
    got = (truth.hem_length.value, truth.sleeve_length.value, truth.hem_type.value)
    if got != targets:
        raise InfeasibleTargetError(f"sampled spec evaluates to {got}, wanted {targets}")
    return spec


def with_occlusion(spec: FigureSpec, split_frac: float = 0.6) -> FigureSpec:
    """Variant of a spec whose render is split by a background band."""
    return replace(spec, occlusion_frac=split_frac)


def all_target_triples() -> list[tuple[HemLength, SleeveLength, HemType]]:
    return [
        (hem, sleeve, hem_type)
        for hem in HemLength
        for sleeve in SleeveLength
        for hem_type in HemType
    ]
