"""Body keypoint ingestion and the polyline geometry built on it.

Keypoint files follow the common 18-point body convention. The slot
order below is fixed and versioned with the file format: changing it
changes the meaning of every keypoint document.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import MalformedDocumentError, MissingKeypointError, WrongArityError

KEYPOINT_NAMES = (
    "nose",
    "neck",
    "r_shoulder",
    "r_elbow",
    "r_wrist",
    "l_shoulder",
    "l_elbow",
    "l_wrist",
    "r_hip",
    "r_knee",
    "r_ankle",
    "l_hip",
    "l_knee",
    "l_ankle",
    "r_eye",
    "l_eye",
    "r_ear",
    "l_ear",
)

NUM_KEYPOINTS = len(KEYPOINT_NAMES)

ARM_CHAINS = {
    "right": ("r_shoulder", "r_elbow", "r_wrist"),
    "left": ("l_shoulder", "l_elbow", "l_wrist"),
}

LEG_CHAINS = {
    "right": ("r_hip", "r_knee", "r_ankle"),
    "left": ("l_hip", "l_knee", "l_ankle"),
}


@dataclass(frozen=True)
class Keypoint:
    """One named body point. Confidence 0 denotes a missing detection."""

    x: float
    y: float
    confidence: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise MalformedDocumentError("keypoint coordinates must be finite")
        if not 0.0 <= self.confidence <= 1.0:
            raise MalformedDocumentError(
                f"confidence {self.confidence} outside [0, 1]"
            )

    @property
    def present(self) -> bool:
        return self.confidence > 0.0

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class KeypointSet:
    """Exactly 18 keypoints in the fixed slot order."""

    points: tuple[Keypoint, ...]

    def __post_init__(self):
        if len(self.points) != NUM_KEYPOINTS:
            raise WrongArityError(
                f"expected {NUM_KEYPOINTS} keypoints, got {len(self.points)}"
            )

    def __getitem__(self, name: str) -> Keypoint:
        return self.points[KEYPOINT_NAMES.index(name)]

    def get_present(self, name: str) -> Keypoint:
        """Slot lookup that fails loudly when the point is missing."""
        point = self[name]
        if not point.present:
            raise MissingKeypointError(f"keypoint {name!r} is missing")
        return point

    def chain_present(self, names: tuple[str, ...]) -> bool:
        return all(self[n].present for n in names)

    def scaled(self, sx: float, sy: float) -> "KeypointSet":
        return KeypointSet(
            tuple(Keypoint(p.x * sx, p.y * sy, p.confidence) for p in self.points)
        )


def parse_keypoints(text: str) -> KeypointSet:
    """Parse a keypoint document.

    The document is a JSON object with a top-level "keypoints" field
    holding exactly 18 [x, y, confidence] arrays in slot order,
    coordinates in source-image pixels.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "keypoints" not in doc:
        raise MalformedDocumentError('missing top-level "keypoints" field')
    entries = doc["keypoints"]
    if not isinstance(entries, list):
        raise MalformedDocumentError('"keypoints" must be an array')
    if len(entries) != NUM_KEYPOINTS:
        raise WrongArityError(
            f"expected {NUM_KEYPOINTS} keypoint entries, got {len(entries)}"
        )
    points = []
    for i, entry in enumerate(entries):
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 3
            or not all(isinstance(v, (int, float)) for v in entry)
        ):
            raise MalformedDocumentError(
                f"entry {i} ({KEYPOINT_NAMES[i]}) is not an [x, y, confidence] triple"
            )
        points.append(Keypoint(float(entry[0]), float(entry[1]), float(entry[2])))
    return KeypointSet(tuple(points))


def serialize_keypoints(keypoints: KeypointSet) -> str:
    entries = [[p.x, p.y, p.confidence] for p in keypoints.points]
    return json.dumps({"keypoints": entries}, indent=None, separators=(",", ":"))


def read_keypoints(path) -> KeypointSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_keypoints(fh.read())


def midpoint(a: Keypoint, b: Keypoint) -> tuple[float, float]:
    """Component-wise mean of two present keypoints."""
    for point, side in ((a, "first"), (b, "second")):
        if not point.present:
            raise MissingKeypointError(f"{side} keypoint of midpoint is missing")
    return ((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)


class Polyline:
    """An ordered chain of 2-D vertices with cumulative arc length."""

    def __init__(self, vertices):
        pts = np.asarray(vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
            raise ValueError("polyline needs at least two 2-D vertices")
        seg = np.diff(pts, axis=0)
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(lengths == 0.0):
            raise ValueError("consecutive polyline vertices must be distinct")
        self.vertices = pts
        self.segment_lengths = lengths
        self.cumulative = np.concatenate(([0.0], np.cumsum(lengths)))

    @property
    def length(self) -> float:
        return float(self.cumulative[-1])

    def project(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Project points onto the polyline.

        Returns (arc, dist): for each input point, the cumulative
        arc-length of its closest point on the polyline (perpendicular
        foot per segment, clamped to segment ends) and the Euclidean
        distance to that closest point. Exact distance ties resolve to
        the smaller arc because segments are scanned in order.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        best_d2 = np.full(pts.shape[0], np.inf)
        best_s = np.zeros(pts.shape[0])
        for i in range(len(self.segment_lengths)):
            a = self.vertices[i]
            b = self.vertices[i + 1]
            ab = b - a
            seg_len = self.segment_lengths[i]
            t = np.clip(((pts - a) @ ab) / (seg_len * seg_len), 0.0, 1.0)
            foot = a + t[:, None] * ab
            d2 = np.sum((pts - foot) ** 2, axis=1)
            better = d2 < best_d2
            best_d2 = np.where(better, d2, best_d2)
            best_s = np.where(better, self.cumulative[i] + t * seg_len, best_s)
        return best_s, np.sqrt(best_d2)


def arc_length_position(line: Polyline, point) -> float:
    """Arc-length coordinate of the closest point on ``line`` to ``point``."""
    arc, _ = line.project([point])
    return float(arc[0])
