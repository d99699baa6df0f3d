"""Label-map decoding and binary-mask geometry.

Coordinate convention throughout: origin at the top-left corner, x to
the right, y downward. Arrays are indexed [y, x]. The canonical working
frame is 320x320; all pixel thresholds elsewhere in the package are
defined in that frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from . import lip
from .errors import EmptyMaskError, NoPixelInBandError, UnknownLabelError

CANONICAL_SIZE = 320

# 4-connectivity: diagonal contact does not join components.
_CONNECTIVITY_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class LabelMap:
    """Per-pixel semantic class IDs, shape (height, width), dtype uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 2 or self.pixels.size == 0:
            raise ValueError("label map must be a non-empty 2-D array")
        if int(self.pixels.max(initial=0)) >= lip.NUM_CLASSES:
            raise ValueError("label map contains class IDs outside the palette")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class BinaryMask:
    """Boolean on/off grid, shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 2 or self.pixels.dtype != bool:
            raise ValueError("mask must be a 2-D boolean array")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def on_count(self) -> int:
        return int(self.pixels.sum())

    @property
    def is_empty(self) -> bool:
        return not self.pixels.any()


@dataclass(frozen=True)
class BoundingBox:
    """Tight axis-aligned box over on-pixels, inclusive coordinates."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("bounding box extents are inverted")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min


def decode_label_map(image: Image.Image) -> LabelMap:
    """Decode an 8-bit RGB raster into class IDs via the embedded palette.

    Raises UnknownLabelError (with the offending color and pixel
    position) if any pixel's RGB triple is not a palette entry.
    """
    rgb = np.asarray(image.convert("RGB"), dtype=np.uint8)
    # Pack RGB into a single int for one vectorized table lookup.
    packed = (
        rgb[:, :, 0].astype(np.int32) * 65536
        + rgb[:, :, 1].astype(np.int32) * 256
        + rgb[:, :, 2].astype(np.int32)
    )
    table = {r * 65536 + g * 256 + b: idx for (r, g, b), idx in lip.RGB_TO_CLASS.items()}
    classes = np.full(packed.shape, -1, dtype=np.int16)
    for key, idx in table.items():
        classes[packed == key] = idx
    bad = np.argwhere(classes < 0)
    if bad.size:
        y, x = (int(v) for v in bad[0])
        raise UnknownLabelError(tuple(int(c) for c in rgb[y, x]), x, y)
    return LabelMap(classes.astype(np.uint8))


def read_label_map(path) -> LabelMap:
    """Load and decode a label-map raster file."""
    with Image.open(path) as img:
        return decode_label_map(img)


def encode_label_map(label_map: LabelMap) -> Image.Image:
    """Render class IDs back to an RGB image using the palette."""
    palette = np.array(lip.PALETTE, dtype=np.uint8)
    return Image.fromarray(palette[label_map.pixels], mode="RGB")


def rescale_label_map(label_map: LabelMap, size: int = CANONICAL_SIZE) -> LabelMap:
    """Nearest-neighbor rescale to ``size`` x ``size``.

    Nearest-neighbor keeps class IDs discrete; interpolation would
    invent colors outside the palette.
    """
    h, w = label_map.pixels.shape
    if h == size and w == size:
        return label_map
    rows = (np.arange(size) * h // size).astype(np.intp)
    cols = (np.arange(size) * w // size).astype(np.intp)
    return LabelMap(label_map.pixels[np.ix_(rows, cols)])


def threshold_mask(label_map: LabelMap, target: int) -> BinaryMask:
    """Select the target class: on iff the pixel's class equals it."""
    if not 0 <= target < lip.NUM_CLASSES:
        raise ValueError(f"target class ID {target} outside palette")
    return BinaryMask(label_map.pixels == target)


def bounding_box(mask: BinaryMask) -> BoundingBox:
    """Tightest box containing every on-pixel."""
    ys, xs = np.nonzero(mask.pixels)
    if ys.size == 0:
        raise EmptyMaskError("cannot bound an empty mask")
    return BoundingBox(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))


def largest_component(mask: BinaryMask) -> tuple[BinaryMask, int]:
    """Restrict a mask to its largest 4-connected component.

    Returns (restricted mask, total component count). Size ties are
    broken by the smallest (y_min, x_min) over the tied components.
    """
    if mask.is_empty:
        raise EmptyMaskError("mask has no on-pixel")
    labeled, count = ndimage.label(mask.pixels, structure=_CONNECTIVITY_4)
    if count == 1:
        return mask, 1
    sizes = ndimage.sum_labels(mask.pixels, labeled, index=range(1, count + 1))
    best = int(np.max(sizes))
    winner = None
    winner_key = None
    for label_id in range(1, count + 1):
        if int(sizes[label_id - 1]) != best:
            continue
        ys, xs = np.nonzero(labeled == label_id)
        key = (int(ys.min()), int(xs.min()))
        if winner_key is None or key < winner_key:
            winner, winner_key = label_id, key
    return BinaryMask(labeled == winner), int(count)


def lowest_on_y_in_band(mask: BinaryMask, x_center: float, half_width: float) -> int:
    """Max y over on-pixels in the column band |x - x_center| <= half_width."""
    if not 0 <= x_center < mask.width:
        raise ValueError(f"x_center {x_center} outside mask width {mask.width}")
    if half_width < 0:
        raise ValueError("half_width must be >= 0")
    lo = max(0, int(np.ceil(x_center - half_width)))
    hi = min(mask.width - 1, int(np.floor(x_center + half_width)))
    band = mask.pixels[:, lo : hi + 1]
    ys, _ = np.nonzero(band)
    if ys.size == 0:
        raise NoPixelInBandError(f"no on-pixel in band around x={x_center}")
    return int(ys.max())
