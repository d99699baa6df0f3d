"""Exception types shared across the package."""

from __future__ import annotations


class DressgradeError(Exception):
    """Base class for all errors raised by this package."""


class UnknownLabelError(DressgradeError):
    """An RGB triple in a label-map raster is not in the palette."""

    def __init__(self, rgb: tuple[int, int, int], x: int, y: int):
        self.rgb = rgb
        self.x = x
        self.y = y
        super().__init__(f"unknown label color {rgb} at pixel ({x}, {y})")


class EmptyMaskError(DressgradeError):
    """A mask operation requires at least one on-pixel."""


class NoPixelInBandError(DressgradeError):
    """A column band contains no on-pixel."""


class MalformedDocumentError(DressgradeError):
    """A keypoint document could not be parsed."""


class WrongArityError(MalformedDocumentError):
    """A keypoint document does not contain exactly 18 entries."""


class MissingKeypointError(DressgradeError):
    """A required keypoint (or keypoint chain) is missing."""


class DegenerateLegsError(DressgradeError):
    """Ankle reference is not below the hip reference; leg length is unusable."""


class HemEndNotFoundError(DressgradeError):
    """No dress pixel was found in the band around a leg."""


class MixedAttributeLabelsError(DressgradeError):
    """Prediction/truth pairs mix labels from different attributes."""


class InfeasibleSpecError(DressgradeError):
    """A figure spec violates its geometric invariants."""


class InfeasibleTargetError(DressgradeError):
    """A target attribute combination cannot be rendered."""
