"""Attribute taxonomy, classification results, and description text.

Three attributes are graded per dress: hem length (10 classes), sleeve
length (5 classes), and hem type (4 classes). Enum members are declared
longest-to-shortest where the attribute has a natural order, and each
member's value is its canonical snake_case name used in all output
records and ground-truth files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Generic, TypeVar


class HemLength(Enum):
    FLOOR_LENGTH = "floor_length"
    EVENING = "evening"
    LOWER_CALF = "lower_calf"
    BELOW_MIDCALF = "below_midcalf"
    MIDCALF = "midcalf"
    BELOW_KNEE = "below_knee"
    KNEE = "knee"
    ABOVE_KNEE = "above_knee"
    MINI = "mini"
    MICRO = "micro"


class SleeveLength(Enum):
    LONG = "long"
    BRACELET = "bracelet"
    ELBOW = "elbow"
    SHORT = "short"
    CAP = "cap"


class HemType(Enum):
    ALINE = "aline"
    STRAIGHT = "straight"
    HIGH_LOW = "high_low"
    ASYMMETRICAL = "asymmetrical"


ATTRIBUTE_ENUMS = {
    "hem_length": HemLength,
    "sleeve_length": SleeveLength,
    "hem_type": HemType,
}

_NAME_TO_MEMBER = {
    member.value: member for enum in ATTRIBUTE_ENUMS.values() for member in enum
}


def parse_attribute_name(name: str):
    """Resolve a canonical snake_case name to its enum member.

    Names are unique across the three attribute enums, so no attribute
    hint is needed. Raises ValueError for unknown names.
    """
    try:
        return _NAME_TO_MEMBER[name]
    except KeyError:
        raise ValueError(f"unknown attribute name: {name!r}") from None


def rank(member) -> int:
    """Position of a member within its enum (0 = longest / first)."""
    return list(type(member)).index(member)


A = TypeVar("A", HemLength, SleeveLength, HemType)

UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class Classified(Generic[A]):
    """Either a classified attribute value or an explicit non-answer.

    The rule classifiers legitimately decline to answer (value falls in
    a gap between bands, a required keypoint is missing, ...); that
    outcome is a value, not an error, and carries a machine-readable
    reason code.
    """

    value: A | None
    reason: str | None = None

    def __post_init__(self):
        if self.value is None and not self.reason:
            raise ValueError("unclassified result requires a reason code")
        if self.value is not None and self.reason is not None:
            raise ValueError("classified result must not carry a reason")

    @classmethod
    def of(cls, value: A) -> "Classified[A]":
        return cls(value=value)

    @classmethod
    def unclassified(cls, reason: str) -> "Classified[A]":
        return cls(value=None, reason=reason)

    @property
    def is_classified(self) -> bool:
        return self.value is not None

    def name(self) -> str:
        """Canonical name, or ``unclassified:<reason>`` when declined."""
        if self.value is not None:
            return self.value.value
        return f"{UNCLASSIFIED}:{self.reason}"


@dataclass(frozen=True)
class AttributeSet:
    """Combined grading result for one dress.

    ``hem_ratio`` is the hip-to-hem over hip-to-ankle ratio the hem
    length was derived from; it is None when that ratio could not be
    computed (and hem_length is then unclassified).
    """

    hem_length: Classified[HemLength]
    sleeve_length: Classified[SleeveLength]
    hem_type: Classified[HemType]
    hem_ratio: float | None = None

    def __post_init__(self):
        if self.hem_length.is_classified:
            if self.hem_ratio is None or not math.isfinite(self.hem_ratio) or self.hem_ratio < 0:
                raise ValueError("classified hem_length requires hem_ratio >= 0")


# Display phrases for description text. Only ALINE keeps a capital letter.
HEM_TYPE_PHRASES = {
    HemType.ALINE: "A-line",
    HemType.STRAIGHT: "straight",
    HemType.HIGH_LOW: "high-low",
    HemType.ASYMMETRICAL: "asymmetrical",
}

HEM_LENGTH_PHRASES = {
    HemLength.FLOOR_LENGTH: "floor length",
    HemLength.EVENING: "evening",
    HemLength.LOWER_CALF: "lower calf",
    HemLength.BELOW_MIDCALF: "below-midcalf",
    HemLength.MIDCALF: "midcalf",
    HemLength.BELOW_KNEE: "below-knee",
    HemLength.KNEE: "knee",
    HemLength.ABOVE_KNEE: "above-knee",
    HemLength.MINI: "mini",
    HemLength.MICRO: "micro",
}

SLEEVE_PHRASES = {
    SleeveLength.LONG: "long",
    SleeveLength.BRACELET: "bracelet",
    SleeveLength.ELBOW: "elbow",
    SleeveLength.SHORT: "short",
    SleeveLength.CAP: "cap",
}


def _phrase(table: dict, classified: Classified) -> str:
    if classified.is_classified:
        return table[classified.value]
    return UNCLASSIFIED


def describe(attrs: AttributeSet) -> str:
    """Render an attribute set as a one-line dress description.

    Total and deterministic: unclassified components fall back to the
    word "unclassified" instead of failing.

    >>> describe(AttributeSet(Classified.of(HemLength.FLOOR_LENGTH),
    ...                       Classified.of(SleeveLength.CAP),
    ...                       Classified.of(HemType.ALINE), hem_ratio=1.1))
    'A-line floor length dress with cap sleeves'
    """
    hem_type = _phrase(HEM_TYPE_PHRASES, attrs.hem_type)
    hem_length = _phrase(HEM_LENGTH_PHRASES, attrs.hem_length)
    sleeve = _phrase(SLEEVE_PHRASES, attrs.sleeve_length)
    return f"{hem_type} {hem_length} dress with {sleeve} sleeves"
