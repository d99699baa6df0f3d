"""Human-parsing label palette (LIP convention, 20 classes).

Class IDs 0..19 cover background plus 19 human part / clothing labels.
Label-map rasters encode each class as a fixed RGB triple; the table
below is the published color coding for this dataset family.
"""

from __future__ import annotations

CLASS_NAMES = (
    "background",
    "hat",
    "hair",
    "glove",
    "sunglasses",
    "upper_clothes",
    "dress",
    "coat",
    "socks",
    "pants",
    "jumpsuits",
    "scarf",
    "skirt",
    "face",
    "left_arm",
    "right_arm",
    "left_leg",
    "right_leg",
    "left_shoe",
    "right_shoe",
)

PALETTE = (
    (0, 0, 0),
    (128, 0, 0),
    (255, 0, 0),
    (0, 85, 0),
    (170, 0, 51),
    (255, 85, 0),
    (0, 0, 85),
    (0, 119, 221),
    (85, 85, 0),
    (0, 85, 85),
    (85, 51, 0),
    (52, 86, 128),
    (0, 128, 0),
    (0, 0, 255),
    (51, 170, 221),
    (0, 255, 255),
    (85, 255, 170),
    (170, 255, 85),
    (255, 255, 0),
    (255, 170, 0),
)

NUM_CLASSES = len(CLASS_NAMES)

BACKGROUND = 0
HAIR = 2
DRESS = CLASS_NAMES.index("dress")
FACE = CLASS_NAMES.index("face")
LEFT_ARM = CLASS_NAMES.index("left_arm")
RIGHT_ARM = CLASS_NAMES.index("right_arm")
LEFT_LEG = CLASS_NAMES.index("left_leg")
RIGHT_LEG = CLASS_NAMES.index("right_leg")

RGB_TO_CLASS = {rgb: idx for idx, rgb in enumerate(PALETTE)}
