"""Centroid-to-steering-angle geometry and the bounded range transform."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .contour import Centroid


@dataclass(frozen=True)
class ReferenceFrame:
    """Anchor point the path direction is measured from; straight ahead is up-image."""

    anchor_x: float
    anchor_y: float

    @classmethod
    def bottom_center(cls, width: int, height: int) -> "ReferenceFrame":
        return cls(width / 2.0, height - 1.0)


@dataclass(frozen=True)
class SteeringLimits:
    """Vehicle rotation bounds (min/max) and the raw-angle input range."""

    min_deg: float = -30.0
    max_deg: float = 30.0
    raw_min_deg: float = -90.0
    raw_max_deg: float = 90.0

    def __post_init__(self):
        if not self.min_deg < self.max_deg:
            raise ValueError("min_deg must be below max_deg")
        if not self.raw_min_deg < self.raw_max_deg:
            raise ValueError("raw_min_deg must be below raw_max_deg")


@dataclass(frozen=True)
class SteeringCommand:
    """Bounded steering angle in degrees, positive to the right; valid is False
    when no path was detected."""

    angle_deg: float
    valid: bool


@dataclass(frozen=True)
class PathObservation:
    """One frame's detection result: path centroid, steering angle, validity."""

    center: Optional[Centroid]
    angle_deg: float
    valid: bool


class Region(enum.Enum):
    LEFT = "left"
    CENTER = "center"
    RIGHT = "right"


def path_angle(c: Centroid, frame: ReferenceFrame) -> float:
    """Angle in radians between straight-ahead and the anchor-to-centroid ray.

    Zero when the centroid sits straight ahead of the anchor, positive when
    it lies to the right; range (-pi, pi].
    """
    dx = c.x - frame.anchor_x
    dy = frame.anchor_y - c.y
    if dx == 0.0 and dy == 0.0:
        raise ValueError("centroid coincides with the anchor; direction undefined")
    return math.atan2(dx, dy)


def rad_to_deg(theta: float) -> float:
    return theta * 180.0 / math.pi


def transform_range(x: float, a: float, b: float, c: float, d: float) -> float:
    """Affine map of [a, b] onto [c, d]; x is clamped into [a, b] first.

    Endpoints map exactly and the result never leaves [c, d], which the
    raw float formula alone would miss by an ulp at the edges.
    """
    if a >= b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    if c > d:
        raise ValueError(f"need c <= d, got [{c}, {d}]")
    x = min(max(x, a), b)
    if x == a:
        return c
    if x == b:
        return d
    y = (x - a) * (d - c) / (b - a) + c
    return min(max(y, c), d)


def steering_command(c: Optional[Centroid], frame: ReferenceFrame,
                     limits: SteeringLimits) -> SteeringCommand:
    """Full chain: angle, degrees, then range transform into the vehicle bounds.

    Without a centroid the command is invalid with angle 0; holding or
    aborting on lost path is the caller's policy.
    """
    if c is None:
        return SteeringCommand(0.0, False)
    raw_deg = rad_to_deg(path_angle(c, frame))
    mapped = transform_range(raw_deg, limits.raw_min_deg, limits.raw_max_deg,
                             limits.min_deg, limits.max_deg)
    return SteeringCommand(mapped, True)


def classify_region(c: Centroid, image_width: int) -> Region:
    """Thirds partition of the frame; kept only as the fixed-angle baseline that
    dynamic angle computation replaces."""
    if not (0 <= c.x < image_width):
        raise ValueError(f"centroid x {c.x} outside [0, {image_width})")
    if c.x < image_width / 3.0:
        return Region.LEFT
    if c.x < 2.0 * image_width / 3.0:
        return Region.CENTER
    return Region.RIGHT
