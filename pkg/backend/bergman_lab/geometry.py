"""
Points, intervals, Carleson boxes and tents of the upper half-plane.

Intervals are half-open, [left, left + length), so the boxes of one dyadic
grid at a fixed scale partition a horizontal strip. Tents take the lower
boundary and leave the upper one to the parent tent: T_I is
{x in I, |I|/2 <= y < |I|}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import InputError, NonIntegrableMeasureError


def check_alpha(alpha):
    if not alpha > -1:
        raise NonIntegrableMeasureError(alpha)


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InputError(f"point ({self.x!r}, {self.y!r}) is not finite")
        if not self.y > 0:
            raise InputError(f"point ({self.x!r}, {self.y!r}) is not in the upper half-plane: y must be > 0")

    @property
    def modulus(self):
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class Interval:
    left: float
    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise InputError(f"interval length must be > 0, got {self.length!r}")

    @classmethod
    def between(cls, left, right):
        return cls(left, right - left)

    @property
    def right(self):
        return self.left + self.length

    def contains(self, x):
        return self.left <= x < self.right

    def __str__(self):
        return f"[{self.left!r}, {self.right!r})"


@dataclass(frozen=True)
class Rectangle:
    """[x0, x1] x [y0, y1] with 0 <= y0 < y1; the floor y0 = 0 means the boundary."""
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise InputError(f"rectangle needs x0 < x1, got {self.x0!r} >= {self.x1!r}")
        if not 0 <= self.y0 < self.y1:
            raise InputError(f"rectangle needs 0 <= y0 < y1, got y0={self.y0!r}, y1={self.y1!r}")

    def intersect(self, other):
        """The common part of two rectangles, or None when it is empty."""
        x0, x1 = max(self.x0, other.x0), min(self.x1, other.x1)
        y0, y1 = max(self.y0, other.y0), min(self.y1, other.y1)
        if x0 >= x1 or y0 >= y1:
            return None
        return Rectangle(x0, x1, y0, y1)

    def contains(self, x, y):
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def __str__(self):
        return f"[{self.x0!r}, {self.x1!r}]x[{self.y0!r}, {self.y1!r}]"


@dataclass(frozen=True)
class CarlesonBox:
    base: Interval

    def contains(self, z: HalfPlanePoint):
        return self.base.contains(z.x) and 0 < z.y < self.base.length

    def rectangle(self):
        return Rectangle(self.base.left, self.base.right, 0.0, self.base.length)


@dataclass(frozen=True)
class Tent:
    base: Interval

    def contains(self, z: HalfPlanePoint):
        return self.base.contains(z.x) and self.base.length / 2 <= z.y < self.base.length

    def rectangle(self):
        return Rectangle(self.base.left, self.base.right, self.base.length / 2, self.base.length)


def as_rectangle(region):
    if isinstance(region, Rectangle):
        return region
    return region.rectangle()


def alpha_measure_box(interval: Interval, alpha):
    """|Q_I|_alpha = |I|^(2+alpha) / (1+alpha)."""
    check_alpha(alpha)
    return interval.length ** (2 + alpha) / (1 + alpha)


def alpha_measure_tent(interval: Interval, alpha):
    """|T_I|_alpha = |I|^(2+alpha) (1 - 2^-(1+alpha)) / (1+alpha)."""
    check_alpha(alpha)
    return interval.length ** (2 + alpha) * -math.expm1(-(1 + alpha) * math.log(2)) / (1 + alpha)
