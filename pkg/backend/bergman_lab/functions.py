"""
Closed-form functions on the upper half-plane.

Every descriptor evaluates exactly on numpy arrays of coordinates and knows
its own analytic behaviour (degrees at the origin and at infinity, power of
y at the boundary, support), which is what divergence detection and tail
bounds are computed from. Text form: ``modulus(0.5)*height(1)``; the parser
lives in :mod:`bergman_lab.serializers`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .exceptions import InputError
from .geometry import HalfPlanePoint, Interval, Rectangle


@dataclass(frozen=True)
class Support:
    """Bounding rectangle and/or disk radius (about 0) of a compactly supported function."""
    rect: Optional[Rectangle] = None
    radius: Optional[float] = None

    @property
    def compact(self):
        return self.rect is not None or self.radius is not None

    @property
    def outer_radius(self):
        """Radius of a half-disk about 0 containing the support, inf if none."""
        bounds = []
        if self.radius is not None:
            bounds.append(self.radius)
        if self.rect is not None:
            bounds.append(math.hypot(max(abs(self.rect.x0), abs(self.rect.x1)), self.rect.y1))
        return min(bounds) if bounds else math.inf

    def combine(self, other):
        rect = self.rect
        if other.rect is not None:
            rect = other.rect if rect is None else rect.intersect(other.rect)
            if rect is None:
                # empty support, keep a degenerate marker radius
                return Support(None, 0.0)
        radius = self.radius
        if other.radius is not None:
            radius = other.radius if radius is None else min(radius, other.radius)
        return Support(rect, radius)

    def bounding_rectangle(self, fallback: Rectangle):
        """The support's bounding rectangle clipped to ``fallback``."""
        rect = fallback
        if self.radius is not None:
            if self.radius <= 0:
                return None
            rect = rect.intersect(Rectangle(-self.radius, self.radius, 0.0, self.radius))
        if rect is not None and self.rect is not None:
            rect = rect.intersect(self.rect)
        return rect


@dataclass(frozen=True)
class Decay:
    """
    Analytic profile of |f| in polar coordinates about 0.

    Near 0, |f| ~ r^origin_degree sin(theta)^boundary_exponent; near the real
    axis |f| ~ y^boundary_exponent; for |z| >= R,
    |f| <= envelope(R) r^infinity_degree sin(theta)^boundary_exponent.
    ``infinity_degree`` is None for compactly supported functions.
    """
    origin_degree: float
    boundary_exponent: float
    infinity_degree: Optional[float]
    envelope: object = None

    def constant(self, radius):
        if self.envelope is None:
            return 1.0
        return self.envelope(radius)


@dataclass(frozen=True)
class PolarPower:
    """c r^m sin(theta)^h restricted to |z| <= radius and to rect."""
    coefficient: float
    degree: float
    height_exponent: float
    radius: Optional[float] = None
    rect: Optional[Rectangle] = None


class SymbolicFunction:
    """Base class of the descriptor family."""

    def evaluate(self, x, y):
        raise NotImplementedError

    def __call__(self, z: HalfPlanePoint):
        return float(self.evaluate(np.float64(z.x), np.float64(z.y)))

    def __mul__(self, other):
        if not isinstance(other, SymbolicFunction):
            other = Scalar(float(other))
        return Product((self, other))

    __rmul__ = __mul__

    def power(self, exponent):
        raise NotImplementedError

    def support(self):
        return Support()

    def decay(self) -> Decay:
        raise NotImplementedError

    def polar_power(self) -> Optional[PolarPower]:
        return None

    def factors(self) -> Tuple["SymbolicFunction", ...]:
        return (self,)

    def split_scalar(self):
        """(c, rest) with self == c * rest and rest free of Scalar factors."""
        coefficient = 1.0
        rest = []
        for factor in self.factors():
            if isinstance(factor, Scalar):
                coefficient *= factor.value
            else:
                rest.append(factor)
        if not rest:
            return coefficient, Scalar(1.0)
        return coefficient, rest[0] if len(rest) == 1 else Product(tuple(rest))

    def to_text(self):
        raise NotImplementedError

    def __str__(self):
        return self.to_text()


def _num(value):
    return repr(float(value))


@dataclass(frozen=True, eq=True)
class Scalar(SymbolicFunction):
    value: float

    def evaluate(self, x, y):
        return np.full(np.broadcast(x, y).shape, self.value, dtype=float)

    def power(self, exponent):
        if self.value < 0 and exponent != int(exponent):
            raise InputError(f"const({self.value!r}) has no real power {exponent!r}")
        if self.value == 0 and exponent < 0:
            raise InputError("const(0.0) has no negative power")
        return Scalar(self.value ** exponent)

    def decay(self):
        c = abs(self.value)
        return Decay(0.0, 0.0, 0.0, lambda radius: c)

    def polar_power(self):
        return PolarPower(self.value, 0.0, 0.0)

    def to_text(self):
        return f"const({_num(self.value)})"


@dataclass(frozen=True, eq=True)
class PowerOfModulus(SymbolicFunction):
    exponent: float

    def evaluate(self, x, y):
        return np.power(x * x + y * y, self.exponent / 2)

    def power(self, exponent):
        return PowerOfModulus(self.exponent * exponent)

    def decay(self):
        return Decay(self.exponent, 0.0, self.exponent)

    def polar_power(self):
        return PolarPower(1.0, self.exponent, 0.0)

    def to_text(self):
        return f"modulus({_num(self.exponent)})"


@dataclass(frozen=True, eq=True)
class PowerOfHeight(SymbolicFunction):
    exponent: float

    def evaluate(self, x, y):
        return np.power(np.broadcast_to(y, np.broadcast(x, y).shape), self.exponent)

    def power(self, exponent):
        return PowerOfHeight(self.exponent * exponent)

    def decay(self):
        return Decay(self.exponent, self.exponent, self.exponent)

    def polar_power(self):
        return PolarPower(1.0, self.exponent, self.exponent)

    def to_text(self):
        return f"height({_num(self.exponent)})"


@dataclass(frozen=True, eq=True)
class TruncatedPower(SymbolicFunction):
    """|z|^exponent on |z| <= radius, 0 outside."""
    exponent: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InputError(f"truncation radius must be > 0, got {self.radius!r}")

    def evaluate(self, x, y):
        rr = x * x + y * y
        with np.errstate(divide="ignore"):
            values = np.power(rr, self.exponent / 2)
        return np.where(rr <= self.radius * self.radius, values, 0.0)

    def power(self, exponent):
        if exponent <= 0:
            raise InputError(f"{self.to_text()} vanishes outside its disk; power {exponent!r} is not finite")
        return TruncatedPower(self.exponent * exponent, self.radius)

    def support(self):
        return Support(None, self.radius)

    def decay(self):
        return Decay(self.exponent, 0.0, None)

    def polar_power(self):
        return PolarPower(1.0, self.exponent, 0.0, radius=self.radius)

    def to_text(self):
        return f"truncated({_num(self.exponent)}, {_num(self.radius)})"


@dataclass(frozen=True, eq=True)
class ShiftedKernelPower(SymbolicFunction):
    """|(z + it)/i|^-gamma = (x^2 + (y+t)^2)^(-gamma/2)."""
    shift: float
    gamma: float

    def __post_init__(self):
        if not self.shift > 0:
            raise InputError(f"kernel shift t must be > 0, got {self.shift!r}")

    def evaluate(self, x, y):
        v = y + self.shift
        return np.power(x * x + v * v, -self.gamma / 2)

    def power(self, exponent):
        return ShiftedKernelPower(self.shift, self.gamma * exponent)

    def decay(self):
        t, gamma = self.shift, self.gamma

        def envelope(radius):
            if gamma >= 0:
                return 1.0
            return (1 + t / radius) ** (-gamma)
        return Decay(0.0, 0.0, -gamma, envelope)

    def to_text(self):
        return f"kernel({_num(self.shift)}, {_num(self.gamma)})"


@dataclass(frozen=True, eq=True)
class BoxIndicator(SymbolicFunction):
    base: Interval

    def evaluate(self, x, y):
        inside = (x >= self.base.left) & (x < self.base.right) & (y > 0) & (y < self.base.length)
        return inside.astype(float)

    def power(self, exponent):
        if exponent <= 0:
            raise InputError(f"{self.to_text()} vanishes outside its box; power {exponent!r} is not finite")
        return self

    def support(self):
        return Support(Rectangle(self.base.left, self.base.right, 0.0, self.base.length), None)

    def decay(self):
        return Decay(0.0, 0.0, None)

    def polar_power(self):
        return PolarPower(1.0, 0.0, 0.0, rect=self.support().rect)

    def to_text(self):
        return f"box({_num(self.base.left)}, {_num(self.base.length)})"


@dataclass(frozen=True, eq=True)
class Product(SymbolicFunction):
    items: Tuple[SymbolicFunction, ...]

    def __post_init__(self):
        flat = []
        for item in self.items:
            flat.extend(item.factors())
        if not flat:
            raise InputError("a product needs at least one factor")
        object.__setattr__(self, "items", tuple(flat))

    def factors(self):
        return self.items

    def evaluate(self, x, y):
        value = self.items[0].evaluate(x, y)
        for item in self.items[1:]:
            value = value * item.evaluate(x, y)
        return value

    def power(self, exponent):
        return Product(tuple(item.power(exponent) for item in self.items))

    def support(self):
        support = Support()
        for item in self.items:
            support = support.combine(item.support())
        return support

    def decay(self):
        decays = [item.decay() for item in self.items]
        infinity = None
        if all(d.infinity_degree is not None for d in decays):
            infinity = sum(d.infinity_degree for d in decays)

        def envelope(radius):
            return math.prod(d.constant(radius) for d in decays)
        return Decay(sum(d.origin_degree for d in decays),
                     sum(d.boundary_exponent for d in decays),
                     infinity, envelope)

    def polar_power(self):
        parts = [item.polar_power() for item in self.items]
        if any(part is None for part in parts):
            return None
        support = self.support()
        return PolarPower(math.prod(part.coefficient for part in parts),
                          sum(part.degree for part in parts),
                          sum(part.height_exponent for part in parts),
                          radius=support.radius, rect=support.rect)

    def to_text(self):
        return "*".join(item.to_text() for item in self.items)


ONE = Scalar(1.0)
