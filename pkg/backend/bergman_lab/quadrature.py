"""
Adaptive integration over regions of the upper half-plane.

Regions are integrated in polar coordinates about foci on the real axis.
Rays are cut at region corners and cap-circle crossings and accumulate
geometrically towards the real axis; radial layers are geometric towards the
focus, and the layers touching a power singularity use Gauss-Jacobi rules
that absorb it. Each refinement level doubles the node count of every cell;
the error estimate is the difference between the last two levels.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .exceptions import DivergenceError, InputError, QuadratureDomainError
from .geometry import Rectangle, as_rectangle, check_alpha

logger = logging.getLogger(__name__)

TINY = 1e-300


@dataclass(frozen=True)
class QuadratureConfig:
    x_range: Tuple[float, float] = (-64.0, 64.0)
    y_max: float = 64.0
    y_min: float = 0.0
    nodes: int = 8
    radial_layers: int = 24
    angular_layers: int = 6
    tolerance: float = 1e-6
    max_depth: int = 2

    def __post_init__(self):
        x0, x1 = self.x_range
        object.__setattr__(self, "x_range", (float(x0), float(x1)))
        if not x0 < x1:
            raise InputError(f"x_range must satisfy X0 < X1, got {self.x_range!r}")
        if not 0 <= self.y_min < self.y_max:
            raise InputError(f"need 0 <= y_min < y_max, got y_min={self.y_min!r}, y_max={self.y_max!r}")
        if not self.tolerance > 0:
            raise InputError(f"tolerance must be > 0, got {self.tolerance!r}")
        if self.max_depth < 0:
            raise InputError(f"max_depth must be >= 0, got {self.max_depth!r}")
        if self.nodes < 1 or self.radial_layers < 1 or self.angular_layers < 1:
            raise InputError("nodes, radial_layers and angular_layers must be >= 1")

    @property
    def truncation(self):
        return Rectangle(self.x_range[0], self.x_range[1], self.y_min, self.y_max)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def dilated(self, factor):
        """The same mesh for a problem dilated by ``factor`` about 0."""
        return self.replace(x_range=(self.x_range[0] * factor, self.x_range[1] * factor),
                            y_max=self.y_max * factor, y_min=self.y_min * factor)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    tail_bound: float = 0.0
    converged: bool = True
    levels: int = 0

    def scaled(self, factor):
        return dataclasses.replace(self, value=self.value * factor,
                                   error_estimate=self.error_estimate * abs(factor),
                                   tail_bound=self.tail_bound * abs(factor))


@dataclass(frozen=True)
class Focus:
    """A point (x, 0) where the integrand behaves like r^degree."""
    x: float
    degree: float = 0.0


@dataclass(frozen=True)
class DecayClass:
    """
    Integrand envelope outside the truncation.

    kind "far":      |g| <= constant * r^rate * sin(theta)^height_exponent for r >= R
    kind "boundary": |g| <= constant * y^height_exponent below the floor, over ``width``
    """
    rate: float = 0.0
    height_exponent: float = 0.0
    constant: float = 1.0
    kind: str = "far"
    width: float = 1.0


class CompensatedSum:
    """Running sum with an error-free two-sum correction term."""

    def __init__(self, value=0.0):
        self._s, self._t = float(value), 0.0

    @staticmethod
    def _two_sum(u, v):
        s = u + v
        up = s - v
        vpp = s - up
        up -= u
        vpp -= v
        return s, -(up + vpp)

    def add(self, value):
        y, u = self._two_sum(float(value), self._t)
        self._s, self._t = self._two_sum(y, self._s)
        if self._s == 0:
            self._s = u
        else:
            self._t += u
        return self

    @property
    def value(self):
        return self._s + self._t


def compensated_total(values):
    acc = CompensatedSum()
    for value in values:
        acc.add(value)
    return acc.value


def angular_mass(kappa):
    """Integral of sin(theta)^kappa over (0, pi)."""
    if not kappa > -1:
        raise DivergenceError(f"sin(theta)^{kappa!r} is not integrable at the real axis (needs > -1)")
    return float(special.beta(0.5, (kappa + 1) / 2))


def tail_bound(decay: DecayClass, truncation: Rectangle):
    """Closed-form bound on the integrand mass omitted by ``truncation``."""
    if decay.constant == 0:
        return 0.0
    if decay.kind == "boundary":
        if not decay.height_exponent > -1:
            raise DivergenceError(f"rate y^{decay.height_exponent!r} is not integrable at the boundary")
        h = truncation.y0
        return decay.constant * decay.width * h ** (decay.height_exponent + 1) / (decay.height_exponent + 1)
    if not decay.rate + 2 < 0:
        raise DivergenceError(f"rate |z|^{decay.rate!r} is not integrable at infinity (needs < -2)")
    radius = min(-truncation.x0, truncation.x1, truncation.y1)
    if radius <= 0:
        return math.inf
    return decay.constant * angular_mass(decay.height_exponent) * radius ** (decay.rate + 2) / -(decay.rate + 2)


# ---------------------------------------------------------------- rules

@lru_cache(maxsize=None)
def _legendre(n):
    x, w = special.roots_legendre(n)
    return x, w


@lru_cache(maxsize=None)
def _jacobi(n, a, b):
    x, w = special.roots_jacobi(n, a, b)
    return x, w


def _segment_rule(a, b, n, left_power=0.0, right_power=0.0):
    """Nodes and effective weights on [a, b] for integrands ~ (t-a)^left_power or (b-t)^right_power."""
    half = (b - a) / 2
    if left_power != 0.0:
        x, w = _jacobi(n, 0.0, float(left_power))
        t = a + half * (1 + x)
        return t, half ** (left_power + 1) * w / (t - a) ** left_power
    if right_power != 0.0:
        x, w = _jacobi(n, float(right_power), 0.0)
        t = a + half * (1 + x)
        return t, half ** (right_power + 1) * w / (b - t) ** right_power
    x, w = _legendre(n)
    return a + half * (1 + x), half * w


def _angular_pieces(rect, focus_x, radius, angular_layers):
    angles = {0.0, math.pi}
    for k in range(1, angular_layers + 1):
        angles.add(math.pi * 2.0 ** -k)
        angles.add(math.pi * (1 - 2.0 ** -k))

    def add_point(px, py):
        if py > 0:
            angles.add(math.atan2(py, px - focus_x))

    for px in (rect.x0, rect.x1):
        for py in (rect.y0, rect.y1):
            add_point(px, py)
    if radius is not None:
        rr = radius * radius
        for xv in (rect.x0, rect.x1):
            if abs(xv) < radius:
                add_point(xv, math.sqrt(rr - xv * xv))
        for yv in (rect.y0, rect.y1):
            if 0 < yv < radius:
                xs = math.sqrt(rr - yv * yv)
                add_point(xs, yv)
                add_point(-xs, yv)
        if abs(focus_x) > radius:
            tangent = math.asin(radius / abs(focus_x))
            angles.add(tangent if focus_x < 0 else math.pi - tangent)
    ordered = sorted(a for a in angles if 0.0 <= a <= math.pi)
    return list(zip(ordered[:-1], ordered[1:]))


def _ray_bounds(theta, rect, focus_x, radius):
    """Radial range [lo, hi] of the ray from (focus_x, 0) at angle theta inside the region."""
    s, c = np.sin(theta), np.cos(theta)
    lo = np.zeros_like(theta)
    hi = np.full_like(theta, np.inf)
    lo = np.maximum(lo, rect.y0 / s)
    hi = np.minimum(hi, rect.y1 / s)
    flat = np.abs(c) < 1e-15
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (rect.x0 - focus_x) / c
        b = (rect.x1 - focus_x) / c
    pos, neg = (c > 0) & ~flat, (c < 0) & ~flat
    lo = np.where(pos, np.maximum(lo, a), lo)
    hi = np.where(pos, np.minimum(hi, b), hi)
    lo = np.where(neg, np.maximum(lo, b), lo)
    hi = np.where(neg, np.minimum(hi, a), hi)
    if not rect.x0 <= focus_x <= rect.x1:
        hi = np.where(flat, 0.0, hi)
    if radius is not None:
        disc = radius * radius - (focus_x * s) ** 2
        root = np.sqrt(np.maximum(disc, 0.0))
        lo = np.maximum(lo, -focus_x * c - root)
        hi = np.minimum(hi, np.where(disc > 0, -focus_x * c + root, 0.0))
    lo = np.maximum(lo, 0.0)
    return lo, hi, hi > lo


def _radial_rule(lo, hi, n, layers, power):
    """Nodes/weights (shape (len(lo), (layers+1)*n)) on each ray; power is the r-exponent at lo = 0."""
    u, w = _legendre(n)
    zero = lo <= 0
    # geometric layers down to the focus, Jacobi layer at the focus
    k = np.arange(layers)
    a = hi[:, None] * 2.0 ** -(k + 1)
    b = hi[:, None] * 2.0 ** -k
    r_geo = ((a + b) / 2)[..., None] + ((b - a) / 2)[..., None] * u
    w_geo = ((b - a) / 2)[..., None] * w
    inner = hi * 2.0 ** -layers
    xj, wj = _jacobi(n, 0.0, float(power))
    r_jac = inner[:, None] * (1 + xj) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        w_jac = (inner[:, None] / 2) ** (power + 1) * wj / r_jac ** power
    r_zero = np.concatenate([r_geo.reshape(len(lo), -1), r_jac], axis=1)
    w_zero = np.concatenate([w_geo.reshape(len(lo), -1), w_jac], axis=1)
    # geometric layers between lo > 0 and hi
    safe_lo = np.where(zero, hi, lo)
    edges = safe_lo[:, None] * (hi / safe_lo)[:, None] ** (np.arange(layers + 2) / (layers + 1))
    a, b = edges[:, :-1], edges[:, 1:]
    r_pos = (((a + b) / 2)[..., None] + ((b - a) / 2)[..., None] * u).reshape(len(lo), -1)
    w_pos = (((b - a) / 2)[..., None] * w).reshape(len(lo), -1)
    return np.where(zero[:, None], r_zero, r_pos), np.where(zero[:, None], w_zero, w_pos)


def _checked(values, x, y):
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise QuadratureDomainError(float(x[i]), float(y[i]), float(values[i]))
    return values


def _converged(value, error, tail, tolerance):
    scale = abs(value) if abs(value) > TINY else 1.0
    return error + tail <= tolerance * scale


def _refine(evaluate_level, qc, tail, what):
    previous = evaluate_level(0)
    value, error, converged, level = previous, math.inf, False, 0
    for level in range(1, qc.max_depth + 2):
        value = evaluate_level(level)
        error = abs(value - previous)
        converged = _converged(value, error, tail, qc.tolerance)
        logger.debug("%s level %d: value=%r error=%r", what, level, value, error)
        if converged:
            break
        previous = value
    if not converged:
        logger.warning("%s not converged after %d levels: value=%r error=%r tail=%r",
                       what, level + 1, value, error, tail)
    return IntegralResult(value, error, tail, converged, level + 1)


# ---------------------------------------------------------------- regions

def _split_by_foci(rect, foci):
    ordered = sorted(foci, key=lambda f: f.x)
    cuts = [rect.x0] + [(a.x + b.x) / 2 for a, b in zip(ordered[:-1], ordered[1:])] + [rect.x1]
    parts = []
    for focus, left, right in zip(ordered, cuts[:-1], cuts[1:]):
        left, right = max(left, rect.x0), min(right, rect.x1)
        if left < right:
            parts.append((Rectangle(left, right, rect.y0, rect.y1), focus))
    return parts


def _region_sum(rect, foci, radius, angular_layers, piece_value):
    acc = CompensatedSum()
    for part, focus in _split_by_foci(rect, foci):
        for a, b in _angular_pieces(part, focus.x, radius, angular_layers):
            mid = np.array([(a + b) / 2])
            if not _ray_bounds(mid, part, focus.x, radius)[2][0]:
                continue
            acc.add(piece_value(part, focus, a, b))
    return acc.value


def integrate(integrand: Callable, region, qc: QuadratureConfig, *, alpha=0.0, foci: Optional[Sequence[Focus]] = None,
              boundary_exponent=0.0, radius=None, tails: Sequence[DecayClass] = (), what="integral"):
    """
    Integrate ``integrand(x, y) * y^alpha`` over ``region`` (optionally cut to |z| <= radius).

    ``foci`` lists the points of the real axis where the integrand has a power
    singularity (or sharp peak); ``boundary_exponent`` is its power of y at
    the real axis. ``tails`` are added as tail bounds.
    """
    check_alpha(alpha)
    rect = as_rectangle(region)
    if not foci:
        foci = [Focus(min(max(0.0, rect.x0), rect.x1))]
    kappa = boundary_exponent + alpha if rect.y0 == 0 else 0.0
    if not kappa > -1:
        raise DivergenceError(f"integrand ~ y^{kappa!r} at the real axis is not integrable")
    for focus in foci:
        if rect.y0 == 0 and not focus.degree + alpha + 2 > 0:
            raise DivergenceError(f"integrand ~ r^{focus.degree + alpha!r} at ({focus.x!r}, 0) is not integrable")
    tail = sum(tail_bound(decay, rect) for decay in tails)

    def evaluate_level(level):
        n = qc.nodes * 2 ** level

        def piece_value(part, focus, a, b):
            theta, w_theta = _segment_rule(a, b, n, kappa if a == 0.0 else 0.0,
                                           kappa if b == math.pi and a != 0.0 else 0.0)
            lo, hi, valid = _ray_bounds(theta, part, focus.x, radius)
            lo, hi = np.where(valid, lo, 0.0), np.where(valid, hi, 1.0)
            r, w_r = _radial_rule(lo, hi, n, qc.radial_layers, focus.degree + alpha + 1)
            weights = w_theta[:, None] * w_r
            mask = valid[:, None] & (r > 0) & (weights != 0)
            rr = r[mask]
            th = np.broadcast_to(theta[:, None], r.shape)[mask]
            x = focus.x + rr * np.cos(th)
            y = rr * np.sin(th)
            values = _checked(np.asarray(integrand(x, y), dtype=float), x, y)
            return float(np.dot(weights[mask], values * y ** alpha * rr))

        return _region_sum(rect, foci, radius, qc.angular_layers, piece_value)

    return _refine(evaluate_level, qc, tail, what)


def integrate_polar_power(coefficient, degree, height_exponent, region, qc: QuadratureConfig, *, alpha=0.0,
                          radius=None, what="power integral"):
    """
    Integrate c |z|^degree (y/|z|)^height_exponent y^alpha over region cut to |z| <= radius.

    The radial integral is done in closed form on each ray; only the angular
    integral is numerical.
    """
    rect = as_rectangle(region)
    kappa = height_exponent + alpha
    edge = kappa if rect.y0 == 0 else 0.0
    if not edge > -1:
        raise DivergenceError(f"integrand ~ y^{kappa!r} at the real axis is not integrable")
    e = degree + alpha + 2
    touches_origin = rect.y0 == 0 and rect.x0 <= 0 <= rect.x1
    if touches_origin and not e > 0:
        raise DivergenceError(f"integrand ~ r^{degree + alpha!r} at the origin is not integrable")
    if coefficient == 0:
        return IntegralResult(0.0, 0.0)

    def radial(lo, hi):
        if e == 0:
            return np.log(hi / np.where(lo > 0, lo, hi))
        with np.errstate(divide="ignore"):
            return (hi ** e - np.where(lo > 0, lo ** e, 0.0)) / e

    def evaluate_level(level):
        n = qc.nodes * 2 ** level

        def piece_value(part, focus, a, b):
            theta, w_theta = _segment_rule(a, b, n, edge if a == 0.0 else 0.0,
                                           edge if b == math.pi and a != 0.0 else 0.0)
            lo, hi, valid = _ray_bounds(theta, part, 0.0, radius)
            lo, hi = np.where(valid, lo, 1.0), np.where(valid, hi, 1.0)
            values = np.where(valid, np.sin(theta) ** kappa * radial(lo, hi), 0.0)
            return float(np.dot(w_theta, _checked(values, np.cos(theta), np.sin(theta))))

        return coefficient * _region_sum(rect, [Focus(0.0)], radius, qc.angular_layers, piece_value)

    return _refine(evaluate_level, qc, 0.0, what)


def integrate_half_plane(integrand: Callable, qc: QuadratureConfig, *, alpha=0.0, origin_degree=0.0,
                         infinity_degree=-math.inf, boundary_exponent=0.0, r_min=2.0 ** -8, r_max=2.0 ** 8,
                         center=0.0, what="half-plane integral"):
    """
    Integrate ``integrand(x, y) * y^alpha`` over all of H.

    Radial layers are geometric on [r_min, r_max] about (center, 0). Inside
    r_min and beyond r_max the integrand is continued as a power of r with
    the declared degrees, and those two caps are added in closed form. The
    cap mass is reported as ``tail_bound``.
    """
    kappa = boundary_exponent + alpha
    if not kappa > -1:
        raise DivergenceError(f"integrand ~ y^{kappa!r} at the real axis is not integrable")
    inner_power = origin_degree + alpha + 2
    outer_power = infinity_degree + alpha + 2
    if not inner_power > 0:
        raise DivergenceError(f"integrand ~ r^{origin_degree + alpha!r} at ({center!r}, 0) is not integrable")
    if not outer_power < 0:
        raise DivergenceError(f"integrand ~ r^{infinity_degree + alpha!r} at infinity is not integrable")
    layers = max(1, math.ceil(math.log2(r_max / r_min)))
    edges = r_min * (r_max / r_min) ** (np.arange(layers + 1) / layers)
    pieces = _angular_pieces(Rectangle(-1.0, 1.0, 0.0, 1.0), 0.0, None, qc.angular_layers)
    caps = []

    def evaluate_level(level):
        n = qc.nodes * 2 ** level
        u, w = _legendre(n)
        a, b = edges[:-1], edges[1:]
        r = (((a + b) / 2)[:, None] + ((b - a) / 2)[:, None] * u).ravel()
        w_r = (((b - a) / 2)[:, None] * w).ravel()
        body, cap = CompensatedSum(), CompensatedSum()
        for ta, tb in pieces:
            theta, w_theta = _segment_rule(ta, tb, n, kappa if ta == 0.0 else 0.0,
                                           kappa if tb == math.pi and ta != 0.0 else 0.0)
            rr = np.concatenate([r, [r_min, r_max]])
            th = np.repeat(theta, len(rr))
            rr = np.tile(rr, len(theta))
            x = center + rr * np.cos(th)
            y = rr * np.sin(th)
            values = _checked(np.asarray(integrand(x, y), dtype=float), x, y) * y ** alpha
            values = values.reshape(len(theta), -1)
            body.add(float(w_theta @ (values[:, :-2] @ (w_r * r))))
            inner = r_min ** 2 / inner_power * values[:, -2]
            outer = r_max ** 2 / -outer_power * values[:, -1]
            cap.add(float(w_theta @ (inner + outer)))
        caps.append(cap.value)
        return body.value + cap.value

    result = _refine(evaluate_level, qc, 0.0, what)
    return dataclasses.replace(result, tail_bound=abs(caps[-1]))
