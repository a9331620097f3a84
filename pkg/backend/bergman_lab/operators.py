"""
Positive kernel operators on the upper half-plane.

Every operator here has the form

    op f(z) = (Im z)^h * integral of f(w) |z - conj(w)|^(-d) (Im w)^mu dA(w)

so one evaluator covers P_alpha^+, S_{alpha,a}, T_{alpha,a} and T^+.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed

from .dyadic import TruncatedGrid, fractional_maximal, sample_points
from .exceptions import DivergenceError, InputError
from .functions import ONE, SymbolicFunction
from .geometry import HalfPlanePoint, Rectangle, check_alpha
from .measures import region_integral
from .quadrature import DecayClass, Focus, IntegralResult, QuadratureConfig, integrate, integrate_half_plane
from .weights import ExponentConfig

logger = logging.getLogger(__name__)

KINDS = ("positive_bergman", "fractional_s", "fractional_t", "general_t_plus")


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    alpha: float = 0.0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"operator kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind != "general_t_plus":
            check_alpha(self.alpha)

    @classmethod
    def positive_bergman(cls, alpha):
        return cls("positive_bergman", alpha)

    @classmethod
    def fractional_s(cls, alpha, a):
        return cls("fractional_s", alpha, a)

    @classmethod
    def fractional_t(cls, alpha, a):
        return cls("fractional_t", alpha, a)

    @classmethod
    def general_t_plus(cls, a, b):
        return cls("general_t_plus", a=a, b=b)

    @property
    def height_power(self):
        return self.a if self.kind == "fractional_s" else 0.0

    @property
    def distance_power(self):
        if self.kind == "general_t_plus":
            return 1 + self.b
        if self.kind == "fractional_t":
            return 2 + self.alpha - self.a
        return 2 + self.alpha

    @property
    def measure_exponent(self):
        return self.a if self.kind == "general_t_plus" else self.alpha

    def to_text(self):
        if self.kind == "positive_bergman":
            return f"P+(alpha={self.alpha!r})"
        if self.kind == "fractional_s":
            return f"S(alpha={self.alpha!r}, a={self.a!r})"
        if self.kind == "fractional_t":
            return f"T(alpha={self.alpha!r}, a={self.a!r})"
        return f"T+(a={self.a!r}, b={self.b!r})"

    __str__ = to_text


def _check_convergence(op: OperatorSpec, f: SymbolicFunction, region):
    decay = f.decay()
    mu = op.measure_exponent
    near_boundary = region is None or region.y0 == 0
    if near_boundary and not decay.boundary_exponent + mu > -1:
        raise DivergenceError(f"{op} of {f} diverges at the real axis: f(w) (Im w)^{mu!r} ~ "
                              f"y^{decay.boundary_exponent + mu!r}")
    if near_boundary and not decay.origin_degree + mu + 2 > 0:
        raise DivergenceError(f"{op} of {f} diverges at the origin: integrand ~ r^{decay.origin_degree + mu!r}")
    unbounded = region is None or not all(map(math.isfinite, (region.x0, region.x1, region.y1)))
    if unbounded and decay.infinity_degree is not None \
            and not decay.infinity_degree - op.distance_power + mu + 2 < 0:
        raise DivergenceError(f"{op} of {f} diverges at infinity: integrand ~ "
                              f"r^{decay.infinity_degree - op.distance_power + mu!r}")


def _foci(rect: Rectangle, z: HalfPlanePoint, origin_degree, boundary_exponent):
    foci = {}
    if rect.y0 == 0 and rect.x0 <= 0 <= rect.x1:
        foci[0.0] = Focus(0.0, origin_degree)
    if rect.x0 <= z.x <= rect.x1 and z.x not in foci:
        foci[z.x] = Focus(z.x, boundary_exponent if rect.y0 == 0 else 0.0)
    if not foci:
        foci[0.0] = Focus(min(max(0.0, rect.x0), rect.x1), boundary_exponent)
    return list(foci.values())


def apply(op: OperatorSpec, f: SymbolicFunction, z: HalfPlanePoint, qc: Optional[QuadratureConfig] = None,
          region: Optional[Rectangle] = None) -> IntegralResult:
    """
    op f(z) by quadrature, with f restricted to ``region`` when given.

    Compactly supported f is integrated over its support; otherwise over the
    truncation of ``qc`` with a tail bound from f's decay.
    """
    qc = qc or QuadratureConfig()
    coefficient, rest = f.split_scalar()
    if coefficient == 0:
        return IntegralResult(0.0, 0.0)
    _check_convergence(op, rest, region)
    support = rest.support()
    decay = rest.decay()
    tails = []
    if region is not None:
        rect = support.bounding_rectangle(region) if support.compact else region
    elif support.compact:
        rect = support.bounding_rectangle(Rectangle(-math.inf, math.inf, 0.0, math.inf))
    else:
        rect = Rectangle(qc.x_range[0], qc.x_range[1], 0.0, qc.y_max)
        radius = min(-rect.x0, rect.x1, rect.y1)
        if decay.infinity_degree is not None and radius > z.modulus:
            slack = (1 - z.modulus / radius) ** (-op.distance_power)
            tails.append(DecayClass(decay.infinity_degree - op.distance_power + op.measure_exponent,
                                    decay.boundary_exponent + op.measure_exponent,
                                    decay.constant(radius) * slack))
    if rect is None:
        return IntegralResult(0.0, 0.0)
    if not all(map(math.isfinite, (rect.x0, rect.x1, rect.y1))):
        raise InputError(f"support of {rest} is unbounded; pass a region")

    d = op.distance_power
    zx, zy = z.x, z.y

    def integrand(x, y):
        v = zy + y
        return rest.evaluate(x, y) * ((zx - x) ** 2 + v * v) ** (-d / 2)

    result = integrate(integrand, rect, qc, alpha=op.measure_exponent,
                       foci=_foci(rect, z, decay.origin_degree, decay.boundary_exponent),
                       boundary_exponent=decay.boundary_exponent if rect.y0 == 0 else 0.0,
                       radius=support.radius, tails=tails, what=f"{op}[{rest}]({zx!r}, {zy!r})")
    return result.scaled(coefficient * zy ** op.height_power)


# ---------------------------------------------------------------- norms

@dataclass(frozen=True)
class NormRatio:
    numerator: float
    denominator: float

    @property
    def ratio(self):
        return self.numerator / self.denominator


def _outer_integrand(op, f, q, weight, inner_qc, region, n_jobs):
    def integrand(x, y):
        points = [HalfPlanePoint(float(a), float(b)) for a, b in zip(np.ravel(x), np.ravel(y))]
        values = Parallel(n_jobs=n_jobs)(delayed(_apply_value)(op, f, z, inner_qc, region) for z in points)
        out = np.abs(np.asarray(values, dtype=float)) ** q
        if weight is not None:
            out = out * np.abs(weight.evaluate(np.ravel(x), np.ravel(y))) ** q
        return out.reshape(np.shape(x))
    return integrand


def _apply_value(op, f, z, qc, region):
    return apply(op, f, z, qc, region).value


def norm_ratio(op: OperatorSpec, f: SymbolicFunction, cfg: ExponentConfig, source_weight=None, target_weight=None,
               source_order=None, target_order=None, qc: Optional[QuadratureConfig] = None,
               inner_qc: Optional[QuadratureConfig] = None, boundary_exponent=None, n_jobs=1) -> NormRatio:
    """
    ||w2 op f||_{L^q(y^nu2)} / ||w1 f||_{L^p(y^nu1)} over the truncation of ``qc``.

    f is restricted to the truncation before op is applied. ``boundary_exponent``
    is the power of y in |op f|^q at the real axis (default q times the height
    power of op).
    """
    qc = qc or QuadratureConfig()
    inner_qc = inner_qc or qc
    nu1 = cfg.alpha if source_order is None else source_order
    nu2 = cfg.alpha if target_order is None else target_order
    check_alpha(nu1)
    check_alpha(nu2)
    region = qc.truncation
    source_fn = f if source_weight is None else f * source_weight
    denominator = region_integral(source_fn, region, nu1, qc, power=cfg.p).value ** (1 / cfg.p)
    if not denominator > 0:
        raise DivergenceError(f"||{source_fn}||_({cfg.p!r},{nu1!r}) vanishes on {region}")
    integrand = _outer_integrand(op, f, cfg.q, target_weight, inner_qc, region, n_jobs)
    boundary = cfg.q * op.height_power if boundary_exponent is None else boundary_exponent
    outer = integrate(integrand, region, qc, alpha=nu2, boundary_exponent=boundary,
                      what=f"||{op}[{f}]||_({cfg.q!r},{nu2!r})")
    logger.info("norm ratio of %s on %s over %s: %r / %r", op, f, region, outer.value ** (1 / cfg.q), denominator)
    return NormRatio(outer.value ** (1 / cfg.q), denominator)


def target_norm(op: OperatorSpec, f: SymbolicFunction, q, order, weight: Optional[SymbolicFunction] = None, *,
                origin_degree, infinity_degree, boundary_exponent=0.0, qc: Optional[QuadratureConfig] = None,
                inner_qc: Optional[QuadratureConfig] = None, r_min=2.0 ** -6, r_max=2.0 ** 8, n_jobs=1):
    """
    The integral over all of H of |weight * op f|^q y^order.

    The degrees describe |weight * op f|^q near 0 and at infinity; the mass
    inside r_min and beyond r_max is added as homogeneous caps.
    """
    qc = qc or QuadratureConfig()
    integrand = _outer_integrand(op, f, q, weight, inner_qc or qc, None, n_jobs)
    return integrate_half_plane(integrand, qc, alpha=order, origin_degree=origin_degree,
                                infinity_degree=infinity_degree, boundary_exponent=boundary_exponent,
                                r_min=r_min, r_max=r_max, what=f"||{op}[{f}]||^{q!r}_(H, {order!r})")


# ---------------------------------------------------------------- pointwise checks

def minorization_constant(cfg: ExponentConfig):
    """C with M_{alpha,a} f(z) <= C S_{alpha,a}|f|(z): |z - conj(w)| <= sqrt(5)|I| on Q_I."""
    return (1 + cfg.alpha) ** (1 - cfg.gap) * 5 ** ((2 + cfg.alpha) / 2) * 2 ** cfg.a


def _maximal_members(grid: TruncatedGrid, cfg: ExponentConfig, z: HalfPlanePoint):
    if cfg.a > 0:
        idx = grid.tent_of(z)
        return [idx] if idx is not None else []
    return grid.containing(z)


@dataclass
class MinorizationReport:
    constant: float
    rows: List[dict] = field(default_factory=list)
    slack: float = 1e-6

    @property
    def violations(self):
        return [row for row in self.rows if row["violation"]]

    @property
    def empirical_constant(self):
        ratios = [row["maximal"] / row["s_value"] for row in self.rows if row["s_value"] > 0]
        return max(ratios, default=0.0)

    @property
    def max_violation(self):
        excess = [row["maximal"] / row["bound"] - 1 for row in self.rows if row["bound"] > 0]
        return max(excess, default=0.0)


def _minorization_row(f, cfg, grid, z, qc):
    maximal = fractional_maximal(f, ONE, cfg, grid, z, qc, members=_maximal_members(grid, cfg, z))
    s_value = apply(OperatorSpec.fractional_s(cfg.alpha, cfg.a), f, z, qc).value
    return maximal, s_value


def maximal_minorization_check(f: SymbolicFunction, cfg: ExponentConfig, g: TruncatedGrid, samples=100,
                               qc: Optional[QuadratureConfig] = None, points=None, seed=0, slack=1e-6, n_jobs=1):
    """M_{alpha,a} f <= C S_{alpha,a}|f| at sample points."""
    qc = qc or QuadratureConfig()
    points = points if points is not None else sample_points(samples, seed)
    constant = minorization_constant(cfg)
    results = Parallel(n_jobs=n_jobs)(delayed(_minorization_row)(f, cfg, g, z, qc) for z in points)
    report = MinorizationReport(constant, slack=slack)
    for z, (maximal, s_value) in zip(points, results):
        bound = constant * s_value
        report.rows.append({"x": z.x, "y": z.y, "maximal": maximal, "s_value": s_value, "bound": bound,
                            "violation": maximal > bound * (1 + slack)})
    if report.violations:
        logger.warning("%d of %d samples violate M <= C S for %s", len(report.violations), len(points), f)
    return report


def pointwise_chain(f: SymbolicFunction, cfg: ExponentConfig, grid: TruncatedGrid, z: HalfPlanePoint,
                    qc: Optional[QuadratureConfig] = None):
    """M, S and T at z; S and T share the mesh, so S <= T holds node by node."""
    qc = qc or QuadratureConfig()
    maximal = fractional_maximal(f, ONE, cfg, grid, z, qc, members=_maximal_members(grid, cfg, z))
    s_value = apply(OperatorSpec.fractional_s(cfg.alpha, cfg.a), f, z, qc).value
    t_value = apply(OperatorSpec.fractional_t(cfg.alpha, cfg.a), f, z, qc).value
    return {"maximal": maximal, "s_value": s_value, "t_value": t_value,
            "bound": minorization_constant(cfg) * s_value}
