"""
Integrals of descriptors against dV_alpha: box/tent measures with a weight,
and weighted L^p norms over the whole half-plane.
"""
from __future__ import annotations

import logging

import numpy as np

from .exceptions import DivergenceError, ToleranceNotMetError
from .functions import ShiftedKernelPower, SymbolicFunction
from .geometry import Rectangle, as_rectangle, check_alpha
from .quadrature import (Focus, IntegralResult, QuadratureConfig, integrate, integrate_half_plane,
                         integrate_polar_power)

logger = logging.getLogger(__name__)


def _foci(rect, origin_degree, boundary_exponent):
    if rect.y0 == 0 and rect.x0 <= 0 <= rect.x1:
        return [Focus(0.0, origin_degree)]
    return [Focus(min(max(0.0, rect.x0), rect.x1), boundary_exponent)]


def region_integral(f: SymbolicFunction, region, alpha, qc: QuadratureConfig, power=1.0, what=None):
    """
    The integral of |f|^power over ``region`` against dV_alpha.

    Pure power products take the exact radial path; everything else is
    integrated in polar coordinates about the origin (when the region touches
    it) or about the nearest boundary point.
    """
    check_alpha(alpha)
    rect = as_rectangle(region)
    what = what or f"|{f}|^{power!r} over {rect}"
    support = f.support()
    if support.compact:
        rect = support.bounding_rectangle(rect)
        if rect is None:
            return IntegralResult(0.0, 0.0)

    pp = f.polar_power()
    if pp is not None:
        return integrate_polar_power(abs(pp.coefficient) ** power, pp.degree * power, pp.height_exponent * power,
                                     rect, qc, alpha=alpha, radius=pp.radius, what=what)

    decay = f.decay()
    boundary = decay.boundary_exponent * power
    foci = _foci(rect, decay.origin_degree * power, boundary)

    def integrand(x, y):
        return np.abs(f.evaluate(x, y)) ** power

    return integrate(integrand, rect, qc, alpha=alpha, foci=foci, boundary_exponent=boundary,
                     radius=support.radius, what=what)


def weighted_region_measure(region, w: SymbolicFunction, alpha, qc: QuadratureConfig):
    """|E|_{w,alpha}: the integral of w over a box or tent against dV_alpha."""
    result = region_integral(w, region, alpha, qc, what=f"|{as_rectangle(region)}|_({w}, {alpha!r})")
    if not result.converged:
        raise ToleranceNotMetError(f"measure of {as_rectangle(region)} under {w} did not converge", result)
    return result


def _check_norm(f, p, nu, decay):
    if not p * decay.boundary_exponent + nu > -1:
        raise DivergenceError(f"||{f}||_({p!r},{nu!r}) diverges at the real axis: "
                              f"|f|^p y^nu ~ y^{p * decay.boundary_exponent + nu!r}")
    if not p * decay.origin_degree + nu + 2 > 0:
        raise DivergenceError(f"||{f}||_({p!r},{nu!r}) diverges at the origin: "
                              f"|f|^p y^nu ~ r^{p * decay.origin_degree + nu!r}")
    if decay.infinity_degree is not None and not p * decay.infinity_degree + nu + 2 < 0:
        kernels = [k for k in f.factors() if isinstance(k, ShiftedKernelPower)]
        if len(kernels) == 1 and len(f.factors()) == 1:
            raise DivergenceError(f"||{f}||_({p!r},{nu!r}) diverges: needs gamma > (nu+2)/p = "
                                  f"{(nu + 2) / p!r}, got gamma={kernels[0].gamma!r}")
        raise DivergenceError(f"||{f}||_({p!r},{nu!r}) diverges at infinity: "
                              f"|f|^p y^nu ~ r^{p * decay.infinity_degree + nu!r}")


def lp_power(f: SymbolicFunction, p, nu, qc: QuadratureConfig) -> IntegralResult:
    """The integral of |f|^p y^nu over H (the p-th power of the norm)."""
    check_alpha(nu)
    decay = f.decay()
    _check_norm(f, p, nu, decay)
    support = f.support()
    if support.compact:
        radius = support.outer_radius
        if radius <= 0:
            return IntegralResult(0.0, 0.0)
        region = support.bounding_rectangle(Rectangle(-radius, radius, 0.0, radius))
        if region is None:
            return IntegralResult(0.0, 0.0)
        return region_integral(f, region, nu, qc, power=p, what=f"||{f}||^{p!r}_({p!r},{nu!r})")

    r_max = min(-qc.x_range[0], qc.x_range[1], qc.y_max)
    r_min = r_max * 2.0 ** -qc.radial_layers

    def integrand(x, y):
        return np.abs(f.evaluate(x, y)) ** p

    return integrate_half_plane(integrand, qc, alpha=nu, origin_degree=p * decay.origin_degree,
                                infinity_degree=p * decay.infinity_degree,
                                boundary_exponent=p * decay.boundary_exponent, r_min=r_min, r_max=r_max,
                                what=f"||{f}||^{p!r}_({p!r},{nu!r})")


def lp_norm(f: SymbolicFunction, p, nu, qc: QuadratureConfig):
    """||f||_{p,nu} = (integral over H of |f|^p y^nu dx dy)^(1/p)."""
    result = lp_power(f, p, nu, qc)
    if not result.converged:
        raise ToleranceNotMetError(f"||{f}||_({p!r},{nu!r}) did not converge", result)
    return result.value ** (1.0 / p)
