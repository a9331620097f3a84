"""
Bekolle-Bonami weight constants and weighted box averages.

The constants are suprema over a finite family of intervals. Pure power
weights are dilation invariant, so their family only needs unit intervals
at different offsets from the origin.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from joblib import Parallel, delayed

from .exceptions import DegenerateAverageError, DivergenceError, InputError, WeightNotInClassError
from .functions import SymbolicFunction
from .geometry import CarlesonBox, Interval, Tent, alpha_measure_tent, check_alpha
from .measures import region_integral
from .quadrature import QuadratureConfig

logger = logging.getLogger(__name__)

GRID_TAGS = (Fraction(0), Fraction(1, 3))


@dataclass(frozen=True)
class ExponentConfig:
    p: float
    q: Optional[float] = None
    alpha: float = 0.0
    a: float = 0.0
    balanced: bool = False

    def __post_init__(self):
        if self.q is None:
            object.__setattr__(self, "q", self.p)
        if not 1 < self.p <= self.q < math.inf:
            raise InputError(f"exponents need 1 < p <= q < inf, got p={self.p!r}, q={self.q!r}")
        check_alpha(self.alpha)
        if not 0 <= self.a < 2 + self.alpha:
            raise InputError(f"a must lie in [0, 2+alpha) = [0, {2 + self.alpha!r}), got a={self.a!r}")
        if self.balanced and not self.is_balanced:
            raise InputError(f"1/p - 1/q = {1 / self.p - 1 / self.q!r} differs from "
                             f"a/(2+alpha) = {self.gap!r}")

    @classmethod
    def balanced_for(cls, p, alpha=0.0, a=0.0):
        """The balanced config: q from 1/q = 1/p - a/(2+alpha)."""
        inverse = 1 / p - a / (2 + alpha)
        if not inverse > 0:
            raise InputError(f"no finite q balances p={p!r}, alpha={alpha!r}, a={a!r}")
        return cls(p, 1 / inverse, alpha, a, balanced=True)

    @property
    def p_prime(self):
        return self.p / (self.p - 1)

    @property
    def q_prime(self):
        return self.q / (self.q - 1)

    @property
    def gap(self):
        return self.a / (2 + self.alpha)

    @property
    def is_balanced(self):
        return math.isclose(1 / self.p - 1 / self.q, self.gap, rel_tol=1e-12, abs_tol=1e-14)

    def dual(self):
        """(q', p') with the same alpha and a."""
        return ExponentConfig(self.q_prime, self.p_prime, self.alpha, self.a)

    def metadata(self):
        return {"p": self.p, "q": self.q, "alpha": self.alpha, "a": self.a}


@dataclass(frozen=True)
class WeightPair:
    omega: SymbolicFunction
    sigma: SymbolicFunction
    u: SymbolicFunction

    @classmethod
    def of(cls, omega: SymbolicFunction, cfg: ExponentConfig):
        return cls(omega, omega.power(-cfg.p_prime), omega.power(cfg.q))


@dataclass(frozen=True)
class BracketResult:
    value: float
    interval: Interval


@dataclass(frozen=True)
class SearchFamily:
    """A finite family of intervals standing in for all intervals of R."""
    intervals: Tuple[Interval, ...] = field(default_factory=tuple)

    def __post_init__(self):
        unique = sorted(set(self.intervals), key=lambda i: (i.left, i.length))
        if not unique:
            raise InputError("search family is empty")
        object.__setattr__(self, "intervals", tuple(unique))

    def __len__(self):
        return len(self.intervals)

    @classmethod
    def dyadic(cls, grid_tags=GRID_TAGS, j_range=(-3, 3), x_range=(-4.0, 4.0), centred_lengths=None):
        """Dyadic intervals of the given grids meeting x_range, plus intervals centred at 0."""
        from .dyadic import DyadicIndex

        intervals = []
        x0, x1 = x_range
        for beta in grid_tags:
            for j in range(j_range[0], j_range[1] + 1):
                size = 2.0 ** j
                shift = (-1) ** (j % 2) * float(beta)
                for m in range(math.floor(x0 / size - shift) - 1, math.ceil(x1 / size - shift) + 1):
                    interval = DyadicIndex(j, m, beta).interval()
                    if interval.left < x1 and interval.right > x0:
                        intervals.append(interval)
        if centred_lengths is None:
            centred_lengths = [2.0 ** k for k in range(j_range[0], j_range[1] + 1)]
        intervals.extend(Interval(-length / 2, length) for length in centred_lengths)
        return cls(tuple(intervals))

    @classmethod
    def reduced_for_powers(cls, span=16):
        """Unit intervals [c, c+1): every interval is a dilate about 0 of one of these."""
        lefts = {Fraction(k, 6) for k in range(-12, 7)} | {Fraction(m) for m in range(-span, span + 1)}
        return cls(tuple(Interval(float(c), 1.0) for c in lefts))


def is_power_weight(omega: SymbolicFunction):
    return omega.polar_power() is not None and not omega.support().compact


def default_family(omega: SymbolicFunction):
    return SearchFamily.reduced_for_powers() if is_power_weight(omega) else SearchFamily.dyadic()


def box_mean(f: SymbolicFunction, interval: Interval, alpha, qc: QuadratureConfig):
    """(1/|I|^(2+alpha)) times the integral of f over Q_I against dV_alpha."""
    try:
        total = region_integral(f, CarlesonBox(interval), alpha, qc).value
    except DivergenceError as exc:
        raise WeightNotInClassError(interval, str(exc)) from exc
    return total / interval.length ** (2 + alpha)


def bpq_bracket(pair: WeightPair, cfg: ExponentConfig, interval: Interval, qc: QuadratureConfig):
    return box_mean(pair.u, interval, cfg.alpha, qc) * \
        box_mean(pair.sigma, interval, cfg.alpha, qc) ** (cfg.q / cfg.p_prime)


def bp_bracket(omega: SymbolicFunction, p, alpha, interval: Interval, qc: QuadratureConfig):
    p_prime = p / (p - 1)
    return box_mean(omega, interval, alpha, qc) * \
        box_mean(omega.power(1 - p_prime), interval, alpha, qc) ** (p - 1)


def _supremum(bracket, family: SearchFamily, n_jobs, what):
    values = Parallel(n_jobs=n_jobs)(delayed(bracket)(interval) for interval in family.intervals)
    best = 0
    for index, value in enumerate(values):
        if not math.isfinite(value):
            raise WeightNotInClassError(family.intervals[index], f"{what} bracket is {value!r}")
        if value > values[best]:
            best = index
    logger.debug("%s over %d intervals: %r at %s", what, len(family), values[best], family.intervals[best])
    return BracketResult(values[best], family.intervals[best])


def bpq_constant(pair: WeightPair, cfg: ExponentConfig, search: Optional[SearchFamily] = None,
                 qc: Optional[QuadratureConfig] = None, n_jobs=1):
    """[omega]_{B_{p,q,alpha}} over the search family, with the interval attaining it."""
    qc = qc or QuadratureConfig()
    search = search or default_family(pair.omega)

    def bracket(interval):
        return bpq_bracket(pair, cfg, interval, qc)

    return _supremum(bracket, search, n_jobs, f"B_(p,q,alpha)[{pair.omega}]")


def bp_constant(omega: SymbolicFunction, p, alpha, search: Optional[SearchFamily] = None,
                qc: Optional[QuadratureConfig] = None, n_jobs=1):
    """[omega]_{B_{p,alpha}} over the search family, with the interval attaining it."""
    if not p > 1:
        raise InputError(f"p must be > 1, got {p!r}")
    check_alpha(alpha)
    qc = qc or QuadratureConfig()
    search = search or default_family(omega)

    def bracket(interval):
        return bp_bracket(omega, p, alpha, interval, qc)

    return _supremum(bracket, search, n_jobs, f"B_(p,alpha)[{omega}]")


def _weighted_mean_parts(f, weight, interval, alpha, qc):
    box = CarlesonBox(interval)
    try:
        denominator = region_integral(weight, box, alpha, qc).value
    except DivergenceError as exc:
        raise DegenerateAverageError(f"|Q_{interval}|_({weight}, {alpha!r}) diverges: {exc}") from exc
    if not (math.isfinite(denominator) and denominator > 0):
        raise DegenerateAverageError(f"|Q_{interval}|_({weight}, {alpha!r}) = {denominator!r}")
    numerator = region_integral(f * weight, box, alpha, qc).value
    return numerator, denominator


def box_average_sigma(f: SymbolicFunction, interval: Interval, pair: WeightPair, alpha, qc: QuadratureConfig):
    """B_{sigma,alpha}(f, Q_I)."""
    numerator, denominator = _weighted_mean_parts(f, pair.sigma, interval, alpha, qc)
    return numerator / denominator


def box_average_u_fractional(g: SymbolicFunction, interval: Interval, pair: WeightPair, cfg: ExponentConfig,
                             qc: QuadratureConfig):
    """B_{u,alpha,a}(g, Q_I): the u-integral of g normalised by |Q_I|_{u,alpha}^(1 - a/(2+alpha))."""
    numerator, denominator = _weighted_mean_parts(g, pair.u, interval, cfg.alpha, qc)
    return numerator / denominator ** (1 - cfg.gap)


def tent_holder_gap(pair: WeightPair, cfg: ExponentConfig, interval: Interval, qc: QuadratureConfig):
    """
    Both sides of |T_I|_alpha <= |T_I|_{u,alpha}^(1/(lq)) |T_I|_{sigma,alpha}^(1/(lp')), l = 1 - a/(2+alpha).

    Under the balanced condition the two exponents are Hoelder conjugate and
    u^(1/(lq)) sigma^(1/(lp')) = 1.
    """
    if not cfg.is_balanced:
        raise InputError(f"tent inequality needs 1/p - 1/q = a/(2+alpha); got p={cfg.p!r}, q={cfg.q!r}, a={cfg.a!r}")
    tent = Tent(interval)
    lam = 1 - cfg.gap
    lhs = alpha_measure_tent(interval, cfg.alpha)
    u_mass = region_integral(pair.u, tent, cfg.alpha, qc).value
    sigma_mass = region_integral(pair.sigma, tent, cfg.alpha, qc).value
    rhs = u_mass ** (1 / (lam * cfg.q)) * sigma_mass ** (1 / (lam * cfg.p_prime))
    return lhs, rhs
