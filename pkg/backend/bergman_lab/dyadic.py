"""
The dyadic grids D^0 and D^(1/3), the model operators built on their boxes,
and fractional dyadic maximal functions.

Grid elements are kept as exact rationals so nestedness and tiling hold
without rounding; only values handed to quadrature are converted to floats.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from .exceptions import DegenerateAverageError, DivergenceError, InputError
from .functions import BoxIndicator, Scalar, SymbolicFunction
from .geometry import CarlesonBox, HalfPlanePoint, Interval, Rectangle, Tent, check_alpha
from .measures import lp_power, region_integral
from .quadrature import CompensatedSum, QuadratureConfig
from .weights import GRID_TAGS, ExponentConfig

logger = logging.getLogger(__name__)


def _tag(beta):
    beta = Fraction(beta).limit_denominator(1000)
    if beta not in GRID_TAGS:
        raise InputError(f"grid tag must be one of {[str(b) for b in GRID_TAGS]}, got {beta}")
    return beta


@dataclass(frozen=True, order=True)
class DyadicIndex:
    j: int
    m: int
    beta: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "beta", _tag(self.beta))

    @property
    def shift(self):
        return self.beta if self.j % 2 == 0 else -self.beta

    @property
    def exact_left(self):
        return Fraction(2) ** self.j * (self.m + self.shift)

    @property
    def exact_length(self):
        return Fraction(2) ** self.j

    def interval(self):
        return Interval(float(self.exact_left), float(self.exact_length))

    def box(self):
        return CarlesonBox(self.interval())

    def tent(self):
        return Tent(self.interval())

    def parent(self):
        """The member one scale up whose interval contains this one."""
        size = Fraction(2) ** (self.j + 1)
        shift = self.beta if (self.j + 1) % 2 == 0 else -self.beta
        return DyadicIndex(self.j + 1, math.floor(self.exact_left / size - shift), self.beta)

    def __str__(self):
        return f"(j={self.j}, m={self.m}, beta={self.beta})"


def interval_of(idx: DyadicIndex) -> Interval:
    return idx.interval()


@dataclass(frozen=True)
class TruncatedGrid:
    beta: Fraction = Fraction(0)
    j_min: int = -14
    j_max: int = 7
    x_range: Tuple[float, float] = (-64.0, 64.0)

    def __post_init__(self):
        object.__setattr__(self, "beta", _tag(self.beta))
        if self.j_min > self.j_max:
            raise InputError(f"grid scales need j_min <= j_max, got {self.j_min} > {self.j_max}")
        if not self.x_range[0] < self.x_range[1]:
            raise InputError(f"grid x_range must be increasing, got {self.x_range!r}")

    def with_tag(self, beta):
        return TruncatedGrid(beta, self.j_min, self.j_max, self.x_range)

    def deepened(self, factor=2):
        return TruncatedGrid(self.beta, self.j_min * factor, max(self.j_max * factor, self.j_max), self.x_range)

    def _shift(self, j):
        return self.beta if j % 2 == 0 else -self.beta

    def positions(self, j, x0, x1):
        """Positions m whose interval at scale j meets [x0, x1)."""
        size = Fraction(2) ** j
        shift = self._shift(j)
        lo = max(Fraction(x0), Fraction(self.x_range[0]))
        hi = min(Fraction(x1), Fraction(self.x_range[1]))
        first = math.floor(lo / size - shift) - 1
        last = math.ceil(hi / size - shift) + 1
        return [m for m in range(first, last + 1)
                if size * (m + shift) < hi and size * (m + 1 + shift) > lo]

    def members(self, region: Optional[Rectangle] = None) -> List[DyadicIndex]:
        """Members whose boxes meet ``region``, sorted by (j, m)."""
        if region is None:
            region = Rectangle(self.x_range[0], self.x_range[1], 0.0, 2.0 ** self.j_max)
        found = []
        for j in range(self.j_min, self.j_max + 1):
            if not 2.0 ** j > region.y0:
                continue
            found.extend(DyadicIndex(j, m, self.beta) for m in self.positions(j, region.x0, region.x1))
        return found

    def member_at(self, j, x):
        if not self.j_min <= j <= self.j_max:
            return None
        if not self.x_range[0] <= x < self.x_range[1]:
            return None
        size = Fraction(2) ** j
        return DyadicIndex(j, math.floor(Fraction(x) / size - self._shift(j)), self.beta)

    def containing(self, z: HalfPlanePoint) -> List[DyadicIndex]:
        """Members whose box contains z, smallest first."""
        found = []
        for j in range(self.j_min, self.j_max + 1):
            if z.y < 2.0 ** j:
                idx = self.member_at(j, z.x)
                if idx is not None:
                    found.append(idx)
        return found

    def tent_of(self, z: HalfPlanePoint) -> Optional[DyadicIndex]:
        """The member whose tent contains z: 2^(j-1) <= y < 2^j."""
        return self.member_at(math.frexp(z.y)[1], z.x)


def grid_members(g: TruncatedGrid, region: Rectangle) -> List[DyadicIndex]:
    return g.members(region)


# ---------------------------------------------------------------- pairings

def box_pairing(f: SymbolicFunction, interval: Interval, alpha, qc: QuadratureConfig):
    """<f, 1_{Q_I}>_alpha, in closed form for constants and box indicators."""
    c, rest = f.split_scalar()
    if isinstance(rest, Scalar):
        return c * rest.value * interval.length ** (2 + alpha) / (1 + alpha)
    if isinstance(rest, BoxIndicator):
        other = rest.base
        overlap = min(interval.right, other.right) - max(interval.left, other.left)
        if overlap <= 0:
            return 0.0
        return c * overlap * min(interval.length, other.length) ** (1 + alpha) / (1 + alpha)
    return c * region_integral(rest, CarlesonBox(interval), alpha, qc).value


def _normalisation(interval: Interval, cfg: ExponentConfig):
    return interval.length ** (cfg.a - (2 + cfg.alpha))


def dyadic_model_terms(f: SymbolicFunction, cfg: ExponentConfig, g: TruncatedGrid, z: HalfPlanePoint,
                       qc: QuadratureConfig):
    """(index, |I|^a <f, 1_{Q_I}/|I|^(2+alpha)>_alpha) for every box containing z."""
    members = g.containing(z)
    if not members:
        logger.warning("no box of grid beta=%s, j in [%d, %d] contains %s", g.beta, g.j_min, g.j_max, z)
    terms = []
    for idx in members:
        interval = idx.interval()
        terms.append((idx, _normalisation(interval, cfg) * box_pairing(f, interval, cfg.alpha, qc)))
    return terms


def dyadic_model_apply(f: SymbolicFunction, cfg: ExponentConfig, g: TruncatedGrid, z: HalfPlanePoint,
                       qc: Optional[QuadratureConfig] = None):
    """Q^beta_{alpha,a} f(z) summed over the truncated grid."""
    qc = qc or QuadratureConfig()
    acc = CompensatedSum()
    for _, term in dyadic_model_terms(f, cfg, g, z, qc):
        acc.add(term)
    return acc.value


def fractional_maximal(f: SymbolicFunction, w: SymbolicFunction, cfg: ExponentConfig, g: TruncatedGrid,
                       z: HalfPlanePoint, qc: Optional[QuadratureConfig] = None, members=None):
    """M^beta_{w,alpha,a} f(z): the largest fractional w-average over boxes containing z."""
    qc = qc or QuadratureConfig()
    best = 0.0
    for idx in (members if members is not None else g.containing(z)):
        best = max(best, fractional_average(f, w, cfg, idx.interval(), qc))
    return best


def fractional_average(f, w, cfg: ExponentConfig, interval: Interval, qc: QuadratureConfig):
    box = CarlesonBox(interval)
    try:
        mass = region_integral(w, box, cfg.alpha, qc).value
    except DivergenceError as exc:
        raise DegenerateAverageError(f"|Q_{interval}|_({w}, {cfg.alpha!r}) diverges: {exc}") from exc
    if not (math.isfinite(mass) and mass > 0):
        raise DegenerateAverageError(f"|Q_{interval}|_({w}, {cfg.alpha!r}) = {mass!r}")
    return region_integral(f * w, box, cfg.alpha, qc).value / mass ** (1 - cfg.gap)


# ---------------------------------------------------------------- tiling

@dataclass
class TilingReport:
    samples: int
    violations: List[Tuple[float, float, int]] = field(default_factory=list)
    region: Optional[Rectangle] = None

    @property
    def ok(self):
        return not self.violations


def tent_counts(g: TruncatedGrid, x, y, region: Rectangle):
    """Number of member tents containing each point (x[i], y[i])."""
    counts = np.zeros(len(x), dtype=int)
    for j in range(g.j_min, g.j_max + 1):
        positions = g.positions(j, region.x0, region.x1)
        if not positions:
            continue
        size = 2.0 ** j
        shift = float(g._shift(j))
        m = np.asarray(positions, dtype=float)
        lefts = (m + shift) * size
        rights = (m + 1 + shift) * size
        inside_x = np.searchsorted(lefts, x, side="right") - np.searchsorted(rights, x, side="right")
        in_band = (y >= size / 2) & (y < size)
        counts += np.where(in_band, inside_x, 0)
    return counts


def tent_tiling_check(g: TruncatedGrid, region: Rectangle, samples=10_000, seed=0, points=None):
    """Every sample point of the region must lie in exactly one tent of the grid."""
    covered = region.intersect(Rectangle(region.x0, region.x1, 2.0 ** (g.j_min - 1), 2.0 ** g.j_max))
    if covered is None:
        raise InputError(f"region {region} lies outside the heights covered by j in [{g.j_min}, {g.j_max}]")
    if points is None:
        rng = np.random.default_rng(seed)
        x = rng.uniform(covered.x0, covered.x1, samples)
        y = rng.uniform(covered.y0, covered.y1, samples)
    else:
        x = np.asarray([p[0] for p in points], dtype=float)
        y = np.asarray([p[1] for p in points], dtype=float)
    counts = tent_counts(g, x, y, covered)
    bad = np.flatnonzero(counts != 1)
    report = TilingReport(len(x), [(float(x[i]), float(y[i]), int(counts[i])) for i in bad], covered)
    if bad.size:
        logger.warning("%d of %d points are not covered by exactly one tent", bad.size, len(x))
    return report


# ---------------------------------------------------------------- pairing forms

def _pairing_window(f, g):
    """Hull of the two supports; boxes meeting neither contribute nothing."""
    everywhere = Rectangle(-math.inf, math.inf, 0.0, math.inf)
    rects = [h.support().bounding_rectangle(everywhere) for h in (f, g)]
    if any(rect is None for rect in rects):
        return None
    if not all(math.isfinite(v) for rect in rects for v in (rect.x0, rect.x1, rect.y1)):
        raise InputError(f"model pairing needs compactly supported functions, got {f} and {g}")
    return Rectangle(min(r.x0 for r in rects), max(r.x1 for r in rects), 0.0, max(r.y1 for r in rects))


def _box_vectors(f, g, cfg, lefts, size):
    """<f, 1_Q><g, 1_Q> for box indicators f, g at one scale, vectorized over lefts."""
    out = []
    for h in (f, g):
        c, rest = h.split_scalar()
        base = rest.base
        overlap = np.clip(np.minimum(lefts + size, base.right) - np.maximum(lefts, base.left), 0.0, None)
        out.append(c * overlap * min(size, base.length) ** (1 + cfg.alpha) / (1 + cfg.alpha))
    return out


def model_pairing(f: SymbolicFunction, g: SymbolicFunction, cfg: ExponentConfig, grid: TruncatedGrid,
                  qc: Optional[QuadratureConfig] = None, order="left"):
    """
    <Q^beta_{alpha,a} f, g>_alpha from the box expansion.

    ``order="left"`` sums (c_I(f)) <1_Q, g>, ``order="right"`` sums
    <f, 1_Q> (c_I(g)), i.e. <f, Q g>_alpha.
    """
    qc = qc or QuadratureConfig()
    check_alpha(cfg.alpha)
    rect = _pairing_window(f, g)
    if rect is None:
        return 0.0
    boxes = all(isinstance(h.split_scalar()[1], BoxIndicator) for h in (f, g))
    acc = CompensatedSum()
    for j in range(grid.j_min, grid.j_max + 1):
        positions = grid.positions(j, rect.x0, rect.x1)
        if not positions:
            continue
        size = 2.0 ** j
        norm = size ** (cfg.a - (2 + cfg.alpha))
        if boxes:
            lefts = (np.asarray(positions, dtype=float) + float(grid._shift(j))) * size
            pf, pg = _box_vectors(f, g, cfg, lefts, size)
        else:
            intervals = [DyadicIndex(j, m, grid.beta).interval() for m in positions]
            pf = np.array([box_pairing(f, i, cfg.alpha, qc) for i in intervals])
            pg = np.array([box_pairing(g, i, cfg.alpha, qc) for i in intervals])
        acc.add(float(np.dot(norm * pf, pg)) if order == "left" else float(np.dot(pf, norm * pg)))
    return acc.value


# ---------------------------------------------------------------- maximal norm

def maximal_norm_ratio(f: SymbolicFunction, w: SymbolicFunction, cfg: ExponentConfig, grid: TruncatedGrid,
                       qc: Optional[QuadratureConfig] = None):
    """
    ||M^beta_{w,alpha,a} f||_{L^q(w dV_alpha)} / ||f||_{L^p(w dV_alpha)} over the truncated grid.

    M f is constant on every tent (the boxes containing a point of T_I are
    I and its ancestors), so the numerator is a finite sum over tents.
    """
    qc = qc or QuadratureConfig()
    members = grid.members()
    averages = {idx: fractional_average(f, w, cfg, idx.interval(), qc) for idx in members}
    maximal = {}
    for idx in sorted(members, key=lambda i: -i.j):
        parent = idx.parent()
        maximal[idx] = max(averages[idx], maximal.get(parent, 0.0))
    acc = CompensatedSum()
    for idx in members:
        if maximal[idx] > 0:
            acc.add(maximal[idx] ** cfg.q * region_integral(w, idx.tent(), cfg.alpha, qc).value)
    source = lp_power(f * w.power(1.0 / cfg.p), cfg.p, cfg.alpha, qc).value
    if not source > 0:
        raise DegenerateAverageError(f"||{f}||_(L^p(w dV_alpha)) vanishes")
    return acc.value ** (1 / cfg.q) / source ** (1 / cfg.p)


# ---------------------------------------------------------------- domination

@dataclass
class DominationReport:
    rows: List[dict]

    @property
    def ratios(self):
        return [row["ratio"] for row in self.rows if row["ratio"] is not None]

    @property
    def max_ratio(self):
        return max(self.ratios)

    @property
    def min_ratio(self):
        return min(self.ratios)

    @property
    def spread(self):
        return self.max_ratio / self.min_ratio


def domination_ratio(f: SymbolicFunction, cfg: ExponentConfig, grid: TruncatedGrid, z: HalfPlanePoint,
                     qc: QuadratureConfig, s_qc: Optional[QuadratureConfig] = None):
    """(S_{alpha,a} f(z), Q^0 f(z) + Q^(1/3) f(z), their ratio)."""
    from .operators import OperatorSpec, apply

    s_value = apply(OperatorSpec.fractional_s(cfg.alpha, cfg.a), f, z, s_qc or qc).value
    model = sum(dyadic_model_apply(f, cfg, grid.with_tag(beta), z, qc) for beta in GRID_TAGS)
    return s_value, model, (s_value / model if model > 0 else None)


def sample_points(n, seed=0, x_range=(-2.0, 2.0), y_range=(2.0 ** -8, 2.0 ** 3)):
    """Points with x uniform and log2(y) uniform over the ranges."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(x_range[0], x_range[1], n)
    ys = 2.0 ** rng.uniform(math.log2(y_range[0]), math.log2(y_range[1]), n)
    return [HalfPlanePoint(float(x), float(y)) for x, y in zip(xs, ys)]


def domination_run(functions, cfg: ExponentConfig, points, grid: Optional[TruncatedGrid] = None,
                   qc: Optional[QuadratureConfig] = None, s_qc: Optional[QuadratureConfig] = None, n_jobs=1):
    grid = grid or TruncatedGrid()
    qc = qc or QuadratureConfig()
    tasks = [(f, z) for f in functions for z in points]
    results = Parallel(n_jobs=n_jobs)(delayed(domination_ratio)(f, cfg, grid, z, qc, s_qc) for f, z in tasks)
    rows = []
    for (f, z), (s_value, model, ratio) in zip(tasks, results):
        if ratio is None:
            logger.warning("model sum vanishes for %s at %s", f, z)
        rows.append({"function": f, "x": z.x, "y": z.y, "s_value": s_value, "model_sum": model, "ratio": ratio})
    return DominationReport(rows)
