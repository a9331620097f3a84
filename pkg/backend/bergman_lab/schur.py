"""
Off-diagonal Schur test for T+ with power test functions.

T+ f(z) is the integral of f(w) K(z, w) dV_alpha(w) with
K(z, w) = (Im w)^(a-alpha) |z - conj(w)|^-(1+b). With phi1 = (Im w)^-s and
phi2 = (Im z)^-r both Schur integrals are homogeneous in Im z (resp. Im w),
so their ratios to phi2^p' and phi1^q are constants M1^p' and M2^q.

``omega_param`` below is the scalar a - b - alpha - 1, not a weight.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed

from .exceptions import DivergenceError, InfeasibleError, InputError
from .functions import BoxIndicator, ShiftedKernelPower, SymbolicFunction
from .geometry import Interval, check_alpha
from .measures import lp_norm, lp_power
from .operators import OperatorSpec, norm_ratio
from .quadrature import QuadratureConfig, integrate_half_plane
from .weights import ExponentConfig

logger = logging.getLogger(__name__)

SCAN_POINTS = 256


@dataclass(frozen=True)
class OffDiagonalConfig:
    p: float
    q: float
    alpha_src: float = 0.0
    beta_tgt: float = 0.0
    a: float = 0.0

    def __post_init__(self):
        if not 1 < self.p <= self.q < math.inf:
            raise InputError(f"exponents need 1 < p <= q < inf, got p={self.p!r}, q={self.q!r}")
        check_alpha(self.alpha_src)
        check_alpha(self.beta_tgt)

    @classmethod
    def with_default_target(cls, p, q, alpha_src=0.0, a=0.0):
        """beta = alpha + (2+alpha)(q/p - 1), the order that keeps b = a + 1 for the Bergman case."""
        return cls(p, q, alpha_src, alpha_src + (2 + alpha_src) * (q / p - 1), a)

    @property
    def p_prime(self):
        return self.p / (self.p - 1)

    @property
    def b(self):
        return self.a + 1 - (self.alpha_src + 2) / self.p + (self.beta_tgt + 2) / self.q

    @property
    def omega_param(self):
        return -((self.alpha_src + 2) / self.p_prime + (self.beta_tgt + 2) / self.q)

    @property
    def operator(self):
        return OperatorSpec.general_t_plus(self.a, self.b)

    def metadata(self):
        return {"p": self.p, "q": self.q, "alpha": self.alpha_src, "a": self.a}


def admissibility(cfg: OffDiagonalConfig):
    """alpha + 1 < p(a + 1)."""
    return cfg.alpha_src + 1 < cfg.p * (cfg.a + 1)


def _constraints(cfg: OffDiagonalConfig, r, ordered=True):
    """
    Strict constraints as (name, A, B) with A*s + B > 0; B broadcasts against r.

    ``ordered=False`` drops r > s, which the Schur integrals do not need.
    """
    r = np.asarray(r, dtype=float)
    alpha, beta, p_prime, q = cfg.alpha_src, cfg.beta_tgt, cfg.p_prime, cfg.q
    omega, d = cfg.omega_param, cfg.a - alpha
    lower = ((alpha + 1) * omega - d * (alpha + 2)) / p_prime
    upper = d * (beta + 2) / q
    head = (alpha + 2) / p_prime
    order = [("r > s", -1.0, r)] if ordered else []
    return order + [
        ("r > 0", 0.0, r),
        ("r < (beta+1)/q", 0.0, (beta + 1) / q - r),
        ("middle > lower", omega - d, d * r - lower),
        ("middle < upper", d - omega, upper - d * r),
        ("t > 0", -1.0, head + r),
        ("t < 1", 1.0, (beta + 2) / q - r),
        ("s > -(a-alpha)(1-t)", 1.0 - d / omega, d + d * (head + r) / omega),
        ("s < (alpha+1)/p' + (a-alpha)t", d / omega - 1.0, (alpha + 1) / p_prime - d * (head + r) / omega),
    ]


def constraint_slacks(cfg: OffDiagonalConfig, r, s, ordered=True):
    """Every strict inequality on (r, s), as a positive number when it holds."""
    return {name: float(coef * s + base) for name, coef, base in _constraints(cfg, r, ordered)}


@dataclass(frozen=True)
class SchurParameters:
    r: float
    s: float
    t: float
    one_minus_t: float
    ordered: bool = True

    @classmethod
    def from_rs(cls, cfg: OffDiagonalConfig, r, s, ordered=True):
        slacks = constraint_slacks(cfg, r, s, ordered)
        broken = [name for name, value in slacks.items() if not value > 0]
        if broken:
            raise InfeasibleError(f"(r, s) = ({r!r}, {s!r}) violates {broken} for {cfg}")
        omega = cfg.omega_param
        t = (-(cfg.alpha_src + 2) / cfg.p_prime + s - r) / omega
        one_minus_t = (r - s - (cfg.beta_tgt + 2) / cfg.q) / omega
        return cls(float(r), float(s), float(t), float(one_minus_t), ordered)

    def min_slack(self, cfg: OffDiagonalConfig):
        return min(constraint_slacks(cfg, self.r, self.s, self.ordered).values())


def _s_interval(cfg, r, ordered):
    s_lo = np.full(r.shape, -np.inf)
    s_hi = np.full(r.shape, np.inf)
    ok = np.ones(r.shape, dtype=bool)
    for _, coef, base in _constraints(cfg, r, ordered):
        base = np.broadcast_to(base, r.shape)
        if coef > 0:
            s_lo = np.maximum(s_lo, -base / coef)
        elif coef < 0:
            s_hi = np.minimum(s_hi, -base / coef)
        else:
            ok &= base > 0
    return s_lo, s_hi, ok & (s_lo < s_hi)


def solve_rst(cfg: OffDiagonalConfig, resolution=SCAN_POINTS) -> SchurParameters:
    """
    Schur parameters (r, s, t) with every constraint strict.

    Scans r over midpoints of (0, (beta+1)/q) and, for each r, s over
    midpoints of its exact feasible interval; returns the point of largest
    minimum slack, the first in (r, s) order on ties.

    When a < alpha and beta is close to -1 no point has r > s; the scan is
    then repeated without that constraint.
    """
    if not admissibility(cfg):
        raise InfeasibleError(f"alpha+1 < p(a+1) fails: alpha+1 = {cfg.alpha_src + 1!r}, "
                              f"p(a+1) = {cfg.p * (cfg.a + 1)!r} (p={cfg.p!r}, alpha={cfg.alpha_src!r}, a={cfg.a!r})")
    try:
        return _scan(cfg, resolution, ordered=True)
    except InfeasibleError as exc:
        logger.warning("%s; retrying without r > s", exc)
    return _scan(cfg, resolution, ordered=False)


def _scan(cfg, resolution, ordered):
    top = (cfg.beta_tgt + 1) / cfg.q
    steps = (np.arange(resolution) + 0.5) / resolution
    r = top * steps
    s_lo, s_hi, ok = _s_interval(cfg, r, ordered)
    if not ok.any():
        raise InfeasibleError(f"no r in (0, {top!r}) admits an s for {cfg}")
    r, s_lo, s_hi = r[ok], s_lo[ok], s_hi[ok]
    rr = np.repeat(r[:, None], resolution, axis=1)
    ss = s_lo[:, None] + (s_hi - s_lo)[:, None] * steps[None, :]
    slack = np.full(rr.shape, np.inf)
    for _, coef, base in _constraints(cfg, rr, ordered):
        slack = np.minimum(slack, coef * ss + base)
    best = int(np.argmax(slack))
    if not slack.flat[best] > 0:
        raise InfeasibleError(f"scan at resolution 1/{resolution} found no strictly feasible (r, s) for {cfg}")
    i, j = np.unravel_index(best, slack.shape)
    logger.debug("solve_rst %s: r=%r s=%r min slack %r", cfg, rr[i, j], ss[i, j], slack[i, j])
    return SchurParameters.from_rs(cfg, rr[i, j], ss[i, j], ordered)


def exponent_chains(cfg: OffDiagonalConfig, sp: SchurParameters):
    """
    Both exponent identities as (lhs, rhs) pairs.

    t(1+b)p' + sp' - (a-alpha)tp' - alpha - 2 = rp' and
    (1+b)(1-t)q + rq - beta - 2 = q[(a-alpha)(1-t) + s].
    """
    p_prime, q, b = cfg.p_prime, cfg.q, cfg.b
    d = cfg.a - cfg.alpha_src
    first = (sp.t * (1 + b) * p_prime + sp.s * p_prime - d * sp.t * p_prime - cfg.alpha_src - 2, sp.r * p_prime)
    second = ((1 + b) * sp.one_minus_t * q + sp.r * q - cfg.beta_tgt - 2, q * (d * sp.one_minus_t + sp.s))
    return first, second


# ---------------------------------------------------------------- numerical verification

def _kernel_power_integral(height, order, distance, qc, r_min, r_max):
    """The integral over H of (Im w)^order |z - conj(w)|^-distance dA(w), z = (0, height)."""

    def integrand(x, y):
        v = y + height
        return (x * x + v * v) ** (-distance / 2)

    return integrate_half_plane(integrand, qc, alpha=order, origin_degree=0.0, infinity_degree=-distance,
                                r_min=r_min, r_max=r_max, what=f"Schur integral at height {height!r}")


def _schur_row(cfg, sp, height, qc, r_min, r_max):
    d = cfg.a - cfg.alpha_src
    p_prime, q = cfg.p_prime, cfg.q
    first = _kernel_power_integral(height, d * sp.t * p_prime - sp.s * p_prime + cfg.alpha_src,
                                   sp.t * (1 + cfg.b) * p_prime, qc, r_min, r_max)
    second = _kernel_power_integral(height, -sp.r * q + cfg.beta_tgt, sp.one_minus_t * (1 + cfg.b) * q,
                                    qc, r_min, r_max)
    if not (first.converged and second.converged):
        logger.warning("Schur integrals at height %r did not converge", height)
    ratio_first = first.value / height ** (-sp.r * p_prime)
    ratio_second = height ** (d * sp.one_minus_t * q) * second.value / height ** (-sp.s * q)
    return {"y": height, "ratio_first": ratio_first, "ratio_second": ratio_second}


@dataclass
class SchurReport:
    cfg: OffDiagonalConfig
    parameters: SchurParameters
    rows: List[dict] = field(default_factory=list)

    def _spread(self, key):
        values = [row[key] for row in self.rows]
        return max(values) / min(values) - 1

    @property
    def spread(self):
        return max(self._spread("ratio_first"), self._spread("ratio_second"))

    @property
    def m1(self):
        return max(row["ratio_first"] for row in self.rows) ** (1 / self.cfg.p_prime)

    @property
    def m2(self):
        return max(row["ratio_second"] for row in self.rows) ** (1 / self.cfg.q)

    def is_constant(self, tolerance=0.02):
        return self.spread <= tolerance


def verify_schur_conditions(cfg: OffDiagonalConfig, sp: SchurParameters, samples=10,
                            qc: Optional[QuadratureConfig] = None, heights=None, r_min=2.0 ** -10,
                            r_max=2.0 ** 12, n_jobs=1) -> SchurReport:
    """Both Schur integrals at sample heights in [1/4, 4], divided by phi2^p' and phi1^q."""
    qc = qc or QuadratureConfig()
    heights = list(heights) if heights is not None else list(np.geomspace(0.25, 4.0, samples))
    try:
        rows = Parallel(n_jobs=n_jobs)(delayed(_schur_row)(cfg, sp, float(h), qc, r_min, r_max) for h in heights)
    except DivergenceError as exc:
        raise InfeasibleError(f"Schur integral diverges for (r, s, t) = ({sp.r!r}, {sp.s!r}, {sp.t!r}); "
                              f"the constraints on (r, s) do not hold: {exc}") from exc
    report = SchurReport(cfg, sp, rows)
    logger.info("Schur test for %s: M1=%r M2=%r spread=%r", cfg, report.m1, report.m2, report.spread)
    return report


@dataclass(frozen=True)
class SchurBound:
    lhs: float
    rhs: float

    @property
    def holds(self):
        return self.lhs <= self.rhs


def schur_bound_check(report: SchurReport, f: Optional[SymbolicFunction] = None,
                      qc: Optional[QuadratureConfig] = None, inner_qc: Optional[QuadratureConfig] = None,
                      slack=1e-3, n_jobs=1) -> SchurBound:
    """||T+ f||_{q,beta} over the truncation against (1 + slack) M1 M2 ||f||_{p,alpha}."""
    cfg = report.cfg
    f = f or BoxIndicator(Interval(0.0, 1.0))
    qc = qc or QuadratureConfig(x_range=(-16.0, 16.0), y_max=16.0, nodes=4, radial_layers=12, tolerance=1e-3,
                                max_depth=1)
    near_boundary = cfg.q * min(0.0, cfg.a + 1 - cfg.b)
    ratio = norm_ratio(cfg.operator, f, ExponentConfig(cfg.p, cfg.q, cfg.alpha_src), source_order=cfg.alpha_src,
                       target_order=cfg.beta_tgt, qc=qc, inner_qc=inner_qc, boundary_exponent=near_boundary,
                       n_jobs=n_jobs)
    rhs = (1 + slack) * report.m1 * report.m2 * lp_norm(f, cfg.p, cfg.alpha_src, qc)
    return SchurBound(ratio.numerator, rhs)


def random_configs(rng: np.random.Generator, n, admissible=True, margin=0.05):
    """n configurations on either side of alpha + 1 = p(a + 1)."""
    configs = []
    for _ in range(n):
        p = rng.uniform(1.2, 4.0)
        q = rng.uniform(p, 6.0)
        alpha = rng.uniform(-0.9, 2.0)
        beta = rng.uniform(-0.9, 2.0)
        edge = (alpha + 1) / p - 1
        offset = rng.uniform(margin, 2.0)
        configs.append(OffDiagonalConfig(p, q, alpha, beta, edge + offset if admissible else edge - offset))
    return configs


# ---------------------------------------------------------------- kernel norm scaling

def lemma_norm_scaling(p, nu, gamma, t_values=(0.5, 1.0, 2.0, 4.0), qc: Optional[QuadratureConfig] = None):
    """
    ||((z+it)/i)^-gamma||_{p,nu}^p for each t, with its log-log slope in t.

    The mesh is dilated with t, so the values scale exactly like
    t^(-p gamma + nu + 2) up to rounding. Returns (FitResult, rows).
    """
    from .experiments import fit_loglog

    check_alpha(nu)
    if not gamma > (nu + 2) / p:
        raise DivergenceError(f"||((z+it)/i)^-gamma||_({p!r},{nu!r}) diverges: needs gamma > (nu+2)/p = "
                              f"{(nu + 2) / p!r}, got gamma={gamma!r}")
    qc = qc or QuadratureConfig()
    rows = []
    for t in t_values:
        result = lp_power(ShiftedKernelPower(t, gamma), p, nu, qc.dilated(t))
        rows.append({"nu": nu, "gamma": gamma, "t": t, "norm_power": result.value})
    fit = fit_loglog([(row["t"], row["norm_power"]) for row in rows])
    expected = -p * gamma + nu + 2
    for row in rows:
        row.update(slope=fit.slope, expected_slope=expected, residual=fit.residual)
    return fit, rows
