"""
Scaling experiments: the power-weight sharpness run, the off-diagonal
boundedness sweep, and log-log fitting.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from .exceptions import InputError, NumericalError
from .functions import BoxIndicator, PowerOfHeight, PowerOfModulus, TruncatedPower
from .geometry import Interval
from .measures import lp_norm
from .operators import OperatorSpec, norm_ratio, target_norm
from .quadrature import QuadratureConfig
from .schur import OffDiagonalConfig, admissibility
from .weights import ExponentConfig, SearchFamily, WeightPair, bpq_constant

logger = logging.getLogger(__name__)

DEFAULT_DELTAS = (0.4, 0.2, 0.1, 0.05)
SHARPNESS_OPERATORS = {"fractional_s": OperatorSpec.fractional_s, "fractional_t": OperatorSpec.fractional_t}
DEFAULT_TRUNCATIONS = (32.0, 128.0, 512.0)
STABLE_VARIATION = 0.10
GROWTH_FACTOR = 2.0


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float


def fit_loglog(points) -> FitResult:
    """Least-squares line through (log x, log y); residual is the largest relative miss."""
    points = list(points)
    if len(points) < 3:
        raise InputError(f"a log-log fit needs at least 3 points, got {len(points)}")
    x = np.array([float(px) for px, _ in points])
    y = np.array([float(py) for _, py in points])
    if len(set(x.tolist())) != len(x):
        raise InputError(f"duplicate x in log-log fit: {sorted(x.tolist())}")
    if not (np.all(x > 0) and np.all(y > 0)):
        raise InputError("log-log fit needs positive x and y")
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    fitted = np.exp(intercept + slope * np.log(x))
    residual = float(np.max(np.abs(fitted / y - 1)))
    return FitResult(float(slope), float(intercept), residual)


# ---------------------------------------------------------------- sharpness

def _coarse_outer():
    return QuadratureConfig(nodes=3, angular_layers=4, tolerance=1e-3, max_depth=0)


def _coarse_inner():
    return QuadratureConfig(nodes=4, radial_layers=10, angular_layers=4, tolerance=1e-3, max_depth=0)


@dataclass(frozen=True)
class SharpnessConfig:
    cfg: ExponentConfig
    delta_list: Sequence[float] = DEFAULT_DELTAS
    operator: str = "fractional_s"
    qc: QuadratureConfig = field(default_factory=_coarse_outer)
    inner_qc: QuadratureConfig = field(default_factory=_coarse_inner)
    weight_qc: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        object.__setattr__(self, "delta_list", tuple(float(d) for d in self.delta_list))
        if self.operator not in SHARPNESS_OPERATORS:
            raise InputError(f"sharpness run takes operator {list(SHARPNESS_OPERATORS)}, got {self.operator!r}")
        if not self.cfg.is_balanced:
            raise InputError(f"sharpness run needs 1/p - 1/q = a/(2+alpha); got {self.cfg}")
        if self.cfg.p_prime / self.cfg.q < 1:
            raise InputError(f"sharpness run needs p'/q >= 1, got p'={self.cfg.p_prime!r}, q={self.cfg.q!r}")
        for delta in self.delta_list:
            if not 0 < delta < 1:
                raise InputError(f"delta must lie in (0, 1), got {delta!r}")
        if any(b >= a for a, b in zip(self.delta_list, self.delta_list[1:])):
            raise InputError(f"delta_list must be strictly decreasing, got {self.delta_list}")

    @property
    def expected_slopes(self):
        cfg = self.cfg
        return {"weight": cfg.q / cfg.p_prime, "source": 1 / cfg.p, "ratio": 1 / cfg.p_prime + 1 / cfg.q}

    @property
    def expected_exponent(self):
        """Power of the weight constant in the operator norm bound: (1 - a/(2+alpha)) max{1, p'/q}."""
        cfg = self.cfg
        return (1 - cfg.a / (2 + cfg.alpha)) * max(1.0, cfg.p_prime / cfg.q)

    @property
    def spec(self):
        return SHARPNESS_OPERATORS[self.operator](self.cfg.alpha, self.cfg.a)


def sharpness_weight(cfg: ExponentConfig, delta):
    return PowerOfModulus((2 + cfg.alpha - delta) / cfg.p_prime)


def sharpness_function(cfg: ExponentConfig, delta):
    return TruncatedPower(delta - 2 - cfg.alpha, 1.0)


def _sharpness_row(sc: SharpnessConfig, delta):
    cfg = sc.cfg
    op = sc.spec
    row = {"delta": delta, **cfg.metadata(), "operator": op}
    try:
        omega = sharpness_weight(cfg, delta)
        f = sharpness_function(cfg, delta)
        constant = bpq_constant(WeightPair.of(omega, cfg), cfg, SearchFamily.reduced_for_powers(), sc.weight_qc)
        source = lp_norm(f * omega, cfg.p, cfg.alpha, sc.qc)
        lift = (2 + cfg.alpha - delta) * cfg.q / cfg.p_prime
        result = target_norm(op, f, cfg.q, cfg.alpha, omega,
                             origin_degree=cfg.q * (delta - 2 - cfg.alpha + cfg.a) + lift,
                             infinity_degree=cfg.q * (cfg.a - 2 - cfg.alpha) + lift,
                             boundary_exponent=op.height_power * cfg.q, qc=sc.qc, inner_qc=sc.inner_qc)
        target = result.value ** (1 / cfg.q)
        row.update(weight_constant=constant.value, source_norm=source, target_norm=target,
                   ratio=target / source)
    except NumericalError as exc:
        logger.warning("sharpness row delta=%r failed: %s", delta, exc)
        row["error"] = str(exc)
    return row


def _fit_column(rows, key):
    points = [(1 / row["delta"], row[key]) for row in rows if row.get(key) is not None]
    try:
        return fit_loglog(points)
    except InputError as exc:
        logger.warning("no %s slope: %s", key, exc)
        return None


@dataclass
class SharpnessResult:
    config: SharpnessConfig
    rows: List[dict]
    fits: Dict[str, Optional[FitResult]]

    @property
    def pott_reguera(self):
        """Ratio slope over weight slope times max{1, p'/p}; defined for p = q."""
        cfg = self.config.cfg
        ratio, weight = self.fits.get("ratio"), self.fits.get("weight")
        if cfg.p != cfg.q or ratio is None or weight is None or weight.slope == 0:
            return None
        return ratio.slope / (weight.slope * max(1.0, cfg.p_prime / cfg.p))

    @property
    def weight_exponent(self):
        """Measured power of the weight constant in the ratio: ratio slope over weight slope."""
        ratio, weight = self.fits.get("ratio"), self.fits.get("weight")
        if ratio is None or weight is None or weight.slope == 0:
            return None
        return ratio.slope / weight.slope


def sharpness_run(sc: SharpnessConfig, n_jobs=1, progress=False) -> SharpnessResult:
    """
    Weight constant, source norm and operator ratio for the power weight
    |z|^((2+alpha-delta)/p') and f = |z|^(delta-2-alpha) on the unit disc,
    with their log-log slopes in 1/delta.
    """
    deltas = tqdm(sc.delta_list, desc="Sharpness run", disable=not progress)
    rows = Parallel(n_jobs=n_jobs)(delayed(_sharpness_row)(sc, delta) for delta in deltas)
    fits = {"weight": _fit_column(rows, "weight_constant"), "source": _fit_column(rows, "source_norm"),
            "ratio": _fit_column(rows, "ratio")}
    result = SharpnessResult(sc, rows, fits)
    for row in rows:
        row.update(weight_slope=fits["weight"] and fits["weight"].slope,
                   source_slope=fits["source"] and fits["source"].slope,
                   ratio_slope=fits["ratio"] and fits["ratio"].slope,
                   pott_reguera=result.pott_reguera, weight_exponent=result.weight_exponent)
    logger.info("sharpness slopes of %s for %s: %s (expected %s), weight exponent %s (expected %s)", sc.spec, sc.cfg,
                {k: v and round(v.slope, 4) for k, v in fits.items()}, sc.expected_slopes, result.weight_exponent,
                sc.expected_exponent)
    return result


# ---------------------------------------------------------------- off-diagonal sweep

def sweep_functions(cfg: OffDiagonalConfig):
    """The unit box indicator and y^((a-alpha)/(p-1)) on the unit box."""
    box = BoxIndicator(Interval(0.0, 1.0))
    return [box, PowerOfHeight((cfg.a - cfg.alpha_src) / (cfg.p - 1)) * box]


def _truncated(qc: QuadratureConfig, size):
    return qc.replace(x_range=(-size, size), y_max=size, y_min=1 / size)


def _sweep_cell(cfg, f, size, qc, inner_qc):
    try:
        return norm_ratio(cfg.operator, f, ExponentConfig(cfg.p, cfg.q, cfg.alpha_src),
                          source_order=cfg.alpha_src, target_order=cfg.beta_tgt, qc=_truncated(qc, size),
                          inner_qc=_truncated(inner_qc, size)).ratio
    except NumericalError as exc:
        logger.warning("sweep cell %s, %s, truncation %r failed: %s", cfg, f, size, exc)
        return None


def _verdict(ratios):
    if any(value is None or not math.isfinite(value) for value in ratios):
        return "error"
    if max(ratios) / min(ratios) - 1 < STABLE_VARIATION:
        return "stable"
    if ratios[-1] / ratios[0] >= GROWTH_FACTOR:
        return "growing"
    return "unclear"


def offdiag_sweep(configs: Sequence[OffDiagonalConfig], qc: Optional[QuadratureConfig] = None,
                  inner_qc: Optional[QuadratureConfig] = None, truncations=DEFAULT_TRUNCATIONS, n_jobs=1,
                  progress=False):
    """
    ||T+ f||_{q,beta} / ||f||_{p,alpha} over three growing truncations.

    A configuration is consistent when it is admissible and every test
    function gives a stable ratio, or inadmissible and some ratio grows.
    """
    if len(truncations) != 3:
        raise InputError(f"the sweep uses exactly three truncations, got {list(truncations)}")
    qc = qc or QuadratureConfig(nodes=3, radial_layers=12, angular_layers=3, tolerance=1e-2, max_depth=0)
    inner_qc = inner_qc or QuadratureConfig(nodes=3, radial_layers=10, angular_layers=3, tolerance=1e-2,
                                            max_depth=0)
    cells = [(cfg, f, size) for cfg in configs for f in sweep_functions(cfg) for size in truncations]
    values = Parallel(n_jobs=n_jobs)(delayed(_sweep_cell)(cfg, f, size, qc, inner_qc)
                                     for cfg, f, size in tqdm(cells, desc="Sweep cells", disable=not progress))
    rows, index = [], 0
    for cfg in configs:
        own = []
        for f in sweep_functions(cfg):
            ratios = values[index:index + 3]
            index += 3
            verdict = _verdict(ratios)
            own.append({**cfg.metadata(), "beta_tgt": cfg.beta_tgt, "b": cfg.b, "admissible": admissibility(cfg),
                        "test_function": f, "ratio_small": ratios[0], "ratio_medium": ratios[1],
                        "ratio_large": ratios[2], "verdict": verdict,
                        "growth": ratios[2] / ratios[0] if verdict != "error" else None})
        if admissibility(cfg):
            consistent = all(row["verdict"] == "stable" for row in own)
        else:
            consistent = any(row["verdict"] == "growing" for row in own)
        for row in own:
            row["consistent"] = consistent
        logger.info("sweep %s: admissible=%s verdicts=%s", cfg, admissibility(cfg), [r["verdict"] for r in own])
        rows.extend(own)
    return rows
