"""
RunConfig: settings defaults, overlaid by a YAML file, overlaid by flags.
"""
import copy
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import yaml
from django.conf import settings

from .dyadic import TruncatedGrid
from .exceptions import ConfigError, InputError
from .functions import ONE
from .geometry import HalfPlanePoint
from .quadrature import QuadratureConfig
from .schur import OffDiagonalConfig
from .serializers import parse_function
from .weights import ExponentConfig

logger = logging.getLogger(__name__)

SECTIONS = ("quadrature", "grid", "exponents", "functions", "experiment", "output")


def defaults():
    """A deep copy of the ``BERGMAN_LAB`` sections from settings."""
    lab = settings.BERGMAN_LAB
    return {section: copy.deepcopy(lab[section]) for section in SECTIONS}


def default_threads():
    return int(settings.BERGMAN_LAB.get("THREADS", 1))


def _merge(base, overlay, source):
    if not isinstance(overlay, dict):
        raise ConfigError(f"{source}: expected a mapping of sections, got {type(overlay).__name__}")
    for section, values in overlay.items():
        if section not in base:
            raise ConfigError(f"{source}: unknown section {section!r}; expected one of {list(SECTIONS)}")
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ConfigError(f"{source}: section {section!r} must be a mapping")
        for key, value in values.items():
            if key not in base[section]:
                raise ConfigError(f"{source}: unknown key {section}.{key}; expected one of "
                                  f"{sorted(base[section])}")
            base[section][key] = value
    return base


def load_yaml(path):
    try:
        with open(path, encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    return data or {}


@dataclass
class RunConfig:
    command: str
    sections: Dict[str, Dict[str, Any]] = field(default_factory=defaults)
    threads: int = 1

    @classmethod
    def build(cls, command, path=None, overrides: Optional[dict] = None, threads=None):
        """Settings defaults, then the YAML file at ``path``, then ``overrides`` (flags)."""
        sections = defaults()
        if path:
            _merge(sections, load_yaml(path), str(path))
        if overrides:
            _merge(sections, overrides, "command line")
        threads = default_threads() if threads is None else int(threads)
        if threads == 0:
            raise ConfigError("--threads must be nonzero")
        logger.debug("%s config: %s", command, sections)
        return cls(command, sections, threads)

    def section(self, name):
        return self.sections[name]

    def value(self, section, key):
        return self.sections[section][key]

    # ------------------------------------------------------------ typed views

    def quadrature(self) -> QuadratureConfig:
        values = dict(self.sections["quadrature"])
        values["x_range"] = tuple(float(v) for v in values["x_range"])
        return _construct(QuadratureConfig, "quadrature", values)

    def grid(self) -> TruncatedGrid:
        values = dict(self.sections["grid"])
        values["beta"] = str(values["beta"])
        values["x_range"] = tuple(float(v) for v in values["x_range"])
        return _construct(TruncatedGrid, "grid", values)

    def exponents(self, balanced=False) -> ExponentConfig:
        values = self.sections["exponents"]
        if balanced and values["q"] is None:
            return _construct(ExponentConfig.balanced_for, "exponents",
                              {"p": values["p"], "alpha": values["alpha"], "a": values["a"]})
        return _construct(ExponentConfig, "exponents", {"p": values["p"], "q": values["q"], "alpha": values["alpha"],
                                                        "a": values["a"], "balanced": balanced})

    def off_diagonal(self) -> OffDiagonalConfig:
        values = self.sections["exponents"]
        p = float(values["p"])
        q = float(values["q"]) if values["q"] is not None else p
        if values["beta_tgt"] is None:
            return _construct(OffDiagonalConfig.with_default_target, "exponents",
                              {"p": p, "q": q, "alpha_src": values["alpha"], "a": values["a"]})
        return _construct(OffDiagonalConfig, "exponents", {"p": p, "q": q, "alpha_src": values["alpha"],
                                                           "beta_tgt": values["beta_tgt"], "a": values["a"]})

    def function(self, key):
        text = self.sections["functions"][key]
        if text is None:
            return ONE
        return parse_function(str(text))

    def points(self):
        """experiment.points as HalfPlanePoints, or None when unset."""
        raw = self.sections["experiment"]["points"]
        if raw is None:
            return None
        try:
            return [HalfPlanePoint(float(x), float(y)) for x, y in raw]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"experiment.points must be a list of [x, y] pairs: {exc}") from exc


def _construct(factory, section, values):
    try:
        return factory(**values)
    except InputError as exc:
        raise ConfigError(f"invalid {section} section: {exc}") from exc
    except TypeError as exc:
        raise ConfigError(f"invalid {section} section {values}: {exc}") from exc
