"""Plain ``key = value`` run configuration.

One assignment per line, ``#`` starts a comment. Keys are the twelve
model parameters plus the tolerance and grid keys listed in
:data:`EXTRA_KEYS`. Omitted rates and capacities take the table values;
``k1`` and ``k2`` have no default.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from .exceptions import ConfigError, InvalidInputError
from .model import PARAMETER_NAMES, TABLE_VALUES, ModelParams
from .settings import DEFAULT_TOLERANCES, ToleranceSettings

TOLERANCE_KEYS = tuple(f.name for f in dataclasses.fields(ToleranceSettings))
GRID_KEYS = ("n_points", "k1_lo", "k1_hi", "t_end", "ode_tol")
EXTRA_KEYS = TOLERANCE_KEYS + GRID_KEYS
_INTEGER_KEYS = ("n_points",)


@dataclass
class RunConfig:
    values: dict = field(default_factory=lambda: dict(TABLE_VALUES))
    tolerances: ToleranceSettings = DEFAULT_TOLERANCES
    grid: dict = field(default_factory=dict)

    @property
    def k1(self):
        return self.values.get("k1")

    @property
    def k2(self):
        return self.values.get("k2")

    def with_overrides(self, **overrides) -> "RunConfig":
        """Copy with non-``None`` overrides applied (same checks as the parser)."""
        cfg = RunConfig(dict(self.values), self.tolerances, dict(self.grid))
        for key, value in overrides.items():
            if value is not None:
                _assign(cfg, key, float(value), None)
        _check_grid(cfg, None)
        return cfg

    def params(self) -> ModelParams:
        missing = [k for k in ("k1", "k2") if k not in self.values]
        if missing:
            raise InvalidInputError(f"missing parameter(s): {', '.join(missing)}")
        return ModelParams(**self.values)


def _assign(cfg: RunConfig, key: str, value: float, line):
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite", line)
    if key in PARAMETER_NAMES:
        if value <= 0:
            raise ConfigError(f"{key} must be positive, got {value:g}", line)
        cfg.values[key] = value
    elif key in TOLERANCE_KEYS:
        if value <= 0:
            raise ConfigError(f"{key} must be positive, got {value:g}", line)
        cfg.tolerances = dataclasses.replace(cfg.tolerances, **{key: value})
    elif key in GRID_KEYS:
        if key in _INTEGER_KEYS:
            if value != int(value) or value < 2:
                raise ConfigError(f"{key} must be an integer >= 2, got {value:g}", line)
            value = int(value)
        elif value <= 0:
            raise ConfigError(f"{key} must be positive, got {value:g}", line)
        cfg.grid[key] = value
    else:
        raise ConfigError(f"unknown key {key!r}", line)


def _check_grid(cfg: RunConfig, line):
    lo, hi = cfg.grid.get("k1_lo"), cfg.grid.get("k1_hi")
    if lo is not None and hi is not None and not lo < hi:
        raise ConfigError(f"k1_lo = {lo:g} must be below k1_hi = {hi:g}", line)


def parse_config(text: str) -> RunConfig:
    """Parse configuration text; raises :class:`ConfigError` with a line number."""
    cfg = RunConfig()
    seen = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", number)
        seen[key] = number
        try:
            number_value = float(value)
        except ValueError:
            raise ConfigError(f"value of {key!r} is not a number: {value!r}", number) from None
        _assign(cfg, key, number_value, number)
    _check_grid(cfg, None)
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
