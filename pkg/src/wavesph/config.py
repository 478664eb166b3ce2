"""
Run configuration: a flat ``key = value`` text format with ``#`` comments.

Defaults depend on the scenario. Unknown keys, malformed values and violated
constraints raise ConfigError with the offending line number.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .correction import CorrectionConfig, CorrectionMode


class ConfigError(ValueError):
    pass


class ScenarioName(str, enum.Enum):
    STANDING_WAVE = "standing_wave"
    WAVE_TANK = "wave_tank"
    HYDROSTATIC = "hydrostatic"


_DEFAULTS = {
    ScenarioName.STANDING_WAVE: dict(dp=1.0 / 32.0, t_end=20.0, output_interval=0.02),
    ScenarioName.HYDROSTATIC: dict(dp=1.0 / 32.0, t_end=2.0, output_interval=0.02),
    ScenarioName.WAVE_TANK: dict(dp=1.0 / 64.0, t_end=None, output_interval=0.02),
}


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioName = ScenarioName.STANDING_WAVE
    mode: CorrectionMode = CorrectionMode.NONE
    chi: float | None = None
    dp: float | None = None
    h_factor: float = 1.3
    t_end: float | None = None
    output_interval: float | None = None
    snapshot_interval: float | None = None
    out: str = "out"
    threads: int = 1
    cfl: float = 0.3
    tank_length: float = 50.0
    gauges: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "scenario", ScenarioName(self.scenario))
        object.__setattr__(self, "mode", CorrectionMode(self.mode))
        defaults = _DEFAULTS[self.scenario]
        if self.dp is None:
            object.__setattr__(self, "dp", defaults["dp"])
        if self.t_end is None:
            t_end = defaults["t_end"]
            if t_end is None:
                t_end = 68.11 * self.tank_length / 50.0
            object.__setattr__(self, "t_end", t_end)
        if self.output_interval is None:
            interval = defaults["output_interval"]
            object.__setattr__(self, "output_interval", min(interval, self.t_end) if self.t_end > 0 else interval)
        if self.gauges is not None:
            object.__setattr__(self, "gauges", tuple(float(g) for g in self.gauges))
        self.validate()

    def validate(self) -> None:
        if self.mode is CorrectionMode.LOCALIZED and self.chi is None:
            raise ConfigError("chi is required when mode = localized")
        if self.mode is not CorrectionMode.LOCALIZED and self.chi is not None:
            raise ConfigError("chi is only meaningful with mode = localized")
        if self.chi is not None and not self.chi > 0.0:
            raise ConfigError(f"chi must be positive, got {self.chi!r}")
        for name in ("dp", "h_factor", "cfl", "tank_length", "output_interval"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.t_end >= 0.0:
            raise ConfigError(f"t_end must be non-negative, got {self.t_end!r}")
        if self.t_end > 0.0 and self.output_interval > self.t_end:
            raise ConfigError(f"output_interval {self.output_interval} exceeds t_end {self.t_end}")
        if self.snapshot_interval is not None and not self.snapshot_interval > 0.0:
            raise ConfigError("snapshot_interval must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")

    @property
    def correction(self) -> CorrectionConfig:
        chi = math.inf if self.chi is None else self.chi
        return CorrectionConfig(self.mode, chi)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        """Serialize to the config format; parse_config(to_text()) gives back an equal config."""
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, enum.Enum):
                v = v.value
            elif isinstance(v, tuple):
                v = ", ".join(repr(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def _real(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        if "/" in t:
            return float(Fraction(t))
        return float(t)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"expected a real number, got {text.strip()!r}") from None


def _int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ValueError(f"expected an integer, got {text.strip()!r}") from None


def _reals(text: str) -> tuple:
    return tuple(_real(part) for part in text.split(",") if part.strip())


def _choice(enum_type):
    def parse(text: str):
        try:
            return enum_type(text.strip())
        except ValueError:
            options = ", ".join(e.value for e in enum_type)
            raise ValueError(f"expected one of {options}, got {text.strip()!r}") from None
    return parse


_PARSERS = {
    "scenario": _choice(ScenarioName),
    "mode": _choice(CorrectionMode),
    "chi": _real,
    "dp": _real,
    "h_factor": _real,
    "t_end": _real,
    "output_interval": _real,
    "snapshot_interval": _real,
    "out": str.strip,
    "threads": _int,
    "cfl": _real,
    "tank_length": _real,
    "gauges": _reals,
}


def parse_config(text: str, **overrides) -> RunConfig:
    """
    Parse config text. Keyword overrides (e.g. scenario from a command-line
    flag) take precedence over the file; None values are ignored.
    """
    values: dict = {}
    where: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first set on line {where[key]})")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None
        where[key] = lineno
    for key, value in overrides.items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown override {key!r}")
        if value is not None:
            values[key] = value
            where[key] = "command line"
    try:
        return RunConfig(**values)
    except ConfigError as exc:
        culprit = _blame(str(exc), where)
        raise ConfigError(f"{culprit}{exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _blame(message: str, where: dict) -> str:
    # the key named first in the message is its subject
    hits = [(message.find(key), key) for key in where if key in message]
    if not hits:
        return ""
    origin = where[min(hits)[1]]
    return f"line {origin}: " if isinstance(origin, int) else f"{origin}: "
