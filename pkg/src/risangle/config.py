"""Flat ``key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment. List values are comma
separated (``0, 30, 40``) or an inclusive range ``start:stop:step``.
Angles are in degrees, capacitances in pF, frequencies in GHz, lengths in mm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from risangle.array import RisGeometry
from risangle.circuit import (
    GHZ,
    PF,
    UnitCellModel,
    VaractorModel,
    default_calibration,
    read_calibration_csv,
    read_cv_csv,
)
from risangle.errors import ConfigError, RisError


def inclusive_range(start: float, stop: float, step: float) -> list[float]:
    """start, start+step, ... up to stop inclusive, as ``start + i*step``."""
    if not step > 0:
        raise ConfigError(f"step must be > 0, got {step!r}")
    if stop < start:
        raise ConfigError(f"empty range {start}:{stop}:{step}")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [start + i * step for i in range(n + 1)]


def parse_list(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:step, got {text!r}")
        return inclusive_range(*(float(p) for p in parts))
    return [float(p) for p in text.split(",") if p.strip()]


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    calibration: Path | None = None
    varactor: Path | None = None
    strict_angles: bool = False
    out: Path = Path("out")

    n_columns: int = 64
    m_rows: int = 64
    period_mm: float = 8.0
    freq_ghz: float = 5.195
    z0_ohm: float = 376.73

    freq_start_ghz: float = 4.0
    freq_stop_ghz: float = 7.0
    freq_step_ghz: float = 0.001
    angles_deg: list = field(default_factory=lambda: [0.0, 30.0, 40.0])
    capacitances_pf: list = field(default_factory=lambda: [0.63])

    angle_start_deg: float = 0.0
    angle_stop_deg: float = 89.0
    angle_step_deg: float = 1.0

    theta_in_deg: float = 0.0
    theta_out_deg: float = 30.0
    illumination_deg: float | None = None
    max_infeasible_fraction: float = 0.25
    grid_step_deg: float = 0.1

    theta1_deg: list = field(default_factory=lambda: inclusive_range(-40.0, 40.0, 5.0))
    theta2_deg: list = field(default_factory=lambda: inclusive_range(-40.0, 40.0, 5.0))
    threshold_deg: float = 1.0

    def validate(self):
        if self.n_columns < 2 or self.m_rows < 1:
            raise ConfigError("need n_columns >= 2 and m_rows >= 1")
        for name in ("period_mm", "freq_ghz", "z0_ohm", "freq_step_ghz", "angle_step_deg", "grid_step_deg"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if self.freq_start_ghz <= 0 or self.freq_stop_ghz < self.freq_start_ghz:
            raise ConfigError("frequency range must be positive and non-empty")
        if self.angle_stop_deg < self.angle_start_deg:
            raise ConfigError("angle range is empty")
        if not (0 <= self.angle_start_deg and self.angle_stop_deg < 90):
            raise ConfigError("angle sweep must lie in [0, 90) degrees")
        for name in ("angles_deg", "capacitances_pf", "theta1_deg", "theta2_deg"):
            values = getattr(self, name)
            if not values:
                raise ConfigError(f"{name} must not be empty")
        for name in ("angles_deg", "theta1_deg", "theta2_deg"):
            if any(abs(a) >= 90 for a in getattr(self, name)):
                raise ConfigError(f"{name}: angles must satisfy |angle| < 90")
        if any(c <= 0 for c in self.capacitances_pf):
            raise ConfigError("capacitances must be > 0")
        if not 0.0 <= self.max_infeasible_fraction <= 1.0:
            raise ConfigError("max_infeasible_fraction must be in [0, 1]")
        if self.threshold_deg < 0:
            raise ConfigError("threshold_deg must be >= 0")
        for p in (self.calibration, self.varactor):
            if p is not None and not Path(p).is_file():
                raise ConfigError(f"file not found: {p}")
        return self

    def geometry(self) -> RisGeometry:
        return RisGeometry(self.n_columns, self.period_mm * 1e-3, self.freq_ghz * GHZ, self.m_rows)

    def model(self) -> UnitCellModel:
        try:
            table = read_calibration_csv(self.calibration) if self.calibration else default_calibration()
            varactor = read_cv_csv(self.varactor) if self.varactor else VaractorModel()
        except (ValueError, RisError) as exc:
            raise ConfigError(str(exc)) from exc
        mode = "strict" if self.strict_angles else "clamp"
        return UnitCellModel(table, varactor, self.z0_ohm, angle_mode=mode)

    def frequencies(self) -> list[float]:
        return [f * GHZ for f in inclusive_range(self.freq_start_ghz, self.freq_stop_ghz, self.freq_step_ghz)]

    def capacitances(self) -> list[float]:
        return [c * PF for c in self.capacitances_pf]


_LIST_KEYS = {"angles_deg", "capacitances_pf", "theta1_deg", "theta2_deg"}
_PATH_KEYS = {"calibration", "varactor", "out"}
_BOOL_KEYS = {"strict_angles"}
_INT_KEYS = {"n_columns", "m_rows"}


def _coerce(key, raw, base: Path):
    if key in _LIST_KEYS:
        return parse_list(raw)
    if key in _PATH_KEYS:
        p = Path(raw.strip())
        return p if p.is_absolute() else base / p
    if key in _BOOL_KEYS:
        return parse_bool(raw)
    if key in _INT_KEYS:
        return int(raw)
    if key == "illumination_deg" and raw.strip().lower() in ("", "none"):
        return None
    return float(raw)


def parse_config_text(text: str, base: Path = Path(".")) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, raw, base)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    return parse_config_text(text, path.parent)


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
