"""INI run configuration with strict key checking.

Keys are addressed as ``section.key`` (``crystal.length_m``). Unknown
sections or keys are rejected so that typos cannot silently fall back to
defaults.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
import hashlib
import math
from pathlib import Path

from .dispersion import CrystalSpec, GapSpec, PumpSpec
from .errors import ConfigError
from .grid import RULES, QGrid, default_q_max, make_grid
from .propagator import IntegratorOptions

REQUIRED = object()


def _floats(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


SCHEMA = {
    "crystal": {
        "length_m": (float, REQUIRED),
        "delta_k_per_m": (float, 0.0),
        "pump_wavelength_m": (float, REQUIRED),
        "n_pump": (float, REQUIRED),
        "n_signal": (float, REQUIRED),
    },
    "pump": {
        "fwhm_m": (float, None),
        "sigma_m": (float, None),
    },
    "gap": {
        "distance_m": (float, 0.0),
        "n_pump_air": (float, 1.0),
        "n_signal_air": (float, 1.0),
    },
    "grid": {
        "n": (int, 256),
        "q_max_per_m": (float, None),
        "rule": (str, "trapezoid"),
    },
    "integrator": {
        "steps": (int, 1000),
        "check_convergence": (_bool, False),
    },
    "gain": {
        "value": (float, 1.0),
        "values": (_floats, (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0)),
        "coupling_per_gain": (float, None),
        "calibration_gains": (_floats, (0.5, 1.5, 3.0, 4.5, 6.0, 7.5)),
    },
    "sweep": {
        "distances_m": (_floats, ()),
    },
    "schmidt": {
        "modes": (int, 6),
    },
    "covariance": {
        "shots": (int, 2000),
        "seed": (int, 0),
    },
    "run": {
        "workers": (int, 1),
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration; ``values`` maps ``section.key`` to typed values."""

    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def digest(self) -> str:
        text = "\n".join(f"{k}={self.values[k]!r}" for k in sorted(self.values))
        return hashlib.sha256(text.encode()).hexdigest()

    def crystal(self) -> CrystalSpec:
        return CrystalSpec(length=self["crystal.length_m"], delta_k=self["crystal.delta_k_per_m"],
                           pump_wavelength=self["crystal.pump_wavelength_m"],
                           n_pump=self["crystal.n_pump"], n_signal=self["crystal.n_signal"])

    def pump(self) -> PumpSpec:
        if self["pump.sigma_m"] is not None:
            return PumpSpec(sigma=self["pump.sigma_m"])
        return PumpSpec.from_fwhm(self["pump.fwhm_m"])

    def gap(self, distance: float | None = None) -> GapSpec:
        d = self["gap.distance_m"] if distance is None else distance
        return GapSpec(distance=d, n_pump_air=self["gap.n_pump_air"],
                       n_signal_air=self["gap.n_signal_air"])

    def grid(self) -> QGrid:
        qmax = self["grid.q_max_per_m"]
        if qmax is None:
            qmax = default_q_max(self.crystal(), self.pump())
        return make_grid(qmax, self["grid.n"], self["grid.rule"])

    def integrator(self) -> IntegratorOptions:
        return IntegratorOptions(step_count=self["integrator.steps"],
                                 check_convergence=self["integrator.check_convergence"])


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse INI text into a :class:`RunConfig`.

    Raises:
        ConfigError: on unknown sections or keys, bad values or missing
            required entries.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from exc

    values = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            conv = SCHEMA[section][key][0]
            try:
                values[f"{section}.{key}"] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r} ({exc})") from exc
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val

    for section, keys in SCHEMA.items():
        for key, (_, default) in keys.items():
            name = f"{section}.{key}"
            if name not in values:
                if default is REQUIRED:
                    raise ConfigError(f"missing required key {name}")
                values[name] = default

    for name, val in values.items():
        if isinstance(val, float) and not math.isfinite(val):
            raise ConfigError(f"{name} must be finite")
    if (values["pump.fwhm_m"] is None) == (values["pump.sigma_m"] is None):
        raise ConfigError("give exactly one of pump.fwhm_m and pump.sigma_m")
    if values["grid.rule"] not in RULES:
        raise ConfigError(f"grid.rule must be one of {RULES}")
    cfg = RunConfig(values)
    try:
        cfg.crystal()
        cfg.pump()
        cfg.gap()
        cfg.grid()
        cfg.integrator()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path, overrides: dict | None = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return parse_config(text, overrides)
