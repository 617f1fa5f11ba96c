"""Run configuration, flat key/value config files and figure presets."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

from .channel import ChannelParams, GainMode
from .decoy import DecoyProtocol
from .errors import DomainError
from .planner import MuGrid
from .sources import HeraldingDetector, HSPSSource, WCPSource


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a run. Defaults reproduce the standard 25 km setup."""

    source: str = "wcp"
    mu: float = 0.625
    # heralding detector (HSPS only)
    stages: int = 2
    eta_a: float = 0.85
    d_a: float = 1e-8
    # channel
    loss_db_per_km: float = 0.2
    length_km: float = 25.0
    server_transmittance: float = 0.45
    server_efficiency: float = 0.1
    dark_count: float = 6e-6
    # protocol
    decoy1: float = 0.125
    decoy2: float = 0.0
    signal_fraction: float = 0.9
    security_rate: float = 1e-3
    size: int = 1
    mode: str = "exact"
    # grids
    mu_min: float = 0.13
    mu_max: float = 2.0
    mu_step: float = 0.005
    length_min: float = 5.0
    length_max: float = 200.0
    length_step: float = 5.0
    workers: int = 1
    seed: int = 0

    def source_model(self):
        if self.source == "wcp":
            return WCPSource(self.mu)
        if self.source == "hsps":
            return HSPSSource(self.mu, HeraldingDetector(self.stages, self.eta_a, self.d_a))
        raise DomainError(f"source must be 'wcp' or 'hsps', got {self.source!r}")

    def channel(self) -> ChannelParams:
        return ChannelParams(
            self.loss_db_per_km,
            self.length_km,
            self.server_transmittance,
            self.server_efficiency,
            self.dark_count,
        )

    def protocol(self) -> DecoyProtocol:
        return DecoyProtocol(self.decoy1, self.decoy2, self.signal_fraction, self.security_rate)

    def gain_mode(self) -> GainMode:
        try:
            return GainMode(self.mode)
        except ValueError:
            raise DomainError(f"mode must be 'exact' or 'paper-approx', got {self.mode!r}") from None

    def mu_values(self) -> np.ndarray:
        return _grid(self.mu_min, self.mu_max, self.mu_step)

    def lengths(self) -> np.ndarray:
        return _grid(self.length_min, self.length_max, self.length_step)

    def mu_grid(self) -> MuGrid:
        return MuGrid(stop=self.mu_max, step=self.mu_step)


def _grid(start, stop, step):
    if step <= 0:
        raise DomainError(f"grid step must be positive, got {step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(max(count, 0)), 12)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def coerce(key: str, value: str):
    """Convert a textual value to the type of ``RunConfig.<key>``."""
    key = key.strip().replace("-", "_")
    if key not in _FIELD_TYPES:
        raise DomainError(f"unknown config key {key!r}")
    kind = _FIELD_TYPES[key]
    value = value.strip()
    try:
        if kind == "int":
            return key, int(value)
        if kind == "float":
            return key, float(value)
    except ValueError:
        raise DomainError(f"bad value for {key}: {value!r}") from None
    return key, value


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = coerce(*line.split("=", 1))
        values[key] = value
    return values


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


@dataclass(frozen=True)
class FigurePreset:
    """A figure: its kind of sweep and one config per plotted curve."""

    id: str
    kind: str  # "mu" or "distance"
    description: str
    curves: dict[str, RunConfig] = field(default_factory=dict)


_BASE = RunConfig()
_WCP = replace(_BASE, source="wcp")


def _hsps(eta_a, d_a, **kw):
    return replace(_BASE, source="hsps", eta_a=eta_a, d_a=d_a, **kw)


_MU_SWEEP = dict(mu_min=0.13, mu_max=1.5, mu_step=0.005)
_NEAR = dict(length_min=5.0, length_max=150.0, length_step=5.0)
_FAR = dict(length_min=10.0, length_max=1000.0, length_step=10.0)

PRESETS = {
    "fig1": FigurePreset(
        "fig1",
        "mu",
        "S/N versus mu at 25 km (eta_A = 0.85, d_A = 1e-8)",
        {"wcp": replace(_WCP, **_MU_SWEEP), "hsps": _hsps(0.85, 1e-8, **_MU_SWEEP)},
    ),
    "fig2": FigurePreset(
        "fig2",
        "mu",
        "S/N versus mu at 25 km (eta_A = 0.04, d_A = 1e-12)",
        {"wcp": replace(_WCP, **_MU_SWEEP), "hsps": _hsps(0.04, 1e-12, **_MU_SWEEP)},
    ),
    "fig3": FigurePreset(
        "fig3",
        "distance",
        "S/N versus distance (eta_A = 0.85, d_A = 1e-8)",
        {"wcp": replace(_WCP, **_NEAR), "hsps": _hsps(0.85, 1e-8, **_NEAR)},
    ),
    "fig4": FigurePreset(
        "fig4",
        "distance",
        "S/N versus distance up to 1000 km (eta_A = 0.85, d_A = 1e-8)",
        {"wcp": replace(_WCP, **_FAR), "hsps": _hsps(0.85, 1e-8, **_FAR)},
    ),
    "fig5": FigurePreset(
        "fig5",
        "distance",
        "S/N versus distance (eta_A = 1.0, d_A = 1e-8)",
        {"wcp": replace(_WCP, **_NEAR), "hsps": _hsps(1.0, 1e-8, **_NEAR)},
    ),
    "fig6": FigurePreset(
        "fig6",
        "distance",
        "S/N versus distance: WCP, HSPS (1.0, 1e-8), HSPS (1.0, 1e-12)",
        {
            "wcp": replace(_WCP, **_FAR),
            "hsps_d8": _hsps(1.0, 1e-8, **_FAR),
            "hsps_d12": _hsps(1.0, 1e-12, **_FAR),
        },
    ),
}

