"""Channel transmittance, per-photon-number yields, gains and error rates.

Two gain models are available through :class:`GainMode`:

``EXACT``
    Full photon-number sums. WCP: ``Q = 1 - (1 - Y0) exp(-T mu)``.
    HSPS: ``Q = Y0 X d_A / (1 + mu) + sum_{i>=1} Y_i P(1|i) thermal(mu, i)``
    where ``Y_i = 1 - (1 - T)**i`` is the probability that at least one of
    the ``i`` heralded photons is detected. Bob's dark counts only appear in
    the vacuum-herald term, so the heralding gate suppresses them.
``PAPER_APPROX``
    Linearised gains ``Q = Y0 + T mu`` (WCP) and ``Q = Y0 + T mu_thermal``
    (HSPS), with ``mu_thermal`` from :func:`rbsp.sources.heralded_single_mean`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UndefinedRateError, VariantError
from .sources import (
    TRUNCATION_CAP,
    HSPSSource,
    WCPSource,
    heralded_single_mean,
    single_click_probabilities,
    thermal_pmf_array,
    truncated_sum,
)


class GainMode(enum.Enum):
    EXACT = "exact"
    PAPER_APPROX = "paper-approx"


@dataclass(frozen=True)
class ChannelParams:
    """Fiber link plus the server's receiver.

    Defaults are the standard parameter set: 0.2 dB/km fiber over 25 km,
    server transmittance 0.45, server detector efficiency 0.1 and a server
    dark-count probability of 6e-6 per gate.
    """

    loss_db_per_km: float = 0.2
    length_km: float = 25.0
    server_transmittance: float = 0.45
    server_efficiency: float = 0.1
    dark_count: float = 6e-6

    def __post_init__(self):
        if not self.loss_db_per_km >= 0:
            raise DomainError(f"fiber loss must be >= 0 dB/km, got {self.loss_db_per_km!r}")
        if not self.length_km >= 0:
            raise DomainError(f"fiber length must be >= 0 km, got {self.length_km!r}")
        for name in ("server_transmittance", "server_efficiency", "dark_count"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value!r}")

    def at_length(self, length_km: float) -> "ChannelParams":
        return ChannelParams(
            self.loss_db_per_km,
            length_km,
            self.server_transmittance,
            self.server_efficiency,
            self.dark_count,
        )


@dataclass(frozen=True)
class ErrorModel:
    """Error probability of vacuum-triggered and photon-triggered detections."""

    vacuum_error: float = 0.5
    detection_error: float = 0.0

    def __post_init__(self):
        for name in ("vacuum_error", "detection_error"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def transmittance(ch: ChannelParams) -> float:
    """Overall transmittance ``10**(-alpha L / 10) * t_s * eta_s``."""
    return 10.0 ** (-ch.loss_db_per_km * ch.length_km / 10.0) * ch.server_transmittance * ch.server_efficiency


def yield_n(n: int, T: float, y0: float) -> float:
    """Detection probability for an ``n``-photon pulse: ``1 - (1 - Y0)(1 - T)**n``."""
    if int(n) != n or n < 0:
        raise DomainError(f"photon count must be a non-negative integer, got {n!r}")
    return -math.expm1(math.log1p(-y0) + n * math.log1p(-T)) if T < 1 else 1.0


def _clamp(q: float) -> float:
    return min(max(q, 0.0), 1.0)


def gain_wcp(mu: float, ch: ChannelParams, mode: GainMode = GainMode.EXACT) -> float:
    """Gain of a WCP of intensity ``mu``."""
    if not mu >= 0:
        raise DomainError(f"intensity must be >= 0, got {mu!r}")
    T, y0 = transmittance(ch), ch.dark_count
    if mode is GainMode.PAPER_APPROX:
        return _clamp(y0 + T * mu)
    return _clamp(y0 - (1.0 - y0) * math.expm1(-T * mu))


def _require_hsps(source) -> HSPSSource:
    if not isinstance(source, HSPSSource):
        raise VariantError(f"expected an HSPSSource, got {type(source).__name__}")
    return source


def _heralded_terms(source: HSPSSource, T: float) -> np.ndarray:
    """``Y_i P(1|i) thermal(mu, i)`` for ``i = 0..cap`` (the ``i = 0`` entry is zero)."""
    i = np.arange(TRUNCATION_CAP + 1)
    photon_yield = -np.expm1(i * np.log1p(-T)) if T < 1 else (i > 0).astype(float)
    return photon_yield * single_click_probabilities(source.detector) * thermal_pmf_array(source.mu)


def _dark_herald_term(source: HSPSSource, ch: ChannelParams) -> float:
    det = source.detector
    return ch.dark_count * det.modes * det.dark_rate / (1.0 + source.mu)


def gain_hsps(source: HSPSSource, ch: ChannelParams, mode: GainMode = GainMode.EXACT) -> float:
    """Gain of the heralded source, counting only single-click heralds."""
    source = _require_hsps(source)
    T = transmittance(ch)
    if mode is GainMode.PAPER_APPROX:
        return _clamp(ch.dark_count + T * heralded_single_mean(source))
    return _clamp(_dark_herald_term(source, ch) + truncated_sum(_heralded_terms(source, T)))


def error_rate_hsps(
    source: HSPSSource,
    ch: ChannelParams,
    err: ErrorModel = ErrorModel(),
    mode: GainMode = GainMode.EXACT,
) -> float:
    """Error rate ``E_mu`` of the heralded source's detections."""
    source = _require_hsps(source)
    q = gain_hsps(source, ch, mode)
    if q == 0.0:
        raise UndefinedRateError("error rate is undefined for zero gain")
    T = transmittance(ch)
    if mode is GainMode.PAPER_APPROX:
        weighted = err.vacuum_error * ch.dark_count + err.detection_error * T * heralded_single_mean(source)
    else:
        weighted = err.vacuum_error * _dark_herald_term(source, ch) + err.detection_error * truncated_sum(
            _heralded_terms(source, T)
        )
    return _clamp(weighted / q)


def gain(source, ch: ChannelParams, mode: GainMode = GainMode.EXACT) -> float:
    """Gain of either source kind."""
    if isinstance(source, WCPSource):
        return gain_wcp(source.mu, ch, mode)
    return gain_hsps(source, ch, mode)


def dark_count_floor(source, ch: ChannelParams, mode: GainMode = GainMode.EXACT) -> float:
    """Limit of :func:`gain` as the transmittance goes to zero."""
    if isinstance(source, HSPSSource) and mode is GainMode.EXACT:
        return _dark_herald_term(source, ch)
    if not isinstance(source, (WCPSource, HSPSSource)):
        raise VariantError(f"unknown source type {type(source).__name__}")
    return ch.dark_count


def gain_decoys(protocol, source, ch: ChannelParams, mode: GainMode = GainMode.EXACT):
    """Gains ``(Q_mu, Q_v1, Q_v2)`` for the signal and both decoys.

    Decoys are produced by the same source (and, for the HSPS, read out by
    the same heralding detector) at intensities ``protocol.decoy1`` and
    ``protocol.decoy2``.
    """
    return (
        gain(source, ch, mode),
        gain(source.with_mu(protocol.decoy1), ch, mode),
        gain(source.with_mu(protocol.decoy2), ch, mode),
    )
