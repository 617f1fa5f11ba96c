"""Decoy-state lower bounds on the vacuum yield, single-photon yield and p1.

All bounds are asymptotic (no statistical fluctuation terms) and are clamped
to ``[0, 1]``. ``p1`` is the fraction of the server's signal detections that
come from single-photon pulses.

For the heralded source every intensity ``v`` enters through the rescaled
variable ``v / (1 + v)``; the gain satisfies

    Q_v (1 + v) = Y0 X d_A + sum_{i>=1} Y_i P(1|i) (v / (1 + v))**i

which is the identity the HSPS bounds below are derived from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateProtocolError, DomainError, UndefinedRateError
from .sources import HSPSSource


@dataclass(frozen=True)
class DecoyProtocol:
    """Decoy intensities and protocol-level rates.

    The signal intensity is carried by the source, not the protocol, so the
    same protocol can be reused while optimising over the signal intensity.

    Args:
        decoy1: intensity of the first decoy.
        decoy2: intensity of the second (weaker) decoy; 0 is the vacuum decoy.
        signal_fraction: fraction ``p_mu`` of all pulses that are signal pulses.
        security_rate: target failure probability per prepared qubit, ``eps / S``.
    """

    decoy1: float = 0.125
    decoy2: float = 0.0
    signal_fraction: float = 0.9
    security_rate: float = 1e-3


@dataclass(frozen=True)
class BoundsResult:
    y0_lower: float
    y1_lower: float
    p1_lower: float


def validate_protocol(protocol: DecoyProtocol, mu: float, heralded: bool = False) -> list[str]:
    """Return a description of every violated protocol constraint (empty if valid).

    With ``heralded=True`` the rescaled condition
    ``v1/(1+v1) + v2/(1+v2) < mu/(1+mu)`` is also checked; the heralded
    single-photon bound needs it for its denominator to be positive.
    """
    v1, v2 = protocol.decoy1, protocol.decoy2
    problems = []
    if not v2 >= 0:
        problems.append(f"decoy2 must be >= 0 (got {v2})")
    if not v2 < v1:
        problems.append(f"decoy2 < decoy1 required (got decoy2={v2}, decoy1={v1})")
    if not v1 + v2 < mu:
        problems.append(f"decoy1 + decoy2 < mu required (got {v1} + {v2} >= {mu})")
    if not 0 < protocol.signal_fraction <= 1:
        problems.append(f"signal_fraction must lie in (0, 1] (got {protocol.signal_fraction})")
    if not 0 < protocol.security_rate < 1:
        problems.append(f"security_rate must lie in (0, 1) (got {protocol.security_rate})")
    if heralded and v1 >= 0 and v2 >= 0 and mu >= 0:
        if not v1 / (1 + v1) + v2 / (1 + v2) < mu / (1 + mu):
            problems.append("v1/(1+v1) + v2/(1+v2) < mu/(1+mu) required for the heralded source")
    return problems


def _clamp(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def _require_distinct(v1: float, v2: float):
    if v1 == v2:
        raise DegenerateProtocolError(f"decoy intensities must differ (both {v1})")


# --- weak coherent pulses ---------------------------------------------------


def wcp_y0_lower(q_v1: float, q_v2: float, v1: float, v2: float) -> float:
    """Lower bound on the vacuum yield from two Poissonian decoys."""
    _require_distinct(v1, v2)
    value = (v1 * q_v2 * math.exp(v2) - v2 * q_v1 * math.exp(v1)) / (v1 - v2)
    return _clamp(value)


def _wcp_denominator(mu: float, v1: float, v2: float) -> float:
    denom = mu * v1 - mu * v2 - v1**2 + v2**2
    if denom == 0:
        raise DegenerateProtocolError("mu = v1 + v2 or v1 = v2 makes the single-photon bound degenerate")
    return denom


def wcp_y1_lower(q_mu: float, q_v1: float, q_v2: float, mu: float, protocol: DecoyProtocol, y0_lower: float) -> float:
    """Lower bound on the single-photon yield ``Y1`` for Poissonian decoys."""
    v1, v2 = protocol.decoy1, protocol.decoy2
    denom = _wcp_denominator(mu, v1, v2)
    bracket = (
        q_v1 * math.exp(v1)
        - q_v2 * math.exp(v2)
        - (v1**2 - v2**2) / mu**2 * (q_mu * math.exp(mu) - y0_lower)
    )
    return _clamp(mu / denom * bracket)


def wcp_p1_lower(q_mu: float, q_v1: float, q_v2: float, mu: float, protocol: DecoyProtocol, y0_lower: float) -> float:
    """Lower bound on ``p1 = Q1 / Q_mu`` for the WCP protocol.

    Evaluated in the ratio form
    ``mu**2 e**-mu / (mu v1 - mu v2 - v1**2 + v2**2) * [Q_v1/Q_mu e**v1 - Q_v2/Q_mu e**v2
    - (v1**2 - v2**2)/(mu**2 Q_mu) (Q_mu e**mu - Y0_L)]``.
    """
    if q_mu <= 0:
        raise UndefinedRateError("p1 is undefined for zero signal gain")
    v1, v2 = protocol.decoy1, protocol.decoy2
    denom = _wcp_denominator(mu, v1, v2)
    bracket = (
        q_v1 / q_mu * math.exp(v1)
        - q_v2 / q_mu * math.exp(v2)
        - (v1**2 - v2**2) / (mu**2 * q_mu) * (q_mu * math.exp(mu) - y0_lower)
    )
    return _clamp(mu**2 * math.exp(-mu) / denom * bracket)


# --- heralded single photon source ------------------------------------------


def hsps_y0_lower(q_v1: float, q_v2: float, v1: float, v2: float) -> float:
    """Lower bound on ``Y0 X d_A``, the vacuum-herald detection probability."""
    denom = v1 * (1 + v2) - v2 * (1 + v1)
    if denom == 0:
        raise DegenerateProtocolError(f"decoy intensities must differ (both {v1})")
    value = (v1 * q_v2 * (1 + v2) ** 2 - v2 * q_v1 * (1 + v1) ** 2) / denom
    return _clamp(value)


def hsps_y1_lower(q_mu: float, q_v1: float, q_v2: float, mu: float, protocol: DecoyProtocol, y0_lower: float) -> float:
    """Lower bound on ``Y1 eta_A`` for the heralded source.

    With ``a = v/(1+v)`` for each intensity,

        Y1 eta_A >= a_mu / (a_1 a_mu - a_2 a_mu - a_1**2 + a_2**2)
                    * [Q_v1 (1+v1) - Q_v2 (1+v2)
                       - (a_1**2 - a_2**2) / a_mu**2 * (Q_mu (1+mu) - Y0_L X d_A)]

    Note the signal gain enters multiplied by ``1 + mu``: that is what the
    multi-photon tail identity gives, and without it the bound is not a
    lower bound.
    """
    v1, v2 = protocol.decoy1, protocol.decoy2
    a1, a2, am = v1 / (1 + v1), v2 / (1 + v2), mu / (1 + mu)
    denom = a1 * am - a2 * am - a1**2 + a2**2
    if denom == 0:
        raise DegenerateProtocolError("rescaled intensities make the single-photon bound degenerate")
    bracket = (
        q_v1 * (1 + v1)
        - q_v2 * (1 + v2)
        - (a1**2 - a2**2) / am**2 * (q_mu * (1 + mu) - y0_lower)
    )
    return _clamp(am / denom * bracket)


def hsps_p1_lower(q_mu: float, y1_eta: float, mu: float) -> float:
    """Lower bound on ``p1``: ``Y1_L eta_A mu / (1 + mu)**2 / Q_mu``."""
    if q_mu <= 0:
        raise UndefinedRateError("p1 is undefined for zero signal gain")
    return _clamp(y1_eta * mu / (1 + mu) ** 2 / q_mu)


def estimate_bounds(source, gains, protocol: DecoyProtocol) -> BoundsResult:
    """All three lower bounds for ``source`` given its ``(Q_mu, Q_v1, Q_v2)``.

    For the heralded source ``y0_lower`` is the bound on ``Y0 X d_A`` and
    ``y1_lower`` the bound on ``Y1 eta_A``.
    """
    if not source.mu > 0:
        raise DomainError("signal intensity must be positive")
    q_mu, q_v1, q_v2 = gains
    v1, v2 = protocol.decoy1, protocol.decoy2
    if isinstance(source, HSPSSource):
        y0 = hsps_y0_lower(q_v1, q_v2, v1, v2)
        y1 = hsps_y1_lower(q_mu, q_v1, q_v2, source.mu, protocol, y0)
        return BoundsResult(y0, y1, hsps_p1_lower(q_mu, y1, source.mu))
    y0 = wcp_y0_lower(q_v1, q_v2, v1, v2)
    y1 = wcp_y1_lower(q_mu, q_v1, q_v2, source.mu, protocol, y0)
    return BoundsResult(y0, y1, wcp_p1_lower(q_mu, q_v1, q_v2, source.mu, protocol, y0))
