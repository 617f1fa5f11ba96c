"""Resource planning for decoy-state remote blind qubit preparation.

The server splits its ``M_mu`` signal detections into ``S`` groups of ``m``
and runs the interlaced 1-D cluster computation on each group. A group is
insecure only if it contains no single-photon detection, so

    P_fail <= S (1 - p1)**m <= eps   =>   m >= ln(eps/S) / ln(1 - p1)

and the client has to send ``N = m S / (p_mu Q_mu)`` pulses. The figure of
merit is the blind-state generation efficiency ``S/N = p_mu Q_mu / m``.
Because ``ln(eps/S)`` is a constant factor of ``S/N``, the optimal signal
intensity does not depend on the security rate.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import ChannelParams, GainMode, dark_count_floor, gain, gain_decoys, transmittance
from .decoy import BoundsResult, DecoyProtocol, estimate_bounds, validate_protocol
from .errors import DomainError, RBSPError
from .sources import HSPSSource


class ProtocolViolation(DomainError):
    """Raised when a run is configured with an invalid decoy protocol."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class PlanResult:
    """Resources needed at one operating point.

    ``group_size`` is the real-valued asymptotic ``ln(eps/S)/ln(1-p1)`` used
    for ``pulse_count`` and ``efficiency``; ``group_size_min`` is its ceiling,
    the group size a real run would use. Both are ``inf``/``None`` when the
    p1 bound is zero.
    """

    mu: float
    transmittance: float
    gains: tuple[float, float, float]
    bounds: BoundsResult
    group_size: float
    group_size_min: int | None
    pulse_count: float
    efficiency: float
    p_fail_group: float
    p_fail_total_bound: float
    dark_floor: float

    @property
    def p1(self) -> float:
        return self.bounds.p1_lower

    @property
    def q_mu(self) -> float:
        return self.gains[0]

    @property
    def dark_dominated(self) -> bool:
        """True once the signal contributes no more to ``Q_mu`` than dark counts do."""
        return self.q_mu - self.dark_floor <= self.dark_floor


@dataclass(frozen=True)
class SweepRow:
    length_km: float
    mu_opt: float
    p1: float
    efficiency: float
    plateau_flag: bool
    plan: PlanResult


@dataclass(frozen=True)
class MuGrid:
    """Coarse grid for the signal-intensity search, refined by golden section.

    ``start=None`` means ``max(v1 + v2 + 1e-3, 0.01)``.
    """

    start: float | None = None
    stop: float = 2.0
    step: float = 0.005
    xtol: float = 1e-4

    def points(self, protocol: DecoyProtocol) -> np.ndarray:
        start = self.start
        if start is None:
            start = max(protocol.decoy1 + protocol.decoy2 + 1e-3, 0.01)
        count = int(math.floor((self.stop - start) / self.step + 1e-9)) + 1
        return start + self.step * np.arange(max(count, 0))


# --- closed-form resource formulas ------------------------------------------


def _check_probability(name, value):
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def group_size(p1: float, security_rate: float) -> float:
    """Real-valued group size ``ln(eps/S) / ln(1 - p1)``; ``inf`` when ``p1 = 0``."""
    _check_probability("p1", p1)
    if not 0.0 < security_rate < 1.0:
        raise DomainError(f"security rate must lie in (0, 1), got {security_rate!r}")
    if p1 == 0.0:
        return math.inf
    if p1 == 1.0:
        return 1.0
    return math.log(security_rate) / math.log1p(-p1)


def group_size_min(p1: float, security_rate: float) -> int:
    """Smallest integer group size with ``(1 - p1)**m <= eps/S``."""
    if p1 == 0.0:
        raise DomainError("no finite group size works when p1 = 0")
    if p1 == 1.0:
        return 1
    m = max(1, math.ceil(group_size(p1, security_rate) - 1e-9))
    while (1.0 - p1) ** m > security_rate:
        m += 1
    return m


def group_fail_prob(p1: float, m: int) -> float:
    """Upper bound ``(1 - p1)**m`` on the probability that a group has no single photon."""
    _check_probability("p1", p1)
    if m < 1:
        raise DomainError(f"group size must be >= 1, got {m!r}")
    return (1.0 - p1) ** m


def overall_fail_bound(size: int, p1: float, m: int) -> float:
    """Union bound ``S (1 - p1)**m`` over ``S`` groups, clamped to 1."""
    if size < 1:
        raise DomainError(f"computation size must be >= 1, got {size!r}")
    return min(size * group_fail_prob(p1, m), 1.0)


def efficiency(protocol: DecoyProtocol, q_mu: float, p1: float) -> float:
    """Blind-state generation efficiency ``S/N = p_mu Q_mu / m`` (real-valued ``m``)."""
    m = group_size(p1, protocol.security_rate)
    return protocol.signal_fraction * q_mu / m


def pulse_count_min(size: float, protocol: DecoyProtocol, q_mu: float, p1: float) -> float:
    """Minimum number of pulses ``N = S m / (p_mu Q_mu)`` for computation size ``S``."""
    if q_mu <= 0:
        raise DomainError("pulse count is undefined for zero gain")
    m = group_size(p1, protocol.security_rate)
    return size * m / (protocol.signal_fraction * q_mu)


def original_rbsp_bound(n_pulses: float, T: float) -> float:
    """Failure/abort bound ``exp(-N T**4 / 18)`` of the non-decoy protocol."""
    if not 0.0 < T <= 1.0:
        raise DomainError(f"transmittance must lie in (0, 1], got {T!r}")
    if n_pulses < 0:
        raise DomainError(f"pulse count must be >= 0, got {n_pulses!r}")
    return math.exp(-n_pulses * T**4 / 18.0)


def n_for_epsilon(eps: float, T: float) -> float:
    """Pulses the non-decoy protocol needs for its bound to reach ``eps``: ``18 ln(1/eps) / T**4``."""
    if not 0.0 < T <= 1.0:
        raise DomainError(f"transmittance must lie in (0, 1], got {T!r}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    return 18.0 * math.log(1.0 / eps) / T**4


# --- operating points ---------------------------------------------------------


def check_protocol(source, protocol: DecoyProtocol):
    violations = validate_protocol(protocol, source.mu, heralded=isinstance(source, HSPSSource))
    if violations:
        raise ProtocolViolation(violations)


def _plan_from_gains(source, ch, protocol, mode, gains, size) -> PlanResult:
    bounds = estimate_bounds(source, gains, protocol)
    p1 = bounds.p1_lower
    m_real = group_size(p1, protocol.security_rate)
    if p1 > 0.0:
        m_min = group_size_min(p1, protocol.security_rate)
        p_group = group_fail_prob(p1, m_min)
        p_total = overall_fail_bound(size, p1, m_min)
    else:
        m_min, p_group, p_total = None, 1.0, 1.0
    q_mu = gains[0]
    return PlanResult(
        mu=source.mu,
        transmittance=transmittance(ch),
        gains=tuple(gains),
        bounds=bounds,
        group_size=m_real,
        group_size_min=m_min,
        pulse_count=size * m_real / (protocol.signal_fraction * q_mu),
        efficiency=protocol.signal_fraction * q_mu / m_real,
        p_fail_group=p_group,
        p_fail_total_bound=p_total,
        dark_floor=dark_count_floor(source, ch, mode),
    )


def plan(
    source,
    ch: ChannelParams,
    protocol: DecoyProtocol,
    mode: GainMode = GainMode.EXACT,
    size: int = 1,
) -> PlanResult:
    """Evaluate p1, group size, pulse count and efficiency at a fixed intensity.

    ``p_fail_total_bound`` is the union bound over ``size`` groups; the group
    size itself is chosen from ``protocol.security_rate`` (that is, eps/S).
    """
    check_protocol(source, protocol)
    gains = gain_decoys(protocol, source, ch, mode)
    if gains[0] <= 0.0:
        raise RBSPError("signal gain is zero")
    return _plan_from_gains(source, ch, protocol, mode, gains, size)


def optimize_mu(
    source,
    ch: ChannelParams,
    protocol: DecoyProtocol,
    mode: GainMode = GainMode.EXACT,
    grid: MuGrid = MuGrid(),
) -> tuple[float, PlanResult]:
    """Signal intensity maximising ``S/N``: grid search, then golden-section refinement.

    ``source.mu`` is ignored; the decoy intensities come from ``protocol``.
    """
    heralded = isinstance(source, HSPSSource)
    candidates = [
        mu for mu in grid.points(protocol) if not validate_protocol(protocol, mu, heralded=heralded)
    ]
    if not candidates:
        raise DomainError("no feasible signal intensity on the search grid")

    decoy_gains = gain_decoys(protocol, source.with_mu(candidates[0]), ch, mode)[1:]

    def evaluate(mu):
        trial = source.with_mu(float(mu))
        return _plan_from_gains(trial, ch, protocol, mode, (gain(trial, ch, mode), *decoy_gains), 1)

    values = np.array([evaluate(mu).efficiency for mu in candidates])
    best = int(np.argmax(values))
    mu_best, value_best = float(candidates[best]), values[best]

    if 0 < best < len(candidates) - 1 and value_best > max(values[best - 1], values[best + 1]):
        lo, hi = float(candidates[best - 1]), float(candidates[best + 1])
        result = minimize_scalar(
            lambda mu: -evaluate(mu).efficiency,
            bracket=(lo, mu_best, hi),
            method="golden",
            options={"xtol": grid.xtol / (2.0 * mu_best)},
        )
        if lo <= result.x <= hi and -result.fun >= value_best:
            mu_best = float(result.x)

    return mu_best, evaluate(mu_best)


def sweep_mu(source, ch, protocol, mus, mode: GainMode = GainMode.EXACT, size: int = 1) -> list[PlanResult]:
    """:func:`plan` at each signal intensity in ``mus``."""
    mus = list(mus)
    if not mus:
        raise DomainError("empty intensity grid")
    return [plan(source.with_mu(float(mu)), ch, protocol, mode, size) for mu in mus]


def _sweep_point(length, source, ch, protocol, mode, grid) -> SweepRow:
    mu, result = optimize_mu(source, ch.at_length(float(length)), protocol, mode, grid)
    return SweepRow(float(length), mu, result.p1, result.efficiency, result.dark_dominated, result)


def sweep_distance(
    source,
    ch: ChannelParams,
    protocol: DecoyProtocol,
    lengths,
    mode: GainMode = GainMode.EXACT,
    grid: MuGrid = MuGrid(),
    workers: int | None = None,
) -> list[SweepRow]:
    """Optimise the signal intensity at each fiber length.

    Rows where the signal gain is dark-count dominated (``Q_mu`` at most twice
    its zero-transmittance floor) are flagged, not dropped. ``workers > 1``
    evaluates lengths in a process pool; row order always follows ``lengths``.
    """
    lengths = list(lengths)
    if not lengths:
        raise DomainError("empty distance grid")
    point = partial(_sweep_point, source=source, ch=ch, protocol=protocol, mode=mode, grid=grid)
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, lengths))
    return [point(length) for length in lengths]


def plateau_onset(rows) -> float | None:
    """Length of the first flagged row, i.e. where the usable distance ends."""
    for row in rows:
        if row.plateau_flag:
            return row.length_km
    return None
