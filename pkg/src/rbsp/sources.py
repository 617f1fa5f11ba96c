"""Photon-number statistics of the client's sources and the heralding detector.

Two sources are modelled:

* a weak coherent pulse (WCP), with Poissonian photon number, and
* a heralded single photon source (HSPS): an SPDC pair source in the
  single-mode approximation (thermal pair-number distribution) whose idler
  arm is read out by a time-multiplexed detector (TMD). A signal pulse is
  kept only when the TMD reports exactly one click.

The TMD splits the idler over ``X = 2**x`` modes with a cascade of ``x``
fiber couplers; each mode ends on a click/no-click detector of efficiency
``eta_A``. Its response ``P(l|m)`` contains no dark counts; the heralding
dark-count rate ``d_A`` only enters through the vacuum-herald term of the
gain formulas (see :mod:`rbsp.channel`) and :func:`heralded_pnd`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, UndefinedRateError, VariantError

#: Series over photon number are cut where a term drops below this fraction
#: of the running sum ...
TRUNCATION_RTOL = 1e-18
#: ... or at this index, whichever comes first.
TRUNCATION_CAP = 200

# Above this ratio between the positive (or negative) part of the alternating
# sum and its difference, the TMD response is recomputed in exact arithmetic.
_CANCELLATION_LIMIT = 1e3
# Largest l for which binomial weights are safely representable as floats.
_FLOAT_PATH_MAX_L = 60


@dataclass(frozen=True)
class HeraldingDetector:
    """Time-multiplexed click detector on the idler arm.

    Args:
        stages: number of fiber couplers ``x``; the detector has ``2**x`` modes.
        efficiency: detection efficiency ``eta_A`` of each mode.
        dark_rate: dark-count probability ``d_A`` per detector per window.
    """

    stages: int = 2
    efficiency: float = 0.85
    dark_rate: float = 1e-8

    def __post_init__(self):
        if int(self.stages) != self.stages or self.stages < 0:
            raise DomainError(f"stages must be a non-negative integer, got {self.stages!r}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise DomainError(f"efficiency must lie in [0, 1], got {self.efficiency!r}")
        if not 0.0 <= self.dark_rate <= 1.0:
            raise DomainError(f"dark_rate must lie in [0, 1], got {self.dark_rate!r}")

    @property
    def modes(self) -> int:
        return 2 ** int(self.stages)

    @classmethod
    def from_modes(cls, modes: int, efficiency: float = 0.85, dark_rate: float = 1e-8):
        """Build a detector from its mode count ``X`` (must be a power of two)."""
        modes = int(modes)
        if modes < 1 or modes & (modes - 1):
            raise DomainError(f"mode count must be a power of two, got {modes}")
        return cls(stages=modes.bit_length() - 1, efficiency=efficiency, dark_rate=dark_rate)


@dataclass(frozen=True)
class WCPSource:
    """Weak coherent pulse with mean photon number ``mu``."""

    mu: float

    def __post_init__(self):
        if not self.mu >= 0.0:
            raise DomainError(f"mean photon number must be >= 0, got {self.mu!r}")

    def with_mu(self, mu: float) -> "WCPSource":
        return replace(self, mu=mu)


@dataclass(frozen=True)
class HSPSSource:
    """Heralded SPDC source with mean pair number ``mu`` and a heralding TMD."""

    mu: float
    detector: HeraldingDetector = HeraldingDetector()

    def __post_init__(self):
        if not self.mu >= 0.0:
            raise DomainError(f"mean pair number must be >= 0, got {self.mu!r}")

    def with_mu(self, mu: float) -> "HSPSSource":
        return replace(self, mu=mu)


SourceModel = WCPSource | HSPSSource


def _check_args(mu, n):
    if not mu >= 0:
        raise DomainError(f"mean must be >= 0, got {mu!r}")
    if int(n) != n or n < 0:
        raise DomainError(f"photon count must be a non-negative integer, got {n!r}")


def poisson_pmf(mu: float, n: int) -> float:
    """Poisson probability ``exp(-mu) mu**n / n!``."""
    _check_args(mu, n)
    if mu == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-mu + n * math.log(mu) - math.lgamma(n + 1))


def thermal_pmf(mu: float, n: int) -> float:
    """Thermal (Bose-Einstein) probability ``mu**n / (1 + mu)**(n + 1)``."""
    _check_args(mu, n)
    if mu == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(mu) - (n + 1) * math.log1p(mu))


def poisson_pmf_array(mu: float, n_max: int = TRUNCATION_CAP) -> np.ndarray:
    """Poisson probabilities for ``n = 0..n_max``."""
    _check_args(mu, n_max)
    return np.array([poisson_pmf(mu, n) for n in range(n_max + 1)])


def thermal_pmf_array(mu: float, n_max: int = TRUNCATION_CAP) -> np.ndarray:
    """Thermal probabilities for ``n = 0..n_max``."""
    _check_args(mu, n_max)
    ratio = mu / (1.0 + mu)
    return ratio ** np.arange(n_max + 1) / (1.0 + mu)


def truncated_sum(terms) -> float:
    """Sum a non-negative series under the package-wide truncation rule.

    Terms are accumulated up to and including the first one that is smaller
    than ``TRUNCATION_RTOL`` times the running sum; ``terms`` itself should
    already stop at ``TRUNCATION_CAP``.
    """
    terms = np.asarray(terms, dtype=float)
    running = np.cumsum(terms)
    negligible = (terms < TRUNCATION_RTOL * running) & (running > 0)
    stop = int(np.argmax(negligible)) if negligible.any() else len(terms) - 1
    return math.fsum(terms[: stop + 1])


def _tmd_exact(l: int, m: int, efficiency: float, modes: int) -> float:
    eta = Fraction(efficiency)
    total = Fraction(0)
    for j in range(l + 1):
        base = (1 - eta) + Fraction(l - j, modes) * eta
        term = math.comb(l, j) * base**m
        total += -term if j % 2 else term
    return float(math.comb(modes, l) * total)


def tmd_response(l: int, m: int, det: HeraldingDetector) -> float:
    """Probability that ``m`` incident photons produce ``l`` clicks on the TMD.

    ``P(l|m) = C(X,l) sum_j (-1)**j C(l,j) [(1 - eta) + (l - j) eta / X]**m``.
    Positive and negative parts of the sum are accumulated separately; when
    they nearly cancel the sum is redone with exact rationals.
    """
    if int(l) != l or int(m) != m or l < 0 or m < 0:
        raise DomainError(f"l and m must be non-negative integers, got l={l!r}, m={m!r}")
    X, eta = det.modes, det.efficiency
    if l > X:
        raise DomainError(f"cannot register {l} clicks on a {X}-mode detector")
    if l > m:
        # l-th finite difference of a degree-m polynomial
        return 0.0
    if l > _FLOAT_PATH_MAX_L:
        return min(max(_tmd_exact(l, m, eta, X), 0.0), 1.0)

    positive, negative = [], []
    for j in range(l + 1):
        term = math.comb(l, j) * ((1.0 - eta) + (l - j) * eta / X) ** m
        (negative if j % 2 else positive).append(term)
    pos, neg = math.fsum(positive), math.fsum(negative)
    diff = pos - neg
    if diff <= 0.0 or max(pos, neg) > _CANCELLATION_LIMIT * diff:
        value = _tmd_exact(l, m, eta, X)
    else:
        value = math.comb(X, l) * diff
    return min(max(value, 0.0), 1.0)


@lru_cache(maxsize=256)
def _single_click_table(det: HeraldingDetector, i_max: int) -> np.ndarray:
    table = np.array([tmd_response(1, i, det) for i in range(i_max + 1)])
    table.setflags(write=False)
    return table


def single_click_probabilities(det: HeraldingDetector, i_max: int = TRUNCATION_CAP) -> np.ndarray:
    """``P(1|i)`` for ``i = 0..i_max`` (read-only, cached per detector)."""
    return _single_click_table(det, int(i_max))


def _require_hsps(source) -> HSPSSource:
    if not isinstance(source, HSPSSource):
        raise VariantError(f"expected an HSPSSource, got {type(source).__name__}")
    return source


def heralded_single_mean(source: HSPSSource) -> float:
    """Probability that a pulse is heralded by exactly one photon-induced click.

    This is ``sum_i thermal(mu, i) P(1|i)``, the effective mean that replaces
    ``mu`` in the linearised gain ``Y0 + T mu`` for the HSPS.
    """
    source = _require_hsps(source)
    terms = thermal_pmf_array(source.mu) * single_click_probabilities(source.detector)
    return truncated_sum(terms)


def heralded_pnd(source: HSPSSource, n: int) -> float:
    """Photon-number distribution of the signal conditioned on a single-click herald.

    Vacuum heralds come only from dark counts, ``X d_A`` per vacuum pulse.
    """
    source = _require_hsps(source)
    _check_args(source.mu, n)
    det = source.detector
    dark_herald = thermal_pmf(source.mu, 0) * det.modes * det.dark_rate
    norm = heralded_single_mean(source) + dark_herald
    if norm == 0.0:
        raise UndefinedRateError("the source is never heralded")
    weight = thermal_pmf(source.mu, n) * tmd_response(1, n, det) if n >= 1 else 0.0
    if n == 0:
        weight += dark_herald
    return weight / norm
