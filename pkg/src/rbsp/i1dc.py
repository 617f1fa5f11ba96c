"""State-vector simulation of the interlaced 1-D cluster computation (I1DC).

The client sends qubits ``|+_sigma> = (|0> + e^{i sigma}|1>)/sqrt(2)`` with
``sigma`` a multiple of pi/4. For ``i = 1..k-1`` the server applies
``CZ (H x I)`` to qubits ``i, i+1`` and measures qubit ``i`` in the X basis,
getting outcome ``s_i``. The last qubit is left in ``|+_theta>`` with

    theta = sum_l (-1)**t_l sigma_l,    t_l = (s_l + ... + s_{k-1}) mod 2,  t_k = 0.

Only two qubits are alive at any time: a step consumes the measured qubit
and the next input is appended afterwards.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BranchError, DomainError

_SQRT_HALF = np.sqrt(0.5)
_H = _SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_H_I = np.kron(_H, np.eye(2))


@dataclass(frozen=True, order=True)
class Phase:
    """A phase ``k8 * pi / 4`` with mod-8 arithmetic."""

    k8: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k8", int(self.k8) % 8)

    def __add__(self, other: "Phase") -> "Phase":
        return Phase(self.k8 + other.k8)

    def __sub__(self, other: "Phase") -> "Phase":
        return Phase(self.k8 - other.k8)

    def __neg__(self) -> "Phase":
        return Phase(-self.k8)

    @property
    def radians(self) -> float:
        return self.k8 * np.pi / 4


@dataclass
class I1DCTranscript:
    inputs: list[Phase]
    outcomes: list[int]
    output_state: np.ndarray
    theta: Phase
    probabilities: list[float] = field(default_factory=list)


def prepare_plus(sigma: Phase) -> np.ndarray:
    """Single-qubit state ``|+_sigma>``."""
    return _SQRT_HALF * np.array([1.0, np.exp(1j * sigma.radians)], dtype=complex)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|**2`` for normalised pure states."""
    return float(abs(np.vdot(a, b)) ** 2)


def i1dc_branches(state: np.ndarray) -> list[tuple[int, np.ndarray, float]]:
    """Both X-measurement branches of one I1DC step.

    ``state`` is a normalised two-qubit vector with the qubit to be measured
    first. Returns ``(s, post_state, probability)`` for ``s = 0, 1``; the post
    state is renormalised (all zeros for an impossible branch).
    """
    state = np.asarray(state, dtype=complex)
    if state.shape != (4,):
        raise DomainError(f"expected a two-qubit state vector, got shape {state.shape}")
    psi = (_CZ @ (_H_I @ state)).reshape(2, 2)
    branches = []
    for s, sign in ((0, 1.0), (1, -1.0)):
        post = _SQRT_HALF * (psi[0] + sign * psi[1])
        prob = float(np.vdot(post, post).real)
        if prob > 0:
            post = post / np.sqrt(prob)
        branches.append((s, post, prob))
    return branches


def i1dc_step(state: np.ndarray, outcome: int | None = None, rng: np.random.Generator | None = None):
    """One ``CZ (H x I)`` + X-measurement step.

    The outcome is forced when ``outcome`` is given and sampled from ``rng``
    (Born rule) otherwise. Returns ``(s, post_state, probability)``.
    """
    branches = i1dc_branches(state)
    if outcome is None:
        rng = rng if rng is not None else np.random.default_rng()
        outcome = int(rng.random() >= branches[0][2])
    if outcome not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {outcome!r}")
    s, post, prob = branches[outcome]
    if prob <= 1e-15:
        raise BranchError(f"outcome {s} has zero probability")
    return s, post, prob


def i1dc_run(
    phases: Sequence[Phase],
    outcomes: Sequence[int] | None = None,
    rng: np.random.Generator | int | None = None,
) -> I1DCTranscript:
    """Run I1DC on ``|+_sigma_1> ... |+_sigma_k>``.

    With ``outcomes`` (length ``k - 1``) every measurement is forced; otherwise
    outcomes are sampled from ``rng`` (a Generator or a seed).
    """
    phases = [p if isinstance(p, Phase) else Phase(p) for p in phases]
    if not phases:
        raise DomainError("need at least one input qubit")
    if outcomes is not None and len(outcomes) != len(phases) - 1:
        raise DomainError(f"expected {len(phases) - 1} outcomes, got {len(outcomes)}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    state = prepare_plus(phases[0])
    record, probs = [], []
    for i, sigma in enumerate(phases[1:]):
        forced = None if outcomes is None else int(outcomes[i])
        s, state, prob = i1dc_step(np.kron(state, prepare_plus(sigma)), forced, rng)
        record.append(s)
        probs.append(prob)
    return I1DCTranscript(phases, record, state, theta_from_outcomes(phases, record), probs)


def parity_t_rule(outcomes: Sequence[int], k: int) -> list[int]:
    """``t_l = (s_l + ... + s_{k-1}) mod 2`` for ``l < k`` and ``t_k = 0``."""
    t = [0] * k
    acc = 0
    for l in range(k - 2, -1, -1):
        acc ^= int(outcomes[l]) & 1
        t[l] = acc
    return t


def previous_outcome_t_rule(outcomes: Sequence[int], k: int) -> list[int]:
    """Deliberately wrong rule ``t_l = s_{l-1}``, kept as a mutation for the verifier."""
    return [0] + [int(outcomes[l - 1]) & 1 for l in range(1, k)]


def theta_from_outcomes(
    phases: Sequence[Phase],
    outcomes: Sequence[int],
    t_rule: Callable[[Sequence[int], int], list[int]] = parity_t_rule,
) -> Phase:
    """The client's reconstruction ``theta = sum_l (-1)**t_l sigma_l``."""
    k = len(phases)
    if len(outcomes) != k - 1:
        raise DomainError(f"expected {k - 1} outcomes for {k} phases, got {len(outcomes)}")
    theta = Phase(0)
    for sigma, t in zip(phases, t_rule(outcomes, k)):
        sigma = sigma if isinstance(sigma, Phase) else Phase(sigma)
        theta = theta + (-sigma if t else sigma)
    return theta


@dataclass
class VerificationReport:
    k: int
    tuples: int
    branches: int = 0
    min_fidelity: float = 1.0
    max_probability_error: float = 0.0
    failures: list[tuple[tuple[int, ...], tuple[int, ...], float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.max_probability_error <= 1e-12

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} k={self.k} phase_tuples={self.tuples} branches={self.branches} "
            f"min_fidelity={self.min_fidelity:.15f} max_prob_err={self.max_probability_error:.2e} "
            f"failures={len(self.failures)}"
        )


def verify_i1dc(
    k: int,
    trials: int = 200,
    seed: int | None = 0,
    exhaustive: bool = False,
    t_rule: Callable[[Sequence[int], int], list[int]] = parity_t_rule,
    fidelity_tol: float = 1e-10,
) -> VerificationReport:
    """Check the reconstruction rule against the simulator on every outcome branch.

    ``trials`` random phase tuples are drawn from ``seed``; with
    ``exhaustive=True`` all ``8**k`` tuples are used instead. The branch tree
    is walked depth-first so shared prefixes are simulated once.
    """
    if not 1 <= k <= 14:
        raise DomainError(f"k must lie in [1, 14], got {k}")
    if exhaustive:
        tuples = [tuple(t) for t in itertools.product(range(8), repeat=k)]
    else:
        rng = np.random.default_rng(seed)
        tuples = [tuple(int(x) for x in rng.integers(0, 8, size=k)) for _ in range(trials)]

    report = VerificationReport(k=k, tuples=len(tuples))
    for ks in tuples:
        phases = [Phase(x) for x in ks]

        def walk(state, depth, outcomes):
            if depth == k:
                theta = theta_from_outcomes(phases, outcomes, t_rule)
                f = fidelity(prepare_plus(theta), state)
                report.branches += 1
                report.min_fidelity = min(report.min_fidelity, f)
                if f < 1 - fidelity_tol:
                    report.failures.append((ks, tuple(outcomes), f))
                return
            for s, post, prob in i1dc_branches(np.kron(state, prepare_plus(phases[depth]))):
                report.max_probability_error = max(report.max_probability_error, abs(prob - 0.5))
                walk(post, depth + 1, outcomes + [s])

        walk(prepare_plus(phases[0]), 1, [])
    return report
