import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbsp import BranchError, DomainError
from rbsp.i1dc import (
    Phase,
    fidelity,
    i1dc_branches,
    i1dc_run,
    i1dc_step,
    parity_t_rule,
    prepare_plus,
    previous_outcome_t_rule,
    theta_from_outcomes,
    verify_i1dc,
)

phases = st.integers(0, 7).map(Phase)
R = 1 / math.sqrt(2)


def full_register_output(ks, outcomes):
    """Brute-force oracle: keep all k qubits in one 2**k vector and never discard any."""
    k = len(ks)
    psi = np.array([1.0 + 0j])
    for x in ks:
        psi = np.kron(psi, prepare_plus(Phase(x)))
    psi = psi.reshape((2,) * k)
    h = R * np.array([[1, 1], [1, -1]])
    for i, s in enumerate(outcomes):
        psi = np.moveaxis(np.tensordot(h, psi, axes=([1], [i])), 0, i)
        idx = [slice(None)] * k
        idx[i], idx[i + 1] = 1, 1
        psi[tuple(idx)] *= -1
        plus_minus = R * np.array([1, 1 if s == 0 else -1])
        # project qubit i onto |+> or |->, keep it as |0> so indices stay put
        proj = np.tensordot(plus_minus.conj(), psi, axes=([0], [i]))
        psi = np.zeros_like(psi)
        idx = [slice(None)] * k
        idx[i] = 0
        psi[tuple(idx)] = proj
        psi /= np.linalg.norm(psi)
    return psi.reshape(-1, 2)[0] if k > 1 else psi.reshape(2)


class TestPhase:
    def test_wraps(self):
        assert Phase(9) == Phase(1)
        assert Phase(-1).k8 == 7
        assert Phase(3) + Phase(6) == Phase(1)
        assert Phase(2) - Phase(5) == Phase(5)
        assert -Phase(3) == Phase(5)
        assert Phase(2).radians == pytest.approx(math.pi / 2)

    @given(a=phases, b=phases)
    def test_closure(self, a, b):
        for c in (a + b, a - b, -a):
            assert 0 <= c.k8 <= 7


class TestPreparePlus:
    def test_examples(self):
        assert np.allclose(prepare_plus(Phase(0)), [R, R])
        assert np.allclose(prepare_plus(Phase(4)), [R, -R])

    @given(a=phases, b=phases)
    def test_fidelity_is_half_angle_cosine(self, a, b):
        expected = math.cos((a.radians - b.radians) / 2) ** 2
        assert fidelity(prepare_plus(a), prepare_plus(b)) == pytest.approx(expected, abs=1e-14)


class TestStep:
    @given(a=phases, b=phases)
    def test_branches(self, a, b):
        (s0, post0, p0), (s1, post1, p1) = i1dc_branches(np.kron(prepare_plus(a), prepare_plus(b)))
        assert (s0, s1) == (0, 1)
        assert p0 == pytest.approx(0.5, abs=1e-12) and p1 == pytest.approx(0.5, abs=1e-12)
        assert fidelity(post0, prepare_plus(a + b)) == pytest.approx(1.0, abs=1e-12)
        assert fidelity(post1, prepare_plus(b - a)) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(post0) == pytest.approx(1.0, abs=1e-12)

    def test_sampled_outcome_is_reproducible(self):
        state = np.kron(prepare_plus(Phase(1)), prepare_plus(Phase(3)))
        draws = [i1dc_step(state, rng=np.random.default_rng(11))[0] for _ in range(3)]
        assert len(set(draws)) == 1

    def test_impossible_branch(self):
        # CZ (H x I) undoes the preparation and leaves |+>|0>, which never
        # gives outcome 1 on the first qubit
        h_i = np.kron(R * np.array([[1, 1], [1, -1]]), np.eye(2))
        cz = np.diag([1, 1, 1, -1])
        state = h_i @ cz @ (np.array([1, 0, 1, 0]) * R)
        assert i1dc_branches(state)[1][2] == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(BranchError):
            i1dc_step(state, outcome=1)

    def test_bad_inputs(self):
        with pytest.raises(DomainError):
            i1dc_branches(np.ones(2) * R)
        with pytest.raises(DomainError):
            i1dc_step(np.kron(prepare_plus(Phase(0)), prepare_plus(Phase(0))), outcome=2)


class TestRun:
    def test_single_qubit(self):
        t = i1dc_run([Phase(1)])
        assert t.outcomes == [] and t.theta == Phase(1)
        assert fidelity(t.output_state, prepare_plus(Phase(1))) == pytest.approx(1.0)

    @pytest.mark.parametrize(("s", "theta"), [(0, Phase(3)), (1, Phase(1))])
    def test_two_qubits(self, s, theta):
        t = i1dc_run([Phase(1), Phase(2)], outcomes=[s])
        assert t.theta == theta
        assert fidelity(t.output_state, prepare_plus(theta)) == pytest.approx(1.0, abs=1e-12)

    def test_three_qubits(self):
        t = i1dc_run([Phase(1)] * 3, outcomes=[1, 0])
        assert t.theta == Phase(1)
        assert fidelity(t.output_state, prepare_plus(Phase(1))) == pytest.approx(1.0, abs=1e-12)

    def test_seeded(self):
        ks = [Phase(x) for x in (3, 1, 4, 1, 5, 2, 6)]
        a, b = i1dc_run(ks, rng=5), i1dc_run(ks, rng=5)
        assert a.outcomes == b.outcomes and a.theta == b.theta
        assert np.array_equal(a.output_state, b.output_state)

    def test_outcome_length_checked(self):
        with pytest.raises(DomainError):
            i1dc_run([Phase(0), Phase(1)], outcomes=[0, 1])
        with pytest.raises(DomainError):
            i1dc_run([])

    @settings(max_examples=60, deadline=None)
    @given(ks=st.lists(st.integers(0, 7), min_size=1, max_size=12), seed=st.integers(0, 2**32 - 1))
    def test_sampled_runs_end_in_reconstructed_state(self, ks, seed):
        t = i1dc_run(ks, rng=seed)
        assert len(t.outcomes) == len(ks) - 1
        assert all(p == pytest.approx(0.5, abs=1e-12) for p in t.probabilities)
        assert fidelity(t.output_state, prepare_plus(t.theta)) >= 1 - 1e-10
        assert np.linalg.norm(t.output_state) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_two_qubit_simulator_matches_full_register(k):
    rng = np.random.default_rng(k)
    for _ in range(10):
        ks = [int(x) for x in rng.integers(0, 8, size=k)]
        for outcomes in itertools.product((0, 1), repeat=k - 1):
            reference = full_register_output(ks, outcomes)
            t = i1dc_run([Phase(x) for x in ks], outcomes=list(outcomes))
            assert fidelity(reference, t.output_state) == pytest.approx(1.0, abs=1e-12)


class TestTheta:
    @given(ks=st.lists(phases, min_size=1, max_size=10))
    def test_no_flips(self, ks):
        assert theta_from_outcomes(ks, [0] * (len(ks) - 1)) == Phase(sum(p.k8 for p in ks))

    def test_two_qubits_flip(self):
        assert theta_from_outcomes([Phase(2), Phase(7)], [1]) == Phase(5)

    @settings(max_examples=200)
    @given(ks=st.lists(phases, min_size=1, max_size=10), data=st.data())
    def test_recursion_law(self, ks, data):
        outcomes = data.draw(st.lists(st.integers(0, 1), min_size=len(ks), max_size=len(ks)))
        prev = theta_from_outcomes(ks, outcomes[: len(ks) - 1])
        nxt = data.draw(phases)
        s = outcomes[-1]
        assert theta_from_outcomes(ks + [nxt], outcomes) == nxt + (-prev if s else prev)

    def test_parity_rule(self):
        assert parity_t_rule([1, 0, 1, 1], 5) == [1, 0, 0, 1, 0]

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            theta_from_outcomes([Phase(0), Phase(1)], [])


class TestVerifier:
    def test_exhaustive_two_qubits(self):
        report = verify_i1dc(2, exhaustive=True)
        assert report.passed and report.tuples == 64 and report.branches == 128

    def test_eight_qubits(self):
        report = verify_i1dc(8, trials=200, seed=3)
        assert report.passed and report.branches == 200 * 2**7
        assert report.min_fidelity >= 1 - 1e-10

    def test_wrong_rule_is_caught(self):
        report = verify_i1dc(4, trials=50, t_rule=previous_outcome_t_rule)
        assert not report.passed and report.failures
        assert "FAIL" in report.summary()

    @pytest.mark.parametrize("k", [0, 15])
    def test_k_range(self, k):
        with pytest.raises(DomainError):
            verify_i1dc(k)
