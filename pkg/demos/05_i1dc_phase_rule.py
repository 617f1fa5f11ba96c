"""
Compressing k qubits into one
=============================

The server entangles the client's qubits pairwise and measures all but the
last in the X basis. The survivor is |+_theta> with theta a signed sum of
the input phases; the signs depend on the parities of later outcomes.
"""

from rbsp.i1dc import Phase, fidelity, i1dc_run, prepare_plus, previous_outcome_t_rule, theta_from_outcomes, verify_i1dc

phases = [Phase(1), Phase(3), Phase(6), Phase(2), Phase(5)]

# One sampled run: every outcome is a fair coin, whatever the phases are
run = i1dc_run(phases, rng=42)
print("outcomes     ", run.outcomes)
print("probabilities", [round(p, 12) for p in run.probabilities])
print("theta        ", f"{run.theta.k8} * pi/4")
print("fidelity     ", fidelity(run.output_state, prepare_plus(run.theta)))

# A plausible-looking but wrong sign rule gives the wrong phase
wrong = theta_from_outcomes(phases, run.outcomes, previous_outcome_t_rule)
print("wrong rule   ", f"{wrong.k8} * pi/4, fidelity {fidelity(run.output_state, prepare_plus(wrong)):.3f}")

# Every outcome branch, for many random inputs
for k in (2, 5, 8):
    print(verify_i1dc(k, trials=200, seed=k).summary())
print(verify_i1dc(4, trials=50, t_rule=previous_outcome_t_rule).summary())
