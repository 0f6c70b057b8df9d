"""Show the value update rule and the two selection policies.

The update is value <- alpha * value + reward (alpha = 0.5), a contraction
that drives repeated identical rewards to reward / (1 - alpha) = +/-2.
Selection is greedy over the motivational state's row, or epsilon-greedy
with a 0.1 chance of a uniform babble.
"""

from colearn import (
    BabbleId,
    CountingRNG,
    MotivationId,
    QTable,
    epsilon_greedy,
    select_babble,
    update_q,
)

state, action = MotivationId.EAT, BabbleId.PABA

print("Contraction toward the +1 fixed point (2.0):")
q = QTable()
for step in range(1, 9):
    q = update_q(q, state, action, +1)
    print(f"  step {step}: value = {q.value(state, action):.6f}")

print()
print("One punishment knocks the value back by more than one reward regains:")
q = update_q(q, state, action, -1)
print(f"  after -1: value = {q.value(state, action):.6f}")

print()
print("Epsilon-greedy explores about 2.4 times per 24 trials (epsilon = 0.1):")
rng = CountingRNG(7)
policy = epsilon_greedy(0.1)
q = update_q(QTable(), state, BabbleId.BADA, +1)  # make bada the clear favorite
windows = []
for _ in range(200):
    explored = sum(select_babble(q, state, policy, rng).explored for _ in range(24))
    windows.append(explored)
print(f"  mean forced-random picks over 200 windows: {sum(windows)/len(windows):.2f}")
print(f"  rng draws consumed: {rng.draws}")
