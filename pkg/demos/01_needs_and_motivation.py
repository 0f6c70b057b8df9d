"""Walk through the agent's internal needs and how a motivation is chosen.

Every need starts at its set point of 0.5 and decays exponentially with
its own time constant (thirst 10, hunger 12, curiosity 8 trial ticks).
The motivational state at any tick is the need with the largest deficit,
which is why curiosity (fastest decay) always drives the first trial.
"""

from colearn import NeedId, default_needs, deficit, level_at, motivation, satisfy

needs = default_needs()

print("Decay from the set point (levels per tick):")
print(f"{'tick':>4}  {'thirst':>8}  {'hunger':>8}  {'curiosity':>9}   winner")
for t in range(0, 13, 2):
    levels = {n: level_at(needs[n], t) for n in NeedId}
    winner = motivation(needs, t).state.value
    print(
        f"{t:>4}  {levels[NeedId.THIRST]:>8.4f}  {levels[NeedId.HUNGER]:>8.4f}"
        f"  {levels[NeedId.CURIOSITY]:>9.4f}   {winner}"
    )

print()
print("Satisfying a need snaps it back to 0.5 and the clock keeps running:")
needs[NeedId.CURIOSITY] = satisfy(needs[NeedId.CURIOSITY], 6)
for t in (6, 8, 10):
    reading = motivation(needs, t)
    print(
        f"  t={t}: curiosity level {level_at(needs[NeedId.CURIOSITY], t):.4f}, "
        f"thirst deficit {deficit(needs[NeedId.THIRST], t):.4f} -> wants to {reading.state.value}"
    )

print()
print("After satisfaction the slowest-starved need takes over; ties go to")
print("thirst, then hunger, then curiosity, but only the all-equal case ties.")
