"""Internal needs, their exponential decay, and motivational-state selection.

The agent keeps three homeostatic needs (thirst, hunger, curiosity). Each
need sits at its set point of 0.5 immediately after being satisfied and
decays exponentially with its own time constant as the trial clock
advances. The motivational state at any time is the need with the largest
deficit from its set point.

Everything here is a pure function over value types; the trial clock is a
plain integer owned by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class NeedId(Enum):
    """The three internal needs, in canonical (tie-break) order."""

    THIRST = "thirst"
    HUNGER = "hunger"
    CURIOSITY = "curiosity"


class MotivationId(Enum):
    """Motivational states, one per need."""

    DRINK = "drink"
    EAT = "eat"
    PLAY = "play"


NEED_ORDER: tuple[NeedId, ...] = (NeedId.THIRST, NeedId.HUNGER, NeedId.CURIOSITY)

MOTIVATION_FOR_NEED: dict[NeedId, MotivationId] = {
    NeedId.THIRST: MotivationId.DRINK,
    NeedId.HUNGER: MotivationId.EAT,
    NeedId.CURIOSITY: MotivationId.PLAY,
}

NEED_FOR_MOTIVATION: dict[MotivationId, NeedId] = {
    m: n for n, m in MOTIVATION_FOR_NEED.items()
}

#: Default decay constants, asymmetric so no two needs stay in lockstep.
DEFAULT_TAUS: dict[NeedId, float] = {
    NeedId.THIRST: 10.0,
    NeedId.HUNGER: 12.0,
    NeedId.CURIOSITY: 8.0,
}


@dataclass(frozen=True)
class NeedState:
    """One need's parameters plus the trial tick at which it was last satisfied."""

    need: NeedId
    tau: float
    base_level: float = 0.5
    set_point: float = 0.5
    last_satisfied: int = 0

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class MotivationReading:
    """Winning motivational state plus the per-need levels behind it."""

    state: MotivationId
    intensity: float
    per_need_levels: dict[NeedId, float]


def default_needs(taus: dict[NeedId, float] | None = None) -> dict[NeedId, NeedState]:
    """Fresh need states at the start of a condition (all satisfied at tick 0)."""
    taus = taus or DEFAULT_TAUS
    return {need: NeedState(need=need, tau=taus[need]) for need in NEED_ORDER}


def level_at(need: NeedState, t: int) -> float:
    """Current level of a need: base_level * exp(dt / tau) with dt = last_satisfied - t.

    dt <= 0 always, so the value decays from base_level and never reaches 0.
    """
    if t < need.last_satisfied:
        raise ValueError(
            f"clock ran backwards: t={t} < last_satisfied={need.last_satisfied}"
        )
    dt = need.last_satisfied - t
    return need.base_level * math.exp(dt / need.tau)


def deficit(need: NeedState, t: int) -> float:
    """Deviation from set point; the intensity of the matching motivation."""
    return need.set_point - level_at(need, t)


def satisfy(need: NeedState, t: int) -> NeedState:
    """Reset a need to its set point by recording satisfaction at tick t."""
    if t < need.last_satisfied:
        raise ValueError(
            f"clock ran backwards: t={t} < last_satisfied={need.last_satisfied}"
        )
    return replace(need, last_satisfied=t)


def motivation(needs: dict[NeedId, NeedState], t: int) -> MotivationReading:
    """Pick the motivational state with the largest deficit.

    Ties break by canonical need order (thirst, hunger, curiosity), which
    only matters in the fully symmetric all-just-satisfied case.
    """
    levels = {need_id: level_at(state, t) for need_id, state in needs.items()}
    winner = NEED_ORDER[0]
    best = needs[winner].set_point - levels[winner]
    for need_id in NEED_ORDER[1:]:
        d = needs[need_id].set_point - levels[need_id]
        if d > best:
            winner, best = need_id, d
    return MotivationReading(
        state=MOTIVATION_FOR_NEED[winner],
        intensity=best,
        per_need_levels=levels,
    )
