"""Tabular value learning over babble utterances, with greedy and epsilon-greedy selection.

The agent keeps a 3x3 table of values, one per (motivational state, babble)
pair. The update rule is a plain contraction toward the reward:

    value <- alpha * value + reward

which drives repeated identical rewards to the fixed point reward / (1 - alpha).

RNG discipline: ``select_babble`` always consumes exactly one uniform draw
for the explore/exploit decision (even when epsilon is 0), then at most one
more draw (uniform babble when exploring, tie-break when several entries
share the maximum). This keeps a greedy policy and an epsilon=0 policy on
identical draw sequences, so transcripts replay bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from .homeostat import MotivationId

if TYPE_CHECKING:
    from .outcomes import ObjectId


class BabbleId(Enum):
    """The three utterances the agent can produce, in canonical order."""

    BADA = "bada"
    PABA = "paba"
    WADA = "wada"


BABBLE_ORDER: tuple[BabbleId, ...] = (BabbleId.BADA, BabbleId.PABA, BabbleId.WADA)
MOTIVATION_ORDER: tuple[MotivationId, ...] = (
    MotivationId.DRINK,
    MotivationId.EAT,
    MotivationId.PLAY,
)

_STATE_INDEX = {m: i for i, m in enumerate(MOTIVATION_ORDER)}
_BABBLE_INDEX = {b: i for i, b in enumerate(BABBLE_ORDER)}


@dataclass(frozen=True)
class Policy:
    """Action-selection policy: greedy, or epsilon-greedy with the given rate."""

    name: str
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")


@dataclass(frozen=True)
class RewardSignal:
    """A trial's reward with its provenance: +1 iff the object matched the need."""

    value: int
    object: ObjectId
    trial: int

    def __post_init__(self) -> None:
        if self.value not in (-1, 1):
            raise ValueError(f"reward must be +1 or -1, got {self.value}")


GREEDY = Policy("greedy", 0.0)


def epsilon_greedy(epsilon: float = 0.1) -> Policy:
    return Policy("epsilon-greedy", epsilon)


class QTable:
    """3x3 table of state-action values. Instances are treated as immutable values."""

    def __init__(self, values: np.ndarray | None = None, alpha: float = 0.5):
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {alpha}")
        if values is None:
            values = np.zeros((3, 3), dtype=np.float64)
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (3, 3):
            raise ValueError(f"expected 3x3 table, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("table entries must be finite")
        self._values = values
        self._values.flags.writeable = False
        self.alpha = alpha

    def value(self, state: MotivationId, action: BabbleId) -> float:
        return float(self._values[_STATE_INDEX[state], _BABBLE_INDEX[action]])

    def row(self, state: MotivationId) -> np.ndarray:
        return self._values[_STATE_INDEX[state]]

    def snapshot(self) -> tuple[float, ...]:
        """Nine values, row-major in canonical (motivation, babble) order."""
        return tuple(float(v) for v in self._values.ravel())

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, QTable)
            and self.alpha == other.alpha
            and bool(np.array_equal(self._values, other._values))
        )

    def __repr__(self) -> str:
        return f"QTable(alpha={self.alpha}, values={self._values.tolist()})"


def reset(q: QTable) -> QTable:
    """All entries back to zero; first selections become uniform tie-breaks."""
    return QTable(alpha=q.alpha)


def update_q(
    q: QTable, state: MotivationId, action: BabbleId, reward: RewardSignal | int
) -> QTable:
    """Apply value <- alpha * value + reward to exactly one cell."""
    r = reward.value if isinstance(reward, RewardSignal) else reward
    values = q._values.copy()
    i, j = _STATE_INDEX[state], _BABBLE_INDEX[action]
    values[i, j] = q.alpha * values[i, j] + r
    return QTable(values, alpha=q.alpha)


class BabbleChoice(NamedTuple):
    babble: BabbleId
    explored: bool  # True when the epsilon branch forced a uniform draw


def select_babble(
    q: QTable,
    state: MotivationId,
    policy: Policy,
    rng: np.random.Generator,
) -> BabbleChoice:
    """Pick a babble for the given motivational state.

    With probability epsilon: a uniform draw over all three babbles (the
    greedy choice included). Otherwise: the argmax for this state, ties
    broken uniformly at random.
    """
    u = float(rng.random())  # always drawn, so greedy == epsilon_greedy(0)
    if u < policy.epsilon:
        return BabbleChoice(BABBLE_ORDER[int(rng.integers(3))], True)
    row = q.row(state)
    ties = np.flatnonzero(row == row.max())
    if len(ties) == 1:
        return BabbleChoice(BABBLE_ORDER[int(ties[0])], False)
    return BabbleChoice(BABBLE_ORDER[int(ties[int(rng.integers(len(ties)))])], False)
