"""Trial loop, sessions, and participant runs.

One trial is a fixed nine-step sequence: advance the clock and read the
motivation, select a babble, let the caregiver choose an object, score it,
satisfy the need if the object matched, show the gesture, let the caregiver
learn from the outcome, update the babble values, and emit a record.

Randomness comes from a single counted stream per session. Draw order
within a trial is fixed (babble selection, then caregiver choice, then
gesture draw), so a (seed, config) pair replays to an identical transcript.

Conditions are the four cells of a 2x2 design (training type x policy
type). Participants see all four, ordered by a balanced 4x4 Latin square
row selected by participant index, with per-condition seeds derived from
the participant seed so any single session can be re-run in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .babble import (
    GREEDY,
    BabbleChoice,
    BabbleId,
    Policy,
    QTable,
    RewardSignal,
    epsilon_greedy,
    select_babble,
    update_q,
)
from .caregivers import Caregiver, TwoRouteParams, make_caregiver
from .homeostat import (
    DEFAULT_TAUS,
    MotivationId,
    MotivationReading,
    NEED_FOR_MOTIVATION,
    NeedId,
    NeedState,
    default_needs,
    motivation,
    satisfy,
)
from .outcomes import (
    OBJECT_FOR_NEED,
    GestureId,
    ObjectId,
    TrainingType,
    outcome_for,
)

SCHEMA_VERSION = 1


class CountingRNG:
    """Seeded random stream that counts every draw it hands out.

    The count goes into each trial record, which makes replay divergence
    easy to localize.
    """

    def __init__(self, seed: int):
        self._rng = np.random.default_rng(seed)
        self.draws = 0

    def random(self) -> float:
        self.draws += 1
        return float(self._rng.random())

    def integers(self, high: int) -> int:
        self.draws += 1
        return int(self._rng.integers(high))


# ---------------------------------------------------------------------------
# Conditions and configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    """One cell of the 2x2 design."""

    training: TrainingType
    policy: Policy

    @property
    def slug(self) -> str:
        training = "dot" if self.training is TrainingType.DOT else "nondot"
        policy = "greedy" if self.policy.epsilon == 0 else "egreedy"
        return f"{training}-{policy}"

    @property
    def label(self) -> str:
        training = "DOT" if self.training is TrainingType.DOT else "Non-DOT"
        policy = "greedy" if self.policy.epsilon == 0 else "epsilon-greedy"
        return f"{training} + {policy}"


def conditions_for(epsilon: float = 0.1) -> tuple[Condition, ...]:
    """The four cells in canonical order: DOT first, greedy before epsilon-greedy."""
    return (
        Condition(TrainingType.DOT, GREEDY),
        Condition(TrainingType.DOT, epsilon_greedy(epsilon)),
        Condition(TrainingType.NON_DOT, GREEDY),
        Condition(TrainingType.NON_DOT, epsilon_greedy(epsilon)),
    )


CONDITIONS = conditions_for()


@dataclass(frozen=True)
class SessionConfig:
    condition: Condition
    seed: int
    epochs: int = 25
    caregiver: str = "two-route"
    caregiver_params: TwoRouteParams | None = None
    alpha: float = 0.5
    taus: dict[NeedId, float] = field(default_factory=lambda: dict(DEFAULT_TAUS))

    def __post_init__(self) -> None:
        if self.epochs < 2:
            raise ValueError("epochs must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass
class TrialRecord:
    """One trial's transcript entry.

    ``explored`` is in-memory bookkeeping only (whether the epsilon branch
    fired); the persisted schema carries exactly the other fields.
    """

    trial_index: int
    motivation: MotivationId
    babble: BabbleId
    object: ObjectId
    correct: bool
    reward: int
    gesture: GestureId
    q_snapshot: tuple[float, ...]
    rng_draw_count: int
    wall_time: float | None = None
    explored: bool = False


# ---------------------------------------------------------------------------
# Robot state bundle
# ---------------------------------------------------------------------------


class Robot:
    """Needs, trial clock, value table, and policy for one session."""

    def __init__(self, config: SessionConfig):
        self.policy = config.condition.policy
        self._taus = dict(config.taus)
        self._alpha = config.alpha
        self.reset()

    def reset(self) -> None:
        self.needs: dict[NeedId, NeedState] = default_needs(self._taus)
        self.clock = 0
        self.q = QTable(alpha=self._alpha)


@dataclass(frozen=True)
class TrialStart:
    """The robot's half of a trial: clock tick, motivation, and babble."""

    t: int
    reading: MotivationReading
    choice: BabbleChoice


def begin_trial(robot: Robot, rng: CountingRNG) -> TrialStart:
    """Steps 1-2: advance the clock, read the motivation, pick a babble."""
    robot.clock += 1
    reading = motivation(robot.needs, robot.clock)
    choice = select_babble(robot.q, reading.state, robot.policy, rng)
    return TrialStart(robot.clock, reading, choice)


def complete_trial(
    robot: Robot,
    training: TrainingType,
    start: TrialStart,
    chosen: ObjectId,
    rng: CountingRNG,
    caregiver: Caregiver | None = None,
    trial_index: int = 0,
    wall_time: float | None = None,
) -> TrialRecord:
    """Steps 4-9: score the object, satisfy, gesture, caregiver and value updates.

    ``caregiver`` is None in live sessions, where the human plays that role
    and there is no model to update.
    """
    need = NEED_FOR_MOTIVATION[start.reading.state]
    correct = chosen == OBJECT_FOR_NEED[need]
    reward = RewardSignal(1 if correct else -1, chosen, start.t)
    if correct:
        robot.needs[need] = satisfy(robot.needs[need], start.t)
    gesture = outcome_for(training, need, correct, rng)
    if caregiver is not None:
        caregiver.observe_feedback(start.choice.babble, chosen, correct, gesture)
    robot.q = update_q(robot.q, start.reading.state, start.choice.babble, reward)
    return TrialRecord(
        trial_index=trial_index,
        motivation=start.reading.state,
        babble=start.choice.babble,
        object=chosen,
        correct=correct,
        reward=reward.value,
        gesture=gesture,
        q_snapshot=robot.q.snapshot(),
        rng_draw_count=rng.draws,
        wall_time=wall_time,
        explored=start.choice.explored,
    )


def run_trial(
    robot: Robot,
    caregiver: Caregiver,
    training: TrainingType,
    rng: CountingRNG,
    trial_index: int,
) -> TrialRecord:
    """One full trial against a caregiver model."""
    start = begin_trial(robot, rng)
    need = NEED_FOR_MOTIVATION[start.reading.state]
    chosen = caregiver.choose_object(start.choice.babble, rng, true_need=need)
    return complete_trial(
        robot, training, start, chosen, rng, caregiver, trial_index=trial_index
    )


# ---------------------------------------------------------------------------
# Sessions and participants
# ---------------------------------------------------------------------------


@dataclass
class SessionResult:
    config: SessionConfig
    records: list[TrialRecord]
    participant_id: str | None = None
    condition_position: int | None = None  # 0-based slot in the participant's order

    def rewards(self) -> list[int]:
        return [r.reward for r in self.records]

    def explored_trials(self) -> tuple[int, ...]:
        return tuple(r.trial_index for r in self.records if r.explored)


def run_session(
    config: SessionConfig,
    caregiver: Caregiver | None = None,
    participant_id: str | None = None,
    condition_position: int | None = None,
) -> SessionResult:
    """Run one condition from a fresh reset: robot, caregiver, and clock all new."""
    if caregiver is None:
        caregiver = make_caregiver(config.caregiver, config.caregiver_params)
    caregiver.reset()
    robot = Robot(config)
    rng = CountingRNG(config.seed)
    records = [
        run_trial(robot, caregiver, config.condition.training, rng, trial_index)
        for trial_index in range(1, config.epochs + 1)
    ]
    return SessionResult(
        config=config,
        records=records,
        participant_id=participant_id,
        condition_position=condition_position,
    )


# ---------------------------------------------------------------------------
# Participant runs: balanced ordering and per-condition seeds
# ---------------------------------------------------------------------------

#: Balanced 4x4 Latin square (Williams design): every condition appears once
#: per position and immediately precedes every other condition exactly once.
LATIN_SQUARE: tuple[tuple[int, int, int, int], ...] = (
    (0, 1, 3, 2),
    (1, 2, 0, 3),
    (2, 3, 1, 0),
    (3, 0, 2, 1),
)


def condition_order(participant_index: int, offset: int = 0) -> tuple[int, ...]:
    """Canonical condition indices in presentation order for this participant."""
    if participant_index < 0:
        raise ValueError("participant_index must be non-negative")
    return LATIN_SQUARE[(participant_index + offset) % 4]


def participant_seed(base_seed: int, participant_index: int) -> int:
    """64-bit seed for one participant, stable across runs and worker layouts."""
    seq = np.random.SeedSequence([base_seed, participant_index])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def session_seed(p_seed: int, condition_index: int) -> int:
    """Per-condition seed: participant seed XOR the canonical condition index."""
    return p_seed ^ condition_index


@dataclass
class ParticipantRun:
    participant_id: str
    participant_index: int
    condition_order: tuple[int, ...]
    sessions: list[SessionResult]


@dataclass(frozen=True)
class BatchConfig:
    """Shared knobs for a batch of participants."""

    base_seed: int
    epochs: int = 25
    caregiver: str = "two-route"
    caregiver_params: TwoRouteParams | None = None
    alpha: float = 0.5
    epsilon: float = 0.1
    taus: dict[NeedId, float] = field(default_factory=lambda: dict(DEFAULT_TAUS))
    order_offset: int = 0


def session_config_for(
    batch: BatchConfig, participant_index: int, condition_index: int
) -> SessionConfig:
    condition = conditions_for(batch.epsilon)[condition_index]
    return SessionConfig(
        condition=condition,
        seed=session_seed(participant_seed(batch.base_seed, participant_index), condition_index),
        epochs=batch.epochs,
        caregiver=batch.caregiver,
        caregiver_params=batch.caregiver_params,
        alpha=batch.alpha,
        taus=dict(batch.taus),
    )


def run_participant(participant_index: int, batch: BatchConfig) -> ParticipantRun:
    """All four conditions for one participant, in their Latin-square order."""
    pid = f"p{participant_index:04d}"
    order = condition_order(participant_index, batch.order_offset)
    sessions = []
    for position, condition_index in enumerate(order):
        config = session_config_for(batch, participant_index, condition_index)
        sessions.append(
            run_session(config, participant_id=pid, condition_position=position)
        )
    return ParticipantRun(
        participant_id=pid,
        participant_index=participant_index,
        condition_order=order,
        sessions=sessions,
    )
