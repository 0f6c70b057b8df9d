"""Simulated caregivers for headless runs.

The caregiver's job is the human's role in live sessions: hear a babble,
present one of the three objects. Three models are provided:

* ``OracleCaregiver`` — always presents the object matching the agent's
  true current need (test harness ceiling; needs the true need passed in).
* ``RandomCaregiver`` — uniform object each trial (floor: expected reward
  is (1/3)(+1) + (2/3)(-1) = -1/3).
* ``TwoRouteCaregiver`` — an associative learner with two routes: a direct
  babble->object table updated by trial feedback, plus an indirect
  babble->gesture->object pathway built from the agent's expressive
  outcomes. The indirect route carries information only when gestures are
  differential, which is what makes training type matter in simulation.

A ``ScriptedCaregiver`` replays a fixed choice sequence and consumes no
randomness; it is how recorded live sessions are reproduced headlessly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .babble import BABBLE_ORDER, BabbleId
from .homeostat import NeedId
from .outcomes import (
    OBJECT_FOR_NEED,
    OBJECT_ORDER,
    POSITIVE_GESTURES,
    GestureId,
    ObjectId,
)

_GESTURE_ORDER: tuple[GestureId, ...] = POSITIVE_GESTURES + (GestureId.SAD,)
_BABBLE_INDEX = {b: i for i, b in enumerate(BABBLE_ORDER)}
_OBJECT_INDEX = {o: i for i, o in enumerate(OBJECT_ORDER)}
_GESTURE_INDEX = {g: i for i, g in enumerate(_GESTURE_ORDER)}


@dataclass(frozen=True)
class TwoRouteParams:
    """Knobs for the two-route learner.

    direct_step: additive update to the direct route per trial (+ on
    correct, - on incorrect). indirect_weight: how strongly the
    gesture-mediated pathway contributes to the choice score. explore:
    probability of ignoring the scores and picking a uniform object.
    """

    direct_step: float = 0.5
    indirect_weight: float = 1.0
    explore: float = 0.1

    def __post_init__(self) -> None:
        if self.direct_step <= 0:
            raise ValueError("direct_step must be positive")
        if self.indirect_weight < 0:
            raise ValueError("indirect_weight must be non-negative")
        if not 0.0 <= self.explore <= 1.0:
            raise ValueError("explore must be in [0, 1]")


class Caregiver:
    """Interface: choose an object for a babble, then observe the trial's outcome."""

    name = "caregiver"

    def choose_object(
        self,
        babble: BabbleId,
        rng: np.random.Generator,
        true_need: NeedId | None = None,
    ) -> ObjectId:
        raise NotImplementedError

    def observe_feedback(
        self,
        babble: BabbleId,
        chosen: ObjectId,
        correct: bool,
        gesture: GestureId,
    ) -> None:
        """Default: stateless caregivers ignore feedback."""

    def reset(self) -> None:
        """Forget everything; called at each condition boundary."""


class OracleCaregiver(Caregiver):
    name = "oracle"

    def choose_object(
        self,
        babble: BabbleId,
        rng: np.random.Generator,
        true_need: NeedId | None = None,
    ) -> ObjectId:
        if true_need is None:
            raise ValueError("oracle caregiver requires the true need")
        return OBJECT_FOR_NEED[true_need]


class RandomCaregiver(Caregiver):
    name = "random"

    def choose_object(
        self,
        babble: BabbleId,
        rng: np.random.Generator,
        true_need: NeedId | None = None,
    ) -> ObjectId:
        return OBJECT_ORDER[int(rng.integers(3))]


class ScriptedCaregiver(Caregiver):
    """Plays back a fixed object sequence; consumes no randomness.

    This matches the draw profile of a live human, so a recorded session
    re-run with the recorded choices reproduces the transcript exactly.
    """

    name = "scripted"

    def __init__(self, choices: list[ObjectId]):
        self._choices = list(choices)
        self._next = 0

    def choose_object(
        self,
        babble: BabbleId,
        rng: np.random.Generator,
        true_need: NeedId | None = None,
    ) -> ObjectId:
        if self._next >= len(self._choices):
            raise IndexError("scripted caregiver ran out of choices")
        choice = self._choices[self._next]
        self._next += 1
        return choice

    def reset(self) -> None:
        self._next = 0


class TwoRouteCaregiver(Caregiver):
    """Associative learner with a direct route and a gesture-mediated route.

    Choice score for object o given babble b:

        score(o | b) = direct[b, o]
                     + indirect_weight * sum_g P(g | b) * P(o | g)

    where P(g | b) normalizes the babble->gesture counts and P(o | g) the
    gesture->object counts (uniform where counts are all zero). Both count
    tables grow only on correct trials: the sad gesture is shared across
    needs and carries no object information, so incorrect trials update
    only the direct route (downward).
    """

    name = "two-route"

    def __init__(self, params: TwoRouteParams | None = None):
        self.params = params or TwoRouteParams()
        self.reset()

    def reset(self) -> None:
        self.direct = np.zeros((3, 3), dtype=np.float64)
        self.expectancy = np.zeros((3, 4), dtype=np.float64)
        self.outcome_response = np.zeros((4, 3), dtype=np.float64)

    def scores(self, babble: BabbleId) -> np.ndarray:
        b = _BABBLE_INDEX[babble]
        gesture_given_babble = _normalize_rows(self.expectancy)[b]
        object_given_gesture = _normalize_rows(self.outcome_response)
        indirect = gesture_given_babble @ object_given_gesture
        return self.direct[b] + self.params.indirect_weight * indirect

    def choose_object(
        self,
        babble: BabbleId,
        rng: np.random.Generator,
        true_need: NeedId | None = None,
    ) -> ObjectId:
        u = float(rng.random())
        if u < self.params.explore:
            return OBJECT_ORDER[int(rng.integers(3))]
        scores = self.scores(babble)
        ties = np.flatnonzero(scores == scores.max())
        if len(ties) == 1:
            return OBJECT_ORDER[int(ties[0])]
        return OBJECT_ORDER[int(ties[int(rng.integers(len(ties)))])]

    def observe_feedback(
        self,
        babble: BabbleId,
        chosen: ObjectId,
        correct: bool,
        gesture: GestureId,
    ) -> None:
        b, o = _BABBLE_INDEX[babble], _OBJECT_INDEX[chosen]
        if correct:
            self.direct[b, o] += self.params.direct_step
            g = _GESTURE_INDEX[gesture]
            self.expectancy[b, g] += 1
            self.outcome_response[g, o] += 1
        else:
            self.direct[b, o] -= self.params.direct_step


def _normalize_rows(counts: np.ndarray) -> np.ndarray:
    """Row-normalize a count table; all-zero rows become uniform."""
    totals = counts.sum(axis=1, keepdims=True)
    out = np.where(totals > 0, counts / np.where(totals > 0, totals, 1.0), 1.0 / counts.shape[1])
    return out


CAREGIVER_KINDS = ("oracle", "random", "two-route")


def make_caregiver(kind: str, params: TwoRouteParams | None = None) -> Caregiver:
    if kind == "oracle":
        return OracleCaregiver()
    if kind == "random":
        return RandomCaregiver()
    if kind == "two-route":
        return TwoRouteCaregiver(params)
    raise ValueError(f"unknown caregiver kind {kind!r} (expected one of {CAREGIVER_KINDS})")
