"""Objects, gestures, and the mapping from trial results to expressive outcomes.

Under differential-outcomes training every (need, correct) pair maps to its
own fixed happy gesture; under the non-differential control a correct trial
draws one of the three happy gestures uniformly. Incorrect trials always
produce the sad gesture, in both training types.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .homeostat import NeedId


class ObjectId(Enum):
    """The three objects a caregiver can present, in canonical order."""

    TEDDY = "teddy"
    COOKIE = "cookie"
    DRINK = "drink"


OBJECT_ORDER: tuple[ObjectId, ...] = (ObjectId.TEDDY, ObjectId.COOKIE, ObjectId.DRINK)

OBJECT_FOR_NEED: dict[NeedId, ObjectId] = {
    NeedId.CURIOSITY: ObjectId.TEDDY,
    NeedId.HUNGER: ObjectId.COOKIE,
    NeedId.THIRST: ObjectId.DRINK,
}

NEED_FOR_OBJECT: dict[ObjectId, NeedId] = {o: n for n, o in OBJECT_FOR_NEED.items()}


class GestureId(Enum):
    HAPPY_ARMS = "happy_arms"
    HAPPY_HEAD = "happy_head"
    HAPPY_ANTENNAE = "happy_antennae"
    SAD = "sad"

    @property
    def display_hint(self) -> str:
        return _DISPLAY_HINTS[self]

    @property
    def valence(self) -> str:
        return "negative" if self is GestureId.SAD else "positive"


_DISPLAY_HINTS: dict[GestureId, str] = {
    GestureId.HAPPY_ARMS: "waves both arms with a cheerful beep",
    GestureId.HAPPY_HEAD: "bobs its head with a cheerful beep",
    GestureId.HAPPY_ANTENNAE: "wiggles its antennae with a cheerful beep",
    GestureId.SAD: "looks down, antennae drooping, with a sad beep",
}

POSITIVE_GESTURES: tuple[GestureId, ...] = (
    GestureId.HAPPY_ARMS,
    GestureId.HAPPY_HEAD,
    GestureId.HAPPY_ANTENNAE,
)

#: Fixed need -> gesture bijection used when training is differential.
#: Any bijection works for the procedure; this one is the configured default.
GESTURE_FOR_NEED: dict[NeedId, GestureId] = {
    NeedId.THIRST: GestureId.HAPPY_ARMS,
    NeedId.HUNGER: GestureId.HAPPY_HEAD,
    NeedId.CURIOSITY: GestureId.HAPPY_ANTENNAE,
}


class TrainingType(Enum):
    DOT = "dot"
    NON_DOT = "non-dot"


def outcome_for(
    training: TrainingType,
    motivated_need: NeedId,
    correct: bool,
    rng: np.random.Generator,
    gesture_map: dict[NeedId, GestureId] | None = None,
) -> GestureId:
    """Gesture shown after a trial.

    Incorrect trials are sad regardless of training type and consume no
    randomness. Correct DOT trials use the fixed per-need gesture; correct
    non-DOT trials consume one draw for a uniform happy gesture.
    """
    if not correct:
        return GestureId.SAD
    if training is TrainingType.DOT:
        return (gesture_map or GESTURE_FOR_NEED)[motivated_need]
    return POSITIVE_GESTURES[int(rng.integers(3))]
