"""Mutual-learning experiment platform.

A simulated agent with homeostatically driven needs learns which babble to
utter per motivation; a caregiver (simulated model or live human) learns
which object each babble asks for. The package runs the 2x2 design
(differential vs. non-differential outcome gestures, greedy vs.
epsilon-greedy action selection) headlessly for statistical reproduction,
and interactively through a websocket session service.
"""

from .analysis import (
    BLOCK_SPANS,
    BlockStats,
    ConditionSummary,
    aggregate_block_means,
    block_means,
    block_pair_pvalues,
    block_triple,
    paired_permutation_test,
    report,
    session_block_triple,
    summarize_sessions,
    to_csv,
)
from .babble import (
    BABBLE_ORDER,
    GREEDY,
    BabbleChoice,
    BabbleId,
    Policy,
    QTable,
    RewardSignal,
    epsilon_greedy,
    reset,
    select_babble,
    update_q,
)
from .caregivers import (
    Caregiver,
    OracleCaregiver,
    RandomCaregiver,
    ScriptedCaregiver,
    TwoRouteCaregiver,
    TwoRouteParams,
    make_caregiver,
)
from .engine import (
    CONDITIONS,
    LATIN_SQUARE,
    BatchConfig,
    Condition,
    CountingRNG,
    ParticipantRun,
    Robot,
    SessionConfig,
    SessionResult,
    TrialRecord,
    begin_trial,
    complete_trial,
    condition_order,
    conditions_for,
    participant_seed,
    run_participant,
    run_session,
    run_trial,
    session_seed,
)
from .homeostat import (
    DEFAULT_TAUS,
    MotivationId,
    MotivationReading,
    NeedId,
    NeedState,
    default_needs,
    deficit,
    level_at,
    motivation,
    satisfy,
)
from .outcomes import (
    GESTURE_FOR_NEED,
    OBJECT_FOR_NEED,
    POSITIVE_GESTURES,
    GestureId,
    ObjectId,
    TrainingType,
    outcome_for,
)
from .transcript import (
    Transcript,
    TranscriptWriter,
    read_directory,
    read_transcript,
    regenerate,
    verify_replay,
    write_transcript,
)

__version__ = "0.1.0"
