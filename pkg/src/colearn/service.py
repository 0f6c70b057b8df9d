"""Network front door for live human-caregiver sessions.

A browser client connects over a websocket, joins with an opaque
participant id, and plays through all four conditions: the server runs the
same trial engine as headless mode with the human supplying each object
choice. Transcripts land in the data directory with the same schema as
headless runs, plus per-trial wall-clock timestamps.

Protocol (JSON text frames on /session):

  client -> server   {"type": "join", "participant_id": "..."}
                     {"type": "ready"}
                     {"type": "object_choice", "object_id": "cookie"}
                     {"type": "abort"}
  server -> client   {"type": "session_start", "condition_index": 1, "epochs": 25,
                      "phase": "..."}
                     {"type": "babble", "trial": 3, "babble_id": "bada",
                      "display_text": "bada"}
                     {"type": "outcome", "gesture_id": "...", "valence": "positive",
                      "reward_hidden": true, "display_hint": "..."}
                     {"type": "block_boundary", "block": 1}
                     {"type": "session_end", "summary": {...}}
                     {"type": "error", "message": "..."}

``condition_index`` is the blinded 1-based position in the participant's
order; clients never learn which design cell they are in. Unknown fields
in inbound messages are ignored. Exactly one object choice is accepted per
babble; anything out of turn gets an error reply and no state change.

The trial rhythm: the server sends a babble, the client answers with an
object choice, the server replies with the outcome, and the client
acknowledges with ``ready`` once its display interval is over, which
triggers the next babble (or a block boundary, a between-conditions break,
or the end of the run).
"""

from __future__ import annotations

import asyncio
import json
import os
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .caregivers import ScriptedCaregiver
from .engine import (
    SCHEMA_VERSION,
    CountingRNG,
    Robot,
    SessionConfig,
    TrialStart,
    begin_trial,
    complete_trial,
    condition_order,
    conditions_for,
    participant_seed,
    run_trial,
    session_seed,
)
from .outcomes import ObjectId
from .transcript import TranscriptWriter, read_transcript, transcript_name

N_CONDITIONS = 4
BLOCK_END_TRIALS = (9, 17)  # interior block boundaries of a 25-epoch condition


class Phase(Enum):
    AWAIT_JOIN = "await_join"
    AWAIT_READY = "await_ready"
    AWAIT_CHOICE = "await_choice"
    SHOWING_OUTCOME = "showing_outcome"
    BETWEEN_CONDITIONS = "between_conditions"
    DONE = "done"


@dataclass(frozen=True)
class ServiceSettings:
    data_dir: Path
    base_seed: int = 0
    epochs: int = 25
    epsilon: float = 0.1
    alpha: float = 0.5
    order_offset: int = 0
    choice_timeout: float | None = None  # seconds; None = wait forever
    ui_dir: Path | None = None


def _error(message: str) -> dict:
    return {"type": "error", "message": message}


class LiveSession:
    """State machine for one participant's 4-condition run.

    Pure with respect to I/O apart from the transcript sink:
    ``handle_message`` consumes one inbound message dict and returns the
    outbound message dicts. The websocket layer only pumps frames.
    """

    def __init__(self, settings: ServiceSettings, participant_id: str, participant_index: int):
        self.settings = settings
        self.participant_id = participant_id
        self.participant_index = participant_index
        self.order = condition_order(participant_index, settings.order_offset)
        self.phase = Phase.AWAIT_JOIN
        self.position = 0  # 0-based slot in the participant's order
        self.trial_index = 0  # trials completed in the current condition
        self.pending: TrialStart | None = None
        self.config: SessionConfig | None = None
        self.robot: Robot | None = None
        self.rng: CountingRNG | None = None
        self.writer: TranscriptWriter | None = None
        self.aborted = False
        self._last_outcome: dict | None = None
        self._mid_condition_restore = False
        self._restore_from_disk()

    # -- lifecycle ----------------------------------------------------------

    def _condition_config(self, position: int) -> SessionConfig:
        condition_index = self.order[position]
        condition = conditions_for(self.settings.epsilon)[condition_index]
        return SessionConfig(
            condition=condition,
            seed=session_seed(
                participant_seed(self.settings.base_seed, self.participant_index),
                condition_index,
            ),
            epochs=self.settings.epochs,
            caregiver="human",
            alpha=self.settings.alpha,
        )

    def _transcript_path(self, position: int) -> Path:
        config = self._condition_config(position)
        return self.settings.data_dir / transcript_name(
            self.participant_id, position, config.condition.slug
        )

    def _start_condition(self, position: int) -> None:
        self.position = position
        self.trial_index = 0
        self.pending = None
        self.config = self._condition_config(position)
        self.robot = Robot(self.config)
        self.rng = CountingRNG(self.config.seed)
        self.writer = TranscriptWriter(
            self._transcript_path(position),
            self.config,
            mode="interactive",
            participant_id=self.participant_id,
            condition_position=position,
        )

    def _restore_from_disk(self) -> None:
        """Recover mid-run state from transcripts left by a previous server.

        Completed trials are replayed through the engine with the recorded
        choices, which restores the robot, clock, and rng position exactly.
        ``self.position`` ends up at the condition the participant should
        continue with.
        """
        for position in range(N_CONDITIONS):
            path = self._transcript_path(position)
            if not path.exists():
                self.position = position  # fresh or at a condition boundary
                return
            transcript = read_transcript(path)
            if len(transcript.records) >= self.settings.epochs:
                continue  # condition finished; check the next one
            # Partial condition: rebuild state by replaying the prefix.
            self.position = position
            self.config = transcript.config
            self.robot = Robot(self.config)
            self.rng = CountingRNG(self.config.seed)
            scripted = ScriptedCaregiver([r.object for r in transcript.records])
            self.writer = TranscriptWriter(
                path,
                self.config,
                mode="interactive",
                participant_id=self.participant_id,
                condition_position=position,
            )
            for i, record in enumerate(transcript.records, start=1):
                regenerated = run_trial(
                    self.robot, scripted, self.config.condition.training, self.rng, i
                )
                regenerated.wall_time = record.wall_time
                self.writer.write_record(regenerated)
            self.trial_index = len(transcript.records)
            self._mid_condition_restore = True
            return
        self.phase = Phase.DONE  # all four conditions complete on disk
        self.position = N_CONDITIONS - 1
        self.trial_index = self.settings.epochs

    # -- message handling -----------------------------------------------------

    def handle_message(self, msg: dict) -> list[dict]:
        msg_type = msg.get("type")
        if msg_type == "abort":
            return self._abort("aborted by client")
        if msg_type == "join":
            return self._on_join(msg)
        if msg_type == "ready":
            return self._on_ready()
        if msg_type == "object_choice":
            return self._on_choice(msg)
        return [_error(f"unknown message type {msg_type!r}")]

    def _on_join(self, msg: dict) -> list[dict]:
        if msg.get("participant_id") != self.participant_id:
            return [_error("participant_id mismatch for this session")]
        if self.phase is Phase.DONE:
            return [self._session_end_message()]
        self.aborted = False
        if self.phase is Phase.AWAIT_JOIN:
            if self._mid_condition_restore:
                # Resume exactly at the pending trial.
                self._mid_condition_restore = False
                self.phase = Phase.AWAIT_CHOICE
                return [self._session_start_message(), self._next_babble()]
            self._start_condition(self.position)
            self.phase = Phase.AWAIT_READY
            return [self._session_start_message()]
        # Reconnect of a live session: resync the client to the current state.
        out = [self._session_start_message()]
        if self.phase is Phase.AWAIT_CHOICE and self.pending is not None:
            out.append(self._babble_message(self.pending))
        elif self.phase is Phase.SHOWING_OUTCOME and self._last_outcome is not None:
            out.append(self._last_outcome)
        return out

    def _on_ready(self) -> list[dict]:
        if self.phase is Phase.AWAIT_READY:
            self.phase = Phase.AWAIT_CHOICE
            return [self._next_babble()]
        if self.phase is Phase.SHOWING_OUTCOME:
            return self._advance_after_outcome()
        if self.phase is Phase.BETWEEN_CONDITIONS:
            self._start_condition(self.position + 1)
            self.phase = Phase.AWAIT_READY
            return [self._session_start_message()]
        return [_error(f"ready not expected in state {self.phase.value}")]

    def _on_choice(self, msg: dict) -> list[dict]:
        if self.phase is not Phase.AWAIT_CHOICE:
            return [_error(f"not awaiting choice (state {self.phase.value})")]
        try:
            chosen = ObjectId(msg.get("object_id"))
        except ValueError:
            return [_error(f"unknown object_id {msg.get('object_id')!r}")]
        assert self.pending is not None and self.robot is not None
        assert self.rng is not None and self.writer is not None and self.config is not None
        record = complete_trial(
            self.robot,
            self.config.condition.training,
            self.pending,
            chosen,
            self.rng,
            caregiver=None,
            trial_index=self.trial_index + 1,
            wall_time=time.time(),
        )
        self.writer.write_record(record)
        self.trial_index += 1
        self.pending = None
        self.phase = Phase.SHOWING_OUTCOME
        self._last_outcome = {
            "type": "outcome",
            "gesture_id": record.gesture.value,
            "valence": record.gesture.valence,
            "reward_hidden": True,
            "display_hint": record.gesture.display_hint,
        }
        return [self._last_outcome]

    def _advance_after_outcome(self) -> list[dict]:
        out: list[dict] = []
        self._last_outcome = None
        if self.trial_index >= self.settings.epochs:
            out.append({"type": "block_boundary", "block": 3})
            self._close_writer()
            if self.position + 1 >= N_CONDITIONS:
                self.phase = Phase.DONE
                out.append(self._session_end_message())
            else:
                self.phase = Phase.BETWEEN_CONDITIONS
            return out
        if self.settings.epochs == 25 and self.trial_index in BLOCK_END_TRIALS:
            out.append(
                {
                    "type": "block_boundary",
                    "block": BLOCK_END_TRIALS.index(self.trial_index) + 1,
                }
            )
        self.phase = Phase.AWAIT_CHOICE
        out.append(self._next_babble())
        return out

    def _abort(self, reason: str) -> list[dict]:
        self.aborted = True
        self._close_writer()
        end = self._session_end_message(reason)
        # Park the session in a resumable state: the next join rebuilds from
        # the persisted transcripts and continues at the pending trial.
        self.phase = Phase.AWAIT_JOIN
        self.pending = None
        self.robot = None
        self.rng = None
        self.config = None
        self.trial_index = 0
        self._last_outcome = None
        self._mid_condition_restore = False
        self._restore_from_disk()
        return [end]

    def on_disconnect(self) -> None:
        """Keep state for resume; transcripts are already flushed per line."""
        if self.phase is not Phase.DONE:
            self.aborted = True

    # -- outbound builders ------------------------------------------------------

    def _next_babble(self) -> dict:
        assert self.robot is not None and self.rng is not None
        self.pending = begin_trial(self.robot, self.rng)
        return self._babble_message(self.pending)

    def _babble_message(self, start: TrialStart) -> dict:
        return {
            "type": "babble",
            "trial": self.trial_index + 1,
            "babble_id": start.choice.babble.value,
            "display_text": start.choice.babble.value,
        }

    def _session_start_message(self) -> dict:
        return {
            "type": "session_start",
            "condition_index": self.position + 1,  # blinded positional label
            "epochs": self.settings.epochs,
            "phase": self.phase.value,
        }

    def _session_end_message(self, reason: str | None = None) -> dict:
        conditions_completed = self.position + (
            1 if self.trial_index >= self.settings.epochs else 0
        )
        summary = {
            "participant_id": self.participant_id,
            "conditions_completed": conditions_completed,
            "trials_completed_in_condition": self.trial_index,
            "aborted": self.aborted,
        }
        if reason:
            summary["reason"] = reason
        return {"type": "session_end", "summary": summary}

    def _close_writer(self) -> None:
        if self.writer is not None:
            self.writer.close()
            self.writer = None


# ---------------------------------------------------------------------------
# Participant registry: stable index assignment across reconnects/restarts
# ---------------------------------------------------------------------------


class ParticipantRegistry:
    def __init__(self, data_dir: Path):
        self.path = data_dir / "registry.json"
        self._indices: dict[str, int] = {}
        if self.path.exists():
            self._indices = json.loads(self.path.read_text(encoding="utf-8"))

    def index_for(self, participant_id: str) -> int:
        if participant_id not in self._indices:
            self._indices[participant_id] = len(self._indices)
            self.path.write_text(
                json.dumps(self._indices, sort_keys=True), encoding="utf-8"
            )
        return self._indices[participant_id]


# ---------------------------------------------------------------------------
# FastAPI application
# ---------------------------------------------------------------------------


def build_app(settings: ServiceSettings) -> FastAPI:
    settings.data_dir.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="colearn session service")
    registry = ParticipantRegistry(settings.data_dir)
    sessions: dict[str, LiveSession] = {}

    app.state.settings = settings
    app.state.sessions = sessions

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "schema_version": SCHEMA_VERSION}

    @app.get("/results/{session_id}")
    def results(session_id: str):
        transcripts = []
        for path in sorted(settings.data_dir.glob(f"{session_id}_*.jsonl")):
            lines = path.read_text(encoding="utf-8").splitlines()
            transcripts.append(
                {
                    "filename": path.name,
                    "manifest": json.loads(lines[0]),
                    "records": [json.loads(line) for line in lines[1:]],
                }
            )
        if not transcripts:
            return JSONResponse(
                status_code=404,
                content={"error": f"no transcripts for session {session_id!r}"},
            )
        return {"participant_id": session_id, "transcripts": transcripts}

    @app.websocket("/session")
    async def session_socket(ws: WebSocket) -> None:
        await ws.accept()
        session: LiveSession | None = None
        try:
            while True:
                timeout = (
                    settings.choice_timeout
                    if session is not None and session.phase is Phase.AWAIT_CHOICE
                    else None
                )
                try:
                    if timeout is None:
                        raw = await ws.receive_text()
                    else:
                        raw = await asyncio.wait_for(ws.receive_text(), timeout)
                except asyncio.TimeoutError:
                    for out in session._abort("choice timeout"):
                        await ws.send_text(json.dumps(out))
                    break
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict):
                        raise ValueError("frame is not an object")
                except ValueError:
                    await ws.send_text(json.dumps(_error("malformed message payload")))
                    continue
                if session is None:
                    if msg.get("type") != "join":
                        await ws.send_text(json.dumps(_error("join first")))
                        continue
                    pid = msg.get("participant_id")
                    if not isinstance(pid, str) or not pid:
                        await ws.send_text(json.dumps(_error("participant_id required")))
                        continue
                    if pid not in sessions:
                        sessions[pid] = LiveSession(settings, pid, registry.index_for(pid))
                    session = sessions[pid]
                for out in session.handle_message(msg):
                    await ws.send_text(json.dumps(out))
                if session.phase is Phase.DONE:
                    break
        except WebSocketDisconnect:
            pass
        finally:
            if session is not None:
                session.on_disconnect()

    if settings.ui_dir is not None and settings.ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=settings.ui_dir, html=True), name="ui")

    return app


def serve(settings: ServiceSettings, bind: str = "127.0.0.1:8000") -> None:
    import uvicorn

    host, _, port = bind.rpartition(":")
    uvicorn.run(build_app(settings), host=host or "127.0.0.1", port=int(port))


def apply_env_overrides(
    settings: ServiceSettings, bind: str
) -> tuple[ServiceSettings, str]:
    """COLEARN_BIND / COLEARN_DATA take precedence over CLI flags."""
    import dataclasses

    env_bind = os.environ.get("COLEARN_BIND")
    env_data = os.environ.get("COLEARN_DATA")
    if env_data:
        settings = dataclasses.replace(settings, data_dir=Path(env_data))
    return settings, (env_bind or bind)
