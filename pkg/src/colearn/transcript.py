"""Transcript files: one manifest line, then one JSON line per trial.

The file is UTF-8 line-delimited JSON written with a canonical encoder
(compact separators, fixed key order), so a session re-run from the
manifest's (seed, config) regenerates the file byte for byte. Records are
flushed line-at-a-time; a crash leaves a readable prefix, never a corrupt
file.

Interactive sessions record the human's choices and per-trial wall-clock
timestamps. Replay re-runs those sessions with the recorded choices
standing in for the human; the timestamps themselves are not derivable
from the seed, so replay carries them over from the source records and
verifies every other byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .babble import BabbleId, Policy
from .caregivers import ScriptedCaregiver, TwoRouteParams
from .engine import (
    SCHEMA_VERSION,
    Condition,
    SessionConfig,
    SessionResult,
    TrialRecord,
    run_session,
)
from .homeostat import MotivationId, NeedId
from .outcomes import GestureId, ObjectId, TrainingType


def _dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def config_dict(config: SessionConfig) -> dict:
    params = config.caregiver_params
    return {
        "condition": {
            "training": config.condition.training.value,
            "policy": {
                "name": config.condition.policy.name,
                "epsilon": config.condition.policy.epsilon,
            },
        },
        "epochs": config.epochs,
        "caregiver": config.caregiver,
        "caregiver_params": None
        if params is None
        else {
            "direct_step": params.direct_step,
            "indirect_weight": params.indirect_weight,
            "explore": params.explore,
        },
        "alpha": config.alpha,
        "taus": {need.value: config.taus[need] for need in NeedId},
    }


def config_from_dict(data: dict) -> SessionConfig:
    cond = data["condition"]
    policy = Policy(cond["policy"]["name"], cond["policy"]["epsilon"])
    params = data.get("caregiver_params")
    return SessionConfig(
        condition=Condition(TrainingType(cond["training"]), policy),
        seed=data["seed"],
        epochs=data["epochs"],
        caregiver=data["caregiver"],
        caregiver_params=None if params is None else TwoRouteParams(**params),
        alpha=data["alpha"],
        taus={NeedId(name): tau for name, tau in data["taus"].items()},
    )


def manifest_dict(
    config: SessionConfig,
    mode: str = "headless",
    participant_id: str | None = None,
    condition_position: int | None = None,
) -> dict:
    body = config_dict(config)
    body["seed"] = config.seed
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "participant_id": participant_id,
        "condition_position": condition_position,
        **body,
    }


def record_dict(record: TrialRecord) -> dict:
    return {
        "trial_index": record.trial_index,
        "motivation": record.motivation.value,
        "babble": record.babble.value,
        "object": record.object.value,
        "correct": record.correct,
        "reward": record.reward,
        "gesture": record.gesture.value,
        "q_snapshot": list(record.q_snapshot),
        "rng_draw_count": record.rng_draw_count,
        "wall_time": record.wall_time,
    }


def record_from_dict(data: dict) -> TrialRecord:
    return TrialRecord(
        trial_index=data["trial_index"],
        motivation=MotivationId(data["motivation"]),
        babble=BabbleId(data["babble"]),
        object=ObjectId(data["object"]),
        correct=data["correct"],
        reward=data["reward"],
        gesture=GestureId(data["gesture"]),
        q_snapshot=tuple(data["q_snapshot"]),
        rng_draw_count=data["rng_draw_count"],
        wall_time=data["wall_time"],
    )


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------


class TranscriptWriter:
    """Write-ahead transcript sink: manifest first, then one flushed line per trial."""

    def __init__(
        self,
        path: Path | str,
        config: SessionConfig,
        mode: str = "headless",
        participant_id: str | None = None,
        condition_position: int | None = None,
    ):
        self.path = Path(path)
        self._fh: IO[str] = open(self.path, "w", encoding="utf-8", newline="\n")
        manifest = manifest_dict(config, mode, participant_id, condition_position)
        self._write_line(_dumps(manifest))

    def _write_line(self, line: str) -> None:
        self._fh.write(line + "\n")
        self._fh.flush()

    def write_record(self, record: TrialRecord) -> None:
        self._write_line(_dumps(record_dict(record)))

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "TranscriptWriter":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def write_transcript(result: SessionResult, path: Path | str, mode: str = "headless") -> Path:
    path = Path(path)
    with TranscriptWriter(
        path,
        result.config,
        mode=mode,
        participant_id=result.participant_id,
        condition_position=result.condition_position,
    ) as writer:
        for record in result.records:
            writer.write_record(record)
    return path


def transcript_name(participant_id: str, condition_position: int, slug: str) -> str:
    return f"{participant_id}_{condition_position}_{slug}.jsonl"


# ---------------------------------------------------------------------------
# Reading and replay
# ---------------------------------------------------------------------------


@dataclass
class Transcript:
    path: Path
    manifest: dict
    config: SessionConfig
    records: list[TrialRecord]

    @property
    def mode(self) -> str:
        return self.manifest["mode"]


def read_transcript(path: Path | str) -> Transcript:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty transcript")
    manifest = json.loads(lines[0])
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"{path}: unsupported schema_version {manifest.get('schema_version')}"
        )
    config = config_from_dict(manifest)
    records = [record_from_dict(json.loads(line)) for line in lines[1:]]
    return Transcript(path=path, manifest=manifest, config=config, records=records)


def regenerate(transcript: Transcript) -> SessionResult:
    """Re-run the session a transcript came from.

    Headless transcripts rebuild their caregiver model from the config.
    Interactive (or scripted) transcripts replay the recorded object
    choices and keep the recorded wall-clock timestamps.
    """
    if transcript.mode == "headless":
        result = run_session(
            transcript.config,
            participant_id=transcript.manifest.get("participant_id"),
            condition_position=transcript.manifest.get("condition_position"),
        )
    else:
        choices = [record.object for record in transcript.records]
        result = run_session(
            transcript.config,
            caregiver=ScriptedCaregiver(choices),
            participant_id=transcript.manifest.get("participant_id"),
            condition_position=transcript.manifest.get("condition_position"),
        )
        for regenerated, original in zip(result.records, transcript.records):
            regenerated.wall_time = original.wall_time
    return result


def render_lines(
    result: SessionResult, mode: str = "headless"
) -> list[str]:
    manifest = manifest_dict(
        result.config, mode, result.participant_id, result.condition_position
    )
    lines = [_dumps(manifest)]
    lines.extend(_dumps(record_dict(record)) for record in result.records)
    return lines


def verify_replay(path: Path | str) -> tuple[bool, str]:
    """Re-run a transcript's session and byte-compare the regenerated file.

    Returns (ok, detail); on divergence, detail names the first differing
    line (line 1 is the manifest).
    """
    path = Path(path)
    original = path.read_text(encoding="utf-8").splitlines()
    transcript = read_transcript(path)
    regenerated = render_lines(regenerate(transcript), mode=transcript.mode)
    if len(original) != len(regenerated):
        return False, (
            f"line count differs: file has {len(original)}, replay produced {len(regenerated)}"
        )
    for i, (a, b) in enumerate(zip(original, regenerated), start=1):
        if a != b:
            return False, f"first divergence at line {i}"
    return True, f"replay matched all {len(original)} lines"


def read_directory(directory: Path | str) -> list[Transcript]:
    directory = Path(directory)
    paths = sorted(directory.glob("*.jsonl"))
    if not paths:
        raise FileNotFoundError(f"no *.jsonl transcripts under {directory}")
    return [read_transcript(p) for p in paths]
