from __future__ import annotations

import json
from collections import defaultdict
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from colearn.caregivers import ScriptedCaregiver
from colearn.engine import condition_order, conditions_for, run_session
from colearn.outcomes import ObjectId
from colearn.service import LiveSession, Phase, ServiceSettings, build_app
from colearn.transcript import read_transcript, render_lines, verify_replay

#: Deterministic client rule: what a well-trained caregiver would press.
BABBLE_TO_OBJECT = {"bada": "teddy", "paba": "cookie", "wada": "drink"}


def settings_for(tmp_path: Path, **overrides) -> ServiceSettings:
    defaults = dict(data_dir=tmp_path, base_seed=1234, epochs=25)
    defaults.update(overrides)
    return ServiceSettings(**defaults)


def join_msg(pid: str) -> dict:
    return {"type": "join", "participant_id": pid}


def drive_full_run(live: LiveSession, respond) -> tuple[list[dict], dict[int, list[str]]]:
    """Drive the state machine through all four conditions."""
    outbox = list(live.handle_message(join_msg(live.participant_id)))
    choices: dict[int, list[str]] = defaultdict(list)
    guard = 0
    while live.phase is not Phase.DONE:
        guard += 1
        assert guard < 5000, "session did not terminate"
        if live.phase in (Phase.AWAIT_READY, Phase.SHOWING_OUTCOME, Phase.BETWEEN_CONDITIONS):
            outbox += live.handle_message({"type": "ready"})
        elif live.phase is Phase.AWAIT_CHOICE:
            babble = next(m for m in reversed(outbox) if m["type"] == "babble")
            obj = respond(babble)
            choices[live.position].append(obj)
            outbox += live.handle_message({"type": "object_choice", "object_id": obj})
        else:
            pytest.fail(f"unexpected phase {live.phase}")
    return outbox, dict(choices)


def respond_by_rule(babble: dict) -> str:
    return BABBLE_TO_OBJECT[babble["babble_id"]]


# ---------------------------------------------------------------------------
# State machine
# ---------------------------------------------------------------------------


def test_full_run_message_flow(tmp_path: Path) -> None:
    live = LiveSession(settings_for(tmp_path), "alpha", 0)
    outbox, choices = drive_full_run(live, respond_by_rule)
    types = [m["type"] for m in outbox]
    assert types.count("session_start") == 4
    assert types.count("babble") == 100
    assert types.count("outcome") == 100
    assert types.count("block_boundary") == 12  # 3 per condition
    assert types.count("session_end") == 1
    assert types[-1] == "session_end"
    summary = outbox[-1]["summary"]
    assert summary["conditions_completed"] == 4
    assert summary["aborted"] is False
    assert all(len(c) == 25 for c in choices.values())


def test_blinded_condition_labels(tmp_path: Path) -> None:
    live = LiveSession(settings_for(tmp_path), "beta", 1)
    outbox, _ = drive_full_run(live, respond_by_rule)
    starts = [m for m in outbox if m["type"] == "session_start"]
    assert [m["condition_index"] for m in starts] == [1, 2, 3, 4]
    wire = json.dumps(outbox)
    for leak in ("dot", "greedy", "epsilon", "non-dot"):
        assert leak not in wire


def test_choice_rejected_outside_await_choice(tmp_path: Path) -> None:
    live = LiveSession(settings_for(tmp_path), "gamma", 0)
    live.handle_message(join_msg("gamma"))
    # AWAIT_READY: no babble pending yet
    out = live.handle_message({"type": "object_choice", "object_id": "cookie"})
    assert out[0]["type"] == "error"
    assert live.phase is Phase.AWAIT_READY
    live.handle_message({"type": "ready"})
    out = live.handle_message({"type": "object_choice", "object_id": "cookie"})
    assert out[0]["type"] == "outcome"
    # SHOWING_OUTCOME: a second choice for the same babble is refused
    out = live.handle_message({"type": "object_choice", "object_id": "drink"})
    assert out[0]["type"] == "error"
    assert "not awaiting choice" in out[0]["message"]
    assert live.phase is Phase.SHOWING_OUTCOME
    assert live.trial_index == 1


def test_unknown_object_and_type_are_structured_errors(tmp_path: Path) -> None:
    live = LiveSession(settings_for(tmp_path), "delta", 0)
    live.handle_message(join_msg("delta"))
    live.handle_message({"type": "ready"})
    out = live.handle_message({"type": "object_choice", "object_id": "sandwich"})
    assert out[0]["type"] == "error"
    assert live.phase is Phase.AWAIT_CHOICE  # unchanged; still answerable
    out = live.handle_message({"type": "launch_missiles"})
    assert out[0]["type"] == "error"
    out = live.handle_message({"type": "object_choice", "object_id": "cookie"})
    assert out[0]["type"] == "outcome"


def test_unknown_inbound_fields_ignored(tmp_path: Path) -> None:
    live = LiveSession(settings_for(tmp_path), "epsilon0", 0)
    out = live.handle_message({"type": "join", "participant_id": "epsilon0", "hat": 7})
    assert out[0]["type"] == "session_start"


def test_ready_out_of_turn_is_error(tmp_path: Path) -> None:
    live = LiveSession(settings_for(tmp_path), "zeta", 0)
    live.handle_message(join_msg("zeta"))
    live.handle_message({"type": "ready"})
    out = live.handle_message({"type": "ready"})  # awaiting a choice now
    assert out[0]["type"] == "error"
    assert live.phase is Phase.AWAIT_CHOICE


def test_transcripts_match_headless_scripted_run(tmp_path: Path) -> None:
    s = settings_for(tmp_path)
    live = LiveSession(s, "eta", 3)
    _, choices = drive_full_run(live, respond_by_rule)
    order = condition_order(3)
    for position in range(4):
        files = sorted(tmp_path.glob(f"eta_{position}_*.jsonl"))
        assert len(files) == 1
        transcript = read_transcript(files[0])
        # Re-run headlessly: same config, human choices as a script.
        script = [ObjectId(o) for o in choices[position]]
        headless = run_session(
            transcript.config,
            caregiver=ScriptedCaregiver(script),
            participant_id="eta",
            condition_position=position,
        )
        live_lines = render_lines(_null_wall(transcript), mode="interactive")
        headless_lines = render_lines(headless, mode="interactive")
        assert live_lines == headless_lines
        assert transcript.config.condition is conditions_for(s.epsilon)[order[position]] or (
            transcript.config.condition == conditions_for(s.epsilon)[order[position]]
        )


def _null_wall(transcript):
    result = run_session(
        transcript.config,
        caregiver=ScriptedCaregiver([r.object for r in transcript.records]),
        participant_id=transcript.manifest.get("participant_id"),
        condition_position=transcript.manifest.get("condition_position"),
    )
    return result


def test_service_transcripts_pass_replay_verification(tmp_path: Path) -> None:
    live = LiveSession(settings_for(tmp_path), "theta", 0)
    drive_full_run(live, respond_by_rule)
    files = sorted(tmp_path.glob("theta_*.jsonl"))
    assert len(files) == 4
    for path in files:
        ok, detail = verify_replay(path)
        assert ok, f"{path}: {detail}"


def test_abort_then_resume_continues_at_pending_trial(tmp_path: Path) -> None:
    live = LiveSession(settings_for(tmp_path), "iota", 0)
    outbox = list(live.handle_message(join_msg("iota")))
    outbox += live.handle_message({"type": "ready"})
    for _ in range(7):  # answer seven trials
        babble = next(m for m in reversed(outbox) if m["type"] == "babble")
        outbox += live.handle_message(
            {"type": "object_choice", "object_id": respond_by_rule(babble)}
        )
        outbox += live.handle_message({"type": "ready"})
    out = live.handle_message({"type": "abort"})
    assert out[0]["type"] == "session_end"
    assert out[0]["summary"]["aborted"] is True
    # Resume: join again, same pending trial index.
    out = live.handle_message(join_msg("iota"))
    assert out[0]["type"] == "session_start"
    assert out[1]["type"] == "babble"
    assert out[1]["trial"] == 8
    assert live.phase is Phase.AWAIT_CHOICE


def test_cold_restart_resumes_and_matches_uninterrupted_run(tmp_path: Path) -> None:
    target_dir = tmp_path / "interrupted"
    target_dir.mkdir()
    s = settings_for(target_dir)
    live = LiveSession(s, "kappa", 0)
    outbox = list(live.handle_message(join_msg("kappa")))
    outbox += live.handle_message({"type": "ready"})
    for _ in range(40):  # into the second condition
        if live.phase is Phase.AWAIT_CHOICE:
            babble = next(m for m in reversed(outbox) if m["type"] == "babble")
            outbox += live.handle_message(
                {"type": "object_choice", "object_id": respond_by_rule(babble)}
            )
        else:
            outbox += live.handle_message({"type": "ready"})
    del live  # simulate server death; files stay

    revived = LiveSession(s, "kappa", 0)
    outbox2, _ = drive_full_run(revived, respond_by_rule)
    assert revived.phase is Phase.DONE

    # Reference: the same participant run without interruption.
    clean_dir = tmp_path / "clean"
    clean_dir.mkdir()
    clean = LiveSession(settings_for(clean_dir), "kappa", 0)
    drive_full_run(clean, respond_by_rule)

    for position in range(4):
        a = read_transcript(next(iter(sorted(target_dir.glob(f"kappa_{position}_*.jsonl")))))
        b = read_transcript(next(iter(sorted(clean_dir.glob(f"kappa_{position}_*.jsonl")))))
        assert render_lines(_null_wall(a), "interactive") == render_lines(_null_wall(b), "interactive")


def test_latin_square_order_respected(tmp_path: Path) -> None:
    for index in range(4):
        live = LiveSession(settings_for(tmp_path), f"p{index}", index)
        drive_full_run(live, respond_by_rule)
        expected = condition_order(index)
        for position in range(4):
            path = next(iter(tmp_path.glob(f"p{index}_{position}_*.jsonl")))
            transcript = read_transcript(path)
            assert transcript.config.condition == conditions_for()[expected[position]]


# ---------------------------------------------------------------------------
# Websocket / HTTP end-to-end
# ---------------------------------------------------------------------------


def ws_run_condition(ws, n_trials: int = 25) -> list[dict]:
    """Answer one condition's trials; returns frames seen."""
    frames = []
    trials_done = 0
    while trials_done < n_trials:
        frame = ws.receive_json()
        frames.append(frame)
        if frame["type"] == "babble":
            ws.send_json(
                {"type": "object_choice", "object_id": BABBLE_TO_OBJECT[frame["babble_id"]]}
            )
        elif frame["type"] == "outcome":
            trials_done += 1
            ws.send_json({"type": "ready"})
        elif frame["type"] == "block_boundary":
            pass
        else:
            pytest.fail(f"unexpected frame {frame}")
    frame = ws.receive_json()  # trailing block boundary 3
    frames.append(frame)
    assert frame == {"type": "block_boundary", "block": 3}
    return frames


def test_health_endpoint(tmp_path: Path) -> None:
    client = TestClient(build_app(settings_for(tmp_path)))
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["schema_version"] == 1


def test_websocket_full_run_and_results(tmp_path: Path) -> None:
    client = TestClient(build_app(settings_for(tmp_path)))
    with client.websocket_connect("/session") as ws:
        ws.send_json(join_msg("webby"))
        start = ws.receive_json()
        assert start["type"] == "session_start"
        assert start["epochs"] == 25
        for position in range(4):
            if position > 0:
                ws.send_json({"type": "ready"})  # leave the break screen
                start = ws.receive_json()
                assert start["type"] == "session_start"
                assert start["condition_index"] == position + 1
            ws.send_json({"type": "ready"})
            ws_run_condition(ws)
        end = ws.receive_json()
        assert end["type"] == "session_end"
        assert end["summary"]["conditions_completed"] == 4

    body = client.get("/results/webby").json()
    assert body["participant_id"] == "webby"
    assert len(body["transcripts"]) == 4
    for t in body["transcripts"]:
        assert len(t["records"]) == 25
        assert t["manifest"]["mode"] == "interactive"
    assert client.get("/results/nobody").status_code == 404


def test_websocket_malformed_payload_keeps_connection(tmp_path: Path) -> None:
    client = TestClient(build_app(settings_for(tmp_path)))
    with client.websocket_connect("/session") as ws:
        ws.send_text("{not json")
        assert ws.receive_json()["type"] == "error"
        ws.send_text(json.dumps([1, 2, 3]))
        assert ws.receive_json()["type"] == "error"
        ws.send_json({"type": "object_choice", "object_id": "cookie"})
        err = ws.receive_json()
        assert err["type"] == "error" and "join" in err["message"]
        ws.send_json(join_msg("sturdy"))
        assert ws.receive_json()["type"] == "session_start"


def test_two_concurrent_participants_are_isolated(tmp_path: Path) -> None:
    client = TestClient(build_app(settings_for(tmp_path)))
    with client.websocket_connect("/session") as ws1, client.websocket_connect(
        "/session"
    ) as ws2:
        ws1.send_json(join_msg("ann"))
        ws2.send_json(join_msg("bob"))
        assert ws1.receive_json()["type"] == "session_start"
        assert ws2.receive_json()["type"] == "session_start"
        ws1.send_json({"type": "ready"})
        ws2.send_json({"type": "ready"})
        b1 = ws1.receive_json()
        b2 = ws2.receive_json()
        assert b1["type"] == b2["type"] == "babble"
        # Interleave a few answers both ways.
        for _ in range(5):
            ws2.send_json(
                {"type": "object_choice", "object_id": BABBLE_TO_OBJECT[b2["babble_id"]]}
            )
            assert ws2.receive_json()["type"] == "outcome"
            ws1.send_json(
                {"type": "object_choice", "object_id": BABBLE_TO_OBJECT[b1["babble_id"]]}
            )
            assert ws1.receive_json()["type"] == "outcome"
            ws1.send_json({"type": "ready"})
            ws2.send_json({"type": "ready"})
            b1 = ws1.receive_json()
            b2 = ws2.receive_json()
            assert b1["type"] == b2["type"] == "babble"

    # Interleaving must not couple the two sessions: ann's transcript prefix
    # equals a solo (serial) run of the same participant index and seed.
    solo_dir = tmp_path / "solo"
    solo_dir.mkdir()
    solo = LiveSession(settings_for(solo_dir), "ann", 0)
    out = list(solo.handle_message(join_msg("ann")))
    out += solo.handle_message({"type": "ready"})
    for _ in range(6):
        babble = next(m for m in reversed(out) if m["type"] == "babble")
        out += solo.handle_message(
            {"type": "object_choice", "object_id": respond_by_rule(babble)}
        )
        out += solo.handle_message({"type": "ready"})
    live_path = next(iter(tmp_path.glob("ann_0_*.jsonl")))
    solo_path = next(iter(solo_dir.glob("ann_0_*.jsonl")))
    live_lines = live_path.read_text().splitlines()
    solo_lines = solo_path.read_text().splitlines()
    for a, b in zip(live_lines[1:7], solo_lines[1:7]):
        ra, rb = json.loads(a), json.loads(b)
        ra["wall_time"] = rb["wall_time"] = None
        assert ra == rb


def test_env_overrides_for_bind_and_data_dir(tmp_path: Path, monkeypatch) -> None:
    from colearn.service import apply_env_overrides

    base = settings_for(tmp_path / "cli-dir")
    monkeypatch.setenv("COLEARN_BIND", "0.0.0.0:9999")
    monkeypatch.setenv("COLEARN_DATA", str(tmp_path / "env-dir"))
    settings, bind = apply_env_overrides(base, "127.0.0.1:8000")
    assert bind == "0.0.0.0:9999"
    assert settings.data_dir == tmp_path / "env-dir"
    monkeypatch.delenv("COLEARN_BIND")
    monkeypatch.delenv("COLEARN_DATA")
    settings, bind = apply_env_overrides(base, "127.0.0.1:8000")
    assert bind == "127.0.0.1:8000"
    assert settings.data_dir == tmp_path / "cli-dir"


def test_choice_timeout_aborts_session(tmp_path: Path) -> None:
    import time as _time

    client = TestClient(build_app(settings_for(tmp_path, choice_timeout=0.3)))
    with client.websocket_connect("/session") as ws:
        ws.send_json(join_msg("slowpoke"))
        assert ws.receive_json()["type"] == "session_start"
        ws.send_json({"type": "ready"})
        assert ws.receive_json()["type"] == "babble"
        _time.sleep(0.6)  # exceed the choice timeout without answering
        end = ws.receive_json()
        assert end["type"] == "session_end"
        assert end["summary"]["aborted"] is True
        assert end["summary"]["reason"] == "choice timeout"


def test_websocket_reconnect_resumes_pending_trial(tmp_path: Path) -> None:
    app = build_app(settings_for(tmp_path))
    client = TestClient(app)
    with client.websocket_connect("/session") as ws:
        ws.send_json(join_msg("ghost"))
        ws.receive_json()
        ws.send_json({"type": "ready"})
        first_babble = ws.receive_json()
        assert first_babble["type"] == "babble"
        # drop the connection without answering

    with client.websocket_connect("/session") as ws:
        ws.send_json(join_msg("ghost"))
        start = ws.receive_json()
        assert start["type"] == "session_start"
        resumed = ws.receive_json()
        assert resumed["type"] == "babble"
        assert resumed["trial"] == first_babble["trial"]
        assert resumed["babble_id"] == first_babble["babble_id"]
        ws.send_json(
            {"type": "object_choice", "object_id": BABBLE_TO_OBJECT[resumed["babble_id"]]}
        )
        assert ws.receive_json()["type"] == "outcome"
