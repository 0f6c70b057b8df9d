"""Drive the live-session state machine the way the browser client does.

No network here: LiveSession consumes message dicts and returns outbound
message dicts, which is exactly what the websocket endpoint pumps. The
"participant" below answers with the object a fully-trained caregiver
would press (b = teddy, c = cookie, d = drink).
"""

import tempfile
from pathlib import Path

from colearn.service import LiveSession, Phase, ServiceSettings

KEYMAP = {"bada": "teddy", "paba": "cookie", "wada": "drink"}

with tempfile.TemporaryDirectory() as tmp:
    settings = ServiceSettings(data_dir=Path(tmp), base_seed=99, epochs=25)
    live = LiveSession(settings, participant_id="demo", participant_index=0)

    outbox = list(live.handle_message({"type": "join", "participant_id": "demo"}))
    shown = 0
    while live.phase is not Phase.DONE:
        if live.phase in (Phase.AWAIT_READY, Phase.SHOWING_OUTCOME, Phase.BETWEEN_CONDITIONS):
            outbox += live.handle_message({"type": "ready"})
        else:
            babble = next(m for m in reversed(outbox) if m["type"] == "babble")
            outbox += live.handle_message(
                {"type": "object_choice", "object_id": KEYMAP[babble["babble_id"]]}
            )
        while shown < len(outbox) and shown < 14:
            print(f"  server -> {outbox[shown]}")
            shown += 1

    end = outbox[-1]
    print("  ...")
    print(f"  server -> {end}")
    files = sorted(Path(tmp).glob("demo_*.jsonl"))
    print(f"\n{len(files)} transcripts persisted, blinded labels only on the wire.")
