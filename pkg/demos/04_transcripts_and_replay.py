"""Transcripts are line-delimited JSON that replay byte-for-byte.

A session file starts with a manifest (schema version, seed, full config)
and carries one record per trial. Re-running the manifest's (seed, config)
must regenerate the identical file; any edit, truncation, or drift in the
engine shows up as a named divergent line.
"""

import json
import tempfile
from pathlib import Path

from colearn import SessionConfig, conditions_for, run_session, verify_replay, write_transcript

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "session.jsonl"
    result = run_session(
        SessionConfig(condition=conditions_for()[1], seed=424242, caregiver="two-route")
    )
    write_transcript(result, path)

    lines = path.read_text().splitlines()
    print(f"wrote {len(lines)} lines (manifest + {len(lines) - 1} trials)")
    print("manifest:", lines[0][:120], "...")
    print("trial 1 :", lines[1][:120], "...")
    print()

    ok, detail = verify_replay(path)
    print(f"replay check: {'OK' if ok else 'DIVERGED'} ({detail})")

    # Flip one reward and watch the check catch it.
    record = json.loads(lines[10])
    record["reward"] = -record["reward"]
    lines[10] = json.dumps(record, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n")
    ok, detail = verify_replay(path)
    print(f"after tampering: {'OK' if ok else 'DIVERGED'} ({detail})")
