"""Command-line entry points: simulate, replay, analyze, serve."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import (
    aggregate_block_means,
    block_pair_pvalues,
    block_triple,
    report,
    to_csv,
)
from .caregivers import CAREGIVER_KINDS
from .engine import BatchConfig, Condition, run_participant
from .service import ServiceSettings, apply_env_overrides, serve
from .transcript import (
    read_directory,
    transcript_name,
    verify_replay,
    write_transcript,
)


def _write_participant(batch: BatchConfig, participant_index: int, out_dir: str) -> list[str]:
    """Worker task: run one participant and persist their four transcripts."""
    run = run_participant(participant_index, batch)
    written = []
    for position, result in enumerate(run.sessions):
        name = transcript_name(run.participant_id, position, result.config.condition.slug)
        write_transcript(result, Path(out_dir) / name)
        written.append(name)
    return written


def cmd_simulate(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    batch = BatchConfig(
        base_seed=args.seed,
        epochs=args.epochs,
        caregiver=args.caregiver,
        alpha=args.alpha,
        epsilon=args.epsilon,
    )
    indices = list(range(args.participants))
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            all_written = list(
                pool.map(
                    _write_participant,
                    [batch] * len(indices),
                    indices,
                    [str(out_dir)] * len(indices),
                )
            )
    else:
        all_written = [_write_participant(batch, i, str(out_dir)) for i in indices]
    n_files = sum(len(w) for w in all_written)
    print(f"wrote {n_files} transcripts for {args.participants} participants to {out_dir}")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    ok, detail = verify_replay(args.transcript)
    print(f"{'OK' if ok else 'DIVERGED'}: {args.transcript} ({detail})")
    return 0 if ok else 1


def _condition_sort_key(condition: Condition) -> tuple[int, int]:
    return (0 if condition.training.value == "dot" else 1, 0 if condition.policy.epsilon == 0 else 1)


def cmd_analyze(args: argparse.Namespace) -> int:
    transcripts = read_directory(args.in_dir)
    by_condition: dict[Condition, list[tuple[float, float, float]]] = {}
    for t in transcripts:
        triple = block_triple([r.reward for r in t.records])
        by_condition.setdefault(t.config.condition, []).append(triple)
    conditions = sorted(by_condition, key=_condition_sort_key)
    summaries = [aggregate_block_means(c, by_condition[c]) for c in conditions]
    if args.format == "csv":
        sys.stdout.write(to_csv(summaries))
        return 0
    pvalues = None
    if all(len(by_condition[c]) >= 2 for c in conditions):
        rng = np.random.default_rng(args.seed)
        pvalues = {
            c: block_pair_pvalues(by_condition[c], resamples=args.permutations, rng=rng)
            for c in conditions
        }
    print(report(summaries, pvalues))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    ui_dir = Path(args.ui) if args.ui else Path("frontend/dist")
    settings = ServiceSettings(
        data_dir=Path(args.data),
        base_seed=args.seed,
        order_offset=args.order_offset,
        ui_dir=ui_dir if ui_dir.is_dir() else None,
    )
    settings, bind = apply_env_overrides(settings, args.bind)
    serve(settings, bind)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="colearn",
        description="Mutual-learning experiment platform: headless simulation, "
        "replay verification, analysis, and a live session service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run headless participants against a caregiver model")
    sim.add_argument("--participants", type=int, default=28)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--caregiver", choices=CAREGIVER_KINDS, default="two-route")
    sim.add_argument("--epochs", type=int, default=25)
    sim.add_argument("--epsilon", type=float, default=0.1)
    sim.add_argument("--alpha", type=float, default=0.5)
    sim.add_argument("--out", required=True, help="directory for transcript files")
    sim.add_argument("--workers", type=int, default=1)
    sim.set_defaults(func=cmd_simulate)

    rep = sub.add_parser("replay", help="verify a transcript regenerates byte-identically")
    rep.add_argument("--transcript", required=True)
    rep.set_defaults(func=cmd_replay)

    ana = sub.add_parser("analyze", help="block statistics and permutation tests over transcripts")
    ana.add_argument("--in", dest="in_dir", required=True, help="transcript directory")
    ana.add_argument("--format", choices=("table", "csv"), default="table")
    ana.add_argument("--permutations", type=int, default=10_000)
    ana.add_argument("--seed", type=int, default=0)
    ana.set_defaults(func=cmd_analyze)

    srv = sub.add_parser("serve", help="run the live human-caregiver session service")
    srv.add_argument("--bind", default="127.0.0.1:8000", help="ADDR:PORT")
    srv.add_argument("--data", required=True, help="writable transcript directory")
    srv.add_argument("--seed", type=int, default=0)
    srv.add_argument("--order-offset", type=int, default=0)
    srv.add_argument("--ui", default=None, help="static UI bundle directory")
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
