"""Block statistics, permutation tests, and condition reports.

Sessions are scored over three blocks of eight trials: 2-9, 10-17, and
18-25. Trial 1 is dropped from every statistic (the agent still learns
from it). Terminal accuracy is the block-3 mean reward; the per-block
deltas describe how fast the pair learned.

Inference uses seeded one-sided paired sign-flip permutation tests, which
are exact in the small-n limit and self-contained.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .engine import Condition, SessionResult

#: Inclusive 1-based trial spans of the three analyzed blocks.
BLOCK_SPANS: tuple[tuple[int, int], ...] = ((2, 9), (10, 17), (18, 25))
MIN_TRIALS = BLOCK_SPANS[-1][1]


@dataclass(frozen=True)
class BlockStats:
    block_index: int  # 1-based
    trial_span: tuple[int, int]
    mean_reward: float
    sd: float
    n: int  # sessions aggregated


@dataclass(frozen=True)
class ConditionSummary:
    condition: Condition
    blocks: tuple[BlockStats, BlockStats, BlockStats]
    delta_r: tuple[float, float]  # block2-block1, block3-block2
    terminal_accuracy: float  # block-3 mean


def _sample_sd(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.std(ddof=1))


def block_means(rewards: Sequence[float]) -> tuple[BlockStats, BlockStats, BlockStats]:
    """Per-block reward stats for a single session (trial 1 excluded).

    The sd field holds the within-block sample SD of the eight rewards.
    """
    if len(rewards) < MIN_TRIALS:
        raise ValueError(
            f"transcript too short: {len(rewards)} trials, need at least {MIN_TRIALS}"
        )
    blocks = []
    for i, (lo, hi) in enumerate(BLOCK_SPANS, start=1):
        window = [float(r) for r in rewards[lo - 1 : hi]]
        blocks.append(
            BlockStats(
                block_index=i,
                trial_span=(lo, hi),
                mean_reward=float(np.mean(window)),
                sd=_sample_sd(window),
                n=1,
            )
        )
    return tuple(blocks)  # type: ignore[return-value]


def block_triple(rewards: Sequence[float]) -> tuple[float, float, float]:
    return tuple(b.mean_reward for b in block_means(rewards))  # type: ignore[return-value]


def session_block_triple(result: SessionResult) -> tuple[float, float, float]:
    return block_triple(result.rewards())


def aggregate_block_means(
    condition: Condition, mean_triples: Sequence[Sequence[float]]
) -> ConditionSummary:
    """Aggregate per-session block means across sessions.

    The sd field becomes the across-session sample SD of the session-level
    block means (0.0 when only one session is given).
    """
    if not mean_triples:
        raise ValueError("no sessions to aggregate")
    columns = list(zip(*mean_triples))
    if len(columns) != 3:
        raise ValueError("each session must contribute exactly three block means")
    n = len(mean_triples)
    blocks = tuple(
        BlockStats(
            block_index=i,
            trial_span=BLOCK_SPANS[i - 1],
            mean_reward=float(np.mean(col)),
            sd=_sample_sd(col),
            n=n,
        )
        for i, col in enumerate(columns, start=1)
    )
    return ConditionSummary(
        condition=condition,
        blocks=blocks,  # type: ignore[arg-type]
        delta_r=(
            blocks[1].mean_reward - blocks[0].mean_reward,
            blocks[2].mean_reward - blocks[1].mean_reward,
        ),
        terminal_accuracy=blocks[2].mean_reward,
    )


def summarize_sessions(
    condition: Condition, sessions: Sequence[SessionResult]
) -> ConditionSummary:
    return aggregate_block_means(condition, [session_block_triple(s) for s in sessions])


# ---------------------------------------------------------------------------
# Permutation tests
# ---------------------------------------------------------------------------


def paired_permutation_test(
    per_unit_diffs: Sequence[float],
    resamples: int = 10_000,
    rng: np.random.Generator | int | None = None,
) -> float:
    """One-sided sign-flip permutation p-value for mean(diff) > 0.

    Uses the add-one estimator (1 + hits) / (resamples + 1), which never
    returns an exact zero and stays within Monte-Carlo error of the full
    2^n enumeration.
    """
    diffs = np.asarray(list(per_unit_diffs), dtype=np.float64)
    if diffs.size < 2:
        raise ValueError("need at least two paired differences")
    if resamples < 1000:
        raise ValueError("resamples must be at least 1000")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    observed = diffs.mean()
    signs = rng.integers(0, 2, size=(resamples, diffs.size)) * 2 - 1
    flipped_means = (signs * diffs).mean(axis=1)
    hits = int(np.sum(flipped_means >= observed - 1e-12))
    return (1 + hits) / (resamples + 1)


#: Block-pair comparisons reported per condition, in display order.
BLOCK_PAIRS: tuple[tuple[int, int], ...] = ((1, 2), (2, 3), (1, 3))


def block_pair_pvalues(
    mean_triples: Sequence[Sequence[float]],
    resamples: int = 10_000,
    rng: np.random.Generator | int | None = None,
) -> dict[str, float]:
    """One-sided improvement p-values for each block pair, raw and with a
    x3 Bonferroni factor (capped at 1) for the three-comparison family."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    out: dict[str, float] = {}
    for earlier, later in BLOCK_PAIRS:
        diffs = [triple[later - 1] - triple[earlier - 1] for triple in mean_triples]
        p = paired_permutation_test(diffs, resamples=resamples, rng=rng)
        out[f"{earlier}&{later}"] = p
        out[f"{earlier}&{later}_bonferroni"] = min(1.0, 3.0 * p)
    return out


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return f"{value:+.3f}"


def report(
    summaries: Sequence[ConditionSummary],
    pvalues: dict[Condition, dict[str, float]] | None = None,
) -> str:
    """Render a fixed-width table: R (SD) per block, block deltas, and
    (when provided) raw permutation p-values per block pair."""
    headers = ["Condition", "Metric"] + [
        f"Block {i} ({lo}-{hi})" for i, (lo, hi) in enumerate(BLOCK_SPANS, start=1)
    ]
    rows: list[list[str]] = []
    for summary in summaries:
        r_cells = [f"{_fmt(b.mean_reward)} ({b.sd:.3f})" for b in summary.blocks]
        rows.append([summary.condition.label, "R (SD)"] + r_cells)
        rows.append(["", "dR", "-", _fmt(summary.delta_r[0]), _fmt(summary.delta_r[1])])
        if pvalues is not None:
            p = pvalues[summary.condition]
            rows.append(
                [
                    "",
                    "p",
                    "-",
                    f"{p['1&2']:.4f} (1&2)",
                    f"{p['2&3']:.4f} (2&3) / {p['1&3']:.4f} (1&3)",
                ]
            )
    widths = [
        max(len(headers[c]), *(len(row[c]) for row in rows)) for c in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    footer = f"n = {summaries[0].blocks[0].n} sessions per condition" if summaries else ""
    return "\n".join(lines + ([footer] if footer else []))


CSV_FIELDS = ("condition", "block", "mean_reward", "sd", "delta_r", "n")


def to_csv(summaries: Sequence[ConditionSummary]) -> str:
    """One row per (condition, block); floats keep full precision for round-trips."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_FIELDS)
    for summary in summaries:
        for block in summary.blocks:
            delta = ""
            if block.block_index > 1:
                delta = repr(summary.delta_r[block.block_index - 2])
            writer.writerow(
                [
                    summary.condition.slug,
                    block.block_index,
                    repr(block.mean_reward),
                    repr(block.sd),
                    delta,
                    block.n,
                ]
            )
    return buf.getvalue()


def from_csv(text: str) -> list[dict]:
    """Parse rows written by to_csv back into plain dicts (floats restored)."""
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for raw in reader:
        rows.append(
            {
                "condition": raw["condition"],
                "block": int(raw["block"]),
                "mean_reward": float(raw["mean_reward"]),
                "sd": float(raw["sd"]),
                "delta_r": float(raw["delta_r"]) if raw["delta_r"] else None,
                "n": int(raw["n"]),
            }
        )
    return rows
