"""POS-pair statistics over the operation log.

For MERGE and SWAP the denominator is the number of baseline edges with
the same (child POS, head POS) on the altered side; for REMOVE it is the
number of baseline tokens with that POS.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from divkit.corpus_io import Column, Table
from divkit.metrics import Direction, percent
from divkit.model import AlignedPair
from divkit.treeops import OpKind, OpLogEntry, Side

POSSTATS_META = (
    ("opportunities", "baseline edges (merge/swap) or baseline tokens (remove) of the altered side"),
    ("non-baseline", "edges created by earlier rewrites count once when an operation applies to them"),
)


@dataclass(frozen=True)
class PosPairStat:
    kind: OpKind
    child_pos: str
    parent_pos: str | None
    applied: int
    opportunities: int

    def __post_init__(self) -> None:
        if not 0 <= self.applied <= self.opportunities:
            raise ValueError(f"applied={self.applied} exceeds opportunities={self.opportunities}")

    @property
    def rate(self) -> Fraction:
        return percent(self.applied, self.opportunities)


def altered_side(direction: Direction) -> Side:
    return Side.SOURCE if direction is Direction.SRC_TGT else Side.TARGET


def pos_breakdown(
    corpus: Iterable[AlignedPair],
    logs: Iterable[OpLogEntry],
    direction: Direction = Direction.SRC_TGT,
) -> list[PosPairStat]:
    """Per-(operation, POS pair) application rates for the altered side.

    ``corpus`` is the baseline the log was produced from.  An operation
    applied to an edge that did not exist in the baseline (one created by
    an earlier removal, merge or swap) adds that edge to the opportunities,
    so the rate never exceeds 100%.
    """
    side = altered_side(direction)
    by_id = {}
    token_opps: Counter[str] = Counter()
    edge_keys: set[tuple[str, int, int]] = set()
    edge_opps: Counter[tuple[str, str]] = Counter()
    for pair in corpus:
        tree = pair.source if side is Side.SOURCE else pair.target
        by_id[pair.id] = tree
        for tok in tree:
            token_opps[tok.pos] += 1
        for c, h in tree.edges():
            edge_keys.add((pair.id, c, h))
            edge_opps[(tree.pos(c), tree.pos(h))] += 1

    applied: Counter[tuple[OpKind, str, str | None]] = Counter()
    extra: Counter[tuple[OpKind, str, str]] = Counter()
    for e in logs:
        if e.side is not side or e.pair_id not in by_id:
            continue
        applied[(e.kind, e.child_pos, e.parent_pos)] += 1
        if e.kind is not OpKind.REMOVE and (e.pair_id, e.child_index, e.parent_index) not in edge_keys:
            extra[(e.kind, e.child_pos, e.parent_pos)] += 1

    stats = []
    for pos, n in token_opps.items():
        stats.append(PosPairStat(OpKind.REMOVE, pos, None, applied[(OpKind.REMOVE, pos, None)], n))
    for kind in (OpKind.MERGE, OpKind.SWAP):
        pairs = set(edge_opps) | {(c, p) for k, c, p in extra if k is kind}
        for c, p in pairs:
            stats.append(
                PosPairStat(kind, c, p, applied[(kind, c, p)], edge_opps[(c, p)] + extra[(kind, c, p)])
            )
    stats.sort(key=lambda s: (-s.rate, -s.applied, s.kind.value, s.child_pos, s.parent_pos or ""))
    return stats


POSSTATS_COLUMNS = (
    Column("direction"),
    Column("op"),
    Column("child_pos"),
    Column("parent_pos"),
    Column("applied"),
    Column("opportunities"),
    Column("rate", 1),
)


def posstats_table(rows: Sequence[tuple[Direction, Sequence[PosPairStat]]], name: str = "posstats") -> Table:
    out = []
    for direction, stats in rows:
        for s in stats:
            out.append((direction.value, s.kind.value, s.child_pos, s.parent_pos, s.applied, s.opportunities, s.rate))
    return Table(name, POSSTATS_COLUMNS, tuple(out), POSSTATS_META)
