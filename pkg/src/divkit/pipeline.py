"""Staged rewriting of an aligned tree pair and per-stage match reporting.

A pair goes through three stages after its baseline measurement:

1. REMOVE: spontaneous (unaligned) words are removed, source side first.
2. MERGE: a word and its head aligned to the same word of the other tree
   are merged, source side then target side, repeated until no such pair
   is left on either side.
3. SWAP: a source edge whose endpoints align to a target edge pointing the
   other way is reversed.  One left-to-right pass over the sorted links;
   an edge is swapped at most once.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from divkit.corpus_io import Column, Table
from divkit.errors import DegenerateTreeError
from divkit.metrics import CLASS_ORDER, CLASS_PRIORITY_NOTE, Direction, MatchReport, breakdown
from divkit.model import ROOT, AlignedPair, Alignment, Corpus, DepTree
from divkit.treeops import ROOT_PROMOTION, OpKind, OpLogEntry, Side, merge, remove, swap

log = logging.getLogger(__name__)

OpLog = tuple[OpLogEntry, ...]


class Stage(enum.Enum):
    BASELINE = "Baseline"
    REMOVE = "Remove"
    MERGE = "Merge"
    SWAP = "Swap"


STAGES = (Stage.BASELINE, Stage.REMOVE, Stage.MERGE, Stage.SWAP)
DIRECTIONS = (Direction.SRC_TGT, Direction.TGT_SRC)

REPORT_META = (
    ("class-priority", CLASS_PRIORITY_NOTE),
    ("unaligned", "either endpoint spontaneous; unaligned_child counts child-only cases"),
    ("merge", "repeated on both sides until no mergeable link remains"),
    ("swap", "source side only, single pass over links sorted by (source, target)"),
)


@dataclass(frozen=True)
class StageReport:
    stage: Stage
    reports: tuple[MatchReport, ...]
    log: OpLog = ()

    def report(self, direction: Direction) -> MatchReport:
        return next(r for r in self.reports if r.direction is direction)


def _remove_all(pair_id: str, tree: DepTree, doomed: Sequence[int], side: Side) -> tuple[DepTree, list[OpLogEntry]]:
    entries = []
    for w in doomed:
        tok = tree.token(w)
        head = tree.head(w)
        entries.append(
            OpLogEntry(
                pair_id, OpKind.REMOVE, side, tok.pos, None, (tok.form,), w,
                head if head != ROOT else None,
                ROOT_PROMOTION if head == ROOT else "",
            )
        )
        tree = remove(w, tree)
    return tree, entries


def remove_spontaneous(pair: AlignedPair) -> tuple[AlignedPair, OpLog]:
    a = pair.alignment
    src_gone = [f for f in pair.source.indices if not a.targets(f)]
    tgt_gone = [e for e in pair.target.indices if not a.sources(e)]
    if len(src_gone) == len(pair.source):
        raise DegenerateTreeError(f"{pair.id}: every source token is spontaneous")
    if len(tgt_gone) == len(pair.target):
        raise DegenerateTreeError(f"{pair.id}: every target token is spontaneous")
    source, src_log = _remove_all(pair.id, pair.source, src_gone, Side.SOURCE)
    target, tgt_log = _remove_all(pair.id, pair.target, tgt_gone, Side.TARGET)
    return AlignedPair(pair.id, source, target, a), tuple(src_log + tgt_log)


def _merge_pass(pair_id: str, tree: DepTree, a: Alignment, side: Side) -> tuple[DepTree, Alignment, list[OpLogEntry]]:
    """One left-to-right pass merging on the source side of ``a``.

    ``a`` is oriented so that its first element indexes ``tree``.
    """
    entries = []
    for f, e in a.sorted():
        if (f, e) not in a:
            continue
        p = tree.head(f)
        if p == ROOT or (p, e) not in a:
            continue
        child, par = tree.token(f), tree.token(p)
        entries.append(
            OpLogEntry(pair_id, OpKind.MERGE, side, child.pos, par.pos, (child.form, par.form), f, p)
        )
        tree = merge(f, p, tree)
        a = Alignment(frozenset((p if x == f else x, y) for x, y in a.links if (x, y) != (f, e)))
    return tree, a, entries


def merge_aligned(pair: AlignedPair) -> tuple[AlignedPair, OpLog]:
    source, target, a = pair.source, pair.target, pair.alignment
    entries: list[OpLogEntry] = []
    while True:
        before = len(entries)
        while True:
            source, a, new = _merge_pass(pair.id, source, a, Side.SOURCE)
            entries += new
            if not new:
                break
        while True:
            target, inv, new = _merge_pass(pair.id, target, a.inverted(), Side.TARGET)
            a = inv.inverted()
            entries += new
            if not new:
                break
        if len(entries) == before:
            break
    return AlignedPair(pair.id, source, target, a), tuple(entries)


def swap_reversed(pair: AlignedPair) -> tuple[AlignedPair, OpLog]:
    source, target, a = pair.source, pair.target, pair.alignment
    swapped: set[frozenset[int]] = set()
    entries = []
    for f, e in a.sorted():
        p = source.head(f)
        if p == ROOT or frozenset((f, p)) in swapped:
            continue
        if not any((p, c) in a for c in target.children(e)):
            continue
        child, par = source.token(f), source.token(p)
        entries.append(
            OpLogEntry(pair.id, OpKind.SWAP, Side.SOURCE, child.pos, par.pos, (child.form, par.form), f, p)
        )
        source = swap(f, p, source)
        swapped.add(frozenset((f, p)))
    return AlignedPair(pair.id, source, target, a), tuple(entries)


_STEPS = ((Stage.REMOVE, remove_spontaneous), (Stage.MERGE, merge_aligned), (Stage.SWAP, swap_reversed))


def stage_pairs(pair: AlignedPair) -> list[tuple[Stage, AlignedPair, OpLog]]:
    """The pair after each stage, with the operations of that stage."""
    out = [(Stage.BASELINE, pair, ())]
    for stage, step in _STEPS:
        pair, ops = step(pair)
        out.append((stage, pair, ops))
    return out


def _reports(pairs: Sequence[AlignedPair]) -> tuple[MatchReport, ...]:
    return tuple(breakdown(pairs, d) for d in DIRECTIONS)


def transform_pair(pair: AlignedPair) -> tuple[AlignedPair, list[StageReport]]:
    staged = stage_pairs(pair)
    reports = [StageReport(stage, _reports([p]), ops) for stage, p, ops in staged]
    return staged[-1][1], reports


@dataclass(frozen=True)
class CorpusTransform:
    stages: tuple[tuple[Stage, Corpus], ...]
    log: OpLog
    excluded: tuple[tuple[str, str], ...]

    def corpus(self, stage: Stage) -> Corpus:
        return dict(self.stages)[stage]

    def stage_log(self, stage: Stage) -> OpLog:
        kinds = {Stage.REMOVE: OpKind.REMOVE, Stage.MERGE: OpKind.MERGE, Stage.SWAP: OpKind.SWAP}
        return tuple(e for e in self.log if e.kind is kinds.get(stage))


def transform_corpus(corpus: Iterable[AlignedPair]) -> CorpusTransform:
    """Run every pair through all stages.

    Pairs that lose a whole side to removal are left out of every stage
    (including the baseline) so all rows cover the same sentences.
    """
    per_stage: dict[Stage, list[AlignedPair]] = {s: [] for s in STAGES}
    entries: list[OpLogEntry] = []
    excluded = []
    for pair in corpus:
        try:
            staged = stage_pairs(pair)
        except DegenerateTreeError as err:
            log.warning("skipping pair %s: %s", pair.id, err)
            excluded.append((pair.id, str(err)))
            continue
        for stage, p, ops in staged:
            per_stage[stage].append(p)
            entries.extend(ops)
    return CorpusTransform(
        tuple((s, Corpus(tuple(per_stage[s]))) for s in STAGES), tuple(entries), tuple(excluded)
    )


@dataclass(frozen=True)
class StageTable:
    rows: tuple[tuple[Direction, Stage, MatchReport], ...]
    excluded: tuple[tuple[str, str], ...] = ()

    def report(self, direction: Direction, stage: Stage) -> MatchReport:
        return next(r for d, s, r in self.rows if d is direction and s is stage)

    def to_table(self, directions: Sequence[Direction] = DIRECTIONS, name: str = "stages") -> Table:
        return match_reports_table(
            [(s.value, r) for d, s, r in self.rows if d in directions],
            name,
            meta=REPORT_META + (("excluded", " ".join(i for i, _ in self.excluded) or "-"),),
        )


def corpus_stage_table(corpus: Iterable[AlignedPair], result: CorpusTransform | None = None) -> StageTable:
    result = result or transform_corpus(corpus)
    rows = []
    if not len(result.corpus(Stage.BASELINE)):
        return StageTable((), result.excluded)
    for d in DIRECTIONS:
        for stage, c in result.stages:
            rows.append((d, stage, breakdown(c, d)))
    return StageTable(tuple(rows), result.excluded)


MATCH_COLUMNS = (
    Column("direction"),
    Column("stage"),
    *(Column(cls.value, 1) for cls in CLASS_ORDER),
    Column("unaligned_child", 1),
    Column("edges"),
)


def match_reports_table(rows: Sequence[tuple[str, MatchReport]], name: str, meta=REPORT_META) -> Table:
    out = []
    for label, r in rows:
        pct = r.percentages
        out.append(
            (r.direction.value, label, *(pct[c] for c in CLASS_ORDER), r.unaligned_child_percent, r.edges)
        )
    return Table(name, MATCH_COLUMNS, tuple(out), tuple(meta))
