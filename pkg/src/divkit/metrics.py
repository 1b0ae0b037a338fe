"""Edge matching between aligned trees and divergence classification.

An edge (child, head) of one tree *matches* when some word aligned to the
child is a dependent of some word aligned to the head in the other tree.
Unmatched edges are sorted into the divergence classes SWAP, MERGE,
UNALIGNED and OTHER, tested in that order after MATCH.

All percentages are exact :class:`~fractions.Fraction` values; rounding
happens only when reports are written.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from divkit.model import AlignedPair, Alignment, DepTree


class Direction(enum.Enum):
    SRC_TGT = "src-tgt"
    TGT_SRC = "tgt-src"

    @property
    def label(self) -> str:
        return "SRC->TGT" if self is Direction.SRC_TGT else "TGT->SRC"


class EdgeClass(enum.Enum):
    MATCH = "match"
    SWAP = "swap"
    MERGE = "merge"
    UNALIGNED = "unaligned"
    OTHER = "other"


CLASS_ORDER = (EdgeClass.MATCH, EdgeClass.SWAP, EdgeClass.MERGE, EdgeClass.UNALIGNED, EdgeClass.OTHER)

CLASS_PRIORITY_NOTE = "match > swap > merge > unaligned > other"


def percent(num: int, den: int) -> Fraction:
    return Fraction(100 * num, den) if den else Fraction(0)


def aligned_targets(f: int, a: Alignment) -> frozenset[int]:
    return a.targets(f)


def aligned_sources(e: int, a: Alignment) -> frozenset[int]:
    return a.sources(e)


def edge_matches(child: int, par: int, target_tree: DepTree, a: Alignment) -> bool:
    heads = aligned_targets(par, a)
    if not heads:
        return False
    return any(target_tree.head(e) in heads for e in aligned_targets(child, a))


def classify_edge(child: int, par: int, target_tree: DepTree, a: Alignment) -> EdgeClass:
    if edge_matches(child, par, target_tree, a):
        return EdgeClass.MATCH
    child_t = aligned_targets(child, a)
    par_t = aligned_targets(par, a)
    # reversed: a word aligned to the head depends on a word aligned to the child
    if any(target_tree.head(e) in child_t for e in par_t):
        return EdgeClass.SWAP
    if child_t & par_t:
        return EdgeClass.MERGE
    if not child_t or not par_t:
        return EdgeClass.UNALIGNED
    return EdgeClass.OTHER


def oriented(pair: AlignedPair, direction: Direction) -> AlignedPair:
    """The pair with the measured side as ``source``."""
    return pair if direction is Direction.SRC_TGT else pair.flipped()


def _matched(pair: AlignedPair) -> int:
    return sum(
        edge_matches(c, p, pair.target, pair.alignment) for c, p in pair.source.edges()
    )


def sent_match(pair: AlignedPair, direction: Direction = Direction.SRC_TGT) -> Fraction:
    pair = oriented(pair, direction)
    return percent(_matched(pair), len(pair.source.edges()))


def corpus_match(corpus: Iterable[AlignedPair], direction: Direction = Direction.SRC_TGT) -> Fraction:
    """Micro-averaged match percentage: matched edges over all edges."""
    matched = total = 0
    for pair in corpus:
        pair = oriented(pair, direction)
        matched += _matched(pair)
        total += len(pair.source.edges())
    return percent(matched, total)


@dataclass(frozen=True)
class MatchReport:
    direction: Direction
    edges: int
    counts: tuple[tuple[EdgeClass, int], ...]
    # UNALIGNED edges whose child (not just either endpoint) is spontaneous
    unaligned_child: int = 0

    def count(self, cls: EdgeClass) -> int:
        return dict(self.counts)[cls]

    def percent(self, cls: EdgeClass) -> Fraction:
        return percent(self.count(cls), self.edges)

    @property
    def percentages(self) -> dict[EdgeClass, Fraction]:
        return {cls: self.percent(cls) for cls in CLASS_ORDER}

    @property
    def unaligned_child_percent(self) -> Fraction:
        return percent(self.unaligned_child, self.edges)


def classify_pair(pair: AlignedPair) -> list[tuple[int, int, EdgeClass]]:
    """Classify every source-side edge of ``pair``."""
    return [
        (c, p, classify_edge(c, p, pair.target, pair.alignment)) for c, p in pair.source.edges()
    ]


def breakdown(corpus: Iterable[AlignedPair], direction: Direction = Direction.SRC_TGT) -> MatchReport:
    counts = dict.fromkeys(CLASS_ORDER, 0)
    edges = unaligned_child = 0
    for pair in corpus:
        pair = oriented(pair, direction)
        for c, _, cls in classify_pair(pair):
            counts[cls] += 1
            edges += 1
            if cls is EdgeClass.UNALIGNED and not pair.alignment.targets(c):
                unaligned_child += 1
    return MatchReport(direction, edges, tuple(counts.items()), unaligned_child)

