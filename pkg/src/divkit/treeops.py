"""Remove, merge and swap rewrites on dependency trees.

Each operation is a pure function from a tree to a new tree and performs
exactly one rewrite.  Surviving tokens keep their indices, so alignment
links into unaffected tokens stay valid without remapping; the only index
that disappears without replacement is the one removed or merged away.
"""

from __future__ import annotations

import enum
from collections.abc import MutableMapping
from dataclasses import dataclass

from divkit.corpus_io import Column, Table
from divkit.errors import LastTokenError, NotAnEdgeError
from divkit.model import ROOT, DepTree, Token

ROOT_PROMOTION = "ROOT-PROMOTION"


class OpKind(enum.Enum):
    REMOVE = "REMOVE"
    MERGE = "MERGE"
    SWAP = "SWAP"


class Side(enum.Enum):
    SOURCE = "SOURCE"
    TARGET = "TARGET"


@dataclass(frozen=True)
class OpLogEntry:
    """One applied rewrite.

    For REMOVE the removed token's POS goes in ``child_pos`` and
    ``parent_pos`` is None.  Indices refer to the tree the operation was
    applied to.
    """

    pair_id: str
    kind: OpKind
    side: Side
    child_pos: str
    parent_pos: str | None
    forms: tuple[str, ...]
    child_index: int
    parent_index: int | None = None
    note: str = ""

    def __post_init__(self) -> None:
        if (self.kind is OpKind.REMOVE) != (self.parent_pos is None):
            raise ValueError(f"{self.kind.value} entry with parent_pos={self.parent_pos!r}")


def remove(w: int, t: DepTree) -> DepTree:
    """Delete token ``w`` and attach its children to its head.

    When ``w`` is the root its leftmost child becomes the new root and the
    other children attach to that child.
    """
    if w not in t:
        raise IndexError(f"no token with index {w}")
    if len(t) == 1:
        raise LastTokenError(f"cannot remove token {w}: it is the only token")
    heads = t.head_map()
    up = heads.pop(w)
    kids = sorted(t.children(w))
    if up == ROOT:
        new_root, *rest = kids
        heads[new_root] = ROOT
        for k in rest:
            heads[k] = new_root
    else:
        for k in kids:
            heads[k] = up
    tokens = tuple(tok for tok in t.tokens if tok.index != w)
    return DepTree(tokens, tuple(heads[tok.index] for tok in tokens))


def _check_edge(wc: int, wp: int, t: DepTree) -> None:
    if wc not in t or wp not in t or t.head(wc) != wp:
        raise NotAnEdgeError(f"({wc}, {wp}) is not a (child, head) edge")


def merged_form(child: Token, parent: Token) -> str:
    return f"{child.form}+{parent.form}"


def merge(wc: int, wp: int, t: DepTree) -> DepTree:
    """Collapse child ``wc`` into its head ``wp``.

    The merged node keeps ``wp``'s index and POS and is named
    ``"<child form>+<parent form>"``; ``wc``'s children move up to it.
    """
    _check_edge(wc, wp, t)
    heads = t.head_map()
    del heads[wc]
    for k in t.children(wc):
        heads[k] = wp
    child = t.token(wc)
    tokens = []
    for tok in t.tokens:
        if tok.index == wc:
            continue
        if tok.index == wp:
            tok = Token(wp, merged_form(child, tok), tok.pos)
        tokens.append(tok)
    return DepTree(tuple(tokens), tuple(heads[tok.index] for tok in tokens))


def swap_heads(heads: MutableMapping[int, int], wc: int, wp: int) -> None:
    """Reverse the edge ``wc -> wp`` in a bare head map, in place."""
    heads[wc] = heads[wp]
    heads[wp] = wc


def swap(wc: int, wp: int, t: DepTree) -> DepTree:
    """Reverse the edge between ``wc`` and its head ``wp``.

    ``wc`` takes ``wp``'s place under ``wp``'s former head (becoming root if
    ``wp`` was), ``wp`` becomes a dependent of ``wc``; every other
    attachment is left alone.
    """
    _check_edge(wc, wp, t)
    heads = t.head_map()
    swap_heads(heads, wc, wp)
    return t.with_heads(heads)


OPLOG_COLUMNS = tuple(
    Column(n) for n in ("pair_id", "op", "side", "child_pos", "parent_pos", "forms", "note")
)


def oplog_table(entries, name: str = "oplog") -> Table:
    rows = tuple(
        (e.pair_id, e.kind.value, e.side.value, e.child_pos, e.parent_pos, " ".join(e.forms), e.note)
        for e in entries
    )
    return Table(name, OPLOG_COLUMNS, rows)
