"""Tokens, dependency trees, word alignments and aligned tree pairs.

Everything here is an immutable value object.  Tree edits in
:mod:`divkit.treeops` build new trees rather than mutating old ones.

Token indices are the surface positions of the words (1-based); the virtual
root is index 0.  Trees read from a corpus always number their tokens
``1..n``.  Trees produced by removal or merging keep the original indices of
the surviving tokens, so they may have gaps; :meth:`DepTree.renumbered`
closes them again when a tree has to be written out.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from divkit.errors import (
    AlignmentError,
    CorpusError,
    CycleError,
    DanglingHeadError,
    MultipleRootError,
    NoRootError,
    TokenError,
)

ROOT = 0


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    pos: str

    def __post_init__(self) -> None:
        if self.index < 1:
            raise TokenError(f"token index must be >= 1, got {self.index}")
        if not self.form:
            raise TokenError(f"token {self.index} has an empty form")


@dataclass(frozen=True)
class DepTree:
    """A rooted, single-headed, acyclic dependency tree.

    ``heads[k]`` is the head index of ``tokens[k]``; 0 marks the root.
    Token indices must be strictly increasing but need not be contiguous.
    """

    tokens: tuple[Token, ...]
    heads: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "heads", tuple(self.heads))
        if not self.tokens:
            raise TokenError("a tree needs at least one token")
        if len(self.tokens) != len(self.heads):
            raise TokenError("tokens and heads differ in length")
        indices = [t.index for t in self.tokens]
        if any(a >= b for a, b in zip(indices, indices[1:])):
            raise TokenError(f"token indices must be unique and increasing: {indices}")
        _check_heads(dict(zip(indices, self.heads)))

    @cached_property
    def _position(self) -> dict[int, int]:
        return {t.index: k for k, t in enumerate(self.tokens)}

    @cached_property
    def _children(self) -> dict[int, tuple[int, ...]]:
        kids: dict[int, list[int]] = {ROOT: []}
        for t in self.tokens:
            kids[t.index] = []
        for t, h in zip(self.tokens, self.heads):
            kids[h].append(t.index)
        return {k: tuple(v) for k, v in kids.items()}

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __contains__(self, idx: object) -> bool:
        return idx in self._position

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(t.index for t in self.tokens)

    @property
    def root(self) -> int:
        return self._children[ROOT][0]

    def token(self, idx: int) -> Token:
        try:
            return self.tokens[self._position[idx]]
        except KeyError:
            raise IndexError(f"no token with index {idx}") from None

    def head(self, idx: int) -> int:
        try:
            return self.heads[self._position[idx]]
        except KeyError:
            raise IndexError(f"no token with index {idx}") from None

    def children(self, idx: int) -> frozenset[int]:
        try:
            return frozenset(self._children[idx])
        except KeyError:
            raise IndexError(f"no token with index {idx}") from None

    def pos(self, idx: int) -> str:
        return self.token(idx).pos

    def head_map(self) -> dict[int, int]:
        return dict(zip(self.indices, self.heads))

    def edges(self) -> list[tuple[int, int]]:
        """(child, head) pairs in surface order of the child, root excluded."""
        return [(t.index, h) for t, h in zip(self.tokens, self.heads) if h != ROOT]

    def descendants(self, idx: int) -> frozenset[int]:
        out: set[int] = set()
        stack = list(self._children[idx])
        while stack:
            k = stack.pop()
            out.add(k)
            stack.extend(self._children[k])
        return frozenset(out)

    def renumbered(self) -> tuple[DepTree, dict[int, int]]:
        """Return an equivalent tree numbered ``1..n`` plus the old->new map."""
        mapping = {old: new for new, old in enumerate(self.indices, start=1)}
        mapping[ROOT] = ROOT
        tokens = tuple(
            Token(mapping[t.index], t.form, t.pos) for t in self.tokens
        )
        tree = DepTree(tokens, tuple(mapping[h] for h in self.heads))
        del mapping[ROOT]
        return tree, mapping

    def with_heads(self, heads: Mapping[int, int]) -> DepTree:
        return DepTree(self.tokens, tuple(heads[t.index] for t in self.tokens))


def _check_heads(heads: Mapping[int, int]) -> None:
    for child, head in heads.items():
        if head != ROOT and head not in heads:
            raise DanglingHeadError(f"token {child} has head {head}, which is not a token")
    # cycles first: a pure cycle also has no root, and the cycle is the real fault
    settled = {ROOT}
    for start in heads:
        path: list[int] = []
        on_path: set[int] = set()
        node = start
        while node not in settled:
            if node in on_path:
                raise CycleError(f"head chain from token {start} loops through token {node}")
            on_path.add(node)
            path.append(node)
            node = heads[node]
        settled.update(path)
    roots = [c for c, h in heads.items() if h == ROOT]
    if not roots:
        raise NoRootError("no token is attached to the root")
    if len(roots) > 1:
        raise MultipleRootError(f"several tokens attach to the root: {sorted(roots)}")


def build_tree(tokens: Sequence[Token], heads: Mapping[int, int]) -> DepTree:
    """Validate a sentence read from input and build its tree.

    Unlike the bare :class:`DepTree` constructor this insists on the
    ``1..n`` numbering of freshly read sentences.
    """
    if not tokens:
        raise TokenError("a tree needs at least one token")
    ordered = sorted(tokens, key=lambda t: t.index)
    expected = list(range(1, len(ordered) + 1))
    if [t.index for t in ordered] != expected:
        raise TokenError(
            f"token indices must be 1..{len(ordered)}, got {[t.index for t in tokens]}"
        )
    missing = [i for i in expected if i not in heads]
    if missing:
        raise DanglingHeadError(f"no head given for tokens {missing}")
    extra = sorted(set(heads) - set(expected))
    if extra:
        raise DanglingHeadError(f"heads given for unknown tokens {extra}")
    return DepTree(tuple(ordered), tuple(heads[i] for i in expected))


def children(tree: DepTree, idx: int) -> frozenset[int]:
    return tree.children(idx)


def parent(tree: DepTree, idx: int) -> int:
    return tree.head(idx)


@dataclass(frozen=True)
class Alignment:
    """Many-to-many word alignment as (source index, target index) links."""

    links: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "links", frozenset((int(f), int(e)) for f, e in self.links))

    @classmethod
    def of(cls, links: Iterable[tuple[int, int]]) -> Alignment:
        return cls(frozenset(links))

    @cached_property
    def _by_source(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for f, e in self.links:
            out.setdefault(f, set()).add(e)
        return {k: frozenset(v) for k, v in out.items()}

    @cached_property
    def _by_target(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for f, e in self.links:
            out.setdefault(e, set()).add(f)
        return {k: frozenset(v) for k, v in out.items()}

    def __len__(self) -> int:
        return len(self.links)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.sorted())

    def __contains__(self, link: object) -> bool:
        return link in self.links

    def sorted(self) -> list[tuple[int, int]]:
        return sorted(self.links)

    def targets(self, f: int) -> frozenset[int]:
        return self._by_source.get(f, frozenset())

    def sources(self, e: int) -> frozenset[int]:
        return self._by_target.get(e, frozenset())

    def inverted(self) -> Alignment:
        return Alignment(frozenset((e, f) for f, e in self.links))

    def remap(
        self,
        source: Mapping[int, int] | None = None,
        target: Mapping[int, int] | None = None,
    ) -> Alignment:
        """Send every link through the given index maps (missing keys stay put)."""
        source = source or {}
        target = target or {}
        return Alignment(
            frozenset((source.get(f, f), target.get(e, e)) for f, e in self.links)
        )


@dataclass(frozen=True)
class AlignedPair:
    """A source tree F, a target tree E and the word alignment A between them."""

    id: str
    source: DepTree
    target: DepTree
    alignment: Alignment = field(default_factory=Alignment)

    def __post_init__(self) -> None:
        for f, e in self.alignment.links:
            if f not in self.source:
                raise AlignmentError(f"{self.id}: link {f}-{e} names missing source token {f}")
            if e not in self.target:
                raise AlignmentError(f"{self.id}: link {f}-{e} names missing target token {e}")

    def flipped(self) -> AlignedPair:
        """The same pair seen from the target side."""
        return AlignedPair(self.id, self.target, self.source, self.alignment.inverted())

    def renumbered(self) -> AlignedPair:
        source, smap = self.source.renumbered()
        target, tmap = self.target.renumbered()
        return AlignedPair(self.id, source, target, self.alignment.remap(smap, tmap))


@dataclass(frozen=True)
class Corpus(Sequence[AlignedPair]):
    pairs: tuple[AlignedPair, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(self.pairs))
        seen: set[str] = set()
        for pair in self.pairs:
            if pair.id in seen:
                raise CorpusError(f"duplicate pair id {pair.id!r}")
            seen.add(pair.id)

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, k):  # type: ignore[override]
        if isinstance(k, slice):
            return Corpus(self.pairs[k])
        return self.pairs[k]

    def __iter__(self) -> Iterator[AlignedPair]:
        return iter(self.pairs)
