"""Direct projection of POS tags and heads from a parsed tree through an alignment.

The parsed tree is the target side E of an aligned pair; the projected
sentence is the source side F.  Where a word has several alignment links
the leftmost one wins.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from divkit.errors import ProjectionDegenerateError
from divkit.model import ROOT, AlignedPair, Alignment, DepTree, Token

UNKNOWN_POS = "UNK"


@dataclass(frozen=True)
class ProjectedTree:
    """Tokens with projected POS and a partial head assignment.

    ``heads[k]`` is the head of ``tokens[k]``: 0 for the root, None when
    the token could not be attached.
    """

    tokens: tuple[Token, ...]
    heads: tuple[int | None, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "heads", tuple(self.heads))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(t.index for t in self.tokens)

    @property
    def attached(self) -> frozenset[int]:
        return frozenset(t.index for t, h in zip(self.tokens, self.heads) if h is not None)

    def head(self, idx: int) -> int | None:
        return self.head_map()[idx]

    def head_map(self) -> dict[int, int | None]:
        return dict(zip(self.indices, self.heads))

    def pos(self, idx: int) -> str:
        return next(t.pos for t in self.tokens if t.index == idx)

    def edges(self) -> list[tuple[int, int]]:
        """Attached (child, head) pairs, root attachment excluded."""
        return [(t.index, h) for t, h in zip(self.tokens, self.heads) if h not in (None, ROOT)]

    def with_heads(self, heads: dict[int, int | None]) -> ProjectedTree:
        return ProjectedTree(self.tokens, tuple(heads[i] for i in self.indices))


def project_pos(e: DepTree, a: Alignment, f_tokens: Sequence[Token]) -> list[str]:
    """POS of the leftmost aligned target word for each token, else ``UNK``."""
    out = []
    for tok in f_tokens:
        targets = a.targets(tok.index)
        out.append(e.pos(min(targets)) if targets else UNKNOWN_POS)
    return out


def _find_cycle(heads: dict[int, int]) -> list[int] | None:
    """Leftmost-starting cycle in a head map, as a list of its members."""
    settled = {ROOT}
    for start in sorted(heads):
        path: list[int] = []
        node = start
        while node not in settled and node not in path:
            path.append(node)
            node = heads[node]
        if node in path:
            return path[path.index(node):]
        settled.update(path)
    return None


def project_tree(e: DepTree, a: Alignment, f_tokens: Sequence[Token]) -> ProjectedTree:
    """Project E's heads and tags onto the F tokens.

    A token aligned to ``e_c`` is attached to the (leftmost) F image of the
    nearest ancestor of ``e_c`` that has an F image other than the token
    itself.  Its root is the F image of E's root, or the leftmost aligned
    token when E's root has none; tokens whose E ancestry runs out attach
    to that root.  Many-to-many links can make the proposed heads circular;
    each cycle is cut by attaching its leftmost member to the root.
    """
    f_tokens = tuple(f_tokens)
    aligned = [t.index for t in f_tokens if a.targets(t.index)]
    if not aligned:
        raise ProjectionDegenerateError("no source token is aligned to the parsed tree")

    def image(k: int) -> int | None:
        srcs = a.sources(k)
        return min(srcs) if srcs else None

    proposed: dict[int, int] = {}
    for f in aligned:
        h = e.head(min(a.targets(f)))
        while h != ROOT and image(h) in (None, f):
            h = e.head(h)
        proposed[f] = ROOT if h == ROOT else image(h)

    e_root_image = image(e.root)
    root = e_root_image if e_root_image is not None else aligned[0]
    heads = {f: (root if h == ROOT else h) for f, h in proposed.items()}
    heads[root] = ROOT
    while (cycle := _find_cycle(heads)) is not None:
        heads[min(cycle)] = root

    pos = project_pos(e, a, f_tokens)
    tokens = tuple(Token(t.index, t.form, p) for t, p in zip(f_tokens, pos))
    return ProjectedTree(tokens, tuple(heads.get(t.index) for t in f_tokens))


def project_pair(pair: AlignedPair) -> ProjectedTree:
    return project_tree(pair.target, pair.alignment, pair.source.tokens)

