"""Reading and writing aligned dependency corpora and report tables.

A corpus file is UTF-8 text made of instances separated by one blank line::

    # id <text>
    ## source
    INDEX<TAB>FORM<TAB>POS<TAB>HEAD
    ...
    ## target
    INDEX<TAB>FORM<TAB>POS<TAB>HEAD
    ...
    ## align
    1-1 2-3 3-2

Alignment links are ``source-target`` pairs of 1-based token indices.  An
empty alignment leaves the line after ``## align`` empty.  The two language
labels live in an optional preamble before the first instance::

    #! source-language eng
    #! target-language hin

Canonical text (what :func:`serialize_corpus` writes) has the preamble,
links sorted by ``(source, target)`` and a single trailing newline.
"""

from __future__ import annotations

import json
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any

from divkit.errors import DivkitError, ParseError
from divkit.model import AlignedPair, Alignment, Corpus, DepTree, Token, build_tree

DEFAULT_SOURCE_LANGUAGE = "src"
DEFAULT_TARGET_LANGUAGE = "tgt"

_LINK = re.compile(r"(\d+)-(\d+)")


@dataclass(frozen=True)
class CorpusDocument:
    corpus: Corpus
    source_language: str = DEFAULT_SOURCE_LANGUAGE
    target_language: str = DEFAULT_TARGET_LANGUAGE

    def __post_init__(self) -> None:
        for label in (self.source_language, self.target_language):
            if not label or any(c.isspace() for c in label):
                raise ValueError(f"bad language label {label!r}")


class _Lines:
    """Cursor over (line number, text) pairs."""

    def __init__(self, text: str):
        self.lines = text.split("\n")
        # a final newline yields one trailing empty string
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0

    @property
    def lineno(self) -> int:
        return self.pos + 1

    def done(self) -> bool:
        return self.pos >= len(self.lines)

    def peek(self) -> str | None:
        return None if self.done() else self.lines[self.pos]

    def next(self, what: str) -> str:
        if self.done():
            raise ParseError(self.lineno, f"unexpected end of input, expected {what}")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def expect(self, exact: str) -> None:
        line = self.next(repr(exact))
        if line != exact:
            raise ParseError(self.pos, f"expected {exact!r}, got {line!r}")


def _parse_int(text: str, line: int, what: str) -> int:
    if not re.fullmatch(r"-?\d+", text):
        raise ParseError(line, f"{what} is not an integer: {text!r}")
    return int(text)


def _parse_token_block(cur: _Lines, side: str) -> tuple[DepTree, int]:
    start = cur.lineno
    tokens: list[Token] = []
    heads: dict[int, int] = {}
    while cur.peek() is not None and not cur.peek().startswith("#"):
        raw = cur.next("token line")
        line = cur.pos
        if raw == "":
            raise ParseError(line, f"blank line inside {side} tokens")
        cols = raw.split("\t")
        if len(cols) != 4:
            raise ParseError(line, f"expected 4 tab-separated columns, got {len(cols)}")
        idx = _parse_int(cols[0], line, "INDEX")
        head = _parse_int(cols[3], line, "HEAD")
        if idx != len(tokens) + 1:
            raise ParseError(line, f"expected token index {len(tokens) + 1}, got {idx}")
        if not cols[1] or any(c.isspace() for c in cols[1]):
            raise ParseError(line, f"bad FORM {cols[1]!r}")
        if not cols[2] or any(c.isspace() for c in cols[2]):
            raise ParseError(line, f"bad POS {cols[2]!r}")
        tokens.append(Token(idx, cols[1], cols[2]))
        heads[idx] = head
    if not tokens:
        raise ParseError(cur.lineno, f"{side} has no tokens")
    for idx, head in heads.items():
        if head < 0 or head > len(tokens):
            raise ParseError(start + idx - 1, f"head {head} out of range 0..{len(tokens)}")
    try:
        return build_tree(tokens, heads), start
    except DivkitError as err:
        raise ParseError(start, f"invalid {side} tree: {err}") from None


def _parse_alignment(raw: str, line: int, n_src: int, n_tgt: int) -> Alignment:
    links: list[tuple[int, int]] = []
    for item in raw.split(" ") if raw else []:
        m = _LINK.fullmatch(item)
        if not m:
            raise ParseError(line, f"bad alignment link {item!r}")
        f, e = int(m.group(1)), int(m.group(2))
        if not 1 <= f <= n_src:
            raise ParseError(line, f"link {item}: source index out of range 1..{n_src}")
        if not 1 <= e <= n_tgt:
            raise ParseError(line, f"link {item}: target index out of range 1..{n_tgt}")
        links.append((f, e))
    if len(set(links)) != len(links):
        raise ParseError(line, "duplicate alignment link")
    return Alignment.of(links)


def parse_corpus(text: str) -> CorpusDocument:
    """Parse corpus text; every failure is a :class:`ParseError` with a line number."""
    if text.startswith("﻿"):
        text = text[1:]
    cur = _Lines(text)
    langs = {"source-language": DEFAULT_SOURCE_LANGUAGE, "target-language": DEFAULT_TARGET_LANGUAGE}
    while cur.peek() is not None and cur.peek().startswith("#!"):
        parts = cur.next("preamble").split(" ")
        if len(parts) != 3 or parts[1] not in langs or not parts[2]:
            raise ParseError(cur.pos, f"bad preamble line {' '.join(parts)!r}")
        langs[parts[1]] = parts[2]
    while cur.peek() == "":
        cur.next("blank")

    pairs: list[AlignedPair] = []
    seen: dict[str, int] = {}
    while not cur.done():
        header = cur.next("'# id' line")
        id_line = cur.pos
        if not header.startswith("# id "):
            raise ParseError(id_line, f"expected '# id <text>', got {header!r}")
        pair_id = header[len("# id "):]
        if not pair_id.strip():
            raise ParseError(id_line, "empty pair id")
        if pair_id in seen:
            raise ParseError(id_line, f"duplicate id {pair_id!r} (first on line {seen[pair_id]})")
        seen[pair_id] = id_line
        cur.expect("## source")
        source, _ = _parse_token_block(cur, "source")
        cur.expect("## target")
        target, _ = _parse_token_block(cur, "target")
        cur.expect("## align")
        # a file may end right after "## align" when the alignment is empty
        raw = "" if cur.done() else cur.next("alignment line")
        alignment = _parse_alignment(raw, cur.pos, len(source), len(target))
        pairs.append(AlignedPair(pair_id, source, target, alignment))
        if not cur.done():
            sep = cur.next("blank separator")
            if sep != "":
                raise ParseError(cur.pos, f"expected blank line between instances, got {sep!r}")
            while cur.peek() == "":
                cur.next("blank")
    return CorpusDocument(Corpus(tuple(pairs)), langs["source-language"], langs["target-language"])


def read_corpus(path: str | Path) -> CorpusDocument:
    return parse_corpus(Path(path).read_text(encoding="utf-8"))


def format_tree(tree: DepTree, heads: Mapping[int, int | None] | None = None) -> list[str]:
    """Token lines for ``tree``; ``heads`` overrides the head column (None -> -1)."""
    lines = []
    for tok in tree.tokens:
        head = tree.head(tok.index) if heads is None else heads[tok.index]
        lines.append(f"{tok.index}\t{tok.form}\t{tok.pos}\t{-1 if head is None else head}")
    return lines


def format_alignment(alignment: Alignment) -> str:
    return " ".join(f"{f}-{e}" for f, e in alignment.sorted())


def serialize_pair(pair: AlignedPair) -> str:
    pair = pair.renumbered()
    lines = [f"# id {pair.id}", "## source", *format_tree(pair.source), "## target"]
    lines += format_tree(pair.target)
    lines += ["## align", format_alignment(pair.alignment)]
    return "\n".join(lines) + "\n"


def serialize_corpus(doc: CorpusDocument) -> str:
    """Canonical text for ``doc``.

    Trees with gaps in their numbering (after removals or merges) are
    renumbered ``1..n`` and the alignment follows.
    """
    head = (
        f"#! source-language {doc.source_language}\n"
        f"#! target-language {doc.target_language}\n"
    )
    body = "\n".join(serialize_pair(p) for p in doc.corpus)
    return head + ("\n" + body if body else "")


def write_corpus(doc: CorpusDocument, path: str | Path) -> None:
    Path(path).write_text(serialize_corpus(doc), encoding="utf-8")


# --- report tables ----------------------------------------------------------


def fmt_fixed(value: Fraction | int | float, digits: int) -> str:
    """Round half-up to ``digits`` decimals without going through binary floats."""
    if isinstance(value, float):
        value = Fraction(str(value))
    q = Decimal(1).scaleb(-digits)
    exact = Decimal(Fraction(value).numerator) / Decimal(Fraction(value).denominator)
    return str(exact.quantize(q, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class Column:
    name: str
    # None: text/int; otherwise number of decimals for a rational value
    digits: int | None = None


@dataclass(frozen=True)
class Table:
    """A named report table rendered identically as TSV or JSON."""

    name: str
    columns: tuple[Column, ...]
    rows: tuple[tuple[Any, ...], ...] = ()
    meta: tuple[tuple[str, str], ...] = field(default=())

    def cell_text(self, col: Column, value: Any) -> str:
        if value is None:
            return ""
        if col.digits is not None:
            return fmt_fixed(value, col.digits)
        return str(value)

    def cell_json(self, col: Column, value: Any) -> Any:
        if value is None:
            return None
        if col.digits is not None:
            return float(fmt_fixed(value, col.digits))
        return value

    def to_tsv(self) -> str:
        out = [f"# {k}: {v}" for k, v in self.meta]
        out.append("\t".join(c.name for c in self.columns))
        for row in self.rows:
            out.append("\t".join(self.cell_text(c, v) for c, v in zip(self.columns, row)))
        return "\n".join(out) + "\n"

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "meta": dict(self.meta),
            "columns": [c.name for c in self.columns],
            "rows": [
                {c.name: self.cell_json(c, v) for c, v in zip(self.columns, row)}
                for row in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, ensure_ascii=False) + "\n"


def render_tables(tables: Sequence[Table], fmt: str) -> str:
    """Several tables as one text stream (blank-line separated TSV, or one JSON object)."""
    if fmt == "json":
        obj = {t.name: t.to_json_obj() for t in tables}
        return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    return "\n".join(f"# table: {t.name}\n{t.to_tsv()}" for t in tables)


def write_tables(tables: Iterable[Table], out_dir: str | Path, fmt: str) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for t in tables:
        path = out_dir / f"{t.name}.{fmt}"
        path.write_text(t.to_json() if fmt == "json" else t.to_tsv(), encoding="utf-8")
        written.append(path)
    return written
