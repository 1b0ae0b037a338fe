"""Command-line entry point: ``divkit {analyze,posstats,transform,project,experiment}``.

Exit status is 0 on success, 1 when the input cannot be read or parsed and
2 for invalid options.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections.abc import Sequence
from pathlib import Path

from divkit.corpus_io import CorpusDocument, Table, read_corpus, render_tables, serialize_corpus, write_tables
from divkit.errors import DivkitError, EmptySplitError, ParseError
from divkit.metrics import Direction
from divkit.model import Corpus
from divkit.pipeline import DIRECTIONS, REPORT_META, Stage, corpus_stage_table, match_reports_table, transform_corpus
from divkit.posstats import pos_breakdown, posstats_table
from divkit.projection import project_pair
from divkit.rules import apply_swap_rules, experiment_table, holdout_experiment, read_rules, rules_table
from divkit.treeops import oplog_table

log = logging.getLogger("divkit")

EXIT_INPUT = 1
EXIT_CONFIG = 2

_LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class ConfigError(Exception):
    pass


class InputError(Exception):
    pass


def _setup_logging() -> None:
    name = os.environ.get("DIVKIT_LOG", "info").lower()
    if name not in _LOG_LEVELS:
        raise ConfigError(f"DIVKIT_LOG must be one of {sorted(_LOG_LEVELS)}, got {name!r}")
    logging.basicConfig(level=_LOG_LEVELS[name], format="%(levelname)s: %(message)s", stream=sys.stderr, force=True)


def _directions(opt: str) -> tuple[Direction, ...]:
    return DIRECTIONS if opt == "both" else (Direction(opt),)


def _load(path: str) -> CorpusDocument:
    try:
        doc = read_corpus(path)
    except OSError as err:
        raise InputError(f"{path}: {err.strerror or err}") from None
    except UnicodeDecodeError as err:
        raise InputError(f"{path}: not UTF-8 ({err.reason})") from None
    except ParseError as err:
        raise InputError(f"{path}: {err}") from None
    if not len(doc.corpus):
        raise InputError(f"{path}: empty corpus")
    return doc


def _emit(tables: Sequence[Table], args: argparse.Namespace) -> None:
    if args.out:
        for path in write_tables(tables, args.out, args.format):
            log.info("wrote %s", path)
    else:
        sys.stdout.write(render_tables(tables, args.format))


def cmd_analyze(args: argparse.Namespace) -> int:
    doc = _load(args.input)
    dirs = _directions(args.direction)
    table = corpus_stage_table(doc.corpus)
    baseline = [(s.value, r) for d, s, r in table.rows if d in dirs and s is Stage.BASELINE]
    _emit([table.to_table(dirs), match_reports_table(baseline, "breakdown", REPORT_META)], args)
    return 0


def cmd_posstats(args: argparse.Namespace) -> int:
    doc = _load(args.input)
    result = transform_corpus(doc.corpus)
    base = result.corpus(Stage.BASELINE)
    rows = []
    for d in _directions(args.direction):
        stats = pos_breakdown(base, result.log, d)
        if not args.all:
            stats = [s for s in stats if s.applied]
        rows.append((d, stats))
    _emit([posstats_table(rows)], args)
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    doc = _load(args.input)
    result = transform_corpus(doc.corpus)
    out = CorpusDocument(result.corpus(Stage.SWAP), doc.source_language, doc.target_language)
    text = serialize_corpus(out)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "transformed.txt").write_text(text, encoding="utf-8")
        write_tables([oplog_table(result.log)], args.out, args.format)
    else:
        sys.stdout.write(text)
    return 0


def format_projected(pair_id: str, proj) -> str:
    lines = [f"# id {pair_id}", "## projected"]
    for tok, head in zip(proj.tokens, proj.heads):
        lines.append(f"{tok.index}\t{tok.form}\t{tok.pos}\t{-1 if head is None else head}")
    return "\n".join(lines) + "\n"


def cmd_project(args: argparse.Namespace) -> int:
    doc = _load(args.input)
    rules = []
    if args.rules:
        try:
            rules = read_rules(args.rules)
        except (OSError, ValueError) as err:
            raise InputError(f"{args.rules}: {err}") from None
    blocks = []
    for pair in doc.corpus:
        try:
            proj = project_pair(pair)
        except DivkitError as err:
            log.warning("skipping pair %s: %s", pair.id, err)
            continue
        blocks.append(format_projected(pair.id, apply_swap_rules(proj, rules)))
    text = "\n".join(blocks)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "projected.txt").write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    if not 0 <= args.threshold <= 1:
        raise ConfigError(f"--threshold must be in [0, 1], got {args.threshold}")
    if not 0 < args.train_fraction < 1:
        raise ConfigError(f"--train-fraction must be in (0, 1), got {args.train_fraction}")
    if args.min_support < 0:
        raise ConfigError(f"--min-support must be >= 0, got {args.min_support}")
    doc = _load(args.input)
    try:
        report = holdout_experiment(
            Corpus(doc.corpus.pairs), args.train_fraction, args.threshold, args.min_support, args.seed
        )
    except EmptySplitError as err:
        raise ConfigError(str(err)) from None
    _emit([experiment_table(report), rules_table(report.rules)], args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, metavar="PATH", help="aligned corpus file")
    common.add_argument("--direction", choices=["src-tgt", "tgt-src", "both"], default="both")
    common.add_argument("--out", metavar="DIR", help="write report files here instead of stdout")
    common.add_argument("--format", choices=["tsv", "json"], default="tsv")

    parser = argparse.ArgumentParser(prog="divkit", description="Divergence analysis for aligned dependency trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="match/divergence table per rewrite stage")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("posstats", parents=[common], help="operation rates by POS pair")
    p.add_argument("--all", action="store_true", help="include POS pairs no operation applied to")
    p.set_defaults(func=cmd_posstats)

    p = sub.add_parser("transform", parents=[common], help="write the rewritten corpus and operation log")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("project", parents=[common], help="project target trees onto source words")
    p.add_argument("--rules", metavar="PATH", help="swap rules (TSV) to apply after projection")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("experiment", parents=[common], help="learn swap rules on a split and score them")
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--min-support", type=int, default=3)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _setup_logging()
        return args.func(args)
    except ConfigError as err:
        print(f"divkit: error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as err:
        print(f"divkit: error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
