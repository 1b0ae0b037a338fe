"""Structural divergence analysis for word-aligned dependency tree pairs."""

from divkit.corpus_io import CorpusDocument, parse_corpus, read_corpus, serialize_corpus
from divkit.metrics import Direction, EdgeClass, breakdown, classify_edge, corpus_match, edge_matches, sent_match
from divkit.model import AlignedPair, Alignment, Corpus, DepTree, Token, build_tree, children, parent
from divkit.pipeline import Stage, corpus_stage_table, transform_corpus, transform_pair
from divkit.posstats import pos_breakdown
from divkit.projection import project_pos, project_tree
from divkit.rules import (
    apply_swap_rules,
    collect_swap_stats,
    evaluate_attachment,
    holdout_experiment,
    learn_swap_rules,
)
from divkit.treeops import merge, remove, swap

__all__ = [
    "AlignedPair",
    "Alignment",
    "Corpus",
    "CorpusDocument",
    "DepTree",
    "Direction",
    "EdgeClass",
    "Stage",
    "Token",
    "apply_swap_rules",
    "breakdown",
    "build_tree",
    "children",
    "classify_edge",
    "collect_swap_stats",
    "corpus_match",
    "corpus_stage_table",
    "edge_matches",
    "evaluate_attachment",
    "holdout_experiment",
    "learn_swap_rules",
    "merge",
    "parent",
    "parse_corpus",
    "pos_breakdown",
    "project_pos",
    "project_tree",
    "read_corpus",
    "remove",
    "sent_match",
    "serialize_corpus",
    "swap",
    "transform_corpus",
    "transform_pair",
]
