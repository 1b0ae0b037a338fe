"""Learning and applying POS-pattern swap rules for projected trees.

Training pairs supply a gold source tree, a parsed target tree and the
alignment between them.  Each target tree is projected onto the source
words; every projected edge is keyed by its (child POS, head POS) under
the projected tags and counted as swapped when the gold tree holds the
same two words with the head relation reversed.  Patterns swapped often
enough, and seen often enough, become rules that are applied to fresh
projections.
"""

from __future__ import annotations

import random
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from divkit.corpus_io import Column, Table
from divkit.errors import EmptySplitError, ProjectionDegenerateError, TokenMismatchError
from divkit.metrics import EdgeClass, classify_edge, percent
from divkit.model import ROOT, AlignedPair, Alignment, Corpus, DepTree
from divkit.projection import UNKNOWN_POS, ProjectedTree, project_pair
from divkit.treeops import swap_heads


@dataclass(frozen=True)
class SwapRule:
    child_pos: str
    parent_pos: str
    frequency: Fraction
    support: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "frequency", Fraction(self.frequency))
        if not 0 <= self.frequency <= 1:
            raise ValueError(f"frequency {self.frequency} outside [0, 1]")
        if self.support < 1:
            raise ValueError(f"support must be >= 1, got {self.support}")

    @property
    def pattern(self) -> tuple[str, str]:
        return self.child_pos, self.parent_pos


def _identity(tree: DepTree) -> Alignment:
    return Alignment.of((i, i) for i in tree.indices)


def collect_swap_stats(train: Iterable[AlignedPair]) -> list[SwapRule]:
    """Swap frequency and support of every projected (child POS, head POS) pattern."""
    seen: Counter[tuple[str, str]] = Counter()
    swapped: Counter[tuple[str, str]] = Counter()
    for pair in train:
        try:
            proj = project_pair(pair)
        except ProjectionDegenerateError:
            continue
        gold = pair.source
        ident = _identity(gold)
        for c, h in proj.edges():
            key = (proj.pos(c), proj.pos(h))
            seen[key] += 1
            if classify_edge(c, h, gold, ident) is EdgeClass.SWAP:
                swapped[key] += 1
    cands = [SwapRule(c, p, Fraction(swapped[(c, p)], n), n) for (c, p), n in seen.items()]
    cands.sort(key=lambda r: (-r.support, r.child_pos, r.parent_pos))
    return cands


def learn_swap_rules(
    candidates: Iterable[SwapRule], threshold: float | Fraction, min_support: int
) -> list[SwapRule]:
    """Keep candidates with ``frequency >= threshold`` and ``support >= min_support``."""
    threshold = Fraction(str(threshold)) if isinstance(threshold, float) else Fraction(threshold)
    kept = [r for r in candidates if r.frequency >= threshold and r.support >= min_support]
    kept.sort(key=lambda r: (-r.support, r.child_pos, r.parent_pos))
    return kept


def _bottom_up(proj: ProjectedTree) -> list[int]:
    """Attached tokens, children before heads, siblings left to right."""
    kids: dict[int, list[int]] = {}
    for t, h in zip(proj.tokens, proj.heads):
        if h is not None:
            kids.setdefault(h, []).append(t.index)
    order: list[int] = []

    def visit(n: int) -> None:
        for k in kids.get(n, ()):
            visit(k)
        order.append(n)

    attached = proj.attached
    tops = list(kids.get(ROOT, ()))
    # subtrees hanging from an unattached token have no path to the root
    tops += sorted(k for h, ks in kids.items() if h != ROOT and h not in attached for k in ks)
    for top in tops:
        visit(top)
    return order


def apply_swap_rules(proj: ProjectedTree, rules: Iterable[SwapRule]) -> ProjectedTree:
    """One bottom-up pass swapping every edge whose POS pattern has a rule.

    Each edge is looked at once; the reversed edge left behind by a swap is
    not reconsidered.
    """
    patterns = {r.pattern for r in rules if UNKNOWN_POS not in r.pattern}
    if not patterns:
        return proj
    heads = proj.head_map()
    pos = {t.index: t.pos for t in proj.tokens}
    considered: set[frozenset[int]] = set()
    for node in _bottom_up(proj):
        h = heads[node]
        if h is None or h == ROOT:
            continue
        edge = frozenset((node, h))
        if edge in considered:
            continue
        considered.add(edge)
        if (pos[node], pos[h]) in patterns:
            swap_heads(heads, node, h)
    return proj.with_heads(heads)


@dataclass(frozen=True)
class EvalResult:
    predicted: int
    gold: int
    correct: int

    def __post_init__(self) -> None:
        if self.correct > min(self.predicted, self.gold):
            raise ValueError("more correct edges than predicted or gold edges")

    @property
    def precision(self) -> Fraction:
        return percent(self.correct, self.predicted)

    @property
    def recall(self) -> Fraction:
        return percent(self.correct, self.gold)

    @property
    def f1(self) -> Fraction:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else Fraction(0)

    def __add__(self, other: EvalResult) -> EvalResult:
        return EvalResult(
            self.predicted + other.predicted, self.gold + other.gold, self.correct + other.correct
        )


def evaluate_attachment(pred: ProjectedTree, gold: DepTree) -> EvalResult:
    if [(t.index, t.form) for t in pred.tokens] != [(t.index, t.form) for t in gold.tokens]:
        raise TokenMismatchError("predicted and gold trees cover different tokens")
    pred_edges = set(pred.edges())
    gold_edges = set(gold.edges())
    return EvalResult(len(pred_edges), len(gold_edges), len(pred_edges & gold_edges))


def micro_average(results: Iterable[EvalResult]) -> EvalResult:
    total = EvalResult(0, 0, 0)
    for r in results:
        total = total + r
    return total


def split_corpus(corpus: Corpus, train_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    if not 0 < train_fraction < 1:
        raise ValueError(f"train fraction must be in (0, 1), got {train_fraction}")
    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)
    n_train = round(train_fraction * len(corpus))
    train = sorted(order[:n_train])
    test = sorted(order[n_train:])
    if not train or not test:
        raise EmptySplitError(
            f"{len(corpus)} pairs split {len(train)}/{len(test)} at fraction {train_fraction}"
        )
    return Corpus(tuple(corpus[i] for i in train)), Corpus(tuple(corpus[i] for i in test))


def _score(pairs: Iterable[AlignedPair], rules: Sequence[SwapRule]) -> EvalResult:
    total = EvalResult(0, 0, 0)
    for pair in pairs:
        gold = pair.source
        try:
            proj = project_pair(pair)
        except ProjectionDegenerateError:
            total = total + EvalResult(0, len(gold.edges()), 0)
            continue
        total = total + evaluate_attachment(apply_swap_rules(proj, rules), gold)
    return total


@dataclass(frozen=True)
class ExperimentReport:
    train_fraction: float
    threshold: float
    min_support: int
    seed: int
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    candidates: tuple[SwapRule, ...]
    rules: tuple[SwapRule, ...]
    baseline: EvalResult
    corrected: EvalResult


def holdout_experiment(
    corpus: Corpus,
    train_fraction: float = 0.8,
    threshold: float = 0.8,
    min_support: int = 3,
    seed: int = 42,
) -> ExperimentReport:
    """Learn rules on a seeded split and score projection with and without them."""
    train, test = split_corpus(corpus, train_fraction, seed)
    candidates = collect_swap_stats(train)
    rules = learn_swap_rules(candidates, threshold, min_support)
    return ExperimentReport(
        train_fraction, threshold, min_support, seed,
        tuple(p.id for p in train), tuple(p.id for p in test),
        tuple(candidates), tuple(rules),
        _score(test, []), _score(test, rules),
    )


RULE_COLUMNS = (Column("child_pos"), Column("parent_pos"), Column("frequency", 4), Column("support"))


def rules_table(rules: Iterable[SwapRule], name: str = "rules") -> Table:
    return Table(name, RULE_COLUMNS, tuple((r.child_pos, r.parent_pos, r.frequency, r.support) for r in rules))


EXPERIMENT_COLUMNS = (
    Column("system"),
    Column("threshold"),
    Column("min_support"),
    Column("precision", 2),
    Column("recall", 2),
    Column("f1", 2),
    Column("predicted"),
    Column("gold"),
    Column("correct"),
)


def experiment_table(report: ExperimentReport, name: str = "experiment") -> Table:
    rows = []
    for label, thr, sup, res in (
        ("baseline", None, None, report.baseline),
        ("corrected", report.threshold, report.min_support, report.corrected),
    ):
        rows.append((label, thr, sup, res.precision, res.recall, res.f1, res.predicted, res.gold, res.correct))
    meta = (
        ("train-fraction", str(report.train_fraction)),
        ("threshold", str(report.threshold)),
        ("min-support", str(report.min_support)),
        ("seed", str(report.seed)),
        ("train-pairs", str(len(report.train_ids))),
        ("test-pairs", str(len(report.test_ids))),
        ("predicted-edges", "attached non-root edges; unattached tokens contribute none"),
    )
    return Table(name, EXPERIMENT_COLUMNS, tuple(rows), meta)


def read_rules(path) -> list[SwapRule]:
    """Read a rules file written by :func:`rules_table` (TSV)."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln and not ln.startswith("#")]
    if not lines or lines[0].split("\t") != [c.name for c in RULE_COLUMNS]:
        raise ValueError("missing rules header")
    rules = []
    for ln in lines[1:]:
        child, parent, freq, support = ln.split("\t")
        rules.append(SwapRule(child, parent, Fraction(freq), int(support)))
    return rules
