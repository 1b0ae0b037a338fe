import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from divkit import (
    Alignment,
    Token,
    apply_swap_rules,
    build_tree,
    collect_swap_stats,
    evaluate_attachment,
    learn_swap_rules,
    project_tree,
)
from divkit.errors import EmptySplitError, ProjectionDegenerateError, TokenMismatchError
from divkit.projection import ProjectedTree, project_pair
from divkit.rules import (
    EvalResult,
    SwapRule,
    holdout_experiment,
    micro_average,
    read_rules,
    rules_table,
    split_corpus,
)

from randgen import pairs, random_corpus

# swap frequency and dependency count per projected pattern
CANDIDATES = [
    SwapRule("NN", "IN", Fraction(1), 33),
    SwapRule("NNP", "IN", Fraction(1), 12),
    SwapRule("JJ", "VBD", Fraction(1), 1),
    SwapRule("VBZ", "VBG", Fraction(3, 5), 5),
    SwapRule("VBG", "VBZ", Fraction(2, 7), 7),
    SwapRule("VBG", "NN", Fraction(1, 20), 20),
]


def patterns(rules):
    return {r.pattern for r in rules}


def test_threshold_without_support_floor():
    assert patterns(learn_swap_rules(CANDIDATES, 0.8, 0)) == {("NN", "IN"), ("NNP", "IN"), ("JJ", "VBD")}


def test_support_floor_drops_singletons():
    assert patterns(learn_swap_rules(CANDIDATES, 0.8, 3)) == {("NN", "IN"), ("NNP", "IN")}


def test_bounds_are_inclusive():
    assert patterns(learn_swap_rules(CANDIDATES, 0.6, 5)) == {("NN", "IN"), ("NNP", "IN"), ("VBZ", "VBG")}
    assert learn_swap_rules(CANDIDATES, Fraction(3, 5), 6) == learn_swap_rules(CANDIDATES, 0.6, 6)


def test_rules_sorted_by_support():
    assert [r.support for r in learn_swap_rules(CANDIDATES, 0, 0)] == [33, 20, 12, 7, 5, 1]


def test_empty_candidates():
    assert learn_swap_rules([], 0.8, 3) == []


@given(st.fractions(0, 1), st.fractions(0, 1), st.integers(0, 40), st.integers(0, 40))
def test_raising_knobs_never_adds_rules(t1, t2, s1, s2):
    lo_t, hi_t = sorted((t1, t2))
    lo_s, hi_s = sorted((s1, s2))
    assert patterns(learn_swap_rules(CANDIDATES, hi_t, hi_s)) <= patterns(learn_swap_rules(CANDIDATES, lo_t, lo_s))


def test_rule_invariants():
    with pytest.raises(ValueError):
        SwapRule("A", "B", Fraction(3, 2), 1)
    with pytest.raises(ValueError):
        SwapRule("A", "B", Fraction(1, 2), 0)


def proj(pos, heads):
    toks = tuple(Token(i, f"w{i}", p) for i, p in enumerate(pos, start=1))
    return ProjectedTree(toks, tuple(heads))


def test_stacked_swaps_bottom_up():
    # chain 1 <- 2 <- 3 <- 4 tagged NN IN NN IN
    p = proj(["NN", "IN", "NN", "IN"], [2, 3, 4, 0])
    out = apply_swap_rules(p, [SwapRule("NN", "IN", Fraction(1), 3)])
    # visit 1: swap (1,2) -> 1 under 3, 2 under 1; visit 2: edge already seen
    # visit 3: swap (3,4) -> 3 root, 4 under 3; visit 4: edge already seen
    assert out.head_map() == {1: 3, 2: 1, 3: 0, 4: 3}
    assert apply_swap_rules(p, [SwapRule("NN", "IN", Fraction(1), 3)]) == out


def test_no_matching_rule_is_identity():
    p = proj(["NN", "IN"], [2, 0])
    assert apply_swap_rules(p, []) == p
    assert apply_swap_rules(p, [SwapRule("VB", "NN", Fraction(1), 9)]) == p


def test_unknown_tag_never_matched():
    p = proj(["UNK", "IN"], [2, 0])
    assert apply_swap_rules(p, [SwapRule("UNK", "IN", Fraction(1), 9)]) == p


def test_swap_rule_turns_projection_into_gold():
    gold = build_tree([Token(1, "Gara", "NN"), Token(2, "meM", "PSP")], {1: 0, 2: 1})
    e = build_tree([Token(1, "in", "IN"), Token(2, "house", "NN")], {1: 0, 2: 1})
    p = project_tree(e, Alignment.of([(1, 2), (2, 1)]), gold.tokens)
    fixed = apply_swap_rules(p, [SwapRule("NN", "IN", Fraction(1), 5)])
    assert set(fixed.edges()) == set(gold.edges())


@given(pairs())
def test_rules_keep_attached_part_acyclic(p):
    try:
        pr = project_pair(p)
    except ProjectionDegenerateError:
        return
    tags = sorted({t.pos for t in pr.tokens})
    rules = [SwapRule(a, b, Fraction(1), 1) for a in tags for b in tags]
    out = apply_swap_rules(pr, rules)
    heads = out.head_map()
    assert out.attached == pr.attached
    assert sum(h == 0 for h in heads.values()) <= 1
    for i in heads:
        seen, h = {i}, heads[i]
        while h not in (None, 0):
            assert h not in seen
            seen.add(h)
            h = heads[h]


def gold5():
    return build_tree([Token(i, f"w{i}", "X") for i in range(1, 6)], {1: 2, 2: 3, 3: 4, 4: 5, 5: 0})


def test_evaluation_arithmetic():
    pred = ProjectedTree(gold5().tokens, (2, 3, 5, None, 0))
    r = evaluate_attachment(pred, gold5())
    assert (r.predicted, r.gold, r.correct) == (3, 4, 2)
    assert (round(float(r.precision), 2), round(float(r.recall), 2), round(float(r.f1), 2)) == (66.67, 50.0, 57.14)


def test_perfect_and_empty_predictions():
    g = gold5()
    full = evaluate_attachment(ProjectedTree(g.tokens, g.heads), g)
    assert full.precision == full.recall == full.f1 == 100
    empty = evaluate_attachment(ProjectedTree(g.tokens, (None,) * 5), g)
    assert (empty.precision, empty.recall, empty.f1) == (0, 0, 0)


def test_token_mismatch():
    with pytest.raises(TokenMismatchError):
        evaluate_attachment(ProjectedTree(gold5().tokens[:4], (2, 3, 4, 0)), gold5())


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_f1_between_precision_and_recall(a, b, c):
    correct = min(a, b, c)
    r = EvalResult(a, b, correct)
    if r.f1:
        assert min(r.precision, r.recall) <= r.f1 <= max(r.precision, r.recall)


def test_full_attachment_gives_equal_precision_and_recall():
    rng = random.Random(1)
    g = gold5()
    for _ in range(50):
        heads = list(g.heads)
        rng.shuffle(heads)
        # any head map attaching all five words with one root
        r = evaluate_attachment(ProjectedTree(g.tokens, tuple(heads)), g)
        assert r.precision == r.recall


def test_micro_average_sums_counts():
    total = micro_average([EvalResult(2, 2, 2), EvalResult(6, 6, 0)])
    assert (total.predicted, total.correct) == (8, 2)
    assert total.precision == 25


def fixture_b_oracle(test_ids):
    # instance i has k = 1 + i % 3 verbs; projection gets every verb edge
    # right and the noun/postposition edge reversed
    ks = [1 + int(i[1:]) % 3 for i in test_ids]
    return sum(ks), sum(k + 1 for k in ks)


def test_fixture_b_candidates(fixture_b):
    cands = collect_swap_stats(fixture_b.corpus)
    assert {(r.pattern, r.frequency) for r in cands} == {(("NN", "IN"), 1), (("VB", "NN"), 0)}
    assert {r.pattern: r.support for r in cands} == {("NN", "IN"): 50, ("VB", "NN"): sum(1 + i % 3 for i in range(50))}


def test_fixture_b_holdout(fixture_b):
    rep = holdout_experiment(fixture_b.corpus, 0.8, 0.8, 3, 42)
    order = list(range(50))
    random.Random(42).shuffle(order)
    assert rep.test_ids == tuple(f"b{i:02d}" for i in sorted(order[40:]))
    assert patterns(rep.rules) == {("NN", "IN")}
    right, edges = fixture_b_oracle(rep.test_ids)
    assert (rep.baseline.predicted, rep.baseline.gold, rep.baseline.correct) == (edges, edges, right)
    assert (rep.corrected.predicted, rep.corrected.gold, rep.corrected.correct) == (edges, edges, edges)
    assert rep.corrected.f1 > rep.baseline.f1


def test_unreachable_threshold_changes_nothing(fixture_b):
    rep = holdout_experiment(fixture_b.corpus, 0.8, 1.01, 3, 42)
    assert rep.rules == ()
    assert rep.corrected == rep.baseline


def test_split_is_seeded_and_validated():
    c = random_corpus(random.Random(0), 10)
    a = split_corpus(c, 0.8, 7)
    assert a == split_corpus(c, 0.8, 7)
    assert [len(x) for x in a] == [8, 2]
    with pytest.raises(EmptySplitError):
        split_corpus(random_corpus(random.Random(0), 1), 0.5, 1)
    with pytest.raises(ValueError):
        split_corpus(c, 1.0, 1)


def test_rules_file_round_trip(tmp_path):
    path = tmp_path / "rules.tsv"
    rules = learn_swap_rules(CANDIDATES, 0.5, 0)
    path.write_text(rules_table(rules).to_tsv(), encoding="utf-8")
    back = read_rules(path)
    assert [(r.pattern, r.support) for r in back] == [(r.pattern, r.support) for r in rules]
