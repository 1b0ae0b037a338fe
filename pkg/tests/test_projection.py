import random

import pytest
from hypothesis import given

from divkit import Alignment, EdgeClass, Token, build_tree, classify_edge, project_pos, project_tree
from divkit.errors import ProjectionDegenerateError
from divkit.projection import UNKNOWN_POS, project_pair

from randgen import bijective_pair, pairs, random_pair


def tree(rows):
    toks = [Token(i, f, p) for i, (f, p, _) in enumerate(rows, start=1)]
    return build_tree(toks, {i: h for i, (_, _, h) in enumerate(rows, start=1)})


def ftoks(n):
    return [Token(i, f"f{i}", "?") for i in range(1, n + 1)]


def attached_acyclic(proj):
    heads = proj.head_map()
    roots = [i for i, h in heads.items() if h == 0]
    assert len(roots) <= 1
    for i, h in heads.items():
        seen = {i}
        while h not in (None, 0):
            assert h not in seen
            seen.add(h)
            h = heads[h]


def test_pos_follows_permutation():
    e = tree([("a", "DT", 2), ("b", "NN", 3), ("c", "VB", 0)])
    a = Alignment.of([(1, 3), (2, 1), (3, 2)])
    assert project_pos(e, a, ftoks(3)) == ["VB", "DT", "NN"]


def test_pos_uses_leftmost_target():
    e = tree([("a", "DT", 3), ("b", "JJ", 3), ("c", "NN", 5), ("d", "RB", 5), ("e", "VB", 0)])
    a = Alignment.of([(1, 5), (1, 3)])
    assert project_pos(e, a, ftoks(2)) == ["NN", UNKNOWN_POS]


def test_isomorphic_projection_reproduces_gold():
    rows = [("a", "NN", 2), ("b", "VB", 0), ("c", "NN", 2)]
    e = tree(rows)
    f = tree(rows)
    proj = project_tree(e, Alignment.of([(1, 1), (2, 2), (3, 3)]), f.tokens)
    assert proj.head_map() == f.head_map()
    assert proj.tokens == f.tokens


def test_unaligned_head_skipped_transitively():
    # e1 <- e2 <- e3, e2 has no counterpart
    e = tree([("e1", "NN", 2), ("e2", "IN", 3), ("e3", "VB", 0)])
    proj = project_tree(e, Alignment.of([(1, 1), (2, 3)]), ftoks(2))
    assert proj.head(1) == 2
    assert proj.head(2) == 0


def test_unaligned_source_word_left_unattached():
    e = tree([("x", "NN", 0)])
    proj = project_tree(e, Alignment.of([(2, 1)]), ftoks(3))
    assert proj.heads == (None, 0, None)
    assert proj.attached == {2}
    assert proj.edges() == []


def test_root_falls_back_to_leftmost_aligned_word():
    e = tree([("a", "NN", 2), ("b", "VB", 0)])
    proj = project_tree(e, Alignment.of([(2, 1)]), ftoks(3))
    assert proj.head_map() == {1: None, 2: 0, 3: None}


def test_nothing_aligned_is_degenerate():
    e = tree([("a", "NN", 0)])
    with pytest.raises(ProjectionDegenerateError):
        project_tree(e, Alignment.of([]), ftoks(2))


def test_postposition_projects_reversed():
    # gold source: the postposition depends on the noun
    gold = tree([("Gara", "NN", 0), ("meM", "IN", 1)])
    e = tree([("in", "IN", 0), ("house", "NN", 1)])
    a = Alignment.of([(1, 2), (2, 1)])
    proj = project_tree(e, a, gold.tokens)
    assert proj.edges() == [(1, 2)]
    assert [t.pos for t in proj.tokens] == ["NN", "IN"]
    ident = Alignment.of([(1, 1), (2, 2)])
    assert classify_edge(1, 2, gold, ident) is EdgeClass.SWAP


def test_image_of_self_is_skipped():
    # f1 aligns to both e1 and its head e2, so e2 must not become f1's head
    e = tree([("a", "NN", 2), ("b", "VB", 3), ("c", "VB", 0)])
    proj = project_tree(e, Alignment.of([(1, 1), (1, 2), (2, 3)]), ftoks(2))
    assert proj.head(1) == 2


@given(pairs())
def test_attached_part_is_acyclic(p):
    try:
        proj = project_pair(p)
    except ProjectionDegenerateError:
        return
    attached_acyclic(proj)
    assert proj.attached == {f for f in p.source.indices if p.alignment.targets(f)}


def test_bijective_alignment_maps_edges_exactly():
    rng = random.Random(99)
    for k in range(300):
        p = bijective_pair(rng, f"b{k}")
        inv = {e: f for f, e in p.alignment.links}
        expected = {(inv[c], inv[h]) for c, h in p.target.edges()}
        proj = project_pair(p)
        assert set(proj.edges()) == expected
        assert proj.head(inv[p.target.root]) == 0


def test_projection_is_deterministic():
    rng = random.Random(4)
    for k in range(100):
        p = random_pair(rng, "x")
        try:
            assert project_pair(p) == project_pair(p)
        except ProjectionDegenerateError:
            pass
