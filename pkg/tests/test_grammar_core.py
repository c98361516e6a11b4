import itertools

import pytest

from helpers import grammar, tree
from ltag_coord.errors import (
    AnchorContractionDisallowed,
    AnchorMismatch,
    FootCountError,
    MalformedTree,
    MultipleFootDominated,
    NoAnchor,
    NotInSecondProjection,
)
from ltag_coord.grammar_core import (
    ROOT,
    ElementaryTree,
    GornAddress,
    Node,
    NodeKind,
    TreeTemplate,
    TreeType,
    admissible_contractions,
    build_contraction,
    find_root,
    frontier_span,
    gorn,
    gorn_dominates,
    lexicalize,
    lowest_common_dominator,
    realized_left,
    validate_template,
    with_gapping,
)

S, SUB, FOOT, ANC, TERM = (NodeKind.INTERNAL, NodeKind.SUBSTITUTION, NodeKind.FOOT, NodeKind.ANCHOR,
                           NodeKind.TERMINAL)


def test_gorn_parse_and_print():
    assert GornAddress.parse("ε") == ROOT
    assert GornAddress.parse("2.2") == (2, 2)
    assert str(gorn("2.1")) == "2.1"
    assert str(ROOT) == "ε"
    with pytest.raises(ValueError):
        GornAddress.parse("2.x")
    with pytest.raises(ValueError):
        GornAddress((0,))


def test_gorn_order_puts_prefixes_first():
    addrs = [gorn(a) for a in ["2.2", "1", "ε", "2", "2.1"]]
    assert [str(a) for a in sorted(addrs)] == ["ε", "1", "2", "2.1", "2.2"]


def test_child_parent_and_dominance():
    a = gorn("2").child(1)
    assert a == gorn("2.1") and a.parent == gorn("2")
    assert gorn_dominates("2", "2.1") and gorn_dominates("2.1", "2.1")
    assert not gorn_dominates("2.1", "2")
    with pytest.raises(ValueError):
        _ = ROOT.parent


def test_lowest_common_dominator():
    assert lowest_common_dominator([gorn("2.1"), gorn("2.2")]) == gorn("2")
    assert lowest_common_dominator([gorn("1"), gorn("2.2")]) == ROOT
    assert lowest_common_dominator([]) == ROOT


def test_transitive_template_shape():
    t = grammar()["a_tv"]
    assert t.root_category == "S"
    assert [str(a) for a in t.frontier] == ["1", "2.1", "2.2"]
    e = tree("cooked", "a_tv")
    assert [str(a) for a in e.second_projection] == ["1", "2.2"]
    assert e.label() == "α(cooked)"


def test_auxiliary_template_foot():
    t = grammar()["b_adj"]
    assert t.is_auxiliary and str(t.foot) == "2"
    assert tree("dried", "b_adj").label() == "β(dried)"


@pytest.mark.parametrize("spec, tree_type, error", [
    (("S", S, [("NP", SUB, [])]), TreeType.INITIAL, NoAnchor),
    (("VP", S, [("V", ANC, []), ("VP", FOOT, []), ("VP", FOOT, [])]), TreeType.AUXILIARY, FootCountError),
    (("VP", S, [("V", ANC, [])]), TreeType.AUXILIARY, FootCountError),
    (("S", S, [("V", ANC, []), ("S", FOOT, [])]), TreeType.INITIAL, FootCountError),
    (("S", S, [("V", ANC, []), ("NP", S, [])]), TreeType.INITIAL, MalformedTree),
])
def test_validate_template_rejects(spec, tree_type, error):
    with pytest.raises(error):
        validate_template(TreeTemplate.from_nested("t", tree_type, spec))


def test_validate_template_rejects_gaps():
    t = TreeTemplate("t", ((ROOT, Node("S", S)), (gorn("2"), Node("V", ANC))), TreeType.INITIAL)
    with pytest.raises(MalformedTree):
        validate_template(t)


def test_lexicalize_requires_every_anchor():
    t = grammar()["a_tv"]
    with pytest.raises(AnchorMismatch):
        lexicalize(t, {})
    with pytest.raises(AnchorMismatch):
        lexicalize(t, {"2.1": "ate", "1": "John"})


def test_build_contraction_checks_sites():
    e = tree("cooked", "a_tv")
    assert build_contraction(e, ["2.2"]).contraction_set == (gorn("2.2"),)
    with pytest.raises(NotInSecondProjection):
        build_contraction(e, ["2"])
    with pytest.raises(AnchorContractionDisallowed):
        build_contraction(e, ["2.1"])
    assert build_contraction(with_gapping(e), ["2.1"]).anchor_contracted


def test_substitution_set_excludes_contracted_and_feet():
    assert [str(a) for a in tree("cooked", "a_tv", ["1"]).substitution_set] == ["2.2"]
    assert [str(a) for a in tree("thinks", "b_thinks").substitution_set] == ["1"]


def test_find_root_examples():
    assert find_root(tree("cooked", "a_tv", ["2.2"])) == ROOT
    assert find_root(tree("cooked", "a_tv", ["1", "2.2"])) == gorn("2.1")
    assert find_root(tree("eats", "a_tv", ["1"])) == gorn("2")
    assert find_root(tree("ate", "a_tv", ["2.1"], gapping=True)) == ROOT
    assert find_root(tree("laughed", "a_wh_iv", ["1"])) == gorn("2")


def test_find_root_foot_domination():
    with pytest.raises(MultipleFootDominated):
        find_root(tree("thinks", "b_thinks"))
    assert find_root(tree("thinks", "b_thinks", ["2.2"])) == ROOT


def test_realized_left_follows_anchor_position():
    e = tree("eats", "a_tv", ["1"])
    assert realized_left(e, "1")
    assert not realized_left(tree("steals", "a_tv", ["2.2"]), "2.2")
    # once the verb is shared, every shared site surfaces with the left copy
    assert realized_left(tree("loves", "a_tv", ["2.1", "2.2"], gapping=True), "2.2")


def test_admissible_contractions_cover_power_set():
    e = tree("gave", "a_dtv")
    sets = list(admissible_contractions(e))
    assert len(sets) == 8 and () in sets
    assert len(list(admissible_contractions(with_gapping(e)))) == 16
    for s in sets:
        build_contraction(e, s)


def _brute_find_root(e):
    t = e.template
    keep = [a for a in t.frontier
            if (t[a].kind is SUB and a not in e.contraction_set)
            or (t[a].kind is ANC and a not in e.contraction_set)
            or t[a].kind is TERM]
    if not keep:
        return ROOT
    covering = [a for a in t.addresses() if all(gorn_dominates(a, k) for k in keep)]
    return max(covering, key=len)


def _small_templates():
    """Every initial template of depth <= 2 over a fixed leaf alphabet."""
    leaves = [("NP", SUB), ("V", ANC), ("w", TERM)]
    for n in (1, 2, 3):
        for kinds in itertools.product(leaves, repeat=n):
            for split in range(n + 1):
                inner = [(l, k, []) for l, k in kinds[:split]]
                outer = [(l, k, []) for l, k in kinds[split:]]
                children = ([("VP", S, inner)] if inner else []) + outer
                t = TreeTemplate.from_nested("t", TreeType.INITIAL, ("S", S, children))
                if t.anchors:
                    yield t


def test_find_root_matches_brute_force_on_small_shapes():
    checked = 0
    for t in _small_templates():
        e = ElementaryTree(t, tuple((a, "v") for a in t.anchors), gapping_mode=True)
        for cset in admissible_contractions(e):
            c = build_contraction(e, cset)
            assert find_root(c) == _brute_find_root(c), (t, cset)
            checked += 1
    assert checked > 100


def test_frontier_span_is_contiguous():
    t = grammar()["a_dtv"]
    assert frontier_span(t, "2") == (1, 2, 3)
    assert frontier_span(t, ROOT) == (0, 1, 2, 3)
