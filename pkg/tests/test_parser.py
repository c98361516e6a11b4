import pytest

from helpers import compiled, grammar, lexicon, yields
from ltag_coord.derivation import validate
from ltag_coord.errors import UnknownToken
from ltag_coord.grammar_core import ROOT, gorn
from ltag_coord.oracle import oracle_enumerate, oracle_yields
from ltag_coord.parser import (
    ChartItem,
    DotPosition,
    DottedNode,
    chart_parse,
    check_contraction_spans,
    parse,
    recognize,
    unpack,
)


def _recognize(sentence, **kw):
    return recognize(grammar(), lexicon(), sentence.split(), compiled=compiled(**kw))


@pytest.mark.parametrize("sentence, gapping, expected", [
    ("John cooked dried beans", False, True),
    ("Chapman eats cookies and drinks beer", False, True),
    ("Keats steals and Chapman eats apples", False, True),
    ("John ate bananas and Bill strawberries", True, True),
    ("John ate bananas and Bill strawberries", False, False),
    ("Who laughed and seemed to be happy ?", False, True),
    ("cookies eats Chapman", False, True),
    ("eats Chapman cookies", False, False),
    ("John cooked", False, False),
    ("and John cooked beans", False, False),
])
def test_recognize(sentence, gapping, expected):
    assert _recognize(sentence, gapping=gapping) is expected


def test_recognize_input_errors():
    with pytest.raises(UnknownToken):
        _recognize("John cooked quinoa")
    with pytest.raises(ValueError):
        recognize(grammar(), lexicon(), [])
    with pytest.raises(ValueError):
        parse(grammar(), lexicon(), [])


def test_recognize_with_start_category():
    tokens = "Who laughed ?".split()
    assert recognize(grammar(), lexicon(), tokens, start="Q", compiled=compiled())
    assert not recognize(grammar(), lexicon(), tokens, start="S", compiled=compiled())


def test_parse_returns_valid_graphs_in_fixed_order():
    tokens = "John loves Mary and Bill too".split()
    first = parse(grammar(), lexicon(), tokens, compiled=compiled(gapping=True))
    second = parse(grammar(), lexicon(), tokens, compiled=compiled(gapping=True))
    assert len(first) >= 2
    assert [g.structure_key() for g in first] == [g.structure_key() for g in second]
    for g in first:
        validate(g)
    assert len(parse(grammar(), lexicon(), tokens, max_results=1, compiled=compiled(gapping=True))) == 1


def test_parse_without_coordination_is_unique():
    (g,) = parse(grammar(), lexicon(), "John cooked dried beans".split(), compiled=compiled())
    assert sorted(n.payload.label() for n in g.nodes) == ["α(John)", "α(beans)", "α(cooked)", "β(dried)"]


def _views(chart):
    return [chart.view(k) for k in chart.items]


def test_prediction_at_subject_site_introduces_noun_trees():
    chart = chart_parse(grammar(), lexicon(), "John cooked beans".split(), compiled=compiled(conjoin=False))
    predicted = {v.tree for v in _views(chart)
                 if v.dot == DottedNode(ROOT, DotPosition.LEFT_ABOVE) and v.span == (0, 0)}
    assert {"α(John)", "α(beans)", "α(cooked)"} <= predicted


def test_scanning_the_verb():
    chart = chart_parse(grammar(), lexicon(), "John cooked beans".split(), compiled=compiled(conjoin=False))
    scanned = [v for v in _views(chart) if v.tree == "α(cooked)" and v.dot.address == gorn("2.1")
               and v.dot.position is DotPosition.RIGHT_BELOW]
    assert [v.span for v in scanned] == [(1, 2)]


def test_adjunction_wraps_the_noun():
    chart = chart_parse(grammar(), lexicon(), "John cooked dried beans".split(),
                        compiled=compiled(conjoin=False))
    views = _views(chart)
    aux = [v for v in views if v.tree == "β(dried)" and v.dot == DottedNode(ROOT, DotPosition.RIGHT_ABOVE)]
    assert [(v.span, v.foot_span) for v in aux] == [((2, 4), (3, 4))]
    host = [v for v in views if v.tree == "α(beans)" and v.dot == DottedNode(gorn("1"), DotPosition.RIGHT_ABOVE)]
    assert (2, 4) in {v.span for v in host}


def test_unequal_contraction_sets_never_conjoin():
    cg = compiled()
    rights = [v for v in cg.variants if v.role == "right"]
    assert rights
    assert all(v.tree.contraction_set == v.signature.contraction_set for v in rights)
    chart = chart_parse(grammar(), lexicon(), "Keats steals and Chapman eats apples".split(), compiled=cg)
    done = [k for k in chart.items if k[0] == "D" and k[2] == ROOT and cg.variants[k[1]].role == "unit"]
    whole = {cg.variants[k[1]].signature.contraction_set for k in done if (k[3], k[4]) == (0, 6)}
    assert whole == {(gorn("2.2"),)}


@pytest.mark.parametrize("sentence", [
    "Chapman eats cookies and drinks beer",
    "Keats steals and Chapman eats apples",
])
def test_contraction_spans_of_coordination_items(sentence):
    tokens = sentence.split()
    chart = chart_parse(grammar(), lexicon(), tokens, compiled=compiled())
    _, items = unpack(chart, chart.accepting(), 10)
    assert items and all(check_contraction_spans(i) for i in items)
    forged = ChartItem(items[0].tree, items[0].dot, items[0].span, conj_state=items[0].conj_state,
                       contraction_spans={a: {"left": (0, 1), "right": (4, 5), "realized": "left"}
                                          for a in items[0].contraction_spans},
                       conjunct_spans=items[0].conjunct_spans)
    assert not check_contraction_spans(forged)


def test_extended_chart_matches_fresh_parse():
    cg = compiled("cover.lex")
    tokens = "John loves John and thinks a dried John laughed".split()
    chart = chart_parse(grammar(), lexicon("cover.lex"), (), compiled=cg)
    assert "John" in chart.next_tokens() and "and" not in chart.next_tokens()
    for n, w in enumerate(tokens, start=1):
        chart = chart.extended(w)
        fresh = chart_parse(grammar(), lexicon("cover.lex"), tokens[:n], compiled=cg)
        assert chart.items == fresh.items
    with pytest.raises(UnknownToken):
        chart.extended("quinoa")


def test_oracle_enumeration_small_bounds():
    assert oracle_enumerate(grammar(), lexicon("mini.lex"), 0, start="S") == []
    found = oracle_yields(grammar(), lexicon(), 3, start="S", conjoin=False)
    assert tuple("John cooked dried beans".split()) in found
    assert all(len(y) <= 4 for y in found)


@pytest.mark.parametrize("gapping", [False, True])
def test_accepts_every_short_oracle_yield(gapping):
    lex = "cover.lex"
    reference = yields(lex, 4, gapping=gapping, max_length=5)
    cg = compiled(lex, gapping=gapping)
    for y in reference:
        assert recognize(grammar(), lexicon(lex), y, compiled=cg), y
