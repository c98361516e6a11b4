"""Shared test utilities: cached grammars, oracle runs and prefix search."""
import json
from functools import lru_cache
from pathlib import Path

from ltag_coord import fixture_grammar, fixture_lexicon, gorn, lexicalize, with_gapping, build_contraction
from ltag_coord.grammar_io import import_derivation
from ltag_coord.oracle import oracle_yields
from ltag_coord.parser import chart_parse, compile_grammar

GOLDEN = Path(__file__).parent / "golden"


@lru_cache(maxsize=None)
def grammar():
    return fixture_grammar()


@lru_cache(maxsize=None)
def lexicon(name="fixture.lex"):
    return fixture_lexicon(name, grammar())


@lru_cache(maxsize=None)
def compiled(name="fixture.lex", gapping=False, conjoin=True, open_shared=False):
    return compile_grammar(grammar(), lexicon(name), gapping=gapping, conjoin=conjoin, open_shared=open_shared)


@lru_cache(maxsize=None)
def yields(name, bound, gapping=False, conjoin=True, max_length=None):
    return frozenset(oracle_yields(grammar(), lexicon(name), bound, gapping=gapping, conjoin=conjoin,
                                   max_length=max_length))


def tree(word, template, contracted=(), gapping=False):
    t = grammar()[template]
    e = lexicalize(t, {t.anchors[0]: word})
    if gapping:
        e = with_gapping(e)
    return build_contraction(e, [gorn(a) for a in contracted])


def golden(name):
    return import_derivation((GOLDEN / f"{name}.json").read_text(encoding="utf-8"))


def golden_sentence(name):
    return json.loads((GOLDEN / f"{name}.json").read_text(encoding="utf-8"))["yield"]


def accepted_by_prefix_search(cg, vocabulary, max_len):
    """All accepted sequences up to ``max_len``, pruning dead prefixes.

    Items ending at position n depend only on the first n tokens, so each
    chart is extended from its prefix's chart.  A token no item can scan
    leaves nothing ending at the new position, and such a prefix cannot be
    extended to an accepted sentence.
    """
    accepted, visited = set(), 0
    stack = [((), chart_parse(cg.grammar, cg.lexicon, (), compiled=cg))]
    while stack:
        prefix, chart = stack.pop()
        if chart.accepting():
            accepted.add(prefix)
        if len(prefix) == max_len:
            continue
        live = chart.next_tokens()
        visited += len(vocabulary)
        stack.extend((prefix + (w,), chart.extended(w)) for w in vocabulary if w in live)
    return accepted, visited
