"""Build "Chapman eats cookies and drinks beer" operation by operation.

The subject is contracted in both verb trees, so conjoining them leaves one
open link; filling it attaches a single noun-phrase tree under both verbs.
"""
from ltag_coord import export_derivation, fixture_grammar, gorn
from ltag_coord.derivation import (
    DerivationGraph,
    conjoin,
    derive_dag,
    instantiate_schema,
    linearize,
    shared_fill,
    substitute,
)
from ltag_coord.grammar_core import build_contraction, find_root, lexicalize

grammar = fixture_grammar()


def tree(word, template, contracted=()):
    t = grammar[template]
    return build_contraction(lexicalize(t, {t.anchors[0]: word}), [gorn(a) for a in contracted])


eats, drinks = tree("eats", "a_tv", ["1"]), tree("drinks", "a_tv", ["1"])
print("coordinated node:", find_root(eats), "category", grammar["a_tv"].category(find_root(eats)))

g = conjoin(DerivationGraph(), instantiate_schema("VP", "and"), eats, drinks)
schema = g.latest
left, right = g.conjuncts(schema)
g = substitute(g, left, "2.2", tree("cookies", "a_np"))
g = substitute(g, right, "2.2", tree("beer", "a_np"))
print("partial yield:", " ".join(linearize(derive_dag(g, partial=True))))

(link,) = g.links_of(schema)
g = shared_fill(g, link, tree("Chapman", "a_np"))
print("full yield:   ", " ".join(linearize(derive_dag(g))))
print("parents of the shared subject:", g.in_degree(g.latest))
print()
print(export_derivation(g, "dot"))
