"""Brute-force enumeration of derivations by operation count.

This generator deliberately shares nothing with the chart parser except the
derivation engine: it proposes derivation descriptions top-down, lets the
graph operations accept or reject them, and reads yields off the derived
structure.  It is the reference the parser is tested against.
"""
from __future__ import annotations

from functools import lru_cache

from .derivation import (
    CoordinationDerivation,
    DerivationGraph,
    TreeDerivation,
    adjoinable_sites,
    build_graph,
    conjoin,
    derive_dag,
    instantiate_schema,
    linearize,
)
from .errors import LTAGError
from .grammar_core import NodeKind, admissible_contractions, build_contraction, find_root, with_gapping


class Enumerator:
    def __init__(self, grammar, lexicon, gapping=False, conjoin=True):
        self.trees = lexicon.elementary_trees(grammar)
        self.conj_words = sorted(lexicon.conj_words) if conjoin else []
        self.gapping = gapping
        self.conjuncts = self._conjuncts() if conjoin else []
        self.pairs = self._pairs()
        self.categories = sorted({e.template.root_category for e in self.trees})
        self.exact = lru_cache(maxsize=None)(self._exact)
        self.tree_exact = lru_cache(maxsize=None)(self._tree_exact)
        self.units_exact = lru_cache(maxsize=None)(self._units_exact)

    def _conjuncts(self):
        out = []
        for base in self.trees:
            for cset in admissible_contractions(with_gapping(base, self.gapping)):
                e = base
                if any(base.template[a].kind is NodeKind.ANCHOR for a in cset):
                    e = with_gapping(base)
                try:
                    e = build_contraction(e, cset)
                    find_root(e)
                except LTAGError:
                    continue
                out.append(e)
        return out

    def _pairs(self):
        """Tree pairs the engine lets conjoin, with per-side adjunction sites."""
        pairs = []
        for left in self.conjuncts:
            cat = left.template.category(find_root(left))
            try:
                schema = instantiate_schema(cat, "_")
            except ValueError:
                continue
            for right in self.conjuncts:
                try:
                    g = conjoin(DerivationGraph(), schema, left, right)
                except LTAGError:
                    continue
                lid, rid = g.conjuncts(g.latest)
                pairs.append((left, right, cat, tuple(adjoinable_sites(g, lid)),
                              tuple(adjoinable_sites(g, rid))))
        return pairs

    # slots are (address, category, auxiliary, optional)

    def _tree_slots(self, e, adjoinable=None):
        t = e.template
        slots = [(a, t[a].label, False, False) for a in e.substitution_set]
        if adjoinable is None:
            adjoinable = [a for a in t.addresses() if t[a].kind in (NodeKind.INTERNAL, NodeKind.ANCHOR)]
        slots += [(a, t[a].label, True, True) for a in adjoinable]
        return tuple(slots)

    def fill(self, slots, total):
        if not slots:
            if total == 0:
                yield ()
            return
        (addr, cat, aux, optional), rest = slots[0], slots[1:]
        if optional:
            for tail in self.fill(rest, total):
                yield tail
        for k in range(1, total + 1):
            for d in self.exact(cat, aux, k - 1):
                for tail in self.fill(rest, total - k):
                    yield ((addr, aux, d),) + tail

    def _tree_exact(self, e, total, adjoinable=None):
        out = []
        for filled in self.fill(self._tree_slots(e, adjoinable), total):
            subs = tuple((a, d) for a, aux, d in filled if not aux)
            adjs = tuple((a, d) for a, aux, d in filled if aux)
            out.append(TreeDerivation(e, subs, adjs))
        return tuple(out)

    def _units_exact(self, cat, aux, total):
        """Coordinations of root category ``cat`` costing exactly ``total``."""
        if total < 1 or not self.conj_words:
            return ()
        out = []
        budget = total - 1
        for left, right, x, ladj, radj in self.pairs:
            if left.template.root_category != cat or left.is_auxiliary != aux:
                continue
            shared = tuple((a, left.template[a].label, False, False) for a in left.contraction_set
                           if left.template[a].kind is NodeKind.SUBSTITUTION)
            for lk in range(budget + 1):
                for ld in self.tree_exact(left, lk, ladj):
                    for rk in range(budget - lk + 1):
                        for rd in self.tree_exact(right, rk, radj):
                            for filled in self.fill(shared, budget - lk - rk):
                                fillers = tuple((a, d) for a, _, d in filled)
                                for w in self.conj_words:
                                    out.append(CoordinationDerivation(
                                        instantiate_schema(x, w), ld, rd, fillers))
        if not aux:
            out += self._nested_units(cat, budget)
        return tuple(out)

    def _nested_units(self, cat, budget):
        """Coordinations where at least one conjunct is itself a coordination."""
        out = []
        plain = [e for e in self.conjuncts
                 if not e.contraction_set and not e.is_auxiliary and e.template.root_category == cat
                 and e.template.category(find_root(e)) == cat]

        def sides(k):
            for e in plain:
                yield from ((d, False) for d in self.tree_exact(e, k))
            yield from ((d, True) for d in self.units_exact(cat, False, k))

        for lk in range(budget + 1):
            for ld, lnested in sides(lk):
                for rd, rnested in sides(budget - lk):
                    if not (lnested or rnested):
                        continue
                    for w in self.conj_words:
                        out.append(CoordinationDerivation(instantiate_schema(cat, w), ld, rd, ()))
        return out

    def _exact(self, cat, aux, total):
        out = []
        for e in self.trees:
            if e.template.root_category == cat and e.is_auxiliary == aux:
                out += self.tree_exact(e, total)
        out += self.units_exact(cat, aux, total)
        return tuple(out)


def _min_tokens(d) -> int:
    """Lower bound on the yield length: one word per conjunction and per
    tree that keeps its anchor."""
    if isinstance(d, TreeDerivation):
        n = 0 if d.tree.anchor_contracted else 1
        parts = d.substitutions + d.adjunctions
    else:
        n = 1
        parts = ((None, d.left), (None, d.right)) + d.shared
    return n + sum(_min_tokens(x) for _, x in parts)


def oracle_enumerate(grammar, lexicon, max_operations: int, gapping=False, conjoin=True, start=None,
                     max_length: int | None = None):
    """Every complete derivation with at most ``max_operations`` operations.

    Returns ``(tokens, graph)`` pairs ordered by operation count.  Candidates
    the engine refuses are dropped, as are yields longer than ``max_length``.
    """
    en = Enumerator(grammar, lexicon, gapping=gapping, conjoin=conjoin)
    cats = [start] if start is not None else en.categories
    out = []
    for k in range(max_operations + 1):
        for cat in cats:
            for d in en.exact(cat, False, k):
                if max_length is not None and _min_tokens(d) > max_length:
                    continue
                try:
                    g = build_graph(d)
                except LTAGError:
                    continue
                tokens = tuple(linearize(derive_dag(g)))
                if max_length is None or len(tokens) <= max_length:
                    out.append((tokens, g))
    return out


def oracle_yields(grammar, lexicon, max_operations: int, gapping=False, conjoin=True, start=None,
                  max_length: int | None = None) -> set:
    return {toks for toks, _ in oracle_enumerate(grammar, lexicon, max_operations, gapping, conjoin, start,
                                                 max_length)}
