"""Earley-style chart parser for LTAG with conjoin.

Items walk elementary trees top-down, left to right.  For a node the dot
is in one of four positions: left-above (``P`` items, the node is
predicted), left-below and right-below (``A`` items, children being
recognized) and right-above (``D`` items, the node including any
adjunction is complete).

Coordination is recognized through *units*: a unit node has three
children, the left conjunct, the conjunction word and the right conjunct.
Conjuncts are elementary trees with a contraction set.  A contracted site
is recognized in exactly one conjunct (the one whose surface position it
takes) and is an empty span in the other; the single chart entry found
there becomes the shared argument of both hosts.
"""
from __future__ import annotations

import enum
from collections import defaultdict, deque
from dataclasses import dataclass, field

from .derivation import (
    CoordinationDerivation,
    TreeDerivation,
    build_graph,
    instantiate_schema,
    linearize,
    derive_dag,
)
from .errors import LTAGError, UnknownToken
from .grammar_core import (
    ROOT,
    ElementaryTree,
    NodeKind,
    admissible_contractions,
    build_contraction,
    find_root,
    gorn_dominates,
    realized_left,
    with_gapping,
)

LEFT, RIGHT = "left", "right"


class DotPosition(enum.Enum):
    LEFT_ABOVE = "la"
    LEFT_BELOW = "lb"
    RIGHT_BELOW = "rb"
    RIGHT_ABOVE = "ra"


@dataclass(frozen=True)
class DottedNode:
    address: tuple
    position: DotPosition


@dataclass(frozen=True)
class Signature:
    """What two conjuncts must agree on to be coordinated.

    ``left_realized`` is taken from the left conjunct and decides which
    contracted sites each side recognizes.
    """

    auxiliary: bool
    category: str
    coordinated: str
    contraction_set: tuple
    contracted_nodes: tuple
    copy_of: tuple | None
    left_realized: frozenset = frozenset()

    @property
    def compat(self):
        return (self.auxiliary, self.category, self.coordinated, self.contraction_set,
                self.contracted_nodes, self.copy_of)

    @property
    def admits_units(self) -> bool:
        """Completed coordinations may stand in as conjuncts."""
        return (not self.auxiliary and not self.contraction_set and self.category == self.coordinated)


def nested_signature(category: str) -> Signature:
    return Signature(False, category, category, (), (), None)


def conjunct_signature(e: ElementaryTree) -> Signature:
    t = e.template
    d = find_root(e)
    cset = e.contraction_set
    return Signature(
        auxiliary=t.is_auxiliary,
        category=t.root_category,
        coordinated=t.category(d),
        contraction_set=cset,
        contracted_nodes=tuple((t[a].label, t[a].kind.value) for a in cset),
        copy_of=(t.name, e.anchor_words) if e.anchor_contracted else None,
        left_realized=frozenset(a for a in cset if realized_left(e, a)),
    )


@dataclass(eq=False)
class Variant:
    """A tree as the parser walks it: a role plus erased and adjoinable nodes."""

    vid: int
    role: str  # "initial", "aux", LEFT, RIGHT or "unit"
    tree: ElementaryTree | None = None
    signature: Signature | None = None
    erased: frozenset = frozenset()
    adjoinable: frozenset = frozenset()
    kids: dict = field(default_factory=dict)

    @property
    def auxiliary(self) -> bool:
        if self.role == "unit":
            return self.signature.auxiliary
        return self.tree.is_auxiliary

    @property
    def category(self) -> str:
        if self.role == "unit":
            return self.signature.category
        return self.tree.template.root_category

    def label(self) -> str:
        if self.role == "unit":
            return f"Conj[{self.signature.coordinated}]"
        return self.tree.label()


def _tree_kids(v: Variant) -> dict:
    t = v.tree.template
    kids = {}
    for a in t.addresses():
        node = t[a]
        if node.kind is NodeKind.ANCHOR:
            if a not in v.erased:
                kids[a] = [(None, "word", v.tree.word_at(a))]
            continue
        if node.kind is not NodeKind.INTERNAL:
            continue
        out = []
        for c in t.children(a):
            cn = t[c]
            if c in v.erased:
                out.append((c, "erased", cn.label))
            elif cn.kind is NodeKind.INTERNAL or cn.kind is NodeKind.ANCHOR:
                out.append((c, "node", cn.label))
            elif cn.kind is NodeKind.SUBSTITUTION:
                out.append((c, "subst", cn.label))
            elif cn.kind is NodeKind.FOOT:
                out.append((c, "foot", cn.label))
            else:
                out.append((c, "terminal", cn.label))
        kids[a] = out
    return kids


class CompiledGrammar:
    """Grammar + lexicon expanded into the variants the chart works with."""

    def __init__(self, grammar, lexicon, gapping=False, conjoin=True, open_shared=False):
        self.grammar = grammar
        self.lexicon = lexicon
        self.gapping = gapping
        self.conjoin = conjoin
        self.open_shared = open_shared
        self.conj_words = frozenset(lexicon.conj_words) if conjoin else frozenset()
        self.vocabulary = lexicon.words() | grammar.terminals()
        self.variants = []
        self.roots_by_role = defaultdict(list)  # (role-ish, category) -> [vid]
        self.conjunct_roots = defaultdict(list)  # (signature, side) -> [vid]
        self.units_by_category = defaultdict(list)  # (auxiliary, category) -> [vid]
        self._build()

    def _add(self, v: Variant) -> Variant:
        v.vid = len(self.variants)
        if v.role != "unit":
            v.kids = _tree_kids(v)
        self.variants.append(v)
        return v

    def _build(self):
        trees = self.grammar_trees = self.lexicon.elementary_trees(self.grammar)
        for e in trees:
            t = e.template
            adj = frozenset(a for a in t.addresses() if t[a].kind in (NodeKind.INTERNAL, NodeKind.ANCHOR))
            v = self._add(Variant(0, "aux" if e.is_auxiliary else "initial", e, adjoinable=adj))
            self.roots_by_role[(v.auxiliary, v.category)].append(v.vid)
        if not self.conjoin:
            return
        conjuncts = []
        for base in trees:
            for cset in admissible_contractions(with_gapping(base, self.gapping)):
                e = base
                if any(base.template[a].kind is NodeKind.ANCHOR for a in cset):
                    e = with_gapping(base)
                try:
                    e = build_contraction(e, cset)
                    d = find_root(e)
                except LTAGError:
                    continue
                if e.is_auxiliary and e.template.foot not in e.contraction_set:
                    continue
                if not e.template.category(d):
                    continue  # coordinated node is an empty terminal; no schema exists for it
                conjuncts.append((e, d, conjunct_signature(e)))
        by_compat = defaultdict(list)
        for e, d, sig in conjuncts:
            by_compat[sig.compat].append((e, d, sig))
        left_sigs = []
        for e, d, sig in conjuncts:
            t = e.template
            adj = frozenset(a for a in t.addresses()
                            if t[a].kind in (NodeKind.INTERNAL, NodeKind.ANCHOR)
                            and a not in e.contraction_set and gorn_dominates(d, a))
            erased = frozenset(a for a in e.contraction_set if a not in sig.left_realized)
            v = self._add(Variant(0, LEFT, e, sig, erased, adj))
            self.conjunct_roots[(sig, LEFT)].append(v.vid)
            if sig not in left_sigs:
                left_sigs.append(sig)
        for sig in left_sigs:
            for e, d, own in by_compat[sig.compat]:
                t = e.template
                adj = frozenset(a for a in t.addresses()
                                if t[a].kind in (NodeKind.INTERNAL, NodeKind.ANCHOR)
                                and a not in e.contraction_set and gorn_dominates(d, a))
                erased = frozenset(a for a in e.contraction_set if a in sig.left_realized)
                v = self._add(Variant(0, RIGHT, e, sig, erased, adj))
                self.conjunct_roots[(sig, RIGHT)].append(v.vid)
        # two coordinations can themselves be coordinated
        for cat in sorted({s.category for s in left_sigs if not s.auxiliary}):
            if nested_signature(cat) not in left_sigs:
                left_sigs.append(nested_signature(cat))
        for sig in left_sigs:
            v = self._add(Variant(0, "unit", None, sig))
            self.units_by_category[(sig.auxiliary, sig.category)].append(v.vid)

    # predictions -------------------------------------------------------

    def initial_roots(self, category):
        return self.roots_by_role[(False, category)] + self.units_by_category[(False, category)]

    def aux_roots(self, category):
        return self.roots_by_role[(True, category)] + self.units_by_category[(True, category)]

    def conjunct_candidates(self, sig, side):
        out = list(self.conjunct_roots[(sig, side)])
        if sig.admits_units:
            out += self.units_by_category[(False, sig.category)]
        return out

    @staticmethod
    def unit_kids(v):
        return [(1, "conjunct", LEFT), (2, "conj", None), (3, "conjunct", RIGHT)]

    def kids(self, v: Variant, a):
        if v.role == "unit":
            return self.unit_kids(v) if a == ROOT else []
        return v.kids.get(a, [])

    def label(self, v: Variant, a) -> str:
        if v.role == "unit":
            return v.signature.coordinated
        return v.tree.template[a].label


def _merge(f, g):
    if f is None:
        return g
    if g is None:
        return f
    raise AssertionError("two feet below one node")


def _step(waiter, end, foot):
    """The waiting item with its dot moved over one completed child."""
    _, vid, a, k, i, _, f = waiter
    return ("A", vid, a, k + 1, i, end, _merge(f, foot))


@dataclass(frozen=True)
class ChartItem:
    """Readable view of a chart item."""

    tree: str
    dot: DottedNode
    span: tuple
    foot_span: tuple | None = None
    conj_state: tuple | None = None
    contraction_spans: dict = field(default_factory=dict, hash=False, compare=False)
    conjunct_spans: tuple | None = None


class _Index(dict):
    """Rule index of a chart.

    An index of an extended chart reads through to the chart it was built
    from and copies an entry the first time it is touched, so extending a
    chart costs only what the new token changes.
    """

    __slots__ = ("factory", "base")

    def __init__(self, factory, base=None):
        super().__init__()
        self.factory = factory
        self.base = base

    def __missing__(self, key):
        layer = self.base
        while layer is not None:
            if dict.__contains__(layer, key):
                value = dict.__getitem__(layer, key).copy()
                break
            layer = layer.base
        else:
            value = self.factory()
        self[key] = value
        return value


class Chart:
    """One parse: the item set, the agenda and the indexes of every rule."""

    def __init__(self, compiled: CompiledGrammar, tokens):
        self.g = compiled
        self.tokens = tuple(tokens)
        self.n = len(self.tokens)
        self.items = {}
        self.agenda = deque()
        self.pred_positions = _Index(set)    # (vid, a) -> {i}
        self.adj_preds = _Index(set)         # (cat, i) -> {(vid, a)}
        self.adj_preds_by_cat = _Index(set)  # cat -> {(vid, a, i)}
        self.waiting = _Index(list)          # (vid, a, j) -> [A key]
        self.done_from = _Index(list)        # (vid, a, i) -> [(j, f, key)]
        self.bottoms = _Index(list)          # (vid, a, i) -> [(j, f, key)]
        self.sub_waiting = _Index(list)      # (cat, j) -> [A key]
        self.init_done = _Index(list)        # (cat, i) -> [(j, key)]
        self.conj_waiting = _Index(list)     # (sig, side, j) -> [A key]
        self.conj_done = _Index(list)        # (sig, side, i) -> [(j, f, key)]
        self.foot_waiting = _Index(list)     # (cat, p) -> [A key]
        self.foot_points = _Index(set)       # cat -> {p}
        self.host_bottoms = _Index(list)     # (cat, p) -> [(q, key)]
        self.scan_waiting = _Index(list)     # j -> [(A key, tag, word)]
        self.aux_done = _Index(list)         # (cat, i) -> [(j, fl, fr, key)]

    # bookkeeping ----------------------------------------------------------

    def add(self, key, way):
        ways = self.items.get(key)
        if ways is None:
            self.items[key] = [way]
            self.agenda.append(key)
        elif way not in ways:
            ways.append(way)

    def variant(self, vid) -> Variant:
        return self.g.variants[vid]

    def close(self, start_vids):
        for vid in start_vids:
            self.add(("P", vid, ROOT, 0), ("axiom",))
        while self.agenda:
            key = self.agenda.popleft()
            kind = key[0]
            if kind == "P":
                self.predict(key)
            elif kind == "A":
                self.advance(key)
            else:
                self.complete(key)
        return self

    def _pending_scans(self):
        return self.scan_waiting[self.n]

    def next_tokens(self) -> set:
        """Tokens that some item can scan right after the current input."""
        out = set()
        for _, tag, label in self._pending_scans():
            out |= self.g.conj_words if tag == "conj" else {label}
        return out

    def extended(self, token) -> "Chart":
        """The chart for the current tokens plus ``token``, built from this one.

        An item ending at n never looks past token n, so only the scans
        pending at the old end are retried.  ``self`` is left unchanged.
        """
        _check_tokens(self.g, [token])
        new = Chart.__new__(Chart)
        for name, value in vars(self).items():
            if isinstance(value, _Index):
                value = _Index(value.factory, value)
            setattr(new, name, value)
        new.items = {k: list(v) for k, v in self.items.items()}
        new.agenda = deque()
        new.tokens = self.tokens + (token,)
        new.n = self.n + 1
        for key, tag, label in self._pending_scans():
            if tag == "conj" and token in self.g.conj_words or tag != "conj" and label == token:
                new.add(key[:3] + (key[3] + 1, key[4], key[5] + 1, key[6]), ("scan", key, self.n))
        return new.close(())

    # rules ----------------------------------------------------------------

    def predict(self, key):
        _, vid, a, i = key
        v = self.variant(vid)
        self.add(("A", vid, a, 0, i, i, None), ("pred",))
        self.pred_positions[(vid, a)].add(i)
        for j, f, bkey in list(self.bottoms[(vid, a, i)]):
            self.add(("D", vid, a, i, j, f), ("noadj", bkey))
        if v.role == "unit" or a not in v.adjoinable:
            return
        cat = self.g.label(v, a)
        self.adj_preds[(cat, i)].add((vid, a))
        self.adj_preds_by_cat[cat].add((vid, a, i))
        for rv in self.g.aux_roots(cat):
            self.add(("P", rv, ROOT, i), ("pred",))
        for j, fl, fr, akey in list(self.aux_done[(cat, i)]):
            for q, f, bkey in list(self.bottoms[(vid, a, fl)]):
                if q == fr:
                    self.add(("D", vid, a, i, j, f), ("adj", akey, bkey))
        for p in list(self.foot_points[cat]):
            if p >= i:
                self.add(("A", vid, a, 0, p, p, None), ("footpred",))

    def advance(self, key):
        _, vid, a, k, i, j, f = key
        v = self.variant(vid)
        kids = self.g.kids(v, a)
        if k == len(kids):
            self.bottom_complete(key)
            return
        c, tag, label = kids[k]
        nxt = lambda m, f2, way: self.add(("A", vid, a, k + 1, i, m, _merge(f, f2)), way)
        if tag == "node":
            self.waiting[(vid, c, j)].append(key)
            self.add(("P", vid, c, j), ("pred",))
            for m, f2, dkey in list(self.done_from[(vid, c, j)]):
                nxt(m, f2, ("adv", key, dkey))
        elif tag == "word" or tag == "terminal" and label:
            self.scan_waiting[j].append((key, tag, label))
            self.scan(key, label, nxt)
        elif tag == "terminal":
            nxt(j, None, ("skip", key))
        elif tag == "erased":
            nxt(j, None, ("skip", key))
        elif tag == "subst":
            if self.g.open_shared and v.role in (LEFT, RIGHT) and c in v.tree.contraction_set:
                nxt(j, None, ("skip", key))
            self.sub_waiting[(label, j)].append(key)
            for rv in self.g.initial_roots(label):
                self.add(("P", rv, ROOT, j), ("pred",))
            for m, dkey in list(self.init_done[(label, j)]):
                nxt(m, None, ("sub", key, dkey))
        elif tag == "foot":
            self.foot_waiting[(label, j)].append(key)
            if j not in self.foot_points[label]:
                self.foot_points[label].add(j)
                for hv, ha, hi in list(self.adj_preds_by_cat[label]):
                    if hi <= j:
                        self.add(("A", hv, ha, 0, j, j, None), ("footpred",))
            for q, bkey in list(self.host_bottoms[(label, j)]):
                nxt(q, (j, q), ("foot", key, bkey))
        elif tag == "conjunct":
            sig = v.signature
            self.conj_waiting[(sig, label, j)].append(key)
            for rv in self.g.conjunct_candidates(sig, label):
                self.add(("P", rv, ROOT, j), ("pred",))
            for m, f2, dkey in list(self.conj_done[(sig, label, j)]):
                nxt(m, f2, ("conj", key, dkey))
        elif tag == "conj":
            self.scan_waiting[j].append((key, tag, None))
            if j < self.n and self.tokens[j] in self.g.conj_words:
                nxt(j + 1, None, ("scan", key, j))
        else:  # pragma: no cover
            raise AssertionError(tag)

    def scan(self, key, word, nxt):
        j = key[5]
        if j < self.n and self.tokens[j] == word:
            nxt(j + 1, None, ("scan", key, j))

    def bottom_complete(self, key):
        _, vid, a, k, i, j, f = key
        v = self.variant(vid)
        self.bottoms[(vid, a, i)].append((j, f, key))
        if i in self.pred_positions[(vid, a)]:
            self.add(("D", vid, a, i, j, f), ("noadj", key))
        if v.role == "unit" or a not in v.adjoinable:
            return
        cat = self.g.label(v, a)
        for pi in list(self.pred_positions[(vid, a)]):
            for aj, fl, fr, akey in list(self.aux_done[(cat, pi)]):
                if (fl, fr) == (i, j):
                    self.add(("D", vid, a, pi, aj, f), ("adj", akey, key))
        self.host_bottoms[(cat, i)].append((j, key))
        for w in list(self.foot_waiting[(cat, i)]):
            self.add(_step(w, j, (i, j)), ("foot", w, key))

    def complete(self, key):
        _, vid, a, i, j, f = key
        v = self.variant(vid)
        if a != ROOT:
            self.done_from[(vid, a, i)].append((j, f, key))
            for w in list(self.waiting[(vid, a, i)]):
                self.add(_step(w, j, f), ("adv", w, key))
            return
        role = v.role
        if role in (LEFT, RIGHT):
            self._conjunct_done(v.signature, role, i, j, f, key)
            return
        cat = v.category
        if v.auxiliary:
            if f is None:
                return
            self.aux_done[(cat, i)].append((j, f[0], f[1], key))
            for hv, ha in list(self.adj_preds[(cat, i)]):
                for q, f2, bkey in list(self.bottoms[(hv, ha, f[0])]):
                    if q == f[1]:
                        self.add(("D", hv, ha, i, j, f2), ("adj", key, bkey))
            return
        self.init_done[(cat, i)].append((j, key))
        for w in list(self.sub_waiting[(cat, i)]):
            self.add(_step(w, j, None), ("sub", w, key))
        if role == "unit":
            sig = nested_signature(cat)
            for side in (LEFT, RIGHT):
                self._conjunct_done(sig, side, i, j, f, key)

    def _conjunct_done(self, sig, side, i, j, f, key):
        self.conj_done[(sig, side, i)].append((j, f, key))
        for w in list(self.conj_waiting[(sig, side, i)]):
            self.add(_step(w, j, f), ("conj", w, key))

    # results -----------------------------------------------------------------

    def accepting(self, start=None) -> list:
        out = []
        for key in self.items:
            if key[0] == "D" and key[2] == ROOT and key[3] == 0 and key[4] == self.n and key[5] is None:
                v = self.variant(key[1])
                if v.role in ("initial", "unit") and not v.auxiliary:
                    if start is None or v.category == start:
                        out.append(key)
        return sorted(out, key=lambda k: k[1])

    def view(self, key) -> ChartItem:
        kind, vid, a = key[0], key[1], key[2]
        v = self.variant(vid)
        if kind == "P":
            return ChartItem(v.label(), DottedNode(a, DotPosition.LEFT_ABOVE), (key[3], key[3]),
                             conj_state=self._conj_state(v))
        if kind == "A":
            k, i, j, f = key[3:]
            pos = DotPosition.RIGHT_BELOW if k == len(self.g.kids(v, a)) else DotPosition.LEFT_BELOW
            return ChartItem(v.label(), DottedNode(a, pos), (i, j), f, self._conj_state(v))
        i, j, f = key[3:]
        return ChartItem(v.label(), DottedNode(a, DotPosition.RIGHT_ABOVE), (i, j), f, self._conj_state(v))

    @staticmethod
    def _conj_state(v):
        if v.role in (LEFT, RIGHT):
            return (v.role, tuple(v.signature.contraction_set))
        return None


def compile_grammar(grammar, lexicon, gapping=False, conjoin=True, open_shared=False) -> CompiledGrammar:
    """Precompute the variants once to parse many sentences with one grammar.

    ``open_shared`` accepts coordinations whose shared arguments are left
    unfilled, i.e. fragments like a bare coordinated verb phrase.
    """
    return CompiledGrammar(grammar, lexicon, gapping=gapping, conjoin=conjoin, open_shared=open_shared)


def _start_roots(cg: CompiledGrammar):
    out = []
    for v in cg.variants:
        if v.role in ("initial", "unit") and not v.auxiliary:
            out.append(v.vid)
    return out


def _check_tokens(cg: CompiledGrammar, tokens):
    for t in tokens:
        if t not in cg.vocabulary and t not in cg.lexicon.conj_words:
            raise UnknownToken(f"unknown token {t!r}")


def chart_parse(grammar, lexicon, tokens, gapping=False, conjoin=True, compiled=None,
                open_shared=False) -> Chart:
    cg = compiled or compile_grammar(grammar, lexicon, gapping, conjoin, open_shared)
    tokens = list(tokens)
    _check_tokens(cg, tokens)
    return Chart(cg, tokens).close(_start_roots(cg))


def recognize(grammar, lexicon, tokens, gapping=False, conjoin=True, start=None, compiled=None,
              open_shared=False) -> bool:
    tokens = list(tokens)
    if not tokens:
        raise ValueError("cannot recognize an empty token sequence")
    chart = chart_parse(grammar, lexicon, tokens, gapping, conjoin, compiled, open_shared)
    return bool(chart.accepting(start))


# ---------------------------------------------------------------------
# forest unpacking


class _Unpacker:
    """Turns packed chart entries into derivation descriptions.

    Every list is truncated to ``limit`` entries; since alternatives are
    combined in lexicographic order, truncating the parts never changes the
    first ``limit`` combinations.
    """

    def __init__(self, chart: Chart, limit: int):
        self.chart = chart
        self.limit = limit
        self.memo = {}
        self.active = set()
        self.coordinations = []

    def _cap(self, xs):
        return xs[: self.limit]

    def root(self, key) -> list:
        """Derivations for a completed root: [(derivation, shared, spans)]."""
        if key in self.memo:
            return self.memo[key]
        if key in self.active:
            return []
        self.active.add(key)
        v = self.chart.variant(key[1])
        out = []
        if v.role == "unit":
            for parts in self.node(key):
                out.append(self._coordination(v, key, parts))
        else:
            for subs, adjs, shared, spans in self.node(key):
                tree = v.tree
                out.append((TreeDerivation(tree, tuple(sorted(subs)), tuple(sorted(adjs))),
                            tuple(sorted(shared)), spans))
                if len(out) >= self.limit:
                    break
        self.active.discard(key)
        self.memo[key] = out = self._cap(out)
        return out

    def _coordination(self, v, key, parts):
        ((lderiv, lshared, lspans), lkey), word, ((rderiv, rshared, rspans), rkey) = parts
        schema = instantiate_schema(v.signature.coordinated, word)
        shared = tuple(sorted(lshared + rshared))
        links = {}
        for side, spans in ((LEFT, lspans), (RIGHT, rspans)):
            for site, span in spans:
                links[site] = {LEFT: span, RIGHT: span, "realized": side}
        self.coordinations.append(ChartItem(
            v.label(), DottedNode(ROOT, DotPosition.RIGHT_ABOVE), (key[3], key[4]),
            conj_state=("done", v.signature.contraction_set),
            contraction_spans=links,
            conjunct_spans=((lkey[3], lkey[4]), (rkey[3], rkey[4])),
        ))
        return (CoordinationDerivation(schema, lderiv, rderiv, shared), (), ())

    def node(self, key) -> list:
        """Alternatives for a node-level item.

        Tree variants yield (subs, adjs, shared, spans) tuples; unit items
        yield (left, word, right, spans).
        """
        mkey = ("node",) + key
        if mkey in self.memo:
            return self.memo[mkey]
        if mkey in self.active:
            return []
        self.active.add(mkey)
        out = []
        v = self.chart.variant(key[1])
        for way in self.chart.items[key]:
            tag = way[0]
            if tag == "noadj":
                out += self.node(way[1])
            elif tag == "adj":
                addr = key[2]
                for aux, _, _ in self.root(way[1]):
                    for alt in self.node(way[2]):
                        subs, adjs, shared, spans = alt
                        out.append((subs, adjs + ((addr, aux),), shared, spans))
            elif tag in ("pred", "footpred", "axiom"):
                out.append(() if v.role == "unit" else ((), (), (), ()))
            elif tag in ("skip", "scan", "foot"):
                prev = self.node(way[1])
                if v.role == "unit" and tag == "scan":
                    word = self.chart.tokens[way[2]]
                    out += [alt + (word,) for alt in prev]
                else:
                    out += prev
            elif tag == "adv":
                for alt in self.node(way[1]):
                    for sub in self.node(way[2]):
                        out.append(tuple(x + y for x, y in zip(alt, sub)))
            elif tag == "sub":
                site = v.kids[key[2]][key[3] - 1][0]
                dkey = way[2]
                contracted = site in v.tree.contraction_set
                for alt in self.node(way[1]):
                    subs, adjs, shared, spans = alt
                    for d, _, _ in self.root(dkey):
                        if contracted:
                            out.append((subs, adjs, shared + ((site, d),),
                                        spans + ((site, (dkey[3], dkey[4])),)))
                        else:
                            out.append((subs + ((site, d),), adjs, shared, spans))
            elif tag == "conj":
                dkey = way[2]
                for alt in self.node(way[1]):
                    for r in self.root(dkey):
                        out.append(alt + ((r, dkey),))
            if len(out) >= self.limit:
                break
        self.active.discard(mkey)
        self.memo[mkey] = out = self._cap(out)
        return out


def unpack(chart: Chart, keys, limit: int) -> tuple[list, list]:
    """Derivation descriptions for accepting ``keys`` plus the coordination
    items met on the way."""
    u = _Unpacker(chart, limit)
    out = []
    for key in keys:
        for deriv, _, _ in u.root(key):
            out.append(deriv)
            if len(out) >= limit:
                return out, u.coordinations
    return out, u.coordinations


def check_contraction_spans(item: ChartItem) -> bool:
    """Whether a completed coordination shares each contracted argument soundly.

    Both hosts must point at one recognized span, that span must lie inside
    the conjunct that realizes it, and every contracted substitution site
    needs such an entry.
    """
    if item.conjunct_spans is None:
        return False
    (li, lj), (ri, rj) = item.conjunct_spans
    if not (li <= lj < ri <= rj and ri == lj + 1):
        return False
    for link in item.contraction_spans.values():
        left, right, side = link[LEFT], link[RIGHT], link["realized"]
        if left != right:
            return False
        lo, hi = (li, lj) if side == LEFT else (ri, rj)
        p, q = left
        if not (lo <= p <= q <= hi):
            return False
    return True


def parse(grammar, lexicon, tokens, max_results: int = 10, gapping=False, conjoin=True, start=None,
          compiled=None, open_shared=False) -> list:
    """Derivation graphs for ``tokens``, at most ``max_results``.

    Graphs come out in a fixed order: by chart entry, then by the order in
    which the packed alternatives were found.
    """
    tokens = list(tokens)
    if not tokens:
        raise ValueError("cannot parse an empty token sequence")
    chart = chart_parse(grammar, lexicon, tokens, gapping, conjoin, compiled, open_shared)
    derivs, coordinations = unpack(chart, chart.accepting(start), max_results * 4 + 4)
    for item in coordinations:
        if not check_contraction_spans(item):
            raise AssertionError(f"unsound sharing in {item}")
    graphs, seen = [], set()
    for d in derivs:
        g = build_graph(d)
        key = g.structure_key()
        if key in seen:
            continue
        if linearize(derive_dag(g, partial=open_shared)) != tokens:
            raise AssertionError(f"derivation does not yield the input: {d}")
        seen.add(key)
        graphs.append(g)
        if len(graphs) >= max_results:
            break
    return graphs
