"""Derivation graphs: substitution, adjunction, conjoin and shared fills.

Graphs are immutable; every operation returns a new graph.  Node ids are
allocated sequentially and the id of the node an operation created is
available as ``graph.latest``.
"""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Union

from .errors import (
    CategoryMismatch,
    ContractionMismatch,
    CyclicDerivation,
    IncompleteDerivation,
    LinkAlreadyFilled,
    MultipleFootDominated,
    NotAdjoinable,
    NotSubstitutionSite,
    SiteOccupied,
    UnknownNode,
)
from .grammar_core import (
    ROOT,
    ElementaryTree,
    GornAddress,
    NodeKind,
    find_root,
    gorn,
    gorn_dominates,
    realized_left,
)


class Op(enum.Enum):
    SUBSTITUTION = "substitution"
    ADJUNCTION = "adjunction"
    CONJOIN_LEFT = "conjoin-left"
    CONJOIN_RIGHT = "conjoin-right"
    SHARED_SUBSTITUTION = "shared-substitution"
    SHARED_ADJUNCTION = "shared-adjunction"


@dataclass(frozen=True)
class SchemaInstantiation:
    """The X -> X Conj X coordination tree, anchored by ``conj_word``."""

    category: str
    conj_word: str

    def label(self) -> str:
        return f"Conj({self.conj_word})[{self.category}]"

    def __str__(self):
        return self.label()


def instantiate_schema(category: str, conj_word: str) -> SchemaInstantiation:
    if not category:
        raise ValueError("schema category must be nonempty")
    return SchemaInstantiation(category, conj_word)


Payload = Union[ElementaryTree, SchemaInstantiation]


@dataclass(frozen=True)
class DerivationNode:
    id: int
    payload: Payload

    @property
    def is_schema(self) -> bool:
        return isinstance(self.payload, SchemaInstantiation)


@dataclass(frozen=True)
class DerivationEdge:
    parent: int
    child: int
    site: GornAddress
    op: Op

    def sort_key(self):
        return (self.parent, self.child, self.site, self.op.value)


@dataclass(frozen=True)
class ContractionLink:
    """Pairing of one contracted address in the two conjuncts of ``schema``.

    Anchor links are realized in the left conjunct as soon as they exist;
    foot links are filled by adjoining the coordination (``child`` is then
    the host node); all other links by :func:`shared_fill`.
    """

    schema: int
    left: tuple
    right: tuple
    child: int | None = None
    anchor: bool = False
    foot: bool = False

    @property
    def address(self) -> GornAddress:
        return self.left[1]

    @property
    def key(self) -> tuple:
        return (self.schema, self.address)

    @property
    def is_open(self) -> bool:
        return not self.anchor and self.child is None

    @property
    def status(self) -> str:
        if self.anchor:
            return "realized-left"
        return "open" if self.child is None else "filled"


@dataclass(frozen=True, eq=False)
class DerivationGraph:
    nodes: tuple = ()
    edges: tuple = ()
    contractions: tuple = ()
    latest: int | None = None

    def __eq__(self, other):
        if not isinstance(other, DerivationGraph):
            return NotImplemented
        return (set(self.nodes) == set(other.nodes) and set(self.edges) == set(other.edges)
                and set(self.contractions) == set(other.contractions))

    def __hash__(self):
        return hash((frozenset(self.nodes), frozenset(self.edges), frozenset(self.contractions)))

    # lookups ----------------------------------------------------------

    @cached_property
    def _by_id(self) -> dict:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _out(self) -> dict:
        out = defaultdict(list)
        for e in self.edges:
            out[e.parent].append(e)
        return out

    @cached_property
    def _in(self) -> dict:
        out = defaultdict(list)
        for e in self.edges:
            out[e.child].append(e)
        return out

    def node(self, nid: int) -> DerivationNode:
        try:
            return self._by_id[nid]
        except KeyError:
            raise UnknownNode(f"no node {nid}") from None

    def payload(self, nid: int) -> Payload:
        return self.node(nid).payload

    def has_node(self, nid: int) -> bool:
        return nid in self._by_id

    def out_edges(self, nid: int) -> list:
        return list(self._out.get(nid, ()))

    def in_edges(self, nid: int) -> list:
        return list(self._in.get(nid, ()))

    def in_degree(self, nid: int) -> int:
        return len(self.in_edges(nid))

    def link(self, key) -> ContractionLink:
        if isinstance(key, ContractionLink):
            key = key.key
        schema, address = key
        address = gorn(address)
        for ln in self.contractions:
            if ln.schema == schema and ln.address == address:
                return ln
        raise UnknownNode(f"no contraction link {schema}@{address}")

    def links_of(self, schema: int) -> list:
        return [ln for ln in self.contractions if ln.schema == schema]

    def roots(self) -> list:
        targets = {e.child for e in self.edges}
        return [n.id for n in self.nodes if n.id not in targets]

    def conjuncts(self, schema: int) -> tuple:
        left = right = None
        for e in self.out_edges(schema):
            if e.op is Op.CONJOIN_LEFT:
                left = e.child
            elif e.op is Op.CONJOIN_RIGHT:
                right = e.child
        return left, right

    def is_conjunct(self, nid: int) -> bool:
        return any(e.op in (Op.CONJOIN_LEFT, Op.CONJOIN_RIGHT) for e in self.in_edges(nid))

    def descendants(self, nid: int) -> set:
        seen, stack = set(), [nid]
        while stack:
            cur = stack.pop()
            for e in self.out_edges(cur):
                if e.child not in seen:
                    seen.add(e.child)
                    stack.append(e.child)
        return seen

    def topological_order(self) -> list:
        """Kahn's algorithm, ties broken by node id."""
        import heapq

        indeg = {n.id: 0 for n in self.nodes}
        for e in self.edges:
            indeg[e.child] += 1
        heap = [nid for nid, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            nid = heapq.heappop(heap)
            order.append(nid)
            for e in self.out_edges(nid):
                indeg[e.child] -= 1
                if indeg[e.child] == 0:
                    heapq.heappush(heap, e.child)
        if len(order) != len(self.nodes):
            raise CyclicDerivation("derivation graph contains a cycle")
        return order

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
        except CyclicDerivation:
            return False
        return True

    # derived properties of nodes -------------------------------------

    def category(self, nid: int) -> str:
        """Category a node exports to its attachment site."""
        p = self.payload(nid)
        if isinstance(p, SchemaInstantiation):
            return self.category(self.conjuncts(nid)[0])
        return p.template.root_category

    def is_auxiliary(self, nid: int) -> bool:
        p = self.payload(nid)
        if isinstance(p, SchemaInstantiation):
            return self.is_auxiliary(self.conjuncts(nid)[0])
        return p.is_auxiliary

    def coordination_point(self, nid: int) -> GornAddress:
        p = self.payload(nid)
        if isinstance(p, SchemaInstantiation):
            return ROOT
        return find_root(p)

    def coordination_category(self, nid: int) -> str:
        p = self.payload(nid)
        if isinstance(p, SchemaInstantiation):
            return self.category(nid)
        return p.template.category(find_root(p))

    def contraction_set(self, nid: int) -> tuple:
        p = self.payload(nid)
        return () if isinstance(p, SchemaInstantiation) else p.contraction_set

    # canonical form ---------------------------------------------------

    def structure_key(self):
        """Id-independent nested description, usable for equality/dedup."""
        roots = self.roots()

        def node_key(nid):
            p = self.payload(nid)
            if isinstance(p, SchemaInstantiation):
                head = ("schema", p.category, p.conj_word,
                        tuple((str(ln.address), ln.status) for ln in self.links_of(nid)))
            else:
                head = ("tree", p.name, p.words, tuple(str(a) for a in p.contraction_set))
            kids = tuple(sorted((e.op.value, str(e.site), node_key(e.child)) for e in self.out_edges(nid)))
            return head + (kids,)

        return tuple(sorted(node_key(r) for r in roots))

    def summary(self) -> dict:
        """Node multiset, edge sites and link count, as compared by golden tests."""
        from collections import Counter

        def label(nid):
            p = self.payload(nid)
            return p.label()

        return {
            "nodes": Counter(label(n.id) for n in self.nodes),
            "edges": Counter((label(e.parent), label(e.child), str(e.site), e.op.value) for e in self.edges),
            "links": len(self.contractions),
        }


# ---------------------------------------------------------------------
# building blocks


def add_node(g: DerivationGraph, payload: Payload) -> DerivationGraph:
    nid = max((n.id for n in g.nodes), default=-1) + 1
    return replace(g, nodes=g.nodes + (DerivationNode(nid, payload),), latest=nid)


def _attachable(g: DerivationGraph, child) -> tuple:
    """Return (graph, node id) for a child that is a tree or an unattached node id."""
    if isinstance(child, (ElementaryTree, SchemaInstantiation)):
        g = add_node(g, child)
        return g, g.latest
    if not g.has_node(child):
        raise UnknownNode(f"no node {child}")
    if g.in_degree(child):
        raise SiteOccupied(f"node {child} is already attached")
    return g, child


def _tree_payload(g, nid, what) -> ElementaryTree:
    p = g.payload(nid)
    if not isinstance(p, ElementaryTree):
        raise NotAdjoinable(f"cannot {what} into coordination node {nid}")
    return p


def _check_no_cycle(g, parent, child):
    if parent == child or parent in g.descendants(child):
        raise CyclicDerivation(f"attaching {child} under {parent} would create a cycle")


def _occupied(g, parent, site) -> bool:
    return any(e.site == site and e.op in (Op.SUBSTITUTION, Op.ADJUNCTION, Op.SHARED_ADJUNCTION)
               for e in g.out_edges(parent))


def substitute(g: DerivationGraph, parent: int, site, child) -> DerivationGraph:
    site = gorn(site)
    host = _tree_payload(g, parent, "substitute")
    t = host.template
    if site not in t or t[site].kind is not NodeKind.SUBSTITUTION:
        raise NotSubstitutionSite(f"{host.label()} has no substitution site at {site}")
    if site in host.contraction_set:
        raise NotSubstitutionSite(f"{host.label()}: {site} is contracted; use shared_fill")
    if _occupied(g, parent, site):
        raise SiteOccupied(f"{host.label()}: site {site} already filled")
    if isinstance(child, ElementaryTree) and child.is_auxiliary:
        raise NotSubstitutionSite(f"cannot substitute auxiliary {child.label()}")
    g, cid = _attachable(g, child)
    if g.is_auxiliary(cid):
        raise NotSubstitutionSite(f"cannot substitute auxiliary structure {cid}")
    if g.category(cid) != t.category(site):
        raise CategoryMismatch(f"{g.category(cid)} cannot substitute at {t.category(site)} site {site}")
    _check_no_cycle(g, parent, cid)
    edge = DerivationEdge(parent, cid, site, Op.SUBSTITUTION)
    return replace(g, edges=g.edges + (edge,), latest=cid)


def adjoinable_sites(g: DerivationGraph, nid: int) -> list:
    """Addresses of ``nid`` that may host an adjunction."""
    p = g.payload(nid)
    if isinstance(p, SchemaInstantiation):
        return []
    t = p.template
    sites = [a for a in t.addresses() if t[a].kind in (NodeKind.INTERNAL, NodeKind.ANCHOR)]
    sites = [a for a in sites if a not in p.contraction_set]
    if g.is_conjunct(nid):
        d = find_root(p)
        sites = [a for a in sites if gorn_dominates(d, a)]
    return sites


def _adjoinable(p: ElementaryTree, site, conjunct: bool) -> bool:
    t = p.template
    if site not in t or t[site].kind not in (NodeKind.INTERNAL, NodeKind.ANCHOR):
        return False
    if site in p.contraction_set:
        return False
    return not conjunct or gorn_dominates(find_root(p), site)


def adjoin(g: DerivationGraph, parent: int, site, child) -> DerivationGraph:
    site = gorn(site)
    host = _tree_payload(g, parent, "adjoin")
    if not _adjoinable(host, site, g.is_conjunct(parent)):
        raise NotAdjoinable(f"{host.label()}: no adjunction at {site}")
    if isinstance(child, ElementaryTree) and not child.is_auxiliary:
        raise NotAdjoinable(f"cannot adjoin initial tree {child.label()}")
    if _occupied(g, parent, site):
        raise SiteOccupied(f"{host.label()}: {site} already hosts an adjunction")
    g, cid = _attachable(g, child)
    if not g.is_auxiliary(cid):
        raise NotAdjoinable(f"node {cid} is not an auxiliary structure")
    if g.category(cid) != host.template.category(site):
        raise CategoryMismatch(
            f"{g.category(cid)} auxiliary cannot adjoin at {host.template.category(site)} node {site}")
    _check_no_cycle(g, parent, cid)
    if g.node(cid).is_schema:
        # the host's excised subtree is what both contracted feet share
        links = tuple(replace(ln, child=parent) if ln.schema == cid and ln.foot else ln
                      for ln in g.contractions)
        edge = DerivationEdge(parent, cid, site, Op.SHARED_ADJUNCTION)
        return replace(g, edges=g.edges + (edge,), contractions=links, latest=cid)
    edge = DerivationEdge(parent, cid, site, Op.ADJUNCTION)
    return replace(g, edges=g.edges + (edge,), latest=cid)


def _check_conjunct_adjunctions(g, nid):
    p = g.payload(nid)
    if isinstance(p, SchemaInstantiation):
        return
    d = find_root(p)
    for e in g.out_edges(nid):
        if e.op in (Op.ADJUNCTION, Op.SHARED_ADJUNCTION) and not gorn_dominates(d, e.site):
            raise NotAdjoinable(f"{p.label()}: adjunction at {e.site} lies above coordination point {d}")


def conjoin(g: DerivationGraph, schema: SchemaInstantiation, left, right) -> DerivationGraph:
    """Coordinate two conjuncts under an instantiation of the schema.

    ``left``/``right`` are elementary trees (added as new nodes) or ids of
    unattached nodes: trees that already carry substitutions, or completed
    coordinations, which take part with an empty contraction set.
    """
    g, lid = _attachable(g, left)
    g, rid = _attachable(g, right)
    if lid == rid:
        raise ContractionMismatch("a conjunct cannot be coordinated with itself")
    lset, rset = g.contraction_set(lid), g.contraction_set(rid)
    if set(lset) != set(rset):
        raise ContractionMismatch(
            f"contraction sets differ: {[str(a) for a in lset]} vs {[str(a) for a in rset]}")
    dl, dr = g.coordination_point(lid), g.coordination_point(rid)
    if g.is_auxiliary(lid) != g.is_auxiliary(rid):
        raise CategoryMismatch("cannot coordinate an auxiliary with an initial structure")
    for nid in (lid, rid):
        p = g.payload(nid)
        if isinstance(p, ElementaryTree) and p.is_auxiliary and p.template.foot not in p.contraction_set:
            raise MultipleFootDominated(
                f"{p.label()}: uncontracted foot would give the coordination two feet")
    cl, cr = g.coordination_category(lid), g.coordination_category(rid)
    if not (cl == cr == schema.category):
        raise CategoryMismatch(f"coordinated categories {cl}/{cr} do not match schema {schema.category}")
    if g.category(lid) != g.category(rid):
        raise CategoryMismatch(f"root categories {g.category(lid)}/{g.category(rid)} differ")
    lp, rp = g.payload(lid), g.payload(rid)
    if lset:
        for a in lset:
            nl, nr = lp.template[a], rp.template[a]
            if (nl.label, nl.kind) != (nr.label, nr.kind):
                raise CategoryMismatch(f"contracted nodes at {a} differ: {nl} vs {nr}")
        if lp.anchor_contracted and (lp.template != rp.template or lp.anchor_words != rp.anchor_words):
            raise ContractionMismatch("anchor contraction needs two copies of the same elementary tree")
    for nid in (lid, rid):
        _check_conjunct_adjunctions(g, nid)
    g = add_node(g, schema)
    sid = g.latest
    edges = (DerivationEdge(sid, lid, dl, Op.CONJOIN_LEFT), DerivationEdge(sid, rid, dr, Op.CONJOIN_RIGHT))
    links = []
    for a in lset:
        kind = lp.template[a].kind
        links.append(ContractionLink(sid, (lid, a), (rid, a),
                                     anchor=kind is NodeKind.ANCHOR, foot=kind is NodeKind.FOOT))
    return replace(g, edges=g.edges + edges, contractions=g.contractions + tuple(links), latest=sid)


def shared_fill(g: DerivationGraph, link, child) -> DerivationGraph:
    ln = g.link(link)
    if not ln.is_open:
        raise LinkAlreadyFilled(f"link {ln.schema}@{ln.address} is {ln.status}")
    if ln.foot:
        raise NotSubstitutionSite("foot links are filled by adjoining the coordination")
    if isinstance(child, ElementaryTree) and child.is_auxiliary:
        raise NotSubstitutionSite(f"cannot substitute auxiliary {child.label()}")
    g, cid = _attachable(g, child)
    if g.is_auxiliary(cid):
        raise NotSubstitutionSite(f"cannot substitute auxiliary structure {cid}")
    (lid, a), (rid, _) = ln.left, ln.right
    for host in (lid, rid):
        cat = g.payload(host).template.category(a)
        if g.category(cid) != cat:
            raise CategoryMismatch(f"{g.category(cid)} cannot fill contracted {cat} site {a}")
        _check_no_cycle(g, host, cid)
    edges = (DerivationEdge(lid, cid, a, Op.SHARED_SUBSTITUTION),
             DerivationEdge(rid, cid, a, Op.SHARED_SUBSTITUTION))
    links = tuple(replace(x, child=cid) if x.key == ln.key else x for x in g.contractions)
    return replace(g, edges=g.edges + edges, contractions=links, latest=cid)


# ---------------------------------------------------------------------
# validation


def open_sites(g: DerivationGraph) -> list:
    """Unfilled obligations: (node id, address) for sites, ('link', key) for links."""
    out = []
    for n in g.nodes:
        if isinstance(n.payload, ElementaryTree):
            filled = {e.site for e in g.out_edges(n.id) if e.op is Op.SUBSTITUTION}
            out += [(n.id, a) for a in n.payload.substitution_set if a not in filled]
    out += [("link", ln.key) for ln in g.contractions if ln.is_open]
    return out


def check_complete(g: DerivationGraph) -> int:
    """Raise IncompleteDerivation unless ``g`` is a finished derivation; return its root."""
    if not g.nodes:
        raise IncompleteDerivation("empty derivation")
    pending = open_sites(g)
    if pending:
        raise IncompleteDerivation(f"open sites or links: {pending}")
    roots = g.roots()
    if len(roots) != 1:
        raise IncompleteDerivation(f"derivation has {len(roots)} roots")
    if g.is_auxiliary(roots[0]):
        raise IncompleteDerivation("root is an auxiliary structure that was never adjoined")
    return roots[0]


def validate(g: DerivationGraph) -> None:
    """Structural invariants that hold for every graph built by this module."""
    ids = [n.id for n in g.nodes]
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate node ids")
    g.topological_order()
    for e in g.edges:
        if e.parent not in ids or e.child not in ids:
            raise UnknownNode(f"edge {e} references a missing node")
    for n in g.nodes:
        ins = g.in_edges(n.id)
        shared = [e for e in ins if e.op is Op.SHARED_SUBSTITUTION]
        if shared and (len(ins) != 2 or len(shared) != 2):
            raise ValueError(f"shared node {n.id} must have in-degree exactly 2")
        if not shared and len(ins) > 1:
            raise ValueError(f"node {n.id} has in-degree {len(ins)}")
        if n.is_schema:
            left, right = g.conjuncts(n.id)
            if left is None or right is None:
                raise ValueError(f"schema node {n.id} lacks a conjunct")
    for ln in g.contractions:
        if ln.left[1] != ln.right[1]:
            raise ValueError("contraction link addresses differ")
        if ln.child is not None and not ln.foot:
            for host in (ln.left[0], ln.right[0]):
                if DerivationEdge(host, ln.child, ln.address, Op.SHARED_SUBSTITUTION) not in g.edges:
                    raise ValueError(f"filled link {ln.key} lacks a shared edge from {host}")


# ---------------------------------------------------------------------
# derivation descriptions


@dataclass(frozen=True)
class TreeDerivation:
    """An elementary tree with the derivations attached at its sites."""

    tree: ElementaryTree
    substitutions: tuple = ()
    adjunctions: tuple = ()

    def cost(self) -> int:
        return sum(1 + d.cost() for _, d in self.substitutions + self.adjunctions)


@dataclass(frozen=True)
class CoordinationDerivation:
    """conjoin(schema, left, right) followed by one fill per shared site."""

    schema: SchemaInstantiation
    left: object
    right: object
    shared: tuple = ()

    def cost(self) -> int:
        return 1 + self.left.cost() + self.right.cost() + sum(1 + d.cost() for _, d in self.shared)


def build_graph(deriv) -> DerivationGraph:
    """Replay a derivation description through the graph operations."""

    def attach(g, d):
        if isinstance(d, TreeDerivation):
            g = add_node(g, d.tree)
            nid = g.latest
            for site, sub in d.substitutions:
                g, cid = attach(g, sub)
                g = substitute(g, nid, site, cid)
            for site, aux in d.adjunctions:
                g, cid = attach(g, aux)
                g = adjoin(g, nid, site, cid)
            return g, nid
        g, lid = attach(g, d.left)
        g, rid = attach(g, d.right)
        g = conjoin(g, d.schema, lid, rid)
        sid = g.latest
        for site, filler in d.shared:
            g, cid = attach(g, filler)
            g = shared_fill(g, (sid, site), cid)
        return g, sid

    g, root = attach(DerivationGraph(), deriv)
    return replace(g, latest=root)


# ---------------------------------------------------------------------
# derived structures


@dataclass
class DagNode:
    id: int
    label: str
    kind: str  # "node", "word", "coord", "slot"


@dataclass
class DerivedDAG:
    """Derived phrase structure; contracted material has two parents.

    ``children[n]`` is an ordered list of ``(child, realized)`` pairs.  Of
    the two edges into a shared node exactly one is realized; linearization
    follows realized edges only.
    """

    root: int
    nodes: dict
    children: dict

    def parents(self, nid: int) -> list:
        return [p for p, kids in self.children.items() for c, _ in kids if c == nid]

    def in_degree(self, nid: int) -> int:
        return len(self.parents(nid))

    def shared_nodes(self) -> list:
        return sorted(n for n in self.nodes if self.in_degree(n) > 1)

    def validate(self) -> None:
        seen, order = set(), []

        def visit(n, stack):
            if n in stack:
                raise CyclicDerivation("derived structure contains a cycle")
            if n in seen:
                return
            seen.add(n)
            for c, _ in self.children.get(n, []):
                visit(c, stack | {n})

        visit(self.root, frozenset())
        if seen != set(self.nodes):
            raise ValueError("derived structure is not connected")
        for n in self.nodes:
            edges = [(p, r) for p, kids in self.children.items() for c, r in kids if c == n]
            if edges and sum(r for _, r in edges) != 1:
                raise ValueError(f"node {n} must be realized exactly once")


class _DagBuilder:
    def __init__(self, g: DerivationGraph):
        self.g = g
        self.nodes = {}
        self.children = {}

    def new(self, label, kind):
        nid = len(self.nodes)
        self.nodes[nid] = DagNode(nid, label, kind)
        self.children[nid] = []
        return nid

    def swap(self, old, new):
        """Point every edge that targets ``old`` at ``new`` (flags kept)."""
        for p, kids in self.children.items():
            for i, (c, r) in enumerate(kids):
                if c == old:
                    kids[i] = (new, r)

    def set_flag(self, target, realized):
        for p, kids in self.children.items():
            for i, (c, r) in enumerate(kids):
                if c == target:
                    kids[i] = (c, realized)

    def build(self, nid, shared=None):
        """Return (top, feet, anchor_leaves) for derivation node ``nid``.

        ``shared`` maps contracted addresses to (dag node, realized here).
        """
        p = self.g.payload(nid)
        if isinstance(p, SchemaInstantiation):
            return self._build_coordination(nid, p)
        shared = shared or {}
        t = p.template
        words = dict(p.anchor_words)
        at = {}
        anchor_leaves = {}
        feet = []
        for a in t.addresses():
            node = t[a]
            if node.kind is NodeKind.TERMINAL:
                at[a] = self.new(node.label, "word")
            elif node.kind in (NodeKind.SUBSTITUTION, NodeKind.FOOT):
                at[a] = self.new(node.label, "slot")
                if node.kind is NodeKind.FOOT:
                    feet.append(at[a])
            else:
                at[a] = self.new(node.label, "node")
            if a:
                self.children[at[a.parent]].append((at[a], True))
            if node.kind is NodeKind.ANCHOR:
                if a in shared:
                    leaf, realized = shared[a]
                    self.children[at[a]].append((leaf, realized))
                else:
                    leaf = self.new(words[a], "word")
                    self.children[at[a]].append((leaf, True))
                anchor_leaves[a] = leaf
        top = at[ROOT]
        for a, (filler, realized) in shared.items():
            if t[a].kind is NodeKind.SUBSTITUTION:
                self.swap(at[a], filler)
                self.set_flag_on(at[a.parent], filler, realized)
        for e in sorted(self.g.out_edges(nid), key=lambda e: e.site):
            if e.op is Op.SUBSTITUTION:
                sub_top, _, _ = self.build(e.child)
                self.swap(at[e.site], sub_top)
        for e in sorted(self.g.out_edges(nid), key=lambda e: e.site):
            if e.op in (Op.ADJUNCTION, Op.SHARED_ADJUNCTION):
                aux_top, aux_feet, _ = self.build(e.child)
                host = at[e.site]
                if host == top:
                    top = aux_top
                else:
                    self.swap(host, aux_top)
                for f in aux_feet:
                    self.swap(f, host)
        return top, feet, anchor_leaves

    def set_flag_on(self, parent, child, realized):
        kids = self.children[parent]
        for i, (c, r) in enumerate(kids):
            if c == child:
                kids[i] = (c, realized)

    def _build_coordination(self, sid, schema):
        g = self.g
        lid, rid = g.conjuncts(sid)
        links = g.links_of(sid)
        lp = g.payload(lid)
        left_shared, right_shared = {}, {}
        for ln in links:
            if ln.anchor or ln.foot or ln.child is None:
                continue
            filler, _, _ = self.build(ln.child)
            goes_left = realized_left(lp, ln.address)
            left_shared[ln.address] = (filler, goes_left)
            right_shared[ln.address] = (filler, not goes_left)
        ltop, lfeet, lanchors = self.build(lid, left_shared)
        for ln in links:
            if ln.anchor:
                right_shared[ln.address] = (lanchors[ln.address], False)
        rtop, rfeet, _ = self.build(rid, right_shared)
        feet = []
        foot_links = [ln for ln in links if ln.foot]
        if foot_links:
            goes_left = realized_left(lp, foot_links[0].address)
            for f in lfeet:
                self.set_flag(f, goes_left)
            for f in rfeet:
                self.set_flag(f, not goes_left)
            feet = lfeet + rfeet
        top = self.new(schema.category, "coord")
        conj = self.new(schema.conj_word, "word")
        self.children[top] = [(ltop, True), (conj, True), (rtop, True)]
        return top, feet, {}


def derive_dag(g: DerivationGraph, partial: bool = False) -> DerivedDAG:
    """Derived structure of ``g``.

    With ``partial`` a single-rooted graph may keep open sites and links;
    they stay as empty ``slot`` leaves.
    """
    if partial:
        roots = g.roots()
        if len(roots) != 1:
            raise IncompleteDerivation(f"derivation has {len(roots)} roots")
        root = roots[0]
    else:
        root = check_complete(g)
    b = _DagBuilder(g)
    top, feet, _ = b.build(root)
    # placeholders replaced by substitution or adjunction are now unreachable
    reach, stack = {top}, [top]
    while stack:
        for c, _ in b.children[stack.pop()]:
            if c not in reach:
                reach.add(c)
                stack.append(c)
    nodes = {n: v for n, v in b.nodes.items() if n in reach}
    children = {n: v for n, v in b.children.items() if n in reach}
    return DerivedDAG(top, nodes, children)


def linearize(d: DerivedDAG) -> list:
    out = []

    def walk(n):
        node = d.nodes[n]
        if node.kind == "word":
            if node.label:
                out.append(node.label)
            return
        for c, realized in d.children.get(n, []):
            if realized:
                walk(c)

    walk(d.root)
    return out


def yield_of(g: DerivationGraph) -> list:
    return linearize(derive_dag(g))
