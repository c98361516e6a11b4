"""Gorn addressing, tree templates, lexicalization and contraction sets.

Elementary trees are immutable values.  An elementary tree pairs a
template with its anchor words and a contraction set; the second
projection (frontier substitution and foot sites) is always recomputed
from the template.
"""
from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import (
    AnchorContractionDisallowed,
    AnchorMismatch,
    FootCountError,
    MalformedTree,
    MultipleFootDominated,
    NoAnchor,
    NotInSecondProjection,
)

ROOT_SYMBOL = "ε"


class GornAddress(tuple):
    """Path of 1-based child indices; the empty path is the root.

    Tuple comparison already gives the required total order (prefixes sort
    before their extensions).
    """

    def __new__(cls, path: Iterable[int] = ()):
        path = tuple(path)
        for step in path:
            if not isinstance(step, int) or isinstance(step, bool) or step < 1:
                raise ValueError(f"invalid Gorn step {step!r}")
        return super().__new__(cls, path)

    @classmethod
    def parse(cls, text: str) -> "GornAddress":
        text = text.strip()
        if text in (ROOT_SYMBOL, "", "0"):
            return cls()
        try:
            return cls(int(part) for part in text.split("."))
        except ValueError:
            raise ValueError(f"malformed Gorn address {text!r}") from None

    def child(self, k: int) -> "GornAddress":
        return GornAddress(self + (k,))

    @property
    def parent(self) -> "GornAddress":
        if not self:
            raise ValueError("the root has no parent")
        return GornAddress(self[:-1])

    def __str__(self):
        return ".".join(map(str, self)) if self else ROOT_SYMBOL

    def __repr__(self):
        return f"GornAddress({str(self)!r})"


ROOT = GornAddress()


def gorn(value) -> GornAddress:
    """Coerce a string, tuple or address into a :class:`GornAddress`."""
    if isinstance(value, GornAddress):
        return value
    if isinstance(value, str):
        return GornAddress.parse(value)
    if isinstance(value, int):
        return GornAddress((value,))
    return GornAddress(value)


def gorn_dominates(a, b) -> bool:
    """Reflexive dominance: ``a`` is a prefix of ``b``."""
    a, b = gorn(a), gorn(b)
    return b[: len(a)] == a


def lowest_common_dominator(addresses: Iterable[GornAddress]) -> GornAddress:
    addresses = [gorn(a) for a in addresses]
    if not addresses:
        return ROOT
    prefix = []
    for steps in zip(*addresses):
        if len(set(steps)) != 1:
            break
        prefix.append(steps[0])
    return GornAddress(prefix)


class NodeKind(enum.Enum):
    INTERNAL = "internal"
    SUBSTITUTION = "substitution"
    FOOT = "foot"
    ANCHOR = "anchor"
    TERMINAL = "terminal"


FRONTIER_KINDS = frozenset(
    {NodeKind.SUBSTITUTION, NodeKind.FOOT, NodeKind.ANCHOR, NodeKind.TERMINAL}
)


class TreeType(enum.Enum):
    INITIAL = "initial"
    AUXILIARY = "aux"


@dataclass(frozen=True)
class Node:
    label: str
    kind: NodeKind


@dataclass(frozen=True)
class TreeTemplate:
    """Unlexicalized elementary tree.

    ``nodes`` is stored as a sorted tuple of ``(address, Node)`` pairs so the
    template stays hashable; use :attr:`node_map` for lookups.
    """

    name: str
    nodes: tuple
    tree_type: TreeType

    def __post_init__(self):
        if isinstance(self.nodes, Mapping):
            items = self.nodes.items()
        else:
            items = self.nodes
        ordered = tuple(sorted((gorn(a), n) for a, n in items))
        object.__setattr__(self, "nodes", ordered)

    @classmethod
    def from_nested(cls, name: str, tree_type: TreeType, spec) -> "TreeTemplate":
        """Build from ``(label, kind, [children...])`` nested tuples."""
        nodes = {}

        def walk(item, address):
            label, kind, children = item
            nodes[address] = Node(label, kind)
            for k, ch in enumerate(children, start=1):
                walk(ch, address.child(k))

        walk(spec, ROOT)
        return cls(name, tuple(nodes.items()), tree_type)

    @cached_property
    def node_map(self) -> dict:
        return dict(self.nodes)

    def __getitem__(self, address) -> Node:
        return self.node_map[gorn(address)]

    def __contains__(self, address) -> bool:
        return gorn(address) in self.node_map

    def addresses(self):
        return [a for a, _ in self.nodes]

    def children(self, address) -> list:
        address = gorn(address)
        out = []
        k = 1
        while address.child(k) in self.node_map:
            out.append(address.child(k))
            k += 1
        return out

    def is_leaf(self, address) -> bool:
        return gorn(address).child(1) not in self.node_map

    @cached_property
    def frontier(self) -> tuple:
        """Leaf addresses, left to right."""
        return tuple(a for a, _ in self.nodes if self.is_leaf(a))

    def _of_kind(self, kind):
        return tuple(a for a, n in self.nodes if n.kind is kind)

    @cached_property
    def anchors(self) -> tuple:
        return self._of_kind(NodeKind.ANCHOR)

    @cached_property
    def feet(self) -> tuple:
        return self._of_kind(NodeKind.FOOT)

    @cached_property
    def substitution_sites(self) -> tuple:
        return self._of_kind(NodeKind.SUBSTITUTION)

    @cached_property
    def terminals(self) -> tuple:
        return self._of_kind(NodeKind.TERMINAL)

    @property
    def foot(self):
        return self.feet[0] if self.feet else None

    @property
    def root_category(self) -> str:
        return self.node_map[ROOT].label

    def category(self, address) -> str:
        return self[address].label

    @property
    def is_auxiliary(self) -> bool:
        return self.tree_type is TreeType.AUXILIARY


def validate_template(t: TreeTemplate) -> TreeTemplate:
    nodes = t.node_map
    if ROOT not in nodes:
        raise MalformedTree(f"{t.name}: no root node")
    for address, node in nodes.items():
        if address and address.parent not in nodes:
            raise MalformedTree(f"{t.name}: address {address} has no parent")
        if address and address[-1] > 1 and address.parent.child(address[-1] - 1) not in nodes:
            raise MalformedTree(f"{t.name}: gap in child numbering before {address}")
        leaf = t.is_leaf(address)
        if node.kind in FRONTIER_KINDS and not leaf:
            raise MalformedTree(f"{t.name}: {node.kind.value} node {address} has children")
        if node.kind is NodeKind.INTERNAL and leaf:
            raise MalformedTree(f"{t.name}: internal node {address} has no children")
        if node.kind is not NodeKind.TERMINAL and not node.label:
            raise MalformedTree(f"{t.name}: node {address} has an empty category")
    if not t.anchors:
        raise NoAnchor(f"{t.name}: no anchor site on the frontier")
    feet = t.feet
    if t.tree_type is TreeType.AUXILIARY:
        if len(feet) != 1:
            raise FootCountError(f"{t.name}: auxiliary tree needs exactly one foot, found {len(feet)}")
        if nodes[feet[0]].label != t.root_category:
            raise FootCountError(
                f"{t.name}: foot category {nodes[feet[0]].label} differs from root {t.root_category}")
    elif feet:
        raise FootCountError(f"{t.name}: initial tree contains a foot node")
    return t


@dataclass(frozen=True)
class ElementaryTree:
    template: TreeTemplate
    anchor_words: tuple = ()
    contraction_set: tuple = ()
    gapping_mode: bool = False

    def __post_init__(self):
        words = self.anchor_words.items() if isinstance(self.anchor_words, Mapping) else self.anchor_words
        object.__setattr__(self, "anchor_words", tuple(sorted((gorn(a), w) for a, w in words)))
        object.__setattr__(self, "contraction_set", tuple(sorted({gorn(a) for a in self.contraction_set})))

    @property
    def name(self) -> str:
        return self.template.name

    @property
    def words(self) -> tuple:
        return tuple(w for _, w in self.anchor_words)

    def word_at(self, address) -> str:
        return dict(self.anchor_words)[gorn(address)]

    @cached_property
    def second_projection(self) -> tuple:
        t = self.template
        return tuple(a for a in t.frontier if t[a].kind in (NodeKind.SUBSTITUTION, NodeKind.FOOT))

    @cached_property
    def substitution_set(self) -> tuple:
        contracted = set(self.contraction_set)
        feet = set(self.template.feet)
        return tuple(a for a in self.second_projection if a not in contracted and a not in feet)

    @property
    def anchor_contracted(self) -> bool:
        return any(a in self.contraction_set for a in self.template.anchors)

    @property
    def is_auxiliary(self) -> bool:
        return self.template.is_auxiliary

    def label(self) -> str:
        greek = "β" if self.is_auxiliary else "α"
        text = f"{greek}({' '.join(self.words)})"
        if self.contraction_set:
            text += "{" + ",".join(str(a) for a in self.contraction_set) + "}"
        return text

    def __str__(self):
        return self.label()


def lexicalize(t: TreeTemplate, words: Mapping) -> ElementaryTree:
    words = {gorn(a): w for a, w in words.items()}
    expected = set(t.anchors)
    if set(words) != expected:
        missing = sorted(expected - set(words))
        extra = sorted(set(words) - expected)
        raise AnchorMismatch(
            f"{t.name}: anchors missing {[str(a) for a in missing]}, extra {[str(a) for a in extra]}")
    return ElementaryTree(t, tuple(words.items()))


def with_gapping(e: ElementaryTree, enabled: bool = True) -> ElementaryTree:
    return replace(e, gapping_mode=enabled)


def build_contraction(e: ElementaryTree, subset: Iterable) -> ElementaryTree:
    subset = {gorn(a) for a in subset}
    second = set(e.second_projection)
    anchors = set(e.template.anchors)
    for a in sorted(subset):
        if a in second:
            continue
        if a in anchors:
            if not e.gapping_mode:
                raise AnchorContractionDisallowed(
                    f"{e.label()}: anchor {a} cannot be contracted outside gapping mode")
            continue
        raise NotInSecondProjection(f"{e.label()}: {a} is not in the second projection")
    if subset & anchors and not anchors <= subset:
        raise AnchorContractionDisallowed(f"{e.label()}: all anchor sites must be contracted together")
    return replace(e, contraction_set=tuple(subset))


@functools.lru_cache(maxsize=4096)
def find_root(e: ElementaryTree) -> GornAddress:
    """Lowest node dominating the material the tree still realizes itself.

    That material is the substitution set plus uncontracted anchors and
    terminals; with the anchor included, ``α(cooked){1,2.2}`` yields 2.1.
    """
    t = e.template
    contracted = set(e.contraction_set)
    keep = list(e.substitution_set)
    keep += [a for a in t.anchors if a not in contracted]
    keep += list(t.terminals)
    d = lowest_common_dominator(keep)
    for foot in t.feet:
        if foot not in contracted and gorn_dominates(d, foot):
            raise MultipleFootDominated(
                f"{e.label()}: coordinated node {d} dominates uncontracted foot {foot}")
    return d


def realized_left(e: ElementaryTree, address) -> bool:
    """Whether shared material at ``address`` surfaces in the left conjunct.

    Contracted anchors, and every shared site once the anchor is shared,
    go left; otherwise a site goes left iff it precedes the anchor.
    """
    address = gorn(address)
    if e.anchor_contracted:
        return True
    return address < e.template.anchors[0]


def admissible_contractions(e: ElementaryTree) -> Iterator[tuple]:
    """Every contraction set build_contraction would accept, smallest first."""
    sites = list(e.second_projection)
    anchor_options = [()]
    if e.gapping_mode:
        anchor_options.append(tuple(e.template.anchors))
    for r in range(len(sites) + 1):
        for combo in itertools.combinations(sites, r):
            for anchors in anchor_options:
                yield tuple(sorted(combo + anchors))


def frontier_span(t: TreeTemplate, address) -> tuple:
    """Indices (into ``t.frontier``) of the leaves below ``address``."""
    address = gorn(address)
    return tuple(i for i, leaf in enumerate(t.frontier) if gorn_dominates(address, leaf))
