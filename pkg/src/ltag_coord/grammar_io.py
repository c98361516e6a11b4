"""Grammar and lexicon text formats; JSON/DOT for derivation graphs.

Grammar files hold template declarations::

    # transitive verb
    tree a_tv initial { S [ NP! , VP [ V<> , NP! ] ] }
    tree b_adj aux { N [ A<> , N* ] }

``!`` marks a substitution site, ``*`` the foot, ``<>`` the anchor and a
double-quoted string a terminal (``""`` is an empty terminal).

Lexicon files map words to template names, one entry per line::

    cooked : a_tv
    and : CONJ
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .derivation import (
    ContractionLink,
    DerivationEdge,
    DerivationGraph,
    DerivationNode,
    Op,
    SchemaInstantiation,
)
from .errors import (
    AnchorMismatch,
    DanglingReference,
    DuplicateEntry,
    GrammarSyntaxError,
    LTAGError,
    SchemaViolation,
    TemplateValidationError,
    UnknownTemplate,
)
from .grammar_core import (
    ROOT,
    ElementaryTree,
    GornAddress,
    NodeKind,
    TreeTemplate,
    TreeType,
    gorn,
    lexicalize,
    validate_template,
)

CONJ = "CONJ"

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<anchor><>)
  | (?P<punct>[{}\[\],!*])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'\-]*)
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise GrammarSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, message):
        t = self.tok
        found = t.text or "end of input"
        raise GrammarSyntaxError(f"{message}, found {found!r}", t.line, t.col)

    def expect(self, text=None, kind=None):
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            self.error(f"expected {text or kind}")
        self.i += 1
        return t

    def templates(self):
        out = []
        while self.tok.kind != "eof":
            out.append(self.template())
        return out

    def template(self):
        kw = self.expect(kind="ident")
        if kw.text != "tree":
            self.i -= 1
            self.error("expected 'tree'")
        name = self.expect(kind="ident").text
        kind_tok = self.expect(kind="ident")
        if kind_tok.text not in ("initial", "aux"):
            self.i -= 1
            self.error("expected 'initial' or 'aux'")
        self.expect("{")
        spec = self.node()
        self.expect("}")
        return name, TreeType(kind_tok.text), spec, kw.line

    def node(self):
        t = self.tok
        if t.kind == "string":
            self.i += 1
            return (json.loads(t.text), NodeKind.TERMINAL, [])
        label = self.expect(kind="ident").text
        nxt = self.tok.text
        if nxt == "!":
            self.i += 1
            return (label, NodeKind.SUBSTITUTION, [])
        if nxt == "*":
            self.i += 1
            return (label, NodeKind.FOOT, [])
        if nxt == "<>":
            self.i += 1
            return (label, NodeKind.ANCHOR, [])
        if nxt == "[":
            self.i += 1
            children = [self.node()]
            while self.tok.text == ",":
                self.i += 1
                children.append(self.node())
            self.expect("]")
            return (label, NodeKind.INTERNAL, children)
        # bare category: an internal node without children, rejected by validation
        return (label, NodeKind.INTERNAL, [])


@dataclass
class Grammar:
    templates: dict = field(default_factory=dict)
    name: str = "grammar"

    def __getitem__(self, name) -> TreeTemplate:
        return self.templates[name]

    def __contains__(self, name):
        return name in self.templates

    def __iter__(self):
        return iter(self.templates.values())

    def terminals(self) -> set:
        return {t[a].label for t in self for a in t.terminals if t[a].label}


def parse_template(text: str, name: str = "t", tree_type: TreeType | str = TreeType.INITIAL) -> TreeTemplate:
    """Parse one node expression such as ``S [ NP! , VP [ V<> , NP! ] ]``."""
    p = _Parser(text)
    spec = p.node()
    if p.tok.kind != "eof":
        p.error("trailing input after tree")
    t = TreeTemplate.from_nested(name, TreeType(tree_type), spec)
    try:
        return validate_template(t)
    except LTAGError as exc:
        raise TemplateValidationError(name, exc) from exc


def load_grammar(text: str, name: str = "grammar") -> Grammar:
    g = Grammar(name=name)
    for tname, ttype, spec, _line in _Parser(text).templates():
        if tname in g.templates:
            raise TemplateValidationError(tname, "declared twice")
        if tname == CONJ:
            raise TemplateValidationError(tname, "CONJ is reserved for conjunctions")
        t = TreeTemplate.from_nested(tname, ttype, spec)
        try:
            validate_template(t)
        except LTAGError as exc:
            raise TemplateValidationError(tname, exc) from exc
        g.templates[tname] = t
    return g


def template_to_text(t: TreeTemplate) -> str:
    def render(a):
        node = t[a]
        if node.kind is NodeKind.TERMINAL:
            return json.dumps(node.label, ensure_ascii=False)
        if node.kind is NodeKind.SUBSTITUTION:
            return node.label + "!"
        if node.kind is NodeKind.FOOT:
            return node.label + "*"
        if node.kind is NodeKind.ANCHOR:
            return node.label + "<>"
        return f"{node.label} [ " + " , ".join(render(c) for c in t.children(a)) + " ]"

    return render(ROOT)


def dump_grammar(g: Grammar) -> str:
    return "".join(f"tree {t.name} {t.tree_type.value} {{ {template_to_text(t)} }}\n" for t in g)


@dataclass
class Lexicon:
    """Words (tuples, one word per anchor site) to template names."""

    entries: dict = field(default_factory=dict)

    @property
    def conj_words(self) -> tuple:
        return tuple(sorted(w[0] for w, names in self.entries.items() if CONJ in names))

    def words(self) -> set:
        return {w for key in self.entries for w in key}

    def is_conj(self, word: str) -> bool:
        return CONJ in self.entries.get((word,), ())

    def elementary_trees(self, grammar: Grammar) -> list:
        """Every lexicalized tree, in file order."""
        out = []
        for words, names in self.entries.items():
            for name in names:
                if name == CONJ:
                    continue
                t = grammar[name]
                if len(words) != len(t.anchors):
                    raise AnchorMismatch(f"{name} has {len(t.anchors)} anchors, entry has {len(words)} words")
                out.append(lexicalize(t, dict(zip(t.anchors, words))))
        return out


def load_lexicon(text: str, grammar: Grammar | None = None) -> Lexicon:
    lex = Lexicon()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = re.sub(r"(^|\s)#.*$", "", raw).strip()
        if not line:
            continue
        head, sep, tail = line.rpartition(":")
        if not sep or not head.strip() or not tail.strip():
            raise GrammarSyntaxError("expected 'word : template, ...'", lineno, 1)
        words = tuple(head.split())
        names = [n.strip() for n in tail.split(",")]
        if any(not n for n in names):
            raise GrammarSyntaxError("empty template name", lineno, len(head) + 2)
        current = list(lex.entries.get(words, ()))
        for n in names:
            if n in current:
                raise DuplicateEntry(f"line {lineno}: {' '.join(words)} : {n} listed twice")
            if n != CONJ and grammar is not None and n not in grammar:
                raise UnknownTemplate(f"line {lineno}: unknown template {n!r}")
            if n == CONJ and len(words) != 1:
                raise GrammarSyntaxError("a conjunction must be a single word", lineno, 1)
            current.append(n)
        lex.entries[words] = tuple(current)
    return lex


# ---------------------------------------------------------------------
# derivation graphs


def _node_json(n: DerivationNode) -> dict:
    p = n.payload
    if isinstance(p, SchemaInstantiation):
        return {"id": n.id, "kind": "schema", "category": p.category, "conj": p.conj_word, "label": p.label()}
    t = p.template
    return {
        "id": n.id,
        "kind": "tree",
        "tree": t.name,
        "type": t.tree_type.value,
        "template": template_to_text(t),
        "anchors": {str(a): w for a, w in p.anchor_words},
        "contraction_set": [str(a) for a in p.contraction_set],
        "gapping": p.gapping_mode,
        "label": p.label(),
    }


def _ordered(g: DerivationGraph):
    order = g.topological_order()
    rank = {nid: i for i, nid in enumerate(order)}
    nodes = sorted(g.nodes, key=lambda n: rank[n.id])
    edges = sorted(g.edges, key=lambda e: (rank[e.parent], e.site, rank[e.child], e.op.value))
    links = sorted(g.contractions, key=lambda ln: (rank[ln.schema], ln.address))
    return nodes, edges, links


def export_json(g: DerivationGraph, yield_tokens=None) -> dict:
    nodes, edges, links = _ordered(g)
    doc = {
        "nodes": [_node_json(n) for n in nodes],
        "edges": [{"parent": e.parent, "child": e.child, "site": str(e.site), "op": e.op.value} for e in edges],
        "links": [{"schema": ln.schema, "site": str(ln.address), "left": ln.left[0], "right": ln.right[0],
                   "child": ln.child, "anchor": ln.anchor, "foot": ln.foot} for ln in links],
    }
    if yield_tokens is not None:
        doc["yield"] = " ".join(yield_tokens)
    return doc


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: DerivationGraph, yield_tokens=None) -> str:
    nodes, edges, links = _ordered(g)
    lines = ["digraph derivation {", "  node [shape=box];"]
    if yield_tokens is not None:
        lines.append(f"  label={_dot_quote(' '.join(yield_tokens))};")
    for n in nodes:
        shape = ", shape=diamond" if n.is_schema else ""
        lines.append(f"  n{n.id} [label={_dot_quote(n.payload.label())}{shape}];")
    styles = {
        Op.SHARED_SUBSTITUTION: ", style=dashed",
        Op.SHARED_ADJUNCTION: ", style=dashed",
        Op.CONJOIN_LEFT: ", style=bold",
        Op.CONJOIN_RIGHT: ", style=bold",
    }
    for e in edges:
        lines.append(f"  n{e.parent} -> n{e.child} [label={_dot_quote(str(e.site))}{styles.get(e.op, '')}];")
    for ln in links:
        if ln.anchor:
            lines.append(f"  n{ln.left[0]} -> n{ln.right[0]} [label={_dot_quote(str(ln.address))}, "
                         "style=dotted, dir=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_derivation(g: DerivationGraph, format: str = "json", yield_tokens=None) -> str:
    if format == "json":
        return json.dumps(export_json(g, yield_tokens), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if format == "dot":
        return export_dot(g, yield_tokens)
    raise ValueError(f"unknown format {format!r}")


def _site(text) -> GornAddress:
    if not isinstance(text, str):
        raise SchemaViolation(f"site must be a string, got {text!r}")
    try:
        return gorn(text)
    except ValueError as exc:
        raise SchemaViolation(str(exc)) from None


def _require(obj, key, kind):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaViolation(f"missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise SchemaViolation(f"field {key!r} has wrong type")
    return value


def import_derivation(text) -> DerivationGraph:
    try:
        doc = json.loads(text) if isinstance(text, str) else text
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaViolation("document must be an object")
    nodes = []
    for raw in _require(doc, "nodes", list):
        nid = _require(raw, "id", int)
        kind = _require(raw, "kind", str)
        if kind == "schema":
            payload = SchemaInstantiation(_require(raw, "category", str), _require(raw, "conj", str))
        elif kind == "tree":
            try:
                template = parse_template(_require(raw, "template", str), _require(raw, "tree", str),
                                          TreeType(_require(raw, "type", str)))
            except (LTAGError, ValueError) as exc:
                raise SchemaViolation(f"node {nid}: bad template: {exc}") from None
            anchors = {_site(a): w for a, w in _require(raw, "anchors", dict).items()}
            cset = [_site(a) for a in _require(raw, "contraction_set", list)]
            gapping = raw.get("gapping", False)
            payload = ElementaryTree(template, tuple(anchors.items()), tuple(cset), bool(gapping))
        else:
            raise SchemaViolation(f"unknown node kind {kind!r}")
        nodes.append(DerivationNode(nid, payload))
    ids = {n.id for n in nodes}
    if len(ids) != len(nodes):
        raise SchemaViolation("duplicate node id")
    ops = {op.value: op for op in Op}
    edges = []
    for raw in _require(doc, "edges", list):
        parent, child = _require(raw, "parent", int), _require(raw, "child", int)
        op = _require(raw, "op", str)
        if op not in ops:
            raise SchemaViolation(f"unknown op {op!r}")
        for ref in (parent, child):
            if ref not in ids:
                raise DanglingReference(f"edge references missing node {ref}")
        edges.append(DerivationEdge(parent, child, _site(_require(raw, "site", str)), ops[op]))
    links = []
    for raw in doc.get("links", []):
        schema, left, right = (_require(raw, k, int) for k in ("schema", "left", "right"))
        child = raw.get("child")
        for ref in (schema, left, right) + ((child,) if child is not None else ()):
            if ref not in ids:
                raise DanglingReference(f"link references missing node {ref}")
        site = _site(_require(raw, "site", str))
        links.append(ContractionLink(schema, (left, site), (right, site), child,
                                     bool(raw.get("anchor", False)), bool(raw.get("foot", False))))
    return DerivationGraph(tuple(sorted(nodes, key=lambda n: n.id)), tuple(edges), tuple(links))
