"""Lexicalized TAG with coordination: contraction sets, conjoin and an
Earley-style parser that recognizes coordinated structures."""
from importlib import resources

from .derivation import (
    CoordinationDerivation,
    DerivationGraph,
    Op,
    TreeDerivation,
    adjoin,
    build_graph,
    conjoin,
    derive_dag,
    instantiate_schema,
    linearize,
    shared_fill,
    substitute,
    yield_of,
)
from .grammar_core import (
    ElementaryTree,
    GornAddress,
    TreeTemplate,
    build_contraction,
    find_root,
    gorn,
    gorn_dominates,
    lexicalize,
    validate_template,
    with_gapping,
)
from .grammar_io import (
    Grammar,
    Lexicon,
    export_derivation,
    import_derivation,
    load_grammar,
    load_lexicon,
)

from .oracle import oracle_enumerate, oracle_yields
from .parser import check_contraction_spans, compile_grammar, parse, recognize

__version__ = "0.1.0"


def fixture_text(name: str) -> str:
    return resources.files(__package__).joinpath("data", name).read_text(encoding="utf-8")


def fixture_grammar() -> Grammar:
    return load_grammar(fixture_text("fixture.ltag"), name="fixture")


def fixture_lexicon(name: str = "fixture.lex", grammar: Grammar | None = None) -> Lexicon:
    return load_lexicon(fixture_text(name), grammar or fixture_grammar())
