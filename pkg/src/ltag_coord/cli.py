"""Command-line driver: ``ltag-coord {recognize,parse,enumerate}``.

Exit status is 0 when every sentence is accepted (or enumeration succeeds),
1 when some sentence is rejected and 2 on any error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import fixture_text
from .derivation import derive_dag, linearize
from .errors import LTAGError
from .grammar_io import export_json, export_dot, load_grammar, load_lexicon
from .oracle import oracle_yields
from .parser import compile_grammar, parse, recognize

ACCEPT, REJECT, ERROR = 0, 1, 2


@dataclass
class CliConfig:
    grammar: object
    lexicon: object
    command: str
    output: str = "json"
    max_results: int = 10
    gapping: bool = False
    conjoin: bool = True
    fragments: bool = False
    start: str | None = None

    def compiled(self):
        return compile_grammar(self.grammar, self.lexicon, gapping=self.gapping, conjoin=self.conjoin,
                               open_shared=self.fragments)


def _read(path: str | None, bundled: str) -> str:
    if path is None:
        return fixture_text(bundled)
    return Path(path).read_text(encoding="utf-8")


def load_config(args) -> CliConfig:
    grammar = load_grammar(_read(args.grammar, "fixture.ltag"), name=args.grammar or "fixture")
    lexicon = load_lexicon(_read(args.lexicon, "fixture.lex"), grammar)
    return CliConfig(
        grammar=grammar,
        lexicon=lexicon,
        command=args.command,
        output="dot" if getattr(args, "dot", False) else "json",
        max_results=getattr(args, "max_results", 10),
        gapping=args.gapping,
        conjoin=not args.no_conjoin,
        fragments=getattr(args, "fragments", False),
        start=args.start,
    )


def _sentences(args) -> list:
    out = []
    if getattr(args, "sentence", None):
        out.append(args.sentence)
    if getattr(args, "sentences", None):
        for line in Path(args.sentences).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(line)
    if not out:
        raise ValueError("no sentence given (pass one or use --sentences FILE)")
    return out


def cmd_recognize(config: CliConfig, sentences, out=None) -> int:
    out = out or sys.stdout
    compiled = config.compiled()
    status = ACCEPT
    for sentence in sentences:
        ok = recognize(config.grammar, config.lexicon, sentence.split(), start=config.start, compiled=compiled)
        print(f"{'accept' if ok else 'reject'}\t{sentence}", file=out)
        if not ok:
            status = REJECT
    return status


def cmd_parse(config: CliConfig, sentences, out=None) -> int:
    out = out or sys.stdout
    compiled = config.compiled()
    status = ACCEPT
    documents = []
    for sentence in sentences:
        graphs = parse(config.grammar, config.lexicon, sentence.split(), max_results=config.max_results,
                       start=config.start, compiled=compiled, open_shared=config.fragments)
        if not graphs:
            status = REJECT
        yields = [linearize(derive_dag(g, partial=config.fragments)) for g in graphs]
        if config.output == "dot":
            if not graphs:
                print(f"// no derivation for: {sentence}", file=out)
            for g, y in zip(graphs, yields):
                out.write(export_dot(g, y))
        else:
            documents.append({
                "sentence": sentence,
                "derivations": [export_json(g, y) for g, y in zip(graphs, yields)],
            })
    if config.output == "json":
        doc = documents[0] if len(documents) == 1 else documents
        out.write(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return status


def cmd_enumerate(config: CliConfig, bound: int, out=None) -> int:
    out = out or sys.stdout
    if bound < 0:
        raise ValueError("bound must be non-negative")
    yields = oracle_yields(config.grammar, config.lexicon, bound, gapping=config.gapping,
                           conjoin=config.conjoin, start=config.start)
    for y in sorted(yields):
        print(" ".join(y), file=out)
    return ACCEPT


def build_arg_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-g", "--grammar", help="grammar file (default: bundled fixture grammar)")
    common.add_argument("-l", "--lexicon", help="lexicon file (default: bundled fixture lexicon)")
    common.add_argument("--gapping", action="store_true", help="allow anchor contraction")
    common.add_argument("--no-conjoin", action="store_true", help="disable coordination")
    common.add_argument("--start", help="required root category of accepted derivations")

    sentence_args = argparse.ArgumentParser(add_help=False)
    sentence_args.add_argument("sentence", nargs="?", help="whitespace-tokenized sentence")
    sentence_args.add_argument("--sentences", metavar="FILE", help="one sentence per line")

    ap = argparse.ArgumentParser(prog="ltag-coord", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("recognize", parents=[common, sentence_args], help="accept or reject sentences")
    p = sub.add_parser("parse", parents=[common, sentence_args], help="print derivation graphs")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--dot", action="store_true", help="Graphviz DOT output")
    p.add_argument("-n", "--max-results", type=int, default=10)
    p.add_argument("--fragments", action="store_true", help="allow unfilled shared arguments")
    e = sub.add_parser("enumerate", parents=[common], help="list all yields up to an operation bound")
    e.add_argument("bound", type=int)
    return ap


def main(argv=None) -> int:
    ap = build_arg_parser()
    args = ap.parse_args(argv)
    try:
        config = load_config(args)
        if args.command == "enumerate":
            return cmd_enumerate(config, args.bound)
        sentences = _sentences(args)
        if args.command == "recognize":
            return cmd_recognize(config, sentences)
        return cmd_parse(config, sentences)
    except (LTAGError, OSError, ValueError) as exc:
        print(f"ltag-coord: error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
