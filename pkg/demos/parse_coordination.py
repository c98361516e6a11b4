"""Parse a few coordinated sentences with the bundled grammar."""
from ltag_coord import fixture_grammar, fixture_lexicon, parse, recognize
from ltag_coord.derivation import derive_dag, linearize

grammar = fixture_grammar()
lexicon = fixture_lexicon(grammar=grammar)

SENTENCES = [
    ("Keats steals and Chapman eats apples", False),
    ("John ate bananas and Bill strawberries", True),
    ("John gave Mary a book and Susan a flower", True),
    ("Who laughed and seemed to be happy ?", False),
    ("John loves Mary and Bill too", True),
    ("Keats steals apples and", False),
]

for sentence, gapping in SENTENCES:
    tokens = sentence.split()
    if not recognize(grammar, lexicon, tokens, gapping=gapping):
        print(f"rejected: {sentence}\n")
        continue
    graphs = parse(grammar, lexicon, tokens, gapping=gapping)
    print(f"{sentence}  ({len(graphs)} derivation{'s' * (len(graphs) != 1)})")
    for g in graphs:
        for n in g.nodes:
            if n.is_schema:
                shared = sorted(str(ln.address) for ln in g.links_of(n.id))
                print(f"  {n.payload.label()} shares {', '.join(shared)}")
        assert linearize(derive_dag(g)) == tokens
    print()
