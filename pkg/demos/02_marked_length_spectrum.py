"""Markings, group words and the marked length spectrum of a theta graph."""
from mlsrigid.metric_graph import MetricGraph, compute_core
from mlsrigid.spectrum import (
    build_marking,
    canonical_classes,
    format_word,
    make_oracle,
    mls,
    parse_word,
    spectrum_dump,
    word_to_loop,
)

g = MetricGraph(2, [(0, 1, 1), (0, 1, 2), (0, 1, 3)])
c = compute_core(g)
m = build_marking(c)

# the shortest-path tree is {e0}; the other two edges generate
print("tree", sorted(m.tree_edges), "generators", m.generators)
for i, loop in enumerate(m.generator_loops):
    print(f"g{i} runs along", loop)

for text in ("g0", "g1", "g0 g1'", "g1 g0 g1'"):
    w = parse_word(text)
    print(f"{text:10} loop {str(word_to_loop(m, w)):16} length {mls(m, w)}")

# a few classes of the spectrum, as the dump format records them
for row in spectrum_dump(m, 2)[:6]:
    print(row)
print(len(canonical_classes(2, 4)), "classes of word length at most 4")

# relabeling the generators permutes the spectrum but keeps its values
swap = make_oracle(c, m, {0: parse_word("g1"), 1: parse_word("g0")})
for w in (parse_word("g0"), parse_word("g1")):
    print("swapped oracle", format_word(w), swap.query(w), "direct", mls(m, w))
