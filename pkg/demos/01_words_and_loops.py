"""Edge paths on a theta graph: reduction, cyclic reduction, and splicing."""
from mlsrigid.metric_graph import MetricGraph, compute_core
from mlsrigid.paths_words import (
    concatenate_reduced,
    cyclically_reduce,
    extend_to_geodesic_loop,
    parse_path,
    path_length,
    reduce,
    reduced_loop_through,
)

# two vertices joined by edges of length 1, 2, 3
g = MetricGraph(2, [(0, 1, 1), (0, 1, 2), (0, 1, 3)])

# cancel e0' e0 in the middle
p = parse_path(g, "e1 e0' e0 e2'")
print("reduce", p, "->", reduce(p), "length", path_length(g, p), "->", path_length(g, reduce(p)))

# a loop with backtracks peels down to a cyclically reduced core
loop = parse_path(g, "e1 e0' e2 e0' e0 e1'")
gamma, conj = cyclically_reduce(loop)
print("cyclic core of", loop, "is", gamma, "conjugated by", conj or "(empty)")

# concatenating reduced paths: the cancelled part r is reported with the pieces
res = concatenate_reduced(parse_path(g, "e0"), parse_path(g, "e0' e1"))
print("e0 . e0' e1 ->", res.q, "with cancelled", res.r)

# conjugating a loop at vertex 1 back to vertex 0 along e0
res = reduced_loop_through(parse_path(g, "e0"), parse_path(g, "e1' e2"))
print("loop through the end of e0:", res.loop, "reversed" if res.reversed else "as given")

# every path in the core extends to a geodesic loop
c = compute_core(g)
for text in ("e0", "e1 e2'", "e0 e1' e2"):
    print("extend", text, "->", extend_to_geodesic_loop(c, parse_path(g, text)))
