"""Translation lengths in a ball of the universal cover match the spectrum."""
from mlsrigid.metric_graph import MetricGraph, compute_core
from mlsrigid.rtree import axis_edges, build_cover_ball, classify_action, translation_length
from mlsrigid.spectrum import build_marking, canonical_classes, format_word, mls

c = compute_core(MetricGraph(2, [(0, 1, 1), (0, 1, 2), (0, 1, 3)]))
m = build_marking(c)
ball = build_cover_ball(c, m, 4)
edges = sum(1 for _ in ball.edges())
print(f"ball of radius 4: {ball.num_vertices} vertices, {edges} edges, action {classify_action(c)}")

for w in canonical_classes(2, 3)[:10]:
    print(f"{format_word(w):12} translation {translation_length(ball, w)}  spectrum {mls(m, w)}")

axis = axis_edges(ball, ((0, 1),))
print("g0 moves", len(axis), "ball edges by its translation length, along core edges",
      sorted({e for *_, e in axis}))

circle = compute_core(MetricGraph(1, [(0, 0, 5)]))
print("a circle's group acts on a line:", classify_action(circle))
