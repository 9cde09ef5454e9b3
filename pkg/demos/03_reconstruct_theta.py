"""Rebuild a hidden theta graph from lengths alone, with a checkable certificate."""
import json

from mlsrigid.metric_graph import MetricGraph, compute_core
from mlsrigid.reconstruct import (
    build_distinguishing_pair,
    certify_isometry,
    check_incidence,
    reconstruct_core,
    recover_length,
    replay_certificate,
)
from mlsrigid.spectrum import build_marking, format_word, make_oracle, parse_word

source = compute_core(MetricGraph(2, [(0, 1, 1), (0, 1, 2), (0, 1, 3)]))
m = build_marking(source)

# the hidden space is the same theta graph, seen through swapped generators
hidden = compute_core(MetricGraph(2, [(0, 1, 3), (0, 1, 1), (0, 1, 2)]))
hm = build_marking(hidden)
oracle = make_oracle(hidden, hm, {0: parse_word("g1"), 1: parse_word("g0")})

# two loops agreeing exactly along e0 recover its length
d = build_distinguishing_pair(source, m, 0)
print("pair for e0:", [str(p) for p in d.paths], "words", format_word(d.loop1), "|", format_word(d.loop2))
print("recovered length of e0:", recover_length(oracle, d))

v = check_incidence(oracle, source, m, 0, 1, 1)
print("e0 then e1' at vertex 1:", "incident" if v.incident else "not incident",
      f"({v.entry['form']}, predicted {v.entry['predicted']}, observed {v.entry['observed']})")

r = reconstruct_core(2, source, m, oracle)
print("rebuilt edges:", [(a, b, str(x)) for a, b, x in r.core.graph.edges])
print("certificate entries:", len(r.certificate), "replay ok:", replay_certificate(oracle, r.certificate))
print("isometric to the hidden core:", certify_isometry(r, hidden))
print(json.dumps(r.certificate[0], indent=2))
