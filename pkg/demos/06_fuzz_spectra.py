"""Search short classes for a length that tells two graphs apart."""
from mlsrigid.generate import RunConfig, cmd_fuzz_distinguish
from mlsrigid.metric_graph import MetricGraph

theta = MetricGraph(2, [(0, 1, 1), (0, 1, 2), (0, 1, 3)])
other = MetricGraph(2, [(0, 1, 1), (0, 1, 2), (0, 1, 4)])
cfg = RunConfig(word_bound=2)

print(cmd_fuzz_distinguish(cfg, theta, other))
# equal bounded spectra are not a proof of isometry, hence the wording
print(cmd_fuzz_distinguish(cfg, theta, theta)["verdict"])
print(cmd_fuzz_distinguish(cfg, MetricGraph(1, [(0, 0, 5)]), MetricGraph(1, [(0, 0, 6)]))["witness"])
