import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mlsrigid.generate import RunConfig, random_core_source, random_graph  # noqa: E402
from mlsrigid.metric_graph import MetricGraph, compute_core  # noqa: E402
from mlsrigid.spectrum import build_marking  # noqa: E402


def theta(a=1, b=2, c=3):
    return MetricGraph(2, [(0, 1, a), (0, 1, b), (0, 1, c)])


def figure_eight(a=2, b=3):
    return MetricGraph(1, [(0, 0, a), (0, 0, b)])


def circle(length=5):
    return MetricGraph(1, [(0, 0, length)])


def marked(g):
    c = compute_core(g)
    return c, build_marking(c)


def random_graphs(seed, count, **kw):
    rng = random.Random(seed)
    vertices = kw.pop("vertices", None)
    rank = kw.pop("rank", 2)
    out = []
    for _ in range(count):
        n = vertices if vertices is not None else rng.randint(1, 6)
        out.append(random_graph(rng, n, rng.randint(kw.get("min_rank", 0), rank),
                                kw.get("max_num", 9), kw.get("max_den", 4)))
    return out


def random_cores(seed, count, rank=4, min_rank=2, **kw):
    rng = random.Random(seed)
    cfg = RunConfig(rank=rank, min_rank=min_rank, **kw)
    return [compute_core(random_core_source(cfg, rng)) for _ in range(count)]


@pytest.fixture
def theta_graph():
    return theta()


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
