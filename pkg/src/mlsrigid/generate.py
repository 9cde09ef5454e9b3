"""Seeded random graphs, hidden copies, and the experiments behind the CLI.

A hidden copy of a graph is the same metric space presented differently:
vertices relabeled, edges reordered and flipped, some edges subdivided, and
pendant trees attached.  The edge correspondence is kept so that the source
marking can be transported to the hidden one, which gives the isomorphism
of fundamental groups the reconstruction needs.
"""
from __future__ import annotations

import hashlib
import random
import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .metric_graph import CoreGraph, HalfEdge, MetricGraph, compute_core, graph_to_json
from .paths_words import EdgePath, concat, inverse, make_path, reduce
from .reconstruct import SpectrumInconsistent, certify_isometry, reconstruct_core
from .spectrum import (
    Marking,
    build_marking,
    canonical_classes,
    format_word,
    loop_to_word,
    make_oracle,
    mls,
    word_inverse,
    word_mul,
)


class ConfigError(ValueError):
    """Bounds that no graph or trial can satisfy."""


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    rank: int = 2
    min_rank: Optional[int] = None
    vertices: Optional[int] = None
    max_num: int = 9
    max_den: int = 4
    max_core_edges: int = 12
    word_bound: int = 3
    trials: int = 1
    perturb: bool = False
    timing: bool = False

    def check(self) -> None:
        if self.rank < 0 or (self.min_rank is not None and not 0 <= self.min_rank <= self.rank):
            raise ConfigError("rank bounds must satisfy 0 <= min rank <= rank")
        if self.max_num < 1 or self.max_den < 1:
            raise ConfigError("length bounds must be positive")
        if self.vertices is not None and self.vertices < 1:
            raise ConfigError("a graph needs at least one vertex")
        if self.word_bound < 0 or self.trials < 0:
            raise ConfigError("word bound and trial count must be non-negative")
        low = self.rank if self.min_rank is None else self.min_rank
        if self.max_core_edges < low:
            raise ConfigError(f"a core of rank {low} needs at least {low} edges")


def digest(g: MetricGraph) -> str:
    return hashlib.sha256(graph_to_json(g).encode()).hexdigest()[:16]


# -- random graphs ---------------------------------------------------------

def random_length(rng: random.Random, max_num: int, max_den: int) -> Fraction:
    return Fraction(rng.randint(1, max_num), rng.randint(1, max_den))


def random_tree_edges(rng: random.Random, n: int) -> list:
    """Edges of a uniform labeled tree on ``n`` vertices (Pruefer decoding)."""
    if n < 2:
        return []
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = min(u for u in range(n) if degree[u] == 1)
        edges.append((leaf, v))
        degree[leaf] -= 1
        degree[v] -= 1
    a, b = [u for u in range(n) if degree[u] == 1]
    edges.append((a, b))
    return edges


def random_graph(rng: random.Random, vertices: int, rank: int, max_num: int = 9, max_den: int = 4) -> MetricGraph:
    """Uniform spanning tree plus ``rank`` uniform extra edges (loops and multi-edges allowed)."""
    pairs = random_tree_edges(rng, vertices)
    pairs += [(rng.randrange(vertices), rng.randrange(vertices)) for _ in range(rank)]
    rng.shuffle(pairs)
    return MetricGraph(vertices, [(a, b, random_length(rng, max_num, max_den)) for a, b in pairs])


def graph_for(cfg: RunConfig, rng: random.Random, rank: Optional[int] = None) -> MetricGraph:
    rank = cfg.rank if rank is None else rank
    n = cfg.vertices if cfg.vertices is not None else rng.randint(1, 2 * rank + 2)
    return random_graph(rng, n, rank, cfg.max_num, cfg.max_den)


def random_core_source(cfg: RunConfig, rng: random.Random, attempts: int = 1000) -> MetricGraph:
    """Rejection-sample a graph whose core rank lies in the bounds and fits the edge budget."""
    low = cfg.rank if cfg.min_rank is None else cfg.min_rank
    for _ in range(attempts):
        rank = rng.randint(low, cfg.rank)
        g = graph_for(cfg, rng, rank)
        if compute_core(g).graph.num_edges <= cfg.max_core_edges:
            return g
    raise ConfigError("no graph within the core edge budget was found")


# -- hidden copies ---------------------------------------------------------

@dataclass(frozen=True)
class HiddenCopy:
    """``graph`` with ``edge_images[e]`` the host path replacing source edge ``e``."""

    graph: MetricGraph
    vertex_images: tuple
    edge_images: tuple

    def image_steps(self, steps) -> tuple:
        out = []
        for h in steps:
            chain = self.edge_images[h.edge]
            if h.backward:
                chain = tuple(x.reverse() for x in reversed(chain))
            out.extend(chain)
        return tuple(out)


def hidden_copy(rng: random.Random, g: MetricGraph, subdivide: float = 0.3, pendants: int = 2,
                max_num: int = 9, max_den: int = 4) -> HiddenCopy:
    """Isometric copy of ``g`` under a random presentation."""
    perm = list(range(g.num_vertices))
    rng.shuffle(perm)
    n = g.num_vertices
    pieces = []  # (source edge, position in chain, a, b, length)
    for e, (a, b, length) in enumerate(g.edges):
        a, b = perm[a], perm[b]
        if rng.random() < subdivide:
            cut = length * Fraction(rng.randint(1, 4), 5)
            mid = n
            n += 1
            pieces += [(e, 0, a, mid, cut), (e, 1, mid, b, length - cut)]
        else:
            pieces.append((e, 0, a, b, length))
    extra = []
    for _ in range(pendants):
        extra.append((rng.randrange(n), n, random_length(rng, max_num, max_den)))
        n += 1
    order = list(range(len(pieces) + len(extra)))
    rng.shuffle(order)
    flips = [rng.random() < 0.5 for _ in order]
    edges = [None] * len(order)
    where = {}
    for slot, k in enumerate(order):
        a, b, length = pieces[k][2:] if k < len(pieces) else extra[k - len(pieces)]
        edges[slot] = (b, a, length) if flips[slot] else (a, b, length)
        if k < len(pieces):
            where[pieces[k][:2]] = HalfEdge(slot, flips[slot])
    images = []
    for e in range(g.num_edges):
        chain = [where[(e, 0)]]
        if (e, 1) in where:
            chain.append(where[(e, 1)])
        images.append(tuple(chain))
    return HiddenCopy(MetricGraph(n, edges), tuple(perm), tuple(images))


def _host_path(g: MetricGraph, source: int, target: int) -> tuple:
    """Breadth-first path of half-edges, least half-edge first."""
    prev = {source: None}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        if v == target:
            break
        for h in g.out_half_edges(v):
            w = g.head(h)
            if w not in prev:
                prev[w] = h
                queue.append(w)
    steps = []
    v = target
    while prev[v] is not None:
        steps.append(prev[v])
        v = g.tail(prev[v])
    return tuple(reversed(steps))


def transport_marking(src: Marking, hidden: HiddenCopy, hid: Marking) -> tuple:
    """Words over ``hid``'s generators for the images of ``src``'s generators."""
    host = hidden.graph
    hid_core = hid.core
    base = hid_core.vertex_map[hid.basepoint]
    image_base = hidden.vertex_images[src.core.vertex_map[src.basepoint]]
    r = make_path(host, _host_path(host, base, image_base), base)
    phi = []
    for loop in src.generator_loops:
        steps = hidden.image_steps(src.core.to_host_steps(loop.steps))
        based = reduce(concat(r, make_path(host, steps, image_base), inverse(r)))
        core_loop = make_path(hid_core.graph, hid_core.from_host_steps(based.steps), hid.basepoint)
        phi.append(loop_to_word(hid, core_loop))
    return tuple(phi)


def random_word(rng: random.Random, rank: int, length: int) -> tuple:
    out = []
    while len(out) < length:
        x = (rng.randrange(rank), rng.choice((1, -1)))
        if out and out[-1] == (x[0], -x[1]):
            continue
        out.append(x)
    return tuple(out)


def conjugate_phi(phi: tuple, u: tuple) -> tuple:
    return tuple(word_mul(u, w, word_inverse(u)) for w in phi)


def perturb_core_edge(rng: random.Random, hidden: HiddenCopy, c: CoreGraph) -> HiddenCopy:
    """Change one host edge inside the hidden core by +-1/7, keeping it positive."""
    e = rng.choice(sorted(c.host_edges))
    a, b, length = hidden.graph.edges[e]
    delta = Fraction(1, 7) if length <= Fraction(1, 7) else rng.choice((Fraction(1, 7), Fraction(-1, 7)))
    edges = list(hidden.graph.edges)
    edges[e] = (a, b, length + delta)
    return HiddenCopy(MetricGraph(hidden.graph.num_vertices, edges), hidden.vertex_images, hidden.edge_images)


# -- experiments -----------------------------------------------------------

def roundtrip_trial(cfg: RunConfig, index: int) -> dict:
    """One seeded reconstruction round trip; the record says whether it certified."""
    rng = random.Random(f"{cfg.seed}:{index}")
    source = random_core_source(cfg, rng)
    hidden = hidden_copy(rng, source, max_num=cfg.max_num, max_den=cfg.max_den)
    src_core = compute_core(source)
    record = {"trial": index, "source": digest(source), "rank": src_core.rank}
    if src_core.is_empty:
        record.update({"hidden": digest(hidden.graph), "verdict": "certified", "certificate": 0})
        return record
    # the reconstruction must match the unperturbed space
    truth = compute_core(hidden.graph)
    if cfg.perturb:
        hidden = perturb_core_edge(rng, hidden, truth)
    hid_core = compute_core(hidden.graph)
    src_m, hid_m = build_marking(src_core), build_marking(hid_core)
    phi = transport_marking(src_m, hidden, hid_m)
    phi = conjugate_phi(phi, random_word(rng, hid_m.rank, rng.randint(0, 3)))
    record["hidden"] = digest(hidden.graph)
    record["phi"] = [format_word(w) for w in phi]
    oracle = make_oracle(hid_core, hid_m, phi)
    start = time.perf_counter()
    try:
        result = reconstruct_core(src_core.rank, src_core, src_m, oracle)
    except SpectrumInconsistent as exc:
        record.update({"verdict": "inconsistent", "certificate": 0, "reason": str(exc)})
    else:
        ok = certify_isometry(result, truth)
        record.update({"verdict": "certified" if ok else "uncertified", "certificate": len(result.certificate)})
    record["queries"] = oracle.queries
    if cfg.timing:
        record["seconds"] = round(time.perf_counter() - start, 6)
    return record


def cmd_roundtrip(cfg: RunConfig) -> dict:
    """Report over ``cfg.trials`` trials.  Honest runs pass when every trial certifies;
    perturbed runs pass when every trial is flagged."""
    cfg.check()
    trials = [roundtrip_trial(cfg, i) for i in range(cfg.trials)]
    if cfg.perturb:
        good = [t for t in trials if t["verdict"] != "certified"]
    else:
        good = [t for t in trials if t["verdict"] == "certified"]
    failed = [t["trial"] for t in trials if t not in good]
    return {
        "command": "roundtrip",
        "seed": cfg.seed,
        "perturb": cfg.perturb,
        "trials": trials,
        "passed": len(good),
        "failed": len(failed),
        "failed_trials": failed,
        "ok": not failed,
    }


def cmd_gen(cfg: RunConfig) -> MetricGraph:
    cfg.check()
    rng = random.Random(cfg.seed)
    return graph_for(cfg, rng)


def cmd_fuzz_distinguish(cfg: RunConfig, g1: MetricGraph, g2: MetricGraph) -> dict:
    """Search canonical classes for a length difference under the identity correspondence."""
    c1, c2 = compute_core(g1), compute_core(g2)
    report = {"command": "fuzz", "bound": cfg.word_bound, "rank": [c1.rank, c2.rank]}
    if c1.rank != c2.rank:
        report.update({"verdict": "different rank", "witness": None})
        return report
    if c1.rank == 0:
        report.update({"verdict": f"no witness up to bound {cfg.word_bound}", "witness": None})
        return report
    m1, m2 = build_marking(c1), build_marking(c2)
    for w in canonical_classes(c1.rank, cfg.word_bound):
        a, b = mls(m1, w), mls(m2, w)
        if a != b:
            report.update({"verdict": "witness", "witness": {"word": format_word(w), "lengths": [str(a), str(b)]}})
            return report
    report.update({"verdict": f"no witness up to bound {cfg.word_bound}", "witness": None})
    return report
