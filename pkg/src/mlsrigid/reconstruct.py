"""Recover the isometry type of a core from length queries alone.

The source core supplies the combinatorics and a marking; the oracle answers
lengths of conjugacy classes in the hidden space.  Each core edge length is
read off from a pair of loops that agree exactly along that edge, and every
pair of geodesically incident edges is checked against the length of a
triple product.  All arithmetic is exact, so any mismatch is reported as
:class:`SpectrumInconsistent`.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .metric_graph import CoreGraph, HalfEdge, MetricGraph, format_length
from .paths_words import (
    EdgePath,
    concat,
    cyclically_reduce,
    extend_to_geodesic_loop,
    inverse,
    is_cyclically_reduced,
    make_path,
    path_length,
    periodic_match,
    rotate,
)
from .spectrum import (
    Marking,
    SpectrumOracle,
    format_word,
    loop_to_word,
    parse_word,
    word_inverse,
    word_mul,
)

__all__ = [
    "SpectrumInconsistent",
    "NotApplicable",
    "DistinguishingPair",
    "IncidenceVerdict",
    "ReconstructionResult",
    "build_distinguishing_pair",
    "distinguishing_pairs",
    "all_distinguishing_pairs",
    "recover_length",
    "check_alpha_equals_beta",
    "check_incidence",
    "reconstruct_core",
    "certify_isometry",
    "isometric",
    "replay_certificate",
]


class SpectrumInconsistent(Exception):
    """The oracle cannot be the length function of a space with the source's combinatorics."""

    def __init__(self, message: str, entry: Optional[dict] = None):
        super().__init__(message)
        self.entry = entry


class NotApplicable(Exception):
    """Branch-point machinery does not apply (rank below 2)."""


@dataclass(frozen=True)
class DistinguishingPair:
    """Two loops starting along ``segment`` that agree there and nowhere longer.

    ``paths`` are the realized cyclically reduced loops based at the
    segment's tail; ``loop1``/``loop2`` are their words after conjugating by
    ``basepoint_conjugator`` (the tree path from the marking's basepoint).
    """

    segment: int
    backward: bool
    loop1: tuple
    loop2: tuple
    basepoint_conjugator: EdgePath
    paths: tuple = field(compare=False)

    @property
    def half_edge(self) -> HalfEdge:
        return HalfEdge(self.segment, self.backward)


@dataclass(frozen=True)
class IncidenceVerdict:
    incident: bool
    entry: dict


@dataclass(frozen=True)
class ReconstructionResult:
    core: CoreGraph
    vertex_map: dict
    certificate: list

    def to_dict(self) -> dict:
        g = self.core.graph
        return {
            "core": {
                "vertices": g.num_vertices,
                "edges": [{"a": a, "b": b, "len": format_length(x)} for a, b, x in g.edges],
                "branch_points": sorted(self.core.branch_points),
            },
            "vertex_map": {str(k): v for k, v in sorted(self.vertex_map.items())},
            "certificate": self.certificate,
        }


# -- loop geometry in the source core --------------------------------------

def _cyc_len(g: MetricGraph, loop: EdgePath) -> Fraction:
    gamma, _ = cyclically_reduce(loop)
    return path_length(g, gamma)


def _step(loop: EdgePath, i: int) -> HalfEdge:
    return loop.steps[i % len(loop.steps)]


def _forward_agreement(a: EdgePath, b: EdgePath) -> int:
    """Steps on which the periodic lifts of two loops agree, from the start."""
    limit = len(a) + len(b)
    k = 0
    while k < limit and _step(a, k) == _step(b, k):
        k += 1
    return k


def _is_distinguishing(g: MetricGraph, seg, a: EdgePath, b: EdgePath) -> bool:
    """Both loops leave along ``seg``, separate right after it and right before it.

    ``seg`` is a half-edge or a tuple of consecutive half-edges.
    """
    seg = (seg,) if isinstance(seg, HalfEdge) else tuple(seg)
    if not (is_cyclically_reduced(a) and is_cyclically_reduced(b)):
        return False
    k = len(seg)
    if tuple(_step(a, i) for i in range(k)) != seg or tuple(_step(b, i) for i in range(k)) != seg:
        return False
    if _forward_agreement(a, b) != k or a.steps[-1] == b.steps[-1]:
        return False
    seg_len = sum((g.length(h) for h in seg), Fraction(0))
    return _cyc_len(g, concat(inverse(a), b)) == path_length(g, a) + path_length(g, b) - 2 * seg_len


def _in_germs(g: MetricGraph, v: int) -> list:
    return sorted(h.reverse() for h in g.out_half_edges(v))


@lru_cache(maxsize=1 << 16)
def _loop_starting(c: CoreGraph, pattern: tuple, offset: int) -> EdgePath:
    """A geodesic loop containing ``pattern``, rebased at ``pattern[offset]``."""
    g = c.graph
    loop = extend_to_geodesic_loop(c, make_path(g, pattern))
    r = periodic_match(loop, pattern)
    return rotate(loop, r + offset)


def _pair_candidates(c: CoreGraph, s: HalfEdge):
    g = c.graph
    u, v = g.tail(s), g.head(s)
    outs = [h for h in g.out_half_edges(v) if h != s.reverse()]
    ins = [x for x in _in_germs(g, u) if x != s.reverse()]
    if u == v:
        # self-loop: the loop itself is one member; the other must leave the loop at both ends
        own = make_path(g, (s,))
        for x in ins:
            if x == s:
                continue
            for h in outs:
                if h == s:
                    continue
                yield own, _loop_starting(c, (x, s, h), 1)
        return
    for (x1, x2) in itertools.permutations(ins, 2):
        for (h1, h2) in itertools.permutations(outs, 2):
            if x1 > x2:
                continue
            yield _loop_starting(c, (x1, s, h1), 1), _loop_starting(c, (x2, s, h2), 1)


def _based_word(m: Marking, loop: EdgePath) -> tuple:
    t = m.tree_paths[loop.start]
    return loop_to_word(m, concat(t, loop, inverse(t)))


def _require_rank(c: CoreGraph) -> None:
    if c.rank < 2 or not c.branch_points:
        raise NotApplicable(f"core of rank {c.rank} has no branch points")


def distinguishing_pairs(c: CoreGraph, m: Marking, seg: int, backward: bool = False):
    """All distinguishing pairs reachable by the germ-driven construction, in order."""
    _require_rank(c)
    g = c.graph
    s = HalfEdge(seg, backward)
    seen = set()
    for a, b in _pair_candidates(c, s):
        if not _is_distinguishing(g, s, a, b):
            continue
        key = (a.steps, b.steps)
        if key in seen:
            continue
        seen.add(key)
        yield DistinguishingPair(seg, backward, _based_word(m, a), _based_word(m, b),
                                 m.tree_paths[a.start], (a, b))


def _loops_along(g: MetricGraph, s: HalfEdge, bound) -> list:
    """Cyclically reduced loops of length at most ``bound`` whose first step is ``s``."""
    found = []
    start = g.tail(s)
    bound = Fraction(bound)

    def walk(steps, v, length):
        if v == start and steps[-1] != s.reverse():
            found.append(make_path(g, tuple(steps)))
        for h in g.out_half_edges(v):
            if h != steps[-1].reverse() and length + g.length(h) <= bound:
                steps.append(h)
                walk(steps, g.head(h), length + g.length(h))
                steps.pop()

    if g.length(s) <= bound:
        walk([s], g.head(s), g.length(s))
    return found


def all_distinguishing_pairs(c: CoreGraph, m: Marking, seg: int, backward: bool = False, bound=8):
    """Every distinguishing pair among loops of length at most ``bound`` (unordered)."""
    _require_rank(c)
    g = c.graph
    s = HalfEdge(seg, backward)
    loops = _loops_along(g, s, bound)
    for a, b in itertools.combinations(loops, 2):
        if _is_distinguishing(g, s, a, b):
            yield DistinguishingPair(seg, backward, _based_word(m, a), _based_word(m, b),
                                     m.tree_paths[a.start], (a, b))


def build_distinguishing_pair(c: CoreGraph, m: Marking, seg: int, backward: bool = False) -> DistinguishingPair:
    """First distinguishing pair for the oriented core edge (least germs first)."""
    for pair in distinguishing_pairs(c, m, seg, backward):
        return pair
    raise AssertionError(f"no distinguishing pair found for edge {seg}")


# -- oracle identities -----------------------------------------------------

def _query(o: SpectrumOracle, w: tuple, log: Optional[list]) -> Fraction:
    value = o.query(w)
    if log is not None:
        log.append({"word": format_word(w), "value": format_length(value)})
    return value


def _recover(o: SpectrumOracle, d: DistinguishingPair, log=None) -> tuple:
    a = _query(o, d.loop1, log)
    b = _query(o, d.loop2, log)
    ab = _query(o, word_mul(word_inverse(d.loop1), d.loop2), log)
    return a, b, ab, (a + b - ab) / 2


def recover_length(o: SpectrumOracle, d: DistinguishingPair) -> Fraction:
    """Half of ``l(w1) + l(w2) - l(w1^-1 w2)``; must be positive."""
    log = []
    *_, length = _recover(o, d, log)
    if length <= 0:
        entry = {"identity": "length-recovery", "segment": d.segment, "queries": log,
                 "recovered": format_length(length)}
        raise SpectrumInconsistent(f"edge e{d.segment} recovers non-positive length {length}", entry)
    return length


def check_alpha_equals_beta(o: SpectrumOracle, d: DistinguishingPair) -> bool:
    """The product of the pair is strictly shorter than the two loops together."""
    a, b, ab, _ = _recover(o, d)
    return ab < a + b


def _first_pair(c: CoreGraph, m: Marking, s: HalfEdge) -> Optional[DistinguishingPair]:
    return next(distinguishing_pairs(c, m, s.edge, s.backward), None)


def _segment_length(o: SpectrumOracle, c: CoreGraph, m: Marking, s: HalfEdge, log: list) -> tuple:
    """``(length, strict)`` for one oriented segment.

    A self-loop at a vertex of degree 3 has no distinguishing pair: any
    second loop must leave and return through the one remaining germ, which
    cancels in the product.  Such a segment is itself a geodesic loop, so its
    length is read off directly and ``strict`` is ``None``.
    """
    d = _first_pair(c, m, s)
    if d is not None:
        a, b, ab, length = _recover(o, d, log)
        return length, ab < a + b
    if c.graph.tail(s) != c.graph.head(s):
        raise AssertionError(f"no distinguishing pair found for edge {s.edge}")
    loop = make_path(c.graph, (s,))
    return _query(o, _based_word(m, loop), log), None


def _common_loops(c: CoreGraph, s1: HalfEdge, s2: HalfEdge):
    """Loops ``s2 ... s1`` through the joint: the shortest first, then longer detours."""
    g = c.graph
    yield _loop_starting(c, (s1, s2), 1)
    ins = [y for y in _in_germs(g, g.tail(s1)) if y != s1.reverse()]
    outs = [h for h in g.out_half_edges(g.head(s2)) if h != s2.reverse()]
    for y, h in itertools.product(ins, outs):
        yield _loop_starting(c, (y, s1, s2, h), 2)


def _triple_companions(c: CoreGraph, s1: HalfEdge, s2: HalfEdge):
    """A common loop and companions for which the triple identity holds.

    Returns ``(gamma, gamma1, gamma2, wrap)`` with ``gamma = s2 ... s1``,
    ``gamma1 = ... s1`` and ``gamma2 = s2 ...``; the product is
    ``gamma2^-1 gamma gamma1^-1`` followed by ``wrap`` extra copies of
    ``gamma``.  At a vertex of degree 3 the unwrapped product always cancels
    further at its cyclic junction, hence the extra copy.
    """
    g = c.graph
    x = g.head(s1)
    base = -2 * g.length(s1) - 2 * g.length(s2)
    seen = set()
    for gamma in _common_loops(c, s1, s2):
        if gamma.steps in seen:
            continue
        seen.add(gamma.steps)
        after_s2 = _step(gamma, 1)
        before_s1 = _step(gamma, -2)
        outs2 = [h for h in g.out_half_edges(g.head(s2)) if h not in (s2.reverse(), after_s2)]
        ins2 = [y for y in _in_germs(g, x) if y not in (s2.reverse(), s1)]
        outs1 = [h for h in g.out_half_edges(x) if h not in (s1.reverse(), s2)]
        ins1 = [y for y in _in_germs(g, g.tail(s1)) if y not in (s1.reverse(), before_s1)]
        seconds = (
            gamma2 for gamma2 in (_loop_starting(c, (y2, s2, h2), 1) for y2, h2 in itertools.product(ins2, outs2))
            if _is_distinguishing(g, s2, gamma, gamma2)
        )
        firsts = []
        pending = iter(itertools.product(ins1, outs1))

        def companions1():
            yield from firsts
            for y1, h1 in pending:
                gamma1 = _loop_starting(c, (y1, s1, h1), 2)
                if _is_distinguishing(g, s1.reverse(), inverse(gamma1), inverse(gamma)):
                    firsts.append(gamma1)
                    yield gamma1

        for gamma2 in seconds:
            for gamma1 in companions1():
                for wrap in (0, 1):
                    triple = concat(inverse(gamma2), gamma, inverse(gamma1), *([gamma] * wrap))
                    predicted = (path_length(g, gamma1) + path_length(g, gamma2)
                                 + (1 + wrap) * path_length(g, gamma) + base)
                    if _cyc_len(g, triple) == predicted:
                        return gamma, gamma1, gamma2, wrap
    return None


def _path_pair(c: CoreGraph, seg: tuple):
    """Two loops agreeing exactly along the consecutive half-edges ``seg``."""
    g = c.graph
    u, v = g.tail(seg[0]), g.head(seg[-1])
    outs = [h for h in g.out_half_edges(v) if h != seg[-1].reverse()]
    ins = [y for y in _in_germs(g, u) if y != seg[0].reverse()]
    for y1, y2 in itertools.combinations(ins, 2):
        for h1, h2 in itertools.permutations(outs, 2):
            a = _loop_starting(c, (y1,) + seg + (h1,), 1)
            b = _loop_starting(c, (y2,) + seg + (h2,), 1)
            if _is_distinguishing(g, seg, a, b):
                return a, b
    return None


def _incidence(o: SpectrumOracle, c: CoreGraph, m: Marking, s1: HalfEdge, s2: HalfEdge) -> IncidenceVerdict:
    g = c.graph
    x = g.head(s1)
    log = []
    entry = {"identity": "incidence", "segments": [str(s1), str(s2)], "vertex": x, "queries": log}
    companions = _triple_companions(c, s1, s2)
    if companions is not None:
        # common loop gamma = s2 ... s1, based at x
        gamma, gamma1, gamma2, wrap = companions
        w, w1, w2 = _based_word(m, gamma), _based_word(m, gamma1), _based_word(m, gamma2)
        a = _query(o, w, log)
        a1 = _query(o, w1, log)
        a2 = _query(o, w2, log)
        len1 = (a1 + a - _query(o, word_mul(w1, word_inverse(w)), log)) / 2
        len2 = (a + a2 - _query(o, word_mul(word_inverse(w), w2), log)) / 2
        observed = _query(o, word_mul(word_inverse(w2), w, word_inverse(w1), *([w] * wrap)), log)
        predicted = a1 + a2 + (1 + wrap) * a - 2 * len1 - 2 * len2
        entry["form"] = "triple" if wrap == 0 else "wrapped triple"
    else:
        # no companion triple avoids extra cancellation: compare the joined segment instead
        pair = _path_pair(c, (s1, s2))
        if pair is None:
            raise AssertionError(f"no loops agree exactly along {s1} {s2}")
        len1 = _segment_length(o, c, m, s1, log)[0]
        len2 = _segment_length(o, c, m, s2, log)[0]
        joined = DistinguishingPair(s1.edge, s1.backward, _based_word(m, pair[0]), _based_word(m, pair[1]),
                                    m.tree_paths[pair[0].start], pair)
        *_, observed = _recover(o, joined, log)
        predicted = len1 + len2
        entry["form"] = "additive"
    entry.update({
        "lengths": [format_length(len1), format_length(len2)],
        "predicted": format_length(predicted),
        "observed": format_length(observed),
        "offset": format_length((observed - predicted) / 2),
        "incident": observed == predicted and len1 > 0 and len2 > 0,
    })
    return IncidenceVerdict(entry["incident"], entry)


def _orient(g: MetricGraph, seg: int, v: int, arriving: bool) -> HalfEdge:
    for h in (HalfEdge(seg, False), HalfEdge(seg, True)):
        if (g.head(h) if arriving else g.tail(h)) == v:
            return h
    raise ValueError(f"edge e{seg} is not incident to vertex {v}")


def check_incidence(o: SpectrumOracle, c: CoreGraph, m: Marking, seg1, seg2, shared_vertex: int) -> IncidenceVerdict:
    """Test that the images of two geodesically incident core edges still meet end to end.

    ``seg1`` is oriented to arrive at ``shared_vertex`` and ``seg2`` to leave
    it (pass :class:`HalfEdge` values to pick orientations explicitly).  The
    verdict compares the length of ``w2^-1 w w1^-1`` with the value forced
    when the two image segments are adjacent on the image of the common loop.
    """
    _require_rank(c)
    g = c.graph
    s1 = seg1 if isinstance(seg1, HalfEdge) else _orient(g, seg1, shared_vertex, True)
    s2 = seg2 if isinstance(seg2, HalfEdge) else _orient(g, seg2, shared_vertex, False)
    if g.head(s1) != shared_vertex or g.tail(s2) != shared_vertex:
        raise ValueError("segments do not meet at the shared vertex")
    if s2 == s1.reverse():
        raise ValueError("the concatenation backtracks; segments are not geodesically incident")
    return _incidence(o, c, m, s1, s2)


# -- assembly --------------------------------------------------------------

def reconstruct_core(rank: int, source_core: CoreGraph, m: Marking, o: SpectrumOracle) -> ReconstructionResult:
    """Rebuild the hidden core: source combinatorics, lengths from the oracle.

    Raises :class:`SpectrumInconsistent` on the first failed identity.
    """
    if o.rank != rank:
        raise ValueError(f"oracle has rank {o.rank}, expected {rank}")
    cert = []
    if rank == 0:
        return ReconstructionResult(CoreGraph.of(MetricGraph(0)), {}, cert)
    if source_core.rank != rank or m.rank != rank:
        raise ValueError("rank does not match the source core and marking")
    if rank == 1:
        log = []
        length = _query(o, ((0, 1),), log)
        entry = {"identity": "circle", "queries": log, "recovered": format_length(length)}
        cert.append(entry)
        if length <= 0:
            raise SpectrumInconsistent("generator of a rank-1 space has non-positive length", entry)
        return ReconstructionResult(CoreGraph.of(MetricGraph(1, [(0, 0, length)])), {0: 0}, cert)

    g = source_core.graph
    lengths = []
    for e in range(g.num_edges):
        per_orientation = []
        for backward in (False, True):
            s = HalfEdge(e, backward)
            log = []
            length, strict = _segment_length(o, source_core, m, s, log)
            entry = {
                "identity": "length-recovery" if strict is not None else "loop-length",
                "segment": str(s),
                "queries": log,
                "recovered": format_length(length),
            }
            if strict is not None:
                entry["strict"] = strict
            cert.append(entry)
            if length <= 0:
                raise SpectrumInconsistent(f"edge {s} recovers non-positive length", entry)
            if strict is False:
                raise SpectrumInconsistent(f"images of the pair for {s} are not based together", entry)
            per_orientation.append(length)
        if per_orientation[0] != per_orientation[1]:
            raise SpectrumInconsistent(f"edge e{e} recovers different lengths in its two orientations", cert[-1])
        lengths.append(per_orientation[0])

    for x in range(g.num_vertices):
        germs = g.out_half_edges(x)
        for h, k in itertools.combinations(germs, 2):
            if h.edge == k.edge:
                continue
            verdict = _incidence(o, source_core, m, h.reverse(), k)
            entry = verdict.entry
            cert.append(entry)
            if not verdict.incident:
                raise SpectrumInconsistent(f"edges {h.reverse()} and {k} are not incident in the image", entry)
            if [Fraction(v) for v in entry["lengths"]] != [lengths[h.edge], lengths[k.edge]]:
                raise SpectrumInconsistent("incidence loops recover different edge lengths", entry)

    rebuilt = MetricGraph(g.num_vertices, [(a, b, lengths[e]) for e, (a, b, _) in enumerate(g.edges)])
    vertex_map = {v: v for v in sorted(source_core.branch_points)}
    return ReconstructionResult(CoreGraph.of(rebuilt), vertex_map, cert)


def replay_certificate(o: SpectrumOracle, certificate: list) -> bool:
    """Re-query every recorded word and compare with the recorded value."""
    for entry in certificate:
        for q in entry.get("queries", ()):
            if o.query(parse_word(q["word"])) != Fraction(q["value"]):
                return False
    return True


# -- isometry test ---------------------------------------------------------

def _signature(g: MetricGraph, v: int) -> tuple:
    loops = sorted(x for a, b, x in g.edges if a == b == v)
    incident = sorted(g.length(h) for h in g.out_half_edges(v))
    return (g.degree(v), tuple(incident), tuple(loops))


def _between(g: MetricGraph) -> dict:
    table = {}
    for a, b, x in g.edges:
        table.setdefault((a, b), []).append(x)
        if a != b:
            table.setdefault((b, a), []).append(x)
    return {k: Counter(v) for k, v in table.items()}


def isometric(g1: MetricGraph, g2: MetricGraph) -> bool:
    """Exact length-preserving multigraph isomorphism, by backtracking."""
    if (g1.num_vertices, g1.num_edges) != (g2.num_vertices, g2.num_edges):
        return False
    if sorted(x for *_, x in g1.edges) != sorted(x for *_, x in g2.edges):
        return False
    sig1 = [_signature(g1, v) for v in range(g1.num_vertices)]
    sig2 = [_signature(g2, v) for v in range(g2.num_vertices)]
    if sorted(sig1) != sorted(sig2):
        return False
    b1, b2 = _between(g1), _between(g2)
    empty = Counter()
    order = sorted(range(g1.num_vertices), key=lambda v: (sum(1 for w in sig1 if w == sig1[v]), -g1.degree(v)))
    image = {}
    used = set()

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in range(g2.num_vertices):
            if w in used or sig2[w] != sig1[v]:
                continue
            if b1.get((v, v), empty) != b2.get((w, w), empty):
                continue
            if any(b1.get((v, u), empty) != b2.get((w, image[u]), empty) for u in image):
                continue
            image[v] = w
            used.add(w)
            if extend(i + 1):
                return True
            del image[v]
            used.discard(w)
        return False

    return extend(0)


def certify_isometry(r, truth: CoreGraph) -> bool:
    core = r.core if isinstance(r, ReconstructionResult) else r
    return isometric(core.graph, truth.graph)
