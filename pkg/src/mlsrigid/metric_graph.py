"""Finite metric multigraphs, their path metric, and the pi_1-hull (core).

All lengths are :class:`fractions.Fraction` values.  Self-loops and parallel
edges are allowed; a self-loop contributes 2 to the degree of its vertex.
"""
from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence

__all__ = [
    "GraphFormatError",
    "HalfEdge",
    "MetricGraph",
    "GraphPoint",
    "CoreGraph",
    "as_length",
    "format_length",
    "distance",
    "minimizer_edges",
    "compute_core",
    "is_branch_point",
    "graph_from_json",
    "graph_to_json",
    "graph_to_dict",
    "to_dot",
]


class GraphFormatError(ValueError):
    """Malformed graph input.  ``position`` locates the problem in the input."""

    def __init__(self, message: str, position: str = ""):
        self.position = position
        super().__init__(f"{position}: {message}" if position else message)


def as_length(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Strings may be ``"p/q"`` or decimal (``"1.25"``).  Floats are read through
    their shortest decimal representation, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not lengths")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a length")


def format_length(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class HalfEdge(NamedTuple):
    """An oriented edge.  Ordering is by ``(edge, backward)``, Forward first."""

    edge: int
    backward: bool = False

    def reverse(self) -> "HalfEdge":
        return HalfEdge(self.edge, not self.backward)

    def __str__(self) -> str:
        return f"e{self.edge}'" if self.backward else f"e{self.edge}"

    def __repr__(self) -> str:
        return str(self)


_graph_ids = itertools.count()


class MetricGraph:
    """Connected finite multigraph with positive rational edge lengths.

    Immutable once built.  ``edges`` is a sequence of ``(a, b, length)``; edge
    ``e`` runs Forward from ``a`` to ``b``.  The graph with zero vertices is
    allowed and stands for the empty space (the core of a tree).
    """

    def __init__(self, num_vertices: int, edges: Iterable[Sequence] = ()):
        if num_vertices < 0:
            raise ValueError("negative vertex count")
        built = []
        for e, (a, b, length) in enumerate(edges):
            if not (0 <= a < num_vertices and 0 <= b < num_vertices):
                raise ValueError(f"edge {e} has an endpoint outside 0..{num_vertices - 1}")
            length = as_length(length)
            if length <= 0:
                raise ValueError(f"edge {e} has non-positive length {length}")
            built.append((int(a), int(b), length))
        self._n = num_vertices
        self._edges = tuple(built)
        out = [[] for _ in range(num_vertices)]
        for e, (a, b, _) in enumerate(self._edges):
            out[a].append(HalfEdge(e, False))
            out[b].append(HalfEdge(e, True))
        self._out = tuple(tuple(sorted(hs)) for hs in out)
        self._token = next(_graph_ids)
        if num_vertices and not self._connected():
            raise ValueError("graph is not connected")

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for h in self._out[v]:
                w = self.head(h)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self._n

    # -- combinatorics -----------------------------------------------------
    @property
    def num_vertices(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> tuple:
        return self._edges

    @property
    def rank(self) -> int:
        """Rank of the (free) fundamental group, ``E - V + 1``."""
        if self._n == 0:
            return 0
        return len(self._edges) - self._n + 1

    def length(self, e) -> Fraction:
        if isinstance(e, HalfEdge):
            e = e.edge
        return self._edges[e][2]

    def tail(self, h: HalfEdge) -> int:
        a, b, _ = self._edges[h.edge]
        return b if h.backward else a

    def head(self, h: HalfEdge) -> int:
        a, b, _ = self._edges[h.edge]
        return a if h.backward else b

    def out_half_edges(self, v: int) -> tuple:
        """Half-edges with tail ``v``, sorted."""
        return self._out[v]

    def degree(self, v: int) -> int:
        return len(self._out[v])

    def half_edges(self):
        for e in range(len(self._edges)):
            yield HalfEdge(e, False)
            yield HalfEdge(e, True)

    # -- points and metric -------------------------------------------------
    def vertex_point(self, v: int) -> "GraphPoint":
        if not 0 <= v < self._n:
            raise ValueError(f"no vertex {v}")
        return GraphPoint(self._token, v, None, Fraction(0))

    def point(self, h: HalfEdge, offset) -> "GraphPoint":
        """The point at distance ``offset`` from ``tail(h)`` along ``h``."""
        offset = as_length(offset)
        length = self.length(h)
        if not 0 <= offset <= length:
            raise ValueError(f"offset {offset} outside [0, {length}]")
        if offset == 0:
            return self.vertex_point(self.tail(h))
        if offset == length:
            return self.vertex_point(self.head(h))
        if h.backward:
            offset = length - offset
        return GraphPoint(self._token, None, h.edge, offset)

    def owns(self, p: "GraphPoint") -> bool:
        return p.graph_token == self._token

    @cached_property
    def _vertex_distances(self) -> tuple:
        return tuple(self._dijkstra(s) for s in range(self._n))

    def _dijkstra(self, source: int) -> tuple:
        dist = [None] * self._n
        heap = [(Fraction(0), source)]
        while heap:
            d, v = heapq.heappop(heap)
            if dist[v] is not None:
                continue
            dist[v] = d
            for h in self._out[v]:
                w = self.head(h)
                if dist[w] is None:
                    heapq.heappush(heap, (d + self.length(h), w))
        return tuple(dist)

    def vertex_distance(self, u: int, v: int) -> Fraction:
        return self._vertex_distances[u][v]

    def _anchors(self, p: "GraphPoint"):
        if p.vertex is not None:
            return ((p.vertex, Fraction(0)),)
        a, b, length = self._edges[p.edge]
        return ((a, p.offset), (b, length - p.offset))

    def __repr__(self) -> str:
        return f"MetricGraph({self._n}, {[(a, b, format_length(x)) for a, b, x in self._edges]})"


@dataclass(frozen=True)
class GraphPoint:
    """A point of a metric graph in canonical form.

    Vertices are stored as ``vertex``; interior points as ``(edge, offset)``
    measured from the Forward tail.  Build these with
    :meth:`MetricGraph.vertex_point` and :meth:`MetricGraph.point`.
    """

    graph_token: int
    vertex: Optional[int]
    edge: Optional[int]
    offset: Fraction


def _check_owner(g: MetricGraph, *points: GraphPoint) -> None:
    for p in points:
        if not g.owns(p):
            raise ValueError("point belongs to a different graph instance")


def distance(g: MetricGraph, a: GraphPoint, b: GraphPoint) -> Fraction:
    """Path-metric distance between two points of ``g``."""
    _check_owner(g, a, b)
    if a == b:
        return Fraction(0)
    best = None
    if a.edge is not None and a.edge == b.edge:
        best = abs(a.offset - b.offset)
    for u, du in g._anchors(a):
        for v, dv in g._anchors(b):
            d = du + g.vertex_distance(u, v) + dv
            if best is None or d < best:
                best = d
    return best


def minimizer_edges(g: MetricGraph, a: GraphPoint, b: GraphPoint) -> frozenset:
    """Edges whose interior meets at least one distance minimizer from a to b.

    An edge not containing ``a`` or ``b`` in its interior is met by a
    minimizer only if the minimizer crosses it end to end.
    """
    _check_owner(g, a, b)
    total = distance(g, a, b)
    used = set()
    for e, (u, v, length) in enumerate(g.edges):
        if e in (a.edge, b.edge):
            used.add(e)
            continue
        pu, pv = g.vertex_point(u), g.vertex_point(v)
        if (distance(g, a, pu) + length + distance(g, pv, b) == total
                or distance(g, a, pv) + length + distance(g, pu, b) == total):
            used.add(e)
    return frozenset(used)


@dataclass(frozen=True)
class CoreGraph:
    """The pi_1-hull of a host graph, with degree-2 vertices suppressed.

    ``vertex_map[i]`` is the host vertex of core vertex ``i``; ``edge_map[e]``
    is the host half-edge chain traversed by the Forward orientation of core
    edge ``e``.
    """

    graph: MetricGraph
    host: MetricGraph
    vertex_map: tuple
    edge_map: tuple
    branch_points: frozenset

    @classmethod
    def of(cls, graph: MetricGraph) -> "CoreGraph":
        """Wrap a graph that is its own core (every vertex degree >= 2)."""
        return cls(
            graph=graph,
            host=graph,
            vertex_map=tuple(range(graph.num_vertices)),
            edge_map=tuple((HalfEdge(e),) for e in range(graph.num_edges)),
            branch_points=frozenset(v for v in range(graph.num_vertices) if graph.degree(v) >= 3),
        )

    @property
    def is_empty(self) -> bool:
        return self.graph.num_vertices == 0

    @property
    def rank(self) -> int:
        return self.graph.rank

    @cached_property
    def host_edges(self) -> frozenset:
        return frozenset(h.edge for chain in self.edge_map for h in chain)

    @cached_property
    def host_vertices(self) -> frozenset:
        vs = set(self.vertex_map)
        for chain in self.edge_map:
            vs.update(self.host.head(h) for h in chain)
        return frozenset(vs)

    def to_host_point(self, h: HalfEdge, offset) -> GraphPoint:
        """Host point at distance ``offset`` along core half-edge ``h``."""
        offset = as_length(offset)
        if not 0 <= offset <= self.graph.length(h):
            raise ValueError("offset outside the core edge")
        chain = self.edge_map[h.edge]
        if h.backward:
            chain = tuple(x.reverse() for x in reversed(chain))
        for x in chain:
            length = self.host.length(x)
            if offset <= length:
                return self.host.point(x, offset)
            offset -= length
        raise AssertionError("unreachable")

    def to_host_steps(self, steps: Iterable[HalfEdge]) -> tuple:
        out = []
        for h in steps:
            chain = self.edge_map[h.edge]
            if h.backward:
                chain = tuple(x.reverse() for x in reversed(chain))
            out.extend(chain)
        return tuple(out)

    @cached_property
    def _chain_index(self) -> dict:
        index = {}
        for e, chain in enumerate(self.edge_map):
            index[(self.host.tail(chain[0]), chain[0])] = HalfEdge(e, False)
            last = chain[-1].reverse()
            index[(self.host.tail(last), last)] = HalfEdge(e, True)
        return index

    def from_host_steps(self, steps: Sequence[HalfEdge]) -> tuple:
        """Translate a reduced host path between core vertices into core steps.

        The path must lie in the core image; a reduced path there can only
        turn at core vertices, so it splits into whole chains.
        """
        out = []
        i = 0
        host = self.host
        while i < len(steps):
            key = (host.tail(steps[i]), steps[i])
            if key not in self._chain_index:
                raise ValueError(f"host step {steps[i]} does not start a core edge")
            h = self._chain_index[key]
            chain = self.edge_map[h.edge]
            if h.backward:
                chain = tuple(x.reverse() for x in reversed(chain))
            if tuple(steps[i:i + len(chain)]) != chain:
                raise ValueError("host path leaves the core or stops inside a core edge")
            out.append(h)
            i += len(chain)
        return tuple(out)


def _host_cycle_core(g: MetricGraph, alive: list) -> CoreGraph:
    start = min(g.tail(HalfEdge(e)) for e in range(g.num_edges) if alive[e])
    start = min(start, min(g.head(HalfEdge(e)) for e in range(g.num_edges) if alive[e]))
    first = min(h for h in g.out_half_edges(start) if alive[h.edge])
    chain = [first]
    cur = g.head(first)
    while cur != start:
        nxt = [h for h in g.out_half_edges(cur) if alive[h.edge] and h != chain[-1].reverse()]
        chain.append(nxt[0])
        cur = g.head(nxt[0])
    total = sum((g.length(h) for h in chain), Fraction(0))
    core = MetricGraph(1, [(0, 0, total)])
    return CoreGraph(core, g, (start,), (tuple(chain),), frozenset())


def compute_core(g: MetricGraph) -> CoreGraph:
    """Prune degree-1 vertices, then suppress chains of degree-2 vertices."""
    n = g.num_vertices
    alive_edge = [True] * g.num_edges
    deg = [g.degree(v) for v in range(n)]
    stack = [v for v in range(n) if deg[v] == 1]
    while stack:
        v = stack.pop()
        if deg[v] != 1:
            continue
        h = next(h for h in g.out_half_edges(v) if alive_edge[h.edge])
        alive_edge[h.edge] = False
        deg[v] = 0
        w = g.head(h)
        deg[w] -= 1
        if deg[w] == 1:
            stack.append(w)
    if not any(alive_edge):
        return CoreGraph(MetricGraph(0), g, (), (), frozenset())

    branch = [v for v in range(n) if deg[v] >= 3]
    if not branch:
        return _host_cycle_core(g, alive_edge)

    is_branch = set(branch)
    chains = set()
    for b in branch:
        for h in g.out_half_edges(b):
            if not alive_edge[h.edge]:
                continue
            chain = [h]
            cur = g.head(h)
            while cur not in is_branch:
                chain.append(next(x for x in g.out_half_edges(cur)
                                  if alive_edge[x.edge] and x != chain[-1].reverse()))
                cur = g.head(chain[-1])
            chain = tuple(chain)
            rev = tuple(x.reverse() for x in reversed(chain))
            chains.add(min(chain, rev))
    index = {v: i for i, v in enumerate(branch)}
    ordered = sorted(chains)
    edges = [
        (index[g.tail(c[0])], index[g.head(c[-1])], sum((g.length(x) for x in c), Fraction(0)))
        for c in ordered
    ]
    core = MetricGraph(len(branch), edges)
    return CoreGraph(core, g, tuple(branch), tuple(ordered), frozenset(range(len(branch))))


def is_branch_point(c: CoreGraph, v: int) -> bool:
    if not 0 <= v < c.graph.num_vertices:
        raise ValueError(f"{v} is not a core vertex")
    return c.graph.degree(v) >= 3


# -- serialization ---------------------------------------------------------

def graph_to_dict(g: MetricGraph) -> dict:
    return {
        "vertices": g.num_vertices,
        "edges": [{"a": a, "b": b, "len": format_length(x)} for a, b, x in g.edges],
    }


def graph_to_json(g: MetricGraph, indent: Optional[int] = None) -> str:
    return json.dumps(graph_to_dict(g), indent=indent)


def graph_from_dict(data, where: str = "") -> MetricGraph:
    if not isinstance(data, dict):
        raise GraphFormatError("expected an object", where or "/")
    n = data.get("vertices")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise GraphFormatError("'vertices' must be a positive integer", f"{where}/vertices")
    edges = data.get("edges")
    if not isinstance(edges, list):
        raise GraphFormatError("'edges' must be a list", f"{where}/edges")
    parsed = []
    for i, item in enumerate(edges):
        pos = f"{where}/edges/{i}"
        if not isinstance(item, dict):
            raise GraphFormatError("edge must be an object", pos)
        ends = []
        for key in ("a", "b"):
            v = item.get(key)
            if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < n:
                raise GraphFormatError(f"'{key}' must be a vertex index in 0..{n - 1}", f"{pos}/{key}")
            ends.append(v)
        raw = item.get("len")
        if raw is None or isinstance(raw, bool):
            raise GraphFormatError("missing 'len'", f"{pos}/len")
        try:
            length = as_length(raw)
        except (TypeError, ValueError, ZeroDivisionError):
            raise GraphFormatError(f"unreadable length {raw!r}", f"{pos}/len") from None
        if length <= 0:
            raise GraphFormatError("length must be positive", f"{pos}/len")
        parsed.append((ends[0], ends[1], length))
    try:
        return MetricGraph(n, parsed)
    except ValueError as exc:
        raise GraphFormatError(str(exc), where or "/") from None


def graph_from_json(text: str) -> MetricGraph:
    """Parse the JSON graph format; numbers are read exactly."""
    try:
        data = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return graph_from_dict(data)


def to_dot(g: MetricGraph, branch_points: Iterable[int] = (), name: str = "G") -> str:
    """Graphviz source; edge labels carry lengths, branch points are doubled circles."""
    marked = set(branch_points)
    lines = [f"graph {name} {{"]
    for v in range(g.num_vertices):
        attrs = ' [shape=doublecircle, color="red", branch=true]' if v in marked else " [shape=circle]"
        lines.append(f"  {v}{attrs};")
    for e, (a, b, x) in enumerate(g.edges):
        lines.append(f'  {a} -- {b} [label="e{e}: {format_length(x)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
