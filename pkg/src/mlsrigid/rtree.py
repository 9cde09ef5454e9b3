"""Balls in the universal cover of a core, deck translations, and translation lengths.

The cover is the tree of sheets: each sheet is a lift of the marking's
spanning tree, indexed by a reduced group word ``h``.  Lifted vertex
``(h, v)`` is joined to ``(h, u)`` by each tree edge ``uv``, and the lift of
generator edge ``i`` from ``a`` to ``b`` joins ``(h, a)`` to ``(h x_i, b)``.
The ball of radius ``R`` keeps the sheets with ``|h| <= R``; a group word
``g`` acts by ``(h, v) -> (g h, v)``.
"""
from __future__ import annotations

import enum
from collections import deque
from fractions import Fraction
from typing import Optional, Sequence

from .metric_graph import CoreGraph, format_length
from .reconstruct import NotApplicable
from .spectrum import Marking, format_word, word_mul, word_reduce

__all__ = [
    "ActionType",
    "CoverBall",
    "InsufficientRadius",
    "build_cover_ball",
    "translation_length",
    "translation_length_exhaustive",
    "axis_edges",
    "classify_action",
    "cover_ball_to_dot",
]


class ActionType(enum.Enum):
    TYPE_I = "TypeI"      # invariant line
    TYPE_II = "TypeII"    # every element fixes a point
    TYPE_III = "TypeIII"  # no invariant line or end

    def __str__(self) -> str:
        return self.value


class InsufficientRadius(ValueError):
    def __init__(self, required: int):
        super().__init__(f"radius must be at least {required}")
        self.required = required


class CoverBall:
    """Finite subtree of the universal cover; vertex ``k`` is ``labels[k] = (h, v)``."""

    def __init__(self, core: CoreGraph, marking: Marking, radius: int):
        self.core = core
        self.marking = marking
        self.radius = radius
        g = core.graph
        letters = [(i, e) for i in range(marking.rank) for e in (1, -1)]
        sheets = [()]
        frontier = [()]
        for _ in range(radius):
            nxt = []
            for h in frontier:
                for x in letters:
                    if h and h[-1] == (x[0], -x[1]):
                        continue
                    nxt.append(h + (x,))
            sheets.extend(nxt)
            frontier = nxt
        self.sheets = sheets
        self._sheet_index = {h: k for k, h in enumerate(sheets)}
        self._nv = g.num_vertices
        # sheet reached from sheet k by right multiplication with a letter
        self._next = []
        for h in sheets:
            row = {}
            for x in letters:
                t = h[:-1] if h and h[-1] == (x[0], -x[1]) else h + (x,)
                j = self._sheet_index.get(t)
                if j is not None:
                    row[x] = j
            self._next.append(row)
        # generator letter carried by each oriented core edge, if any
        self._letter = {}
        for i, e in enumerate(marking.generators):
            self._letter[(e, False)] = (i, 1)
            self._letter[(e, True)] = (i, -1)
        self.root = self.index((), marking.basepoint)
        self._parent, self._depth, self._steps = self._search()
        count = sum(1 for _ in self.edges())
        assert len(self._depth) == self.num_vertices, "cover ball is not connected"
        assert count == self.num_vertices - 1, "cover ball is not a tree"

    # -- vertices and adjacency --------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.sheets) * self._nv

    def index(self, h: Sequence, v: int) -> Optional[int]:
        k = self._sheet_index.get(tuple(h))
        return None if k is None else k * self._nv + v

    def label(self, k: int) -> tuple:
        return self.sheets[k // self._nv], k % self._nv

    @property
    def labels(self) -> list:
        return [self.label(k) for k in range(self.num_vertices)]

    def neighbors(self, k: int):
        """``(neighbor, length, core half-edge)`` for every ball edge at ``k``."""
        g = self.core.graph
        sheet, v = divmod(k, self._nv)
        for s in g.out_half_edges(v):
            x = self._letter.get(s)
            target = sheet if x is None else self._next[sheet].get(x)
            if target is not None:
                yield target * self._nv + g.head(s), g.length(s), s

    def edges(self):
        """Each ball edge once, as ``(k, j, length, core edge)``."""
        for k in range(self.num_vertices):
            for j, length, s in self.neighbors(k):
                if not s.backward:
                    yield k, j, length, s.edge

    def _search(self):
        parent = {self.root: None}
        depth = {self.root: Fraction(0)}
        steps = {self.root: 0}
        queue = deque([self.root])
        while queue:
            k = queue.popleft()
            for j, length, _ in self.neighbors(k):
                if j not in depth:
                    parent[j] = k
                    depth[j] = depth[k] + length
                    steps[j] = steps[k] + 1
                    queue.append(j)
        return parent, depth, steps

    def distance(self, a: int, b: int) -> Fraction:
        da, db = self._depth[a], self._depth[b]
        sa, sb = self._steps[a], self._steps[b]
        x, y = a, b
        while sa > sb:
            x = self._parent[x]
            sa -= 1
        while sb > sa:
            y = self._parent[y]
            sb -= 1
        while x != y:
            x, y = self._parent[x], self._parent[y]
        return da + db - 2 * self._depth[x]

    # -- deck action --------------------------------------------------------

    def act(self, g: Sequence, k: int) -> Optional[int]:
        """Image of vertex ``k`` under the deck translation ``g``, if it lies in the ball."""
        h, v = self.label(k)
        return self.index(word_mul(g, h), v)

    def deck_action(self, g: Sequence) -> dict:
        """The partial vertex map of ``g`` on the ball."""
        out = {}
        for k in range(self.num_vertices):
            j = self.act(g, k)
            if j is not None:
                out[k] = j
        return out


def build_cover_ball(c: CoreGraph, m: Marking, radius: int) -> CoverBall:
    if c.rank < 1:
        raise NotApplicable("the universal cover of an empty core is a point")
    if radius < 1:
        raise ValueError("radius must be at least 1")
    return CoverBall(c, m, radius)


def _displacement(b: CoverBall, g: tuple, k: int) -> Optional[Fraction]:
    j = b.act(g, k)
    return None if j is None else b.distance(k, j)


def _required_radius(g: tuple) -> int:
    return len(g) + 1


def translation_length(b: CoverBall, g: Sequence) -> Fraction:
    """Least displacement of ``g`` over the ball.

    Displacement is convex along geodesics of a tree and the points moved
    inside the ball form a subtree, so descent to a vertex with no better
    neighbor finds the minimum over vertices.  On an edge the displacement
    is a minimum of linear functions, so edge interiors never do better.
    """
    g = word_reduce(g)
    if b.radius < _required_radius(g):
        raise InsufficientRadius(_required_radius(g))
    if not g:
        return Fraction(0)
    k = b.root
    best = _displacement(b, g, k)
    while True:
        for j, _, _ in b.neighbors(k):
            d = _displacement(b, g, j)
            if d is not None and d < best:
                k, best = j, d
                break
        else:
            return best


def _edge_minimum(b: CoverBall, g: tuple, k: int, j: int, length: Fraction) -> Optional[Fraction]:
    """Exact minimum of ``d(x, g x)`` for ``x`` on the edge ``kj``."""
    gk, gj = b.act(g, k), b.act(g, j)
    if gk is None or gj is None:
        return None
    if {gk, gj} == {k, j}:
        return Fraction(0) if gk == k else length
    best = None
    for t in (Fraction(0), length):
        # x at distance t from k; gx at distance t from gk
        cands = [
            t + b.distance(k, gk) + t,
            t + b.distance(k, gj) + (length - t),
            (length - t) + b.distance(j, gk) + t,
            (length - t) + b.distance(j, gj) + (length - t),
        ]
        value = min(cands)
        best = value if best is None else min(best, value)
    return best


def translation_length_exhaustive(b: CoverBall, g: Sequence) -> Fraction:
    """Same minimum by scanning every vertex and edge of the ball."""
    g = word_reduce(g)
    if b.radius < _required_radius(g):
        raise InsufficientRadius(_required_radius(g))
    best = None
    for k in range(b.num_vertices):
        d = _displacement(b, g, k)
        if d is not None and (best is None or d < best):
            best = d
    for k, j, length, _ in b.edges():
        d = _edge_minimum(b, g, k, j, length)
        if d is not None and (best is None or d < best):
            best = d
    return best


def axis_edges(b: CoverBall, g: Sequence) -> list:
    """Ball edges both of whose ends are moved by exactly the translation length."""
    g = word_reduce(g)
    ell = translation_length(b, g)
    out = []
    for k, j, length, e in b.edges():
        if _displacement(b, g, k) == ell and _displacement(b, g, j) == ell:
            out.append((k, j, length, e))
    return out


def classify_action(c: CoreGraph, m: Optional[Marking] = None) -> ActionType:
    """Action type of pi_1 on the universal cover of its core.

    The trivial group fixes everything (type II); an infinite cyclic group
    translates the cover of a circle, a line (type I); a free group of rank
    at least 2 acts freely and cocompactly on a tree with infinitely many
    ends, every element is hyperbolic with its own axis, and no line or end
    is invariant (type III).
    """
    if c.rank == 0:
        return ActionType.TYPE_II
    if c.rank == 1:
        return ActionType.TYPE_I
    return ActionType.TYPE_III


def cover_ball_to_dot(b: CoverBall, name: str = "cover") -> str:
    lines = [f"graph {name} {{"]
    for k in range(b.num_vertices):
        h, v = b.label(k)
        attrs = f'label="{format_word(h) or "1"} | {v}"'
        if k == b.root:
            attrs += ", shape=doublecircle"
        lines.append(f"  {k} [{attrs}];")
    for k, j, length, e in b.edges():
        lines.append(f'  {k} -- {j} [label="e{e}: {format_length(length)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
