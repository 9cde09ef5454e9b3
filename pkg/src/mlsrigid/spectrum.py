"""Markings of pi_1 by free generators and the marked length spectrum.

A group word is a tuple of ``(generator_index, exponent)`` letters with
exponent ``+1`` or ``-1``; products are read left to right in traversal
order.  The text form is ``"g0 g1' g0"`` (apostrophe = inverse).
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .metric_graph import CoreGraph, HalfEdge, as_length, format_length
from .paths_words import (
    EdgePath,
    concat,
    cyclically_reduce,
    inverse,
    make_path,
    path_length,
    reduce,
)

__all__ = [
    "INFINITE",
    "RankZeroError",
    "Marking",
    "build_marking",
    "parse_word",
    "format_word",
    "word_reduce",
    "word_inverse",
    "word_mul",
    "word_power",
    "word_cyclic_reduce",
    "class_key",
    "word_to_loop",
    "loop_to_word",
    "mls",
    "SpectrumOracle",
    "make_oracle",
    "canonical_classes",
    "spectrum_dump",
    "oracle_from_dump",
    "MissingClassError",
]


class _Infinite:
    """Length of a free homotopy class with no rectifiable representative.

    Part of the codomain of the length function for general spaces; finite
    metric graphs never produce it.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"


INFINITE = _Infinite()


class RankZeroError(ValueError):
    """The space has trivial fundamental group, so there is nothing to mark."""


# -- group words -----------------------------------------------------------

def parse_word(text: str) -> tuple:
    letters = []
    for pos, token in enumerate(text.split()):
        exp = -1 if token.endswith("'") else 1
        body = token[:-1] if exp < 0 else token
        if not (body.startswith("g") and body[1:].isdigit()):
            raise ValueError(f"token {pos} ({token!r}) is not of the form gK or gK'")
        letters.append((int(body[1:]), exp))
    return tuple(letters)


def format_word(w: Sequence) -> str:
    return " ".join(f"g{i}" if e > 0 else f"g{i}'" for i, e in w)


def word_reduce(w: Iterable) -> tuple:
    out = []
    for i, e in w:
        if out and out[-1] == (i, -e):
            out.pop()
        else:
            out.append((i, e))
    return tuple(out)


def word_inverse(w: Sequence) -> tuple:
    return tuple((i, -e) for i, e in reversed(w))


def word_mul(*words: Sequence) -> tuple:
    return word_reduce(x for w in words for x in w)


def word_power(w: Sequence, n: int) -> tuple:
    base = w if n >= 0 else word_inverse(w)
    return word_reduce(tuple(base) * abs(n))


def word_cyclic_reduce(w: Sequence) -> tuple:
    w = word_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == (w[j][0], -w[j][1]):
        i += 1
        j -= 1
    return w[i:j + 1]


def _letter_key(x):
    return (x[0], x[1] < 0)


def class_key(w: Sequence) -> tuple:
    """Canonical conjugacy-class representative: least rotation of the cyclic reduction."""
    c = word_cyclic_reduce(w)
    if not c:
        return c
    rotations = [c[k:] + c[:k] for k in range(len(c))]
    return min(rotations, key=lambda r: [_letter_key(x) for x in r])


# -- markings --------------------------------------------------------------

@dataclass(frozen=True)
class Marking:
    """Spanning tree and free generators for pi_1 of a core at ``basepoint``.

    ``tree_paths[v]`` is the tree path from the basepoint to ``v``; the loop
    of generator ``i`` is tree path, Forward edge ``generators[i]``, tree path back.
    """

    core: CoreGraph
    basepoint: int
    tree_edges: frozenset
    generators: tuple
    generator_loops: tuple
    tree_paths: tuple

    @property
    def rank(self) -> int:
        return len(self.generators)

    def generator_index(self, edge: int) -> Optional[int]:
        try:
            return self.generators.index(edge)
        except ValueError:
            return None


def build_marking(c: CoreGraph) -> Marking:
    """Shortest-path tree from vertex 0, least edge id on ties; generators by edge id."""
    if c.is_empty:
        raise RankZeroError("the core is empty (rank 0); no marking exists")
    g = c.graph
    base = 0
    dist = {}
    heap = [(Fraction(0), base)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in dist:
            continue
        dist[v] = d
        for h in g.out_half_edges(v):
            w = g.head(h)
            if w not in dist:
                heapq.heappush(heap, (d + g.length(h), w))
    parent = {}
    for v in range(g.num_vertices):
        if v == base:
            continue
        parent[v] = min(
            h for u in range(g.num_vertices) for h in g.out_half_edges(u)
            if g.head(h) == v and u != v and dist[u] + g.length(h) == dist[v]
        )
    tree = frozenset(h.edge for h in parent.values())
    paths = []
    for v in range(g.num_vertices):
        steps = []
        u = v
        while u != base:
            steps.append(parent[u])
            u = g.tail(parent[u])
        paths.append(make_path(g, tuple(reversed(steps)), base))
    gens = tuple(e for e in range(g.num_edges) if e not in tree)
    loops = []
    for e in gens:
        h = HalfEdge(e)
        edge = make_path(g, (h,))
        loops.append(concat(paths[g.tail(h)], edge, inverse(paths[g.head(h)])))
    return Marking(c, base, tree, gens, tuple(loops), tuple(paths))


def word_to_loop(m: Marking, w: Sequence) -> EdgePath:
    """Reduced based loop realizing ``w``."""
    loop = EdgePath((), (m.basepoint,))
    pieces = [loop]
    for i, e in w:
        if not 0 <= i < m.rank:
            raise IndexError(f"generator g{i} out of range for rank {m.rank}")
        gl = m.generator_loops[i]
        pieces.append(gl if e > 0 else inverse(gl))
    return reduce(concat(*pieces))


def loop_to_word(m: Marking, loop: EdgePath) -> tuple:
    """Group word of a loop at the basepoint: read off the non-tree edges crossed."""
    if loop.start != m.basepoint or not loop.is_closed:
        raise ValueError("loop must be closed and based at the marking's basepoint")
    out = []
    for h in loop.steps:
        i = m.generator_index(h.edge)
        if i is not None:
            out.append((i, -1 if h.backward else 1))
    return word_reduce(out)


def mls(m: Marking, w: Sequence) -> Fraction:
    """Length of the geodesic loop in the free homotopy class of ``w``."""
    gamma, _ = cyclically_reduce(word_to_loop(m, w))
    return path_length(m.core.graph, gamma)


# -- oracles ---------------------------------------------------------------

class SpectrumOracle:
    """Opaque length function on a free group: ``query(word) -> Fraction``."""

    __slots__ = ("_answer", "rank", "queries")

    def __init__(self, answer: Callable[[tuple], Fraction], rank: int):
        self._answer = answer
        self.rank = rank
        self.queries = 0

    def query(self, w: Sequence) -> Fraction:
        w = word_reduce(w)
        for i, _ in w:
            if not 0 <= i < self.rank:
                raise IndexError(f"generator g{i} out of range for rank {self.rank}")
        self.queries += 1
        if not w:
            return Fraction(0)
        value = self._answer(w)
        return value if value is INFINITE else as_length(value)

    __call__ = query


def _substitute(phi: Sequence, w: Sequence) -> tuple:
    return word_mul(*(phi[i] if e > 0 else word_inverse(phi[i]) for i, e in w))


def _phi_table(phi, rank: Optional[int]) -> tuple:
    if isinstance(phi, Mapping):
        n = len(phi) if rank is None else rank
        missing = [i for i in range(n) if i not in phi]
        if missing:
            raise ValueError(f"phi does not define g{missing[0]}")
        return tuple(tuple(phi[i]) for i in range(n))
    return tuple(tuple(x) for x in phi)


def make_oracle(c: CoreGraph, m: Marking, phi=None) -> SpectrumOracle:
    """Oracle ``w -> mls(m, phi(w))``.

    ``phi`` maps each generator of the caller's free group to a word over
    ``m``'s generators (a dict or sequence); ``None`` means the identity.
    Whether ``phi`` is an isomorphism is not checked.
    """
    if phi is None:
        table = tuple(((i, 1),) for i in range(m.rank))
    else:
        table = _phi_table(phi, None)
    for img in table:
        for i, _ in img:
            if not 0 <= i < m.rank:
                raise IndexError(f"phi mentions g{i} beyond rank {m.rank}")
    return SpectrumOracle(lambda w: mls(m, _substitute(table, w)), len(table))


def canonical_classes(rank: int, bound: int) -> list:
    """Canonical nontrivial conjugacy classes of word length <= ``bound``.

    Ordered by length, then lexicographically.
    """
    letters = sorted(((i, e) for i in range(rank) for e in (1, -1)), key=_letter_key)
    found = []

    def extend(prefix):
        if prefix and class_key(prefix) == prefix:
            found.append(prefix)
        if len(prefix) == bound:
            return
        for x in letters:
            if prefix and prefix[-1] == (x[0], -x[1]):
                continue
            extend(prefix + (x,))

    extend(())
    found.sort(key=lambda w: (len(w), [_letter_key(x) for x in w]))
    return found


def spectrum_dump(m: Marking, bound: int) -> list:
    """``[{"word", "length"}]`` for the identity and every canonical class up to ``bound``."""
    rows = [{"word": "", "length": "0"}]
    for w in canonical_classes(m.rank, bound):
        rows.append({"word": format_word(w), "length": format_length(mls(m, w))})
    return rows


class MissingClassError(KeyError):
    """A replayed spectrum does not contain a queried conjugacy class."""


def oracle_from_dump(rows: Iterable[Mapping], rank: int, phi=None) -> SpectrumOracle:
    """Replay a spectrum dump (over the hidden marking) through ``phi``."""
    table = {}
    for row in rows:
        table[class_key(parse_word(row["word"]))] = Fraction(row["length"])
    phi_table = tuple(((i, 1),) for i in range(rank)) if phi is None else _phi_table(phi, None)

    def answer(w):
        key = class_key(_substitute(phi_table, w))
        if key not in table:
            raise MissingClassError(f"class [{format_word(key)}] is not in the spectrum dump")
        return table[key]

    return SpectrumOracle(answer, len(phi_table))
