"""Edge paths and loops: reduction, cyclic reduction, and concatenation lemmas.

Paths are written in traversal order: ``concat(p, q)`` walks ``p`` first.
An :class:`EdgePath` carries its vertex sequence, so once built it needs no
graph for the word-level operations.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .metric_graph import CoreGraph, HalfEdge, MetricGraph

__all__ = [
    "EdgePath",
    "ContractError",
    "make_path",
    "parse_path",
    "format_steps",
    "path_length",
    "inverse",
    "concat",
    "subpath",
    "rotate",
    "is_reduced",
    "is_cyclically_reduced",
    "reduce",
    "least_rotation",
    "cyclically_reduce",
    "Concatenation",
    "concatenate_reduced",
    "ConjugatedLoop",
    "reduced_loop_through",
    "periodic_match",
    "primitive_root",
    "nonbacktracking_path",
    "geodesic_loop_through",
    "extend_to_geodesic_loop",
]


class ContractError(ValueError):
    """An operation was called outside its precondition."""


@dataclass(frozen=True)
class EdgePath:
    """A walk ``vertices[0] -steps[0]-> vertices[1] ...``; may be empty."""

    steps: tuple
    vertices: tuple

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def is_closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    def __len__(self) -> int:
        return len(self.steps)

    def __str__(self) -> str:
        return format_steps(self.steps)


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise AssertionError(message)


def make_path(g: MetricGraph, steps: Sequence[HalfEdge], start: Optional[int] = None) -> EdgePath:
    steps = tuple(HalfEdge(*h) for h in steps)
    if not steps:
        if start is None:
            raise ContractError("an empty path needs an explicit start vertex")
        if not 0 <= start < g.num_vertices:
            raise ContractError(f"no vertex {start}")
        return EdgePath((), (start,))
    for h in steps:
        if not 0 <= h.edge < g.num_edges:
            raise ContractError(f"no edge {h.edge}")
    if start is None:
        start = g.tail(steps[0])
    vertices = [start]
    for h in steps:
        if g.tail(h) != vertices[-1]:
            raise ContractError(f"step {h} does not start at vertex {vertices[-1]}")
        vertices.append(g.head(h))
    return EdgePath(steps, tuple(vertices))


def parse_steps(text: str) -> tuple:
    steps = []
    for pos, token in enumerate(text.split()):
        backward = token.endswith("'")
        body = token[:-1] if backward else token
        if not (body.startswith("e") and body[1:].isdigit()):
            raise ValueError(f"token {pos} ({token!r}) is not of the form eK or eK'")
        steps.append(HalfEdge(int(body[1:]), backward))
    return tuple(steps)


def parse_path(g: MetricGraph, text: str, start: Optional[int] = None) -> EdgePath:
    """Parse whitespace-separated ``eK`` / ``eK'`` tokens into a path of ``g``."""
    return make_path(g, parse_steps(text), start)


def format_steps(steps: Sequence[HalfEdge]) -> str:
    return " ".join(str(h) for h in steps)


def path_length(g: MetricGraph, p: EdgePath) -> Fraction:
    return sum((g.length(h) for h in p.steps), Fraction(0))


def inverse(p: EdgePath) -> EdgePath:
    return EdgePath(tuple(h.reverse() for h in reversed(p.steps)), p.vertices[::-1])


def concat(*paths: EdgePath) -> EdgePath:
    steps = list(paths[0].steps)
    vertices = list(paths[0].vertices)
    for q in paths[1:]:
        if q.start != vertices[-1]:
            raise ContractError(f"cannot concatenate: {vertices[-1]} != {q.start}")
        steps.extend(q.steps)
        vertices.extend(q.vertices[1:])
    return EdgePath(tuple(steps), tuple(vertices))


def subpath(p: EdgePath, i: int, j: int) -> EdgePath:
    return EdgePath(p.steps[i:j], p.vertices[i:j + 1])


def rotate(loop: EdgePath, k: int) -> EdgePath:
    """Rebase a closed path at its ``k``-th vertex."""
    n = len(loop.steps)
    if n == 0:
        return loop
    k %= n
    steps = loop.steps[k:] + loop.steps[:k]
    vertices = loop.vertices[k:-1] + loop.vertices[:k] + (loop.vertices[k],)
    return EdgePath(steps, vertices)


def is_reduced(p) -> bool:
    steps = p.steps if isinstance(p, EdgePath) else tuple(p)
    return all(steps[i + 1] != steps[i].reverse() for i in range(len(steps) - 1))


def is_cyclically_reduced(loop: EdgePath) -> bool:
    if not loop.is_closed:
        return False
    if not loop.steps:
        return True
    return is_reduced(loop) and loop.steps[0] != loop.steps[-1].reverse()


def reduce(p: EdgePath) -> EdgePath:
    """Free reduction by cancelling ``h, h'`` pairs with a stack."""
    steps = []
    vertices = [p.start]
    for h, w in zip(p.steps, p.vertices[1:]):
        if steps and steps[-1] == h.reverse():
            steps.pop()
            vertices.pop()
        else:
            steps.append(h)
            vertices.append(w)
    return EdgePath(tuple(steps), tuple(vertices))


def least_rotation(steps: Sequence) -> int:
    """Index of the lexicographically least rotation (first one on ties)."""
    steps = tuple(steps)
    if not steps:
        return 0
    return min(range(len(steps)), key=lambda k: steps[k:] + steps[:k])


def cyclically_reduce(loop: EdgePath) -> tuple:
    """Return ``(gamma, p)`` with ``loop`` freely equal to ``p . gamma . p^-1``.

    ``gamma`` is cyclically reduced and rotated to its least rotation; ``p``
    is reduced and runs from the base of ``loop`` to the base of ``gamma``.
    """
    if not loop.is_closed:
        raise ContractError("cyclic reduction needs a closed path")
    r = reduce(loop)
    i, j = 0, len(r.steps) - 1
    while i < j and r.steps[i] == r.steps[j].reverse():
        i += 1
        j -= 1
    p = subpath(r, 0, i)
    gamma = subpath(r, i, j + 1)
    _check(is_cyclically_reduced(gamma), "peeling left a non-cyclically-reduced core")
    k = least_rotation(gamma.steps)
    if k:
        p = reduce(concat(p, subpath(gamma, 0, k)))
        gamma = rotate(gamma, k)
    return gamma, p


class Concatenation(NamedTuple):
    """Reduced form ``q`` of ``p1 . p2`` with ``p1 = q1 . r1``, ``p2 = r2 . q2``."""

    q: EdgePath
    r: EdgePath
    q1: EdgePath
    q2: EdgePath
    r2: EdgePath


def concatenate_reduced(p1: EdgePath, p2: EdgePath) -> Concatenation:
    if p1.end != p2.start:
        raise ContractError(f"paths are not incident: {p1.end} != {p2.start}")
    if not (is_reduced(p1) and is_reduced(p2)):
        raise ContractError("both paths must be reduced")
    n1, n2 = len(p1), len(p2)
    k = 0
    while k < min(n1, n2) and p1.steps[n1 - 1 - k] == p2.steps[k].reverse():
        k += 1
    q1, r1 = subpath(p1, 0, n1 - k), subpath(p1, n1 - k, n1)
    r2, q2 = subpath(p2, 0, k), subpath(p2, k, n2)
    q = concat(q1, q2)
    _check(concat(q1, r1) == p1, "p1 != q1 . r1")
    _check(concat(r2, q2) == p2, "p2 != r2 . q2")
    _check(r1 == inverse(r2), "r1 != r2^-1")
    _check(is_reduced(q), "q2 * q1 is not reduced")
    _check(q == reduce(concat(p1, p2)), "q differs from the free reduction")
    return Concatenation(q, r1, q1, q2, r2)


class ConjugatedLoop(NamedTuple):
    loop: EdgePath
    reversed: bool
    ambiguous: bool


def reduced_loop_through(p: EdgePath, gamma: EdgePath) -> ConjugatedLoop:
    """Reduced form of ``p . gamma . p^-1``, oriented to begin along ``p``.

    If the reduction would end along ``p^-1`` instead, ``gamma`` is reversed.
    ``ambiguous`` is set when both orientations begin along ``p``.
    """
    if not is_cyclically_reduced(gamma):
        raise ContractError("gamma must be a cyclically reduced loop")
    if not is_reduced(p):
        raise ContractError("p must be reduced")
    if gamma.start != p.end:
        raise ContractError("gamma must be based at the end of p")
    n = len(p)
    inv_p = inverse(p)
    forward = reduce(concat(p, gamma, inv_p))
    backward = reduce(concat(p, inverse(gamma), inv_p))
    ok_fwd = forward.steps[:n] == p.steps
    ok_bwd = backward.steps[:n] == p.steps
    _check(ok_fwd or ok_bwd, "neither orientation begins along p")
    eta, flipped = (forward, False) if ok_fwd else (backward, True)
    _check(p.end in eta.vertices, "reduced loop misses the end of p")
    return ConjugatedLoop(eta, flipped, ok_fwd and ok_bwd)


def periodic_match(loop: EdgePath, pattern: Sequence[HalfEdge]) -> Optional[int]:
    """First rotation ``r`` such that ``pattern`` is a prefix of the periodic loop.

    The loop is read periodically, so patterns longer than the loop (a path
    wrapping around several times) are handled.
    """
    s = loop.steps
    n = len(s)
    if n == 0:
        return 0 if not pattern else None
    for r in range(n):
        if all(pattern[i] == s[(r + i) % n] for i in range(len(pattern))):
            return r
    return None


def nonbacktracking_path(g: MetricGraph, source: int, target: int,
                         prev: Optional[HalfEdge] = None, nxt: Optional[HalfEdge] = None,
                         allow_empty: bool = False) -> Optional[tuple]:
    """Fewest-step reduced walk ``source -> target`` (breadth first, least half-edge first).

    The walk may not begin with ``prev^-1`` nor end with ``nxt^-1``, so it
    can be spliced between ``prev`` and ``nxt`` without cancellation.
    """
    if allow_empty and source == target and not (prev is not None and nxt is not None
                                                  and nxt == prev.reverse()):
        return ()
    parent = {}
    queue = deque()
    for h in g.out_half_edges(source):
        if prev is not None and h == prev.reverse():
            continue
        parent[h] = None
        queue.append(h)
    while queue:
        h = queue.popleft()
        if g.head(h) == target and (nxt is None or nxt != h.reverse()):
            steps = [h]
            while parent[steps[-1]] is not None:
                steps.append(parent[steps[-1]])
            return tuple(reversed(steps))
        for k in g.out_half_edges(g.head(h)):
            if k != h.reverse() and k not in parent:
                parent[k] = h
                queue.append(k)
    return None


def geodesic_loop_through(g: MetricGraph, v: int) -> EdgePath:
    """A cyclically reduced loop based at ``v`` (``g`` must be a core graph)."""
    for h in g.out_half_edges(v):
        rest = nonbacktracking_path(g, g.head(h), v, prev=h, nxt=h, allow_empty=True)
        if rest is not None:
            return make_path(g, (h,) + rest)
    raise ContractError(f"no cyclically reduced loop passes through vertex {v}")


def _as_core_path(g: MetricGraph, p: EdgePath) -> EdgePath:
    if not all(0 <= v < g.num_vertices for v in p.vertices):
        raise ContractError("path endpoints are not core vertices")
    try:
        q = make_path(g, p.steps, p.start)
    except ContractError as exc:
        raise ContractError(f"path does not lie in the core: {exc}") from None
    if q != p:
        raise ContractError("path does not lie in the core")
    return q


def primitive_root(loop: EdgePath) -> EdgePath:
    """Shortest closed prefix whose power is ``loop``."""
    n = len(loop.steps)
    for k in range(1, n):
        if n % k == 0 and loop.steps == loop.steps[:k] * (n // k):
            return subpath(loop, 0, k)
    return loop


def _rotated_to(loop: EdgePath, pattern: Sequence[HalfEdge]) -> Optional[EdgePath]:
    r = periodic_match(loop, pattern)
    return None if r is None else rotate(loop, r)


def extend_to_geodesic_loop(c: CoreGraph, p: EdgePath) -> EdgePath:
    """A cyclically reduced loop of the core that begins by running along ``p``.

    Splits ``p`` at its middle vertex, conjugates a geodesic loop through each
    endpoint to the middle, concatenates, and cyclically reduces, keeping the
    orientations of the auxiliary loops for which ``p`` survives.  The
    shortest non-backtracking closing walk is also a candidate; the shortest
    candidate (then least in half-edge order) is returned, as a primitive loop.
    If ``p`` is longer than the returned loop it wraps around it.
    """
    if c.is_empty:
        raise ContractError("the core is empty")
    g = c.graph
    p = _as_core_path(g, p)
    if not p.steps or not is_reduced(p):
        raise ContractError("p must be a nonempty reduced path")
    if is_cyclically_reduced(p):
        return primitive_root(p)

    m = len(p) // 2
    p1, p2 = subpath(p, 0, m), subpath(p, m, len(p))
    loop_a = geodesic_loop_through(g, p.start)
    loop_b = geodesic_loop_through(g, p.end)
    inv_p1 = inverse(p1)
    candidates = []
    for ga in (loop_a, inverse(loop_a)):
        eta1 = reduce(concat(inv_p1, ga, p1))
        if eta1.steps[:m] != inv_p1.steps:
            continue
        first = inverse(eta1)
        for gb in (loop_b, inverse(loop_b)):
            second = reduce(concat(p2, gb, inverse(p2)))
            if second.steps[:len(p2)] != p2.steps:
                continue
            gamma, _ = cyclically_reduce(concat(first, second))
            found = _rotated_to(primitive_root(gamma), p.steps)
            if found is not None:
                candidates.append(found)

    # p may already wind around a shorter loop
    for k in range(1, len(p)):
        if all(p.steps[i] == p.steps[i - k] for i in range(k, len(p))):
            head = subpath(p, 0, k)
            if head.is_closed and is_cyclically_reduced(head):
                candidates.append(primitive_root(head))
                break

    # the shortest closing walk competes with the conjugation construction
    rest = nonbacktracking_path(g, p.end, p.start, prev=p.steps[-1], nxt=p.steps[0],
                                allow_empty=p.is_closed)
    if rest is not None:
        loop = make_path(g, p.steps + rest)
        _check(is_cyclically_reduced(loop), "closing walk is not cyclically reduced")
        candidates.append(_rotated_to(primitive_root(loop), p.steps))
    if not candidates:
        raise ContractError("p cannot be closed up to a cyclically reduced loop")
    return min(candidates, key=lambda c: (len(c), c.steps))
