"""Brute-force references, written independently of the library algorithms.

Only the graph container (`MetricGraph`, `HalfEdge`) is shared; every answer
here comes from exhaustive enumeration.
"""
from fractions import Fraction
from functools import lru_cache
from itertools import product

from mlsrigid.metric_graph import HalfEdge


def half_edges(g):
    return [HalfEdge(e, b) for e in range(g.num_edges) for b in (False, True)]


def ends(g, h):
    a, b, _ = g.edges[h.edge]
    return (b, a) if h.backward else (a, b)


def walks(g, max_steps, start=None):
    """Every edge path with 1..max_steps steps (optionally from ``start``)."""
    hs = half_edges(g)
    frontier = [((h,), ends(g, h)[1]) for h in hs if start is None or ends(g, h)[0] == start]
    for _ in range(max_steps):
        nxt = []
        for steps, v in frontier:
            yield steps
            for h in hs:
                if ends(g, h)[0] == v:
                    nxt.append((steps + (h,), ends(g, h)[1]))
        frontier = nxt


def rev(h):
    return HalfEdge(h.edge, not h.backward)


@lru_cache(maxsize=1 << 20)
def _normal_forms(w):
    spots = [i for i in range(len(w) - 1) if w[i + 1] == rev(w[i])]
    if not spots:
        return frozenset([w])
    out = set()
    for i in spots:
        out |= _normal_forms(w[:i] + w[i + 2:])
    return frozenset(out)


def all_normal_forms(steps):
    """Every irreducible word reachable by cancelling adjacent ``h h^-1`` in any order."""
    return _normal_forms(tuple(steps))


def simple_path_distance(g, u, v):
    """Least length over all simple edge paths from u to v."""
    if u == v:
        return Fraction(0)
    best = None

    def dfs(x, seen, length):
        nonlocal best
        if best is not None and length >= best:
            return
        if x == v:
            best = length
            return
        for h in half_edges(g):
            a, b = ends(g, h)
            if a == x and b not in seen:
                dfs(b, seen | {b}, length + g.edges[h.edge][2])

    dfs(u, {u}, Fraction(0))
    return best


def point_distance(g, a, b):
    """Distance between points ``(edge, offset)`` or vertices ``int`` by trying every exit."""

    def exits(p):
        if isinstance(p, int):
            return [(p, Fraction(0))]
        e, t = p
        x, y, length = g.edges[e]
        return [(x, t), (y, length - t)]

    best = None
    if not isinstance(a, int) and not isinstance(b, int) and a[0] == b[0]:
        best = abs(a[1] - b[1])
    for (u, du), (v, dv) in product(exits(a), exits(b)):
        d = du + simple_path_distance(g, u, v) + dv
        best = d if best is None else min(best, d)
    return best


def _closed(g, steps):
    return ends(g, steps[0])[0] == ends(g, steps[-1])[1]


def _cyclically_reduced(steps):
    n = len(steps)
    return all(steps[(i + 1) % n] != rev(steps[i]) for i in range(n)) if n > 1 else True


def reduced_walks(g, max_steps):
    """Every non-backtracking edge path with 1..max_steps steps."""
    hs = half_edges(g)
    frontier = [(h,) for h in hs]
    for _ in range(max_steps):
        nxt = []
        for steps in frontier:
            yield steps
            v = ends(g, steps[-1])[1]
            for h in hs:
                if ends(g, h)[0] == v and h != rev(steps[-1]):
                    nxt.append(steps + (h,))
        frontier = nxt


def cyclically_reduced_loops(g, max_steps):
    for steps in reduced_walks(g, max_steps):
        if _closed(g, steps) and _cyclically_reduced(steps):
            yield steps


def core_edges(g):
    """Edges crossed by some cyclically reduced loop (the union of geodesic loop images)."""
    used = set()
    for steps in cyclically_reduced_loops(g, 2 * g.num_edges):
        used |= {h.edge for h in steps}
    return used


# -- free group words, read off independently ------------------------------

def spanning_tree(g, root=0):
    """BFS tree edges and tree paths from ``root`` (not the library's marking)."""
    paths = {root: ()}
    order = [root]
    tree = set()
    for x in order:
        for h in half_edges(g):
            a, b = ends(g, h)
            if a == x and b not in paths:
                paths[b] = paths[x] + (h,)
                tree.add(h.edge)
                order.append(b)
    return tree, paths


def word_of(g, tree, steps):
    gens = sorted(e for e in range(g.num_edges) if e not in tree)
    out = []
    for h in steps:
        if h.edge in tree:
            continue
        x = (gens.index(h.edge), -1 if h.backward else 1)
        if out and out[-1] == (x[0], -x[1]):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def conjugacy_key(w):
    w = list(w)
    while len(w) > 1 and w[0] == (w[-1][0], -w[-1][1]):
        w = w[1:-1]
    if not w:
        return ()
    return min(tuple(w[k:] + w[:k]) for k in range(len(w)))


def brute_spectrum(g, max_steps):
    """Least length of a closed walk (any walk, reduced or not) in each conjugacy class seen."""
    tree, _ = spanning_tree(g)
    best = {}
    for steps in walks(g, max_steps):
        if not _closed(g, steps):
            continue
        key = conjugacy_key(word_of(g, tree, steps))
        length = sum((g.edges[h.edge][2] for h in steps), Fraction(0))
        if key not in best or length < best[key]:
            best[key] = length
    return tree, best



def count_loops_along(g, s, bound):
    """Cyclically reduced loops starting with ``s`` of metric length <= ``bound``."""
    start = ends(g, s)[0]
    hs = half_edges(g)
    count = 0
    stack = [((s,), g.edges[s.edge][2])]
    while stack:
        steps, length = stack.pop()
        if ends(g, steps[-1])[1] == start and steps[-1] != rev(s):
            count += 1
        for h in hs:
            x = length + g.edges[h.edge][2]
            if ends(g, h)[0] == ends(g, steps[-1])[1] and h != rev(steps[-1]) and x <= bound:
                stack.append((steps + (h,), x))
    return count
