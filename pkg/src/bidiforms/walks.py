"""Walks in the extended bidirected graph and the roots they generate.

A walk alternates vertices and arrows; only directed loops carry a formal
inverse token (traversal of any other arrow is determined by the vertex
sequence). The `inc` map sends a walk to an integer vector of the incidence
form; open walks give 1-roots, positive closed walks 0-roots and negative
closed walks certain 2-roots.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .bidigraph import BidirectedGraph
from .errors import InvalidInput, NotPositive
from .qform import IntegralQuadraticForm


class Walk:
    """Walk given by a start vertex and (arrow, is_inverse) steps."""

    __slots__ = ("graph", "start", "steps", "vertices")

    def __init__(self, graph: BidirectedGraph, start: int, steps=(), vertices=None):
        start = int(start)
        if not (1 <= start <= graph.m):
            raise InvalidInput("walk start vertex out of range")
        steps = tuple((int(a), bool(inv)) for a, inv in steps)
        if vertices is None:
            vertices = _infer_vertices(graph, start, steps)
        else:
            vertices = tuple(int(v) for v in vertices)
            _check_vertices(graph, start, steps, vertices)
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "vertices", vertices)

    def __setattr__(self, name, value):
        raise AttributeError("Walk is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Walk)
            and self.graph == other.graph
            and self.start == other.start
            and self.steps == other.steps
            and self.vertices == other.vertices
        )

    def __hash__(self):
        return hash((self.start, self.steps, self.vertices))

    def __repr__(self):
        return f"Walk({self.format_text()!r})"

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def is_closed(self) -> bool:
        return self.start == self.end

    def sigma(self) -> int:
        s = 1
        for a, _ in self.steps:
            s *= self.graph.sigma(a)
        return s

    def inc(self) -> tuple[int, ...]:
        """The incidence vector sum_t sigma(w^[t-1]) d(v_{t-1}, i_t) E_{i_t}."""
        x = [0] * self.graph.n
        sign = 1
        for (a, inv), v in zip(self.steps, self.vertices):
            x[a - 1] += sign * _d(self.graph, v, a, inv)
            sign *= self.graph.sigma(a)
        return tuple(x)

    def compose(self, other: "Walk") -> "Walk":
        if self.graph != other.graph:
            raise InvalidInput("walks live on different graphs")
        if self.end != other.start:
            raise InvalidInput("walks are not composable")
        return Walk(
            self.graph,
            self.start,
            self.steps + other.steps,
            self.vertices + other.vertices[1:],
        )

    def inverse(self) -> "Walk":
        graph = self.graph
        steps = []
        for a, inv in reversed(self.steps):
            steps.append((a, not inv) if graph.is_directed_loop(a) else (a, False))
        return Walk(graph, self.end, steps, tuple(reversed(self.vertices)))

    def reduce(self) -> "Walk":
        """Cancel adjacent step/anti-step pairs; preserves inc."""
        graph = self.graph
        stack = []  # (arrow, inv, from_vertex, to_vertex)
        for (a, inv), v_from, v_to in zip(self.steps, self.vertices, self.vertices[1:]):
            if stack and _are_inverse_steps(graph, stack[-1], (a, inv, v_from, v_to)):
                stack.pop()
            else:
                stack.append((a, inv, v_from, v_to))
        steps = tuple((a, inv) for a, inv, _, _ in stack)
        vertices = (self.start,) + tuple(t for _, _, _, t in stack)
        return Walk(graph, self.start, steps, vertices)

    def power(self, k: int) -> "Walk":
        if not self.is_closed():
            raise InvalidInput("powers are defined for closed walks")
        if k < 0:
            return self.inverse().power(-k)
        w = Walk(self.graph, self.start)
        for _ in range(k):
            w = w.compose(self)
        return w

    def format_text(self) -> str:
        parts = [str(self.start)]
        for (a, inv), v in zip(self.steps, self.vertices[1:]):
            parts.append(f"{a}^-1" if inv else str(a))
            parts.append(str(v))
        return " ".join(parts)

    @staticmethod
    def parse_text(graph: BidirectedGraph, text: str) -> "Walk":
        tokens = text.split()
        if len(tokens) % 2 != 1:
            raise InvalidInput("walk text must alternate vertices and arrows")
        try:
            vertices = [int(tokens[k]) for k in range(0, len(tokens), 2)]
            steps = []
            for k in range(1, len(tokens), 2):
                tok = tokens[k]
                if tok.endswith("^-1"):
                    steps.append((int(tok[:-3]), True))
                else:
                    steps.append((int(tok), False))
        except ValueError as exc:
            raise InvalidInput(f"bad walk token: {exc}") from exc
        return Walk(graph, vertices[0], steps, vertices)


def trivial_walk(graph: BidirectedGraph, v: int) -> Walk:
    return Walk(graph, v)


def _d(graph, v, arrow, inverse):
    (u, e), (u2, e2) = graph.arrow_ends(arrow)
    if graph.is_directed_loop(arrow):
        if v != u:
            raise InvalidInput("vertex not on the loop")
        return -1 if inverse else 1
    candidates = [s for (w, s) in ((u, e), (u2, e2)) if w == v]
    if not candidates:
        raise InvalidInput(f"vertex {v} is not an endpoint of arrow {arrow}")
    return candidates[0]


def _infer_vertices(graph, start, steps):
    vertices = [start]
    for a, inv in steps:
        u, u2 = graph.underlying(a)
        if inv and not graph.is_directed_loop(a):
            raise InvalidInput("formal inverses exist only for directed loops")
        v = vertices[-1]
        if v == u:
            vertices.append(u2)
        elif v == u2:
            vertices.append(u)
        else:
            raise InvalidInput(f"arrow {a} is not incident to vertex {v}")
    return tuple(vertices)


def _check_vertices(graph, start, steps, vertices):
    if len(vertices) != len(steps) + 1 or vertices[0] != start:
        raise InvalidInput("vertex sequence does not match steps")
    for (a, inv), v, w in zip(steps, vertices, vertices[1:]):
        if inv and not graph.is_directed_loop(a):
            raise InvalidInput("formal inverses exist only for directed loops")
        if {v, w} != set(graph.underlying(a)):
            raise InvalidInput(f"arrow {a} does not join {v} and {w}")


def _are_inverse_steps(graph, s1, s2):
    a1, inv1, f1, t1 = s1
    a2, inv2, f2, t2 = s2
    if a1 != a2:
        return False
    if graph.is_directed_loop(a1):
        return inv1 != inv2
    if graph.is_loop(a1):
        return True  # a bidirected loop step is its own inverse
    return f2 == t1 and t2 == f1


@dataclass(frozen=True)
class RootSet:
    """Deduplicated, sign-closed set of integer vectors with q(x) = d."""

    d: int
    vectors: frozenset


def brute_force_roots(q: IntegralQuadraticForm, d: int, bound: int) -> RootSet:
    """Independent oracle: all x with |x_i| <= bound and q(x) = d, by enumeration."""
    if bound < 0:
        raise InvalidInput("bound must be >= 0")
    hits = []
    for x in product(range(-bound, bound + 1), repeat=q.n):
        if q.evaluate(x) == d:
            hits.append(x)
    return RootSet(d, frozenset(hits))


def _step_table(B: BidirectedGraph):
    """Per-vertex expansion table: v -> [(arrow-1, other_end, d, sigma)]."""
    table = {v: [] for v in range(1, B.m + 1)}
    for a in range(1, B.n + 1):
        u, u2 = B.underlying(a)
        sig = B.sigma(a)
        if B.is_directed_loop(a):
            table[u].append((a - 1, u, 1, sig))
            table[u].append((a - 1, u, -1, sig))
        elif u == u2:
            table[u].append((a - 1, u, _d(B, u, a, False), sig))
        else:
            table[u].append((a - 1, u2, _d(B, u, a, False), sig))
            table[u2].append((a - 1, u, _d(B, u2, a, False), sig))
    return table


def _walk_states(B: BidirectedGraph, start: int, length_cap: int, prune: int):
    """All (vertex, sign, inc) states reachable by walks from `start`.

    States are deduplicated; inc of a one-step extension is
    inc + sign * d(v, a) * E_a, which only depends on the state. Coordinates
    are pruned at |x_i| <= prune.
    """
    table = _step_table(B)
    init = (start, 1, (0,) * B.n)
    seen = {init}
    frontier = [init]
    for _ in range(length_cap):
        frontier = _expand_level(frontier, table, prune, seen)
        if not frontier:
            break
    return seen


def _expand_level(frontier, table, prune, seen):
    nxt = []
    for (v, sign, x) in frontier:
        for (ai, w, d, sig) in table[v]:
            val = x[ai] + sign * d
            if abs(val) > prune:
                continue
            state = (w, sign * sig, x[:ai] + (val,) + x[ai + 1 :])
            if state not in seen:
                seen.add(state)
                nxt.append(state)
    return nxt


def theorem_c_roots(
    B: BidirectedGraph, d: int, length_cap: int, prune: int | None = None
) -> RootSet:
    """Walk-generated d-roots for d in {0,1,2}.

    d=0: positive closed walks; d=1: open walks; d=2: negative closed walks
    (the walk-generated subset of the 2-roots). Enumeration is a BFS over
    (vertex, sign, inc) states up to `length_cap` steps, coordinates pruned at
    `prune` (default: maximal |inc| entry reachable under the cap).
    """
    if d not in (0, 1, 2):
        raise InvalidInput("theorem_c_roots handles d in {0, 1, 2}")
    if not B.is_connected():
        raise InvalidInput("theorem_c_roots needs a connected graph")
    if prune is None:
        prune = length_cap
    vectors = set()
    for start in range(1, B.m + 1):
        for (v, sign, x) in _walk_states(B, start, length_cap, prune):
            closed = v == start
            if d == 0 and closed and sign == 1:
                vectors.add(x)
            elif d == 1 and not closed:
                vectors.add(x)
            elif d == 2 and closed and sign == -1:
                vectors.add(x)
    vectors |= {tuple(-c for c in x) for x in vectors}
    if d != 0:
        vectors.discard((0,) * B.n)
    return RootSet(d, frozenset(vectors))


def walk_root_cover(B: BidirectedGraph, bound: int) -> tuple[dict, bool]:
    """Adaptive oracle helper: walk roots by class until the boxed 0- and
    1-roots of the incidence form are covered.

    Returns ({0: ..., 1: ..., 2: ...}, complete). A single incremental BFS
    over walk states runs level by level, starting coverage checks at n + m
    steps and giving up at the hard cap 4*n*bound. Coordinates are pruned at
    bound + 1; the inductive walk construction reaches every boxed root
    without its partial sums ever leaving that window.
    """
    if not B.is_connected():
        raise InvalidInput("walk_root_cover needs a connected graph")
    q = B.incidence_form()
    t0 = brute_force_roots(q, 0, bound).vectors
    t1 = brute_force_roots(q, 1, bound).vectors
    first_check = B.n + B.m
    hard = max(4 * B.n * bound, first_check)
    prune = bound + 1
    table = _step_table(B)
    zero = (0,) * B.n
    sets = {0: {zero}, 1: set(), 2: set()}

    def classify(start, state):
        v, sign, x = state
        if v == start:
            d = 0 if sign == 1 else 2
        else:
            d = 1
        if d == 0 or any(x):
            sets[d].add(x)
            sets[d].add(tuple(-c for c in x))

    frontiers = []
    for start in range(1, B.m + 1):
        init = (start, 1, zero)
        frontiers.append((start, {init}, [init]))
    level = 0
    while level < hard:
        level += 1
        alive = False
        for idx, (start, seen, frontier) in enumerate(frontiers):
            if not frontier:
                continue
            nxt = _expand_level(frontier, table, prune, seen)
            for state in nxt:
                classify(start, state)
            frontiers[idx] = (start, seen, nxt)
            alive = alive or bool(nxt)
        if not alive:
            break
        if level >= first_check and t0 <= sets[0] and t1 <= sets[1]:
            return {d: frozenset(s) for d, s in sets.items()}, True
    covered = t0 <= sets[0] and t1 <= sets[1]
    return {d: frozenset(s) for d, s in sets.items()}, covered


@dataclass(frozen=True)
class PositiveRoots:
    """Exact incidence-root set of a positive incidence form."""

    vectors: frozenset
    value_counts: dict  # q-value -> number of vectors


def roots_positive(B: BidirectedGraph) -> PositiveRoots:
    """Exact finite incidence-root set for trees and unbalanced 1-trees.

    Tree with n arrows: n^2 + n + 1 vectors, all nonzero ones of value 1.
    Unbalanced 1-tree: 2n^2 + 1 vectors, exactly 2n of value 2; realized by
    walks w_s w^k w_t^{-1} around the unique (negative) cycle walk w, k in {0,1}.
    """
    if not B.is_connected():
        raise InvalidInput("roots_positive needs a connected graph")
    n, m = B.n, B.m
    if B.directed_loops():
        raise NotPositive("directed loops force a zero variable")
    if m == n + 1:
        return _tree_roots(B)
    if m == n:
        cycle = _unique_cycle_walk(B)
        if cycle.sigma() != -1:
            raise NotPositive("balanced 1-tree; the incidence form is not positive")
        return _one_tree_roots(B, cycle)
    raise NotPositive("graph is neither a tree nor a 1-tree")


def _tree_roots(B):
    q = B.incidence_form()
    walks = _tree_walks_to_root(B, root=1)
    vectors = {(0,) * B.n}
    counts = {0: 1, 1: 0}
    for s in range(1, B.m + 1):
        for t in range(s + 1, B.m + 1):
            w = walks[s].compose(walks[t].inverse()).reduce()
            x = w.inc()
            assert q.evaluate(x) == 1
            vectors.add(x)
            vectors.add(tuple(-c for c in x))
            counts[1] += 2
    assert len(vectors) == B.n**2 + B.n + 1
    return PositiveRoots(frozenset(vectors), counts)


def _one_tree_roots(B, cycle):
    q = B.incidence_form()
    v0 = cycle.start
    walks = _tree_walks_to_root(B, root=v0)
    vectors = {(0,) * B.n}
    counts = {0: 1, 1: 0, 2: 0}
    for s in range(1, B.m + 1):
        for t in range(s, B.m + 1):
            ks = (1,) if s == t else (0, 1)
            for k in ks:
                w = walks[s].compose(cycle.power(k)).compose(walks[t].inverse()).reduce()
                x = w.inc()
                val = q.evaluate(x)
                assert val in (1, 2)
                vectors.add(x)
                vectors.add(tuple(-c for c in x))
                counts[val] += 2
    assert len(vectors) == 2 * B.n**2 + 1
    assert counts[2] == 2 * B.n
    return PositiveRoots(frozenset(vectors), counts)


def _tree_walks_to_root(B, root):
    """Minimal walks from every vertex to `root` (BFS, smallest arrow first)."""
    prev = {root: None}
    order = [root]
    queue = [root]
    while queue:
        v = queue.pop(0)
        for a in range(1, B.n + 1):
            if B.is_loop(a):
                continue
            u, u2 = B.underlying(a)
            if v not in (u, u2):
                continue
            w = u2 if v == u else u
            if w not in prev:
                prev[w] = (v, a)
                order.append(w)
                queue.append(w)
    if len(prev) != B.m:
        raise NotPositive("graph is not connected")
    walks = {}
    for v in order:
        if prev[v] is None:
            walks[v] = Walk(B, v)
        else:
            nxt, a = prev[v]
            walks[v] = Walk(B, v, [(a, False)]).compose(walks[nxt])
    return walks


def _unique_cycle_walk(B) -> Walk:
    """The unique cycle of a 1-tree as a closed walk (loops and parallel pairs included)."""
    loops = [a for a in range(1, B.n + 1) if B.is_loop(a)]
    if loops:
        a = loops[0]
        u = B.underlying(a)[0]
        return Walk(B, u, [(a, False)])
    seen_pairs = {}
    for a in range(1, B.n + 1):
        u, u2 = sorted(B.underlying(a))
        if (u, u2) in seen_pairs:
            b = seen_pairs[(u, u2)]
            return Walk(B, u, [(b, False), (a, False)])
        seen_pairs[(u, u2)] = a
    # simple cycle: DFS for a back edge
    parent = {1: None}
    stack = [(1, None)]
    back = None
    while stack and back is None:
        v, via = stack.pop()
        for a in range(1, B.n + 1):
            if a == via:
                continue
            u, u2 = B.underlying(a)
            if v not in (u, u2):
                continue
            w = u2 if v == u else u
            if w in parent:
                back = (v, a, w)
                break
            parent[w] = (v, a)
            stack.append((w, a))
    if back is None:
        raise NotPositive("no cycle found; graph is a tree")
    v, a, w = back
    # path w -> v through parents, then arrow a closes the cycle
    chain_v = _ancestors(parent, v)
    chain_w = _ancestors(parent, w)
    common = next(x for x, _ in chain_v if x in {y for y, _ in chain_w})
    steps = []
    vertices = [w]
    for x, arr in chain_w:
        if x == common:
            break
        steps.append((arr, False))
        px, _ = parent[x]
        vertices.append(px)
    down = []
    for x, arr in chain_v:
        if x == common:
            break
        down.append((x, arr))
    for x, arr in reversed(down):
        steps.append((arr, False))
        vertices.append(x)
    steps.append((a, False))
    vertices.append(w)
    return Walk(B, w, steps, vertices)


def _ancestors(parent, v):
    chain = []
    x = v
    while True:
        chain.append((x, parent[x][1] if parent[x] else None))
        if parent[x] is None:
            return chain
        x = parent[x][0]
