"""Reflections, root-system verification and the Diophantine solver q(x) = d.

Reflections at incidence roots intertwine with orthogonal vertex matrices;
positive incidence forms carry finite root systems of type A_n or C_n. The
solver routes type-C inputs of rank >= 4 through the canonical C_4 block and
a four-squares decomposition, positive unit cores through exact enumeration,
and everything else through a bounded box search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import isqrt
from typing import Optional

from .bidigraph import BidirectedGraph
from .classify import canonical_c, first_root_with_value, positive_core
from .errors import (
    InvalidInput,
    NotTypeC,
    RadicalRoot,
    UnrepresentedWithinBound,
)
from .exact_linalg import IntMatrix
from .qform import IntegralQuadraticForm, analyze
from .walks import Walk, roots_positive

# q_{C_4} composed with this matrix is the sum-of-four-squares form; det = 2
LAGRANGE_BRIDGE = IntMatrix(
    [[-1, 0, 0, 1], [-1, -1, 0, 2], [0, 0, 0, 2], [0, 0, -1, 1]]
)


def reflect(q: IntegralQuadraticForm, x, y):
    """s_x(y) = y - (2 q(y,x)/q(x,x)) x, exact; ints when integral.

    Raises RadicalRoot when q(x) = 0. A non-integral image (possible for
    non-root vectors) is reported as a tuple of Fractions, not an error.
    """
    qxx = q.polarize(x, x)
    if qxx == 0:
        raise RadicalRoot("cannot reflect at a vector of value zero")
    coef = Fraction(2 * q.polarize(y, x), qxx)
    image = tuple(Fraction(b) - coef * a for a, b in zip(x, y))
    if all(v.denominator == 1 for v in image):
        return tuple(int(v) for v in image)
    return image


@dataclass(frozen=True)
class ReflectionReport:
    root: tuple
    companion: IntMatrix
    integral: bool


def companion(B: BidirectedGraph, x) -> ReflectionReport:
    """Orthogonal O^x with I(B)^tr s_x = O^x I(B)^tr for an incidence root x."""
    I = B.incidence_matrix()
    alpha = I.transpose().matvec(x)
    norm2 = sum(a * a for a in alpha)
    if norm2 == 0:
        raise RadicalRoot("vector lies in the radical")
    if norm2 not in (2, 4):
        raise InvalidInput("vector is not an incidence root")
    m = B.m
    entries = [
        [
            (1 if r == c else 0) - Fraction(2 * alpha[r] * alpha[c], norm2)
            for c in range(m)
        ]
        for r in range(m)
    ]
    assert all(v.denominator == 1 for row in entries for v in row)
    O = IntMatrix([[int(v) for v in row] for row in entries])
    assert (O @ O.transpose()) == IntMatrix.identity(m)
    q = B.incidence_form()
    qxx = q.polarize(x, x)
    basis = [tuple(1 if t == k else 0 for t in range(q.n)) for k in range(q.n)]
    integral = all((2 * q.polarize(e, x)) % qxx == 0 for e in basis)
    return ReflectionReport(tuple(x), O, integral)


@dataclass(frozen=True)
class RootSystemReport:
    is_root_system: bool
    family: str
    rank: int
    nonzero_count: int


def root_system_report(B: BidirectedGraph) -> RootSystemReport:
    """Verify the finite-root-system axioms on the nonzero incidence roots.

    Checks: spanning, only +-1 scalar multiples, integrality of the Cartan
    numbers 2q(y,x)/q(x,x), closure under all reflections. Trees give type
    A_n with n^2+n roots, unbalanced 1-trees type C_n with 2n^2 roots.
    """
    q = B.incidence_form()
    rep = roots_positive(B)  # raises NotPositive when not a tree / 1-tree
    roots = sorted(v for v in rep.vectors if any(v))
    n = B.n
    span = IntMatrix(roots)
    if span.rank() != n:
        return RootSystemReport(False, "?", n, len(roots))
    rootset = set(roots)
    for x in roots:
        for a in (2, 3):
            if tuple(a * c for c in x) in rootset:
                return RootSystemReport(False, "?", n, len(roots))
    for x in roots:
        qxx = q.polarize(x, x)
        for y in roots:
            if (2 * q.polarize(y, x)) % qxx != 0:
                return RootSystemReport(False, "?", n, len(roots))
            img = reflect(q, x, y)
            if not isinstance(img[0], int) or tuple(img) not in rootset:
                return RootSystemReport(False, "?", n, len(roots))
    if B.m == n + 1:
        family = "A"
        expected = n * n + n
    else:
        family = "C"
        expected = 2 * n * n
    ok = len(roots) == expected
    if family == "C":
        ok = ok and sum(1 for x in roots if q.evaluate(x) == 2) == 2 * n
    return RootSystemReport(ok, family, n, len(roots))


def walk_polarization(B: BidirectedGraph, w1: Walk, w2: Walk) -> int:
    """q(inc w1, inc w2) from endpoints and signs alone.

    Equals (E_s - sigma E_t)^tr (E_s' - sigma' E_t'), the case table of which
    covers all open/closed endpoint configurations.
    """
    if w1.graph != B or w2.graph != B:
        raise InvalidInput("walks must live on the given graph")
    s, t, sig = w1.start, w1.end, w1.sigma()
    s2, t2, sig2 = w2.start, w2.end, w2.sigma()
    val = 0
    if s == s2:
        val += 1
    if s == t2:
        val -= sig2
    if t == s2:
        val -= sig
    if t == t2:
        val += sig * sig2
    return val


def four_squares(d: int) -> tuple[int, int, int, int]:
    """Some (a, b, c, e) with a^2+b^2+c^2+e^2 = d, by descending brute force."""
    if d < 0:
        raise InvalidInput("four_squares needs d >= 0")
    for a in range(isqrt(d), -1, -1):
        r1 = d - a * a
        for b in range(min(a, isqrt(r1)), -1, -1):
            r2 = r1 - b * b
            for c in range(min(b, isqrt(r2)), -1, -1):
                e2 = r2 - c * c
                e = isqrt(e2)
                if e * e == e2 and e <= c:
                    return (a, b, c, e)
    raise AssertionError("four-square decomposition always exists")


@dataclass(frozen=True)
class Representation:
    d: int
    x: tuple
    strategy: str


def solve(
    q: IntegralQuadraticForm,
    d: int,
    bound: Optional[int] = None,
    use_walk_sum: bool = False,
) -> Representation:
    """Find x with q(x) = d exactly.

    Strategy ladder: d = 0 is trivial; connected irreducible non-negative
    type-C forms of rank >= 4 go through the canonical C_4 block and four
    squares; unit forms with a positive core of rank >= 4 are solved on the
    core by exact enumeration; everything else falls through to a bounded
    box search with escalating bound.
    """
    if d < 0:
        raise InvalidInput("solve needs d >= 0")
    if d == 0:
        return Representation(0, (0,) * q.n, "zero")
    rep = analyze(q)
    if rep.non_negative and rep.connected and rep.irreducible:
        if not rep.unit and rep.rank >= 4:
            try:
                return _solve_via_c4(q, d)
            except NotTypeC:
                pass
        if rep.unit and rep.rank >= 4:
            return _solve_on_core(q, rep, d)
    if use_walk_sum and rep.non_negative and rep.connected and rep.irreducible:
        found = _walk_sum_attempt(q, rep, d)
        if found is not None:
            return found
    return _solve_brute(q, d, bound)


@lru_cache(maxsize=256)
def _c4_route(q):
    T, r, _, _ = canonical_c(q)
    assert r >= 4
    return T.matrix


def _solve_via_c4(q, d):
    M = _c4_route(q)
    a, b, c, e = four_squares(d)
    z = (a, -b, c, e)  # any signs work; q_Lag is even in each variable
    y4 = LAGRANGE_BRIDGE.matvec(z)
    y = tuple(y4) + (0,) * (q.n - 4)
    x = M.matvec(y)
    assert q.evaluate(x) == d
    return Representation(d, x, "canonical-C4")


@lru_cache(maxsize=256)
def _core_data(q):
    X = tuple(positive_core(q))
    return X, q.restrict(X)


def _solve_on_core(q, rep, d):
    X, core = _core_data(q)
    y = first_root_with_value(core, d)
    if y is None:
        raise UnrepresentedWithinBound(d, 0)
    x = [0] * q.n
    for pos, idx in enumerate(X):
        x[idx - 1] = y[pos]
    x = tuple(x)
    assert q.evaluate(x) == d
    return Representation(d, x, "canonical-D4-search")


def _walk_sum_attempt(q, rep, d, k_extra=2):
    """Heuristic: try sums of 1-roots coming from open walks with common start."""
    from .classify import realize

    try:
        B = realize(q, rep)
    except Exception:
        return None
    start = 1
    walks = []
    seen = set()
    frontier = [Walk(B, start)]
    while frontier and len(walks) < 4 * B.n:
        w = frontier.pop(0)
        for a in range(1, B.n + 1):
            u, u2 = B.underlying(a)
            if w.end not in (u, u2):
                continue
            step_end = u2 if w.end == u else u
            try:
                w2 = w.compose(Walk(B, w.end, [(a, False)], [w.end, step_end]))
            except InvalidInput:
                continue
            x = w2.inc()
            if not w2.is_closed() and x not in seen and w2.length <= B.n:
                seen.add(x)
                walks.append(x)
                frontier.append(w2)
    from itertools import combinations_with_replacement

    k = isqrt(d) + k_extra
    candidates = walks[:6]
    for reps in range(1, k + 1):
        for combo in combinations_with_replacement(candidates, reps):
            total = tuple(sum(c) for c in zip(*combo))
            if q.evaluate(total) == d:
                return Representation(d, total, "walk-sum")
    return None


def _solve_brute(q, d, bound):
    start = bound if bound is not None else isqrt(16 * d) + 2
    b = max(1, start)
    for _ in range(4):
        hit = _box_first(q, d, b)
        if hit is not None:
            return Representation(d, hit, "brute-force")
        b *= 2
    raise UnrepresentedWithinBound(d, b // 2)


def _box_first(q, d, bound):
    for x in _box_iter(q.n, bound):
        if q.evaluate(x) == d:
            return x
    return None


def _box_iter(n, bound):
    values = sorted(range(-bound, bound + 1), key=lambda v: (abs(v), -v))
    return product(values, repeat=n)
