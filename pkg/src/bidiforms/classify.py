"""Dynkin-type classification, Gabrielov calculus and incidence realizations.

Covers the form-level Gabrielov transformation with its coefficient update,
A/D/E typing of unit forms via positive cores and exact root counts, the
type-C test, realization of forms as incidence forms, the canonical
(c1,c2)-extension reduction and the Dynkin-plus-zero Z-equivalences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .bidigraph import (
    BidirectedGraph,
    arrow_permutation,
    canonical_c as canonical_c_graph,
    endpoint_rewrite,
    graph_gabrielov,
    rewrite_matrix,
    sign_flip,
)
from .errors import (
    InvalidInput,
    NotCoxRegular,
    NotIncidenceForm,
    NotNonNegative,
    NotPositive,
    NotTypeC,
)
from .exact_linalg import IntMatrix
from .qform import FormAnalysis, IntegralQuadraticForm, analyze, zero_form


# -- elementary transformations as matrices ---------------------------------


def _gabrielov_matrix(q: IntegralQuadraticForm, i: int, j: int) -> IntMatrix:
    n = q.n
    qi = q.coefficient(i, i)
    T = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
    if qi != 0:
        qij = q.coefficient(i, j)
        if qij % qi != 0:
            raise NotCoxRegular(f"q_{i}{j} = {qij} is not divisible by q_{i} = {qi}")
        T[i - 1][j - 1] = -(qij // qi)
    return IntMatrix(T)


def _sign_matrix(n: int, i: int) -> IntMatrix:
    return IntMatrix(
        [[(-1 if a == b == i - 1 else 1 if a == b else 0) for b in range(n)] for a in range(n)]
    )


def _perm_matrix(pi) -> IntMatrix:
    n = len(pi)
    return IntMatrix([[1 if pi[b] - 1 == a else 0 for b in range(n)] for a in range(n)])


class GTransform:
    """Unimodular matrix with its factorization into elementary G-steps."""

    __slots__ = ("matrix", "steps")

    def __init__(self, matrix: IntMatrix, steps=()):
        steps = tuple(steps)
        if matrix.rows != matrix.cols:
            raise InvalidInput("G-transformation matrix must be square")
        if matrix.det() not in (1, -1):
            raise InvalidInput("G-transformation matrix must be unimodular")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "steps", steps)

    def __setattr__(self, name, value):
        raise AttributeError("GTransform is immutable")

    @property
    def n(self) -> int:
        return self.matrix.rows

    def __eq__(self, other):
        return (
            isinstance(other, GTransform)
            and self.matrix == other.matrix
            and self.steps == other.steps
        )

    def __repr__(self):
        return f"GTransform(steps={list(self.steps)})"

    @staticmethod
    def identity(n: int) -> "GTransform":
        return GTransform(IntMatrix.identity(n))

    def then_gabrielov(self, q_current: IntegralQuadraticForm, i: int, j: int):
        """Append a Gabrielov step at (i, j) of the current form; returns (T', q')."""
        M = _gabrielov_matrix(q_current, i, j)
        T = GTransform(self.matrix @ M, self.steps + (("gabrielov", i, j),))
        return T, gabrielov_update(q_current, i, j)

    def then_sign(self, q_current, i):
        M = _sign_matrix(self.n, i)
        T = GTransform(self.matrix @ M, self.steps + (("sign", i),))
        return T, q_current.compose(M)

    def then_perm(self, q_current, pi):
        pi = tuple(int(p) for p in pi)
        M = _perm_matrix(pi)
        T = GTransform(self.matrix @ M, self.steps + (("perm", pi),))
        return T, q_current.permuted(pi)

    def apply_to(self, q: IntegralQuadraticForm) -> IntegralQuadraticForm:
        return q.compose(self.matrix)

    def to_json_dict(self) -> dict:
        steps = []
        for s in self.steps:
            if s[0] == "gabrielov":
                steps.append({"op": "gabrielov", "i": s[1], "j": s[2]})
            elif s[0] == "sign":
                steps.append({"op": "sign", "i": s[1]})
            else:
                steps.append({"op": "perm", "pi": list(s[1])})
        return {"matrix": self.matrix.to_lists(), "steps": steps}

    @staticmethod
    def from_json_dict(data: dict) -> "GTransform":
        try:
            matrix = IntMatrix(data["matrix"])
            steps = []
            for s in data.get("steps", []):
                if s["op"] == "gabrielov":
                    steps.append(("gabrielov", int(s["i"]), int(s["j"])))
                elif s["op"] == "sign":
                    steps.append(("sign", int(s["i"])))
                elif s["op"] == "perm":
                    steps.append(("perm", tuple(int(p) for p in s["pi"])))
                else:
                    raise InvalidInput(f"unknown step op {s['op']!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed GTransform JSON: {exc}") from exc
        return GTransform(matrix, steps)


def gabrielov_update(q: IntegralQuadraticForm, i: int, j: int) -> IntegralQuadraticForm:
    """Coefficients of q' = q∘T_ij: diagonal fixed, column j updated, q'_ij = -q_ij."""
    qi = q.coefficient(i, i)
    if qi == 0:
        return q
    qij = q.coefficient(i, j)
    if qij % qi != 0:
        raise NotCoxRegular(f"q_{i}{j} = {qij} is not divisible by q_{i} = {qi}")
    ratio = qij // qi
    off = dict(q.off)
    for k in range(1, q.n + 1):
        if k in (i, j):
            continue
        new = q.coefficient(k, j) - q.coefficient(k, i) * ratio
        key = (min(k, j), max(k, j))
        if new:
            off[key] = new
        else:
            off.pop(key, None)
    key = (min(i, j), max(i, j))
    if qij:
        off[key] = -qij
    else:
        off.pop(key, None)
    return IntegralQuadraticForm(q.diag, off)


def gabrielov(q: IntegralQuadraticForm, i: int, j: int):
    """Elementary Gabrielov transformation of q at (i, j): returns (q', T)."""
    if i == j or not (1 <= i <= q.n and 1 <= j <= q.n):
        raise InvalidInput("gabrielov needs two distinct variable indices")
    T, q2 = GTransform.identity(q.n).then_gabrielov(q, i, j)
    return q2, T


# -- exact root enumeration for positive forms ------------------------------


@lru_cache(maxsize=512)
def _ldl(G: IntMatrix):
    """Exact LDL data of a positive-definite Gram matrix: x^tr G x = sum d_i (x_i + sum_j u_ij x_j)^2."""
    n = G.rows
    A = [[Fraction(x) for x in row] for row in G.entries]
    d = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise NotPositive("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            u[i][j] = A[i][j] / d[i]
        for k in range(i + 1, n):
            for l in range(k, n):
                A[k][l] -= A[i][k] * A[i][l] / d[i]
                A[l][k] = A[k][l]
    return tuple(d), tuple(tuple(row) for row in u)


def _floor_sqrt(fr: Fraction) -> int:
    if fr < 0:
        return -1
    return isqrt(fr.numerator * fr.denominator) // fr.denominator


def positive_roots_by_value(q: IntegralQuadraticForm, dmax: int) -> dict:
    """All x with 1 <= q(x) <= dmax for a positive form, exactly enumerated.

    Lattice enumeration on the exact LDL decomposition of the Gram matrix;
    returns {d: frozenset of vectors}.
    """
    G = q.gram()
    d, u = _ldl(G)
    n = q.n
    out = {v: set() for v in range(1, dmax + 1)}
    budget = Fraction(2 * dmax)
    x = [0] * n

    def rec(i, remaining):
        if i < 0:
            val = budget - remaining
            if val > 0:
                qval = val / 2
                if qval.denominator == 1:
                    out[int(qval)].add(tuple(x))
            return
        shift = sum(u[i][j] * x[j] for j in range(i + 1, n))
        # d_i (x_i + shift)^2 <= remaining; widen by one to absorb the floored
        # square root, the exact term check below keeps only true solutions
        halfwidth = _floor_sqrt(remaining / d[i]) + 1
        lo_i = _ceil_frac(-shift - halfwidth)
        hi_i = _floor_frac(-shift + halfwidth)
        for xi in range(lo_i, hi_i + 1):
            x[i] = xi
            term = d[i] * (xi + shift) ** 2
            if term <= remaining:
                rec(i - 1, remaining - term)
        x[i] = 0

    rec(n - 1, budget)
    out = {v: frozenset(s) for v, s in out.items()}
    out.pop(0, None)
    return out


def _ceil_frac(fr: Fraction) -> int:
    return -((-fr.numerator) // fr.denominator)


def _floor_frac(fr: Fraction) -> int:
    return fr.numerator // fr.denominator


def one_root_count(q: IntegralQuadraticForm) -> int:
    """|R_q(1)| for a positive form."""
    return len(positive_roots_by_value(q, 1)[1])


def first_root_with_value(q: IntegralQuadraticForm, d: int):
    """Some x with q(x) = d for a positive form, or None; exact DFS enumeration.

    Candidates for each coordinate are visited center-outward; the per-level
    term is monotone away from the center, so each direction stops at the
    first overshoot.
    """
    if d == 0:
        return (0,) * q.n
    dd, u = _ldl(q.gram())
    n = q.n
    x = [0] * n

    def leaf(remaining):
        # d_0 (x_0 + shift)^2 = remaining has a closed-form integer test
        shift = sum(u[0][j] * x[j] for j in range(1, n) if x[j])
        r = remaining / dd[0]
        num, den = r.numerator, r.denominator
        sn, sd = isqrt(num), isqrt(den)
        if sn * sn != num or sd * sd != den:
            return None
        s = Fraction(sn, sd)
        for cand in (-shift + s, -shift - s):
            if cand.denominator == 1:
                x[0] = int(cand)
                return tuple(x)
        return None

    def rec(i, remaining):
        if i == 0:
            return leaf(remaining)
        shift = sum(u[i][j] * x[j] for j in range(i + 1, n) if x[j])
        c0 = round(-shift)
        # the term is monotone in each direction away from the parabola vertex
        xi = c0
        while True:
            term = dd[i] * (xi + shift) ** 2
            if term > remaining:
                break
            x[i] = xi
            res = rec(i - 1, remaining - term)
            if res is not None:
                return res
            xi += 1
        xi = c0 - 1
        while True:
            term = dd[i] * (xi + shift) ** 2
            if term > remaining:
                break
            x[i] = xi
            res = rec(i - 1, remaining - term)
            if res is not None:
                return res
            xi -= 1
        x[i] = 0
        return None

    if n == 1:
        return leaf(Fraction(2 * d))
    return rec(n - 1, Fraction(2 * d))


# -- Dynkin types ------------------------------------------------------------


@dataclass(frozen=True)
class DynkinType:
    family: str  # 'A', 'D', 'E' or 'C'
    rank: int

    def __post_init__(self):
        fam, r = self.family, self.rank
        ok = (
            (fam == "A" and r >= 1)
            or (fam == "D" and r >= 4)
            or (fam == "E" and r in (6, 7, 8))
            or (fam == "C" and r >= 2)
        )
        if not ok:
            raise InvalidInput(f"no Dynkin type {fam}_{r}")

    def __str__(self):
        return f"{self.family}{self.rank}"


def dynkin_unit_form(family: str, r: int) -> IntegralQuadraticForm:
    """Unit form of a simply laced Dynkin graph (solid edges only)."""
    if family == "A" and r >= 1:
        edges = [(i, i + 1) for i in range(1, r)]
    elif family == "D" and r >= 4:
        edges = [(1, 3), (2, 3)] + [(i, i + 1) for i in range(3, r)]
    elif family == "E" and r in (6, 7, 8):
        edges = [(1, 2), (2, 3), (3, 4), (3, 5)] + [(i, i + 1) for i in range(5, r)]
    else:
        raise InvalidInput(f"no Dynkin unit form {family}_{r}")
    return IntegralQuadraticForm([1] * r, {(i, j): -1 for i, j in edges})


_UNIT_ROOT_COUNTS = {"A": lambda r: r * (r + 1), "D": lambda r: 2 * r * (r - 1)}
_E_ROOT_COUNTS = {6: 72, 7: 126, 8: 240}


def _is_type_c(rep: FormAnalysis, q: IntegralQuadraticForm) -> bool:
    return (
        rep.non_negative
        and rep.connected
        and rep.irreducible
        and not rep.unit
        and all(1 <= d <= 2 for d in q.diag)
        and rep.fully_regular
    )


def dynkin_type(q: IntegralQuadraticForm, rep: FormAnalysis | None = None):
    """Dynkin type and corank of a connected non-negative form.

    Unit forms are typed A/D/E through a positive core and its exact 1-root
    count; non-unit forms must be irreducible Cox-regular and are typed C by
    the direct coefficient conditions.
    """
    rep = rep or analyze(q)
    if not rep.non_negative:
        raise NotNonNegative("dynkin_type needs a non-negative form")
    if not rep.connected:
        raise InvalidInput("dynkin_type needs a connected form")
    r, c = rep.rank, rep.corank
    if rep.unit:
        core = q.restrict(positive_core(q, rep))
        count = one_root_count(core)
        if count == _UNIT_ROOT_COUNTS["A"](r):
            fam = "A"
        elif r >= 4 and count == _UNIT_ROOT_COUNTS["D"](r):
            fam = "D"
        elif _E_ROOT_COUNTS.get(r) == count:
            fam = "E"
        else:
            raise AssertionError(
                f"unit-form classifier found no Dynkin graph with {count} roots in rank {r}"
            )
        return DynkinType(fam, r), c
    if not rep.irreducible or not rep.cox_regular:
        raise InvalidInput(
            "dynkin_type needs a unit form or an irreducible Cox-regular form"
        )
    if _is_type_c(rep, q):
        _assert_type_c_bounds(q)
        return DynkinType("C", r), c
    raise NotTypeC("non-unit form does not satisfy the type-C conditions")


def _assert_type_c_bounds(q):
    for (i, j), v in q.off.items():
        qi, qj = q.diag[i - 1], q.diag[j - 1]
        if qi == qj == 2:
            assert v in (-4, 0, 4)
        elif {qi, qj} == {1, 2}:
            assert v in (-2, 0, 2)
        else:
            assert -2 <= v <= 2


def positive_core(q: IntegralQuadraticForm, rep: FormAnalysis | None = None) -> list[int]:
    """Index set X with q^X positive, connected and of full rank.

    For type C the core is a spanning tree of a realization plus one
    bidirected loop; otherwise greedy variable deletion with backtracking.
    """
    rep = rep or analyze(q)
    if not rep.non_negative:
        raise NotNonNegative("positive_core needs a non-negative form")
    if not rep.connected:
        raise InvalidInput("positive_core needs a connected form")
    if rep.rank == 0:
        raise InvalidInput("positive_core needs a form of positive rank")
    if rep.corank == 0:
        return list(range(1, q.n + 1))
    if not rep.unit and _is_type_c(rep, q):
        B = realize(q, rep)
        tree = _spanning_tree_arrows(B)
        loop = B.bidirected_loops()[0]
        X = sorted(set(tree) | {loop})
        sub = analyze(q.restrict(X))
        assert sub.corank == 0 and sub.connected and sub.rank == rep.rank
        return X
    return _greedy_core(q, rep)


def _greedy_core(q, rep):
    target_rank = rep.rank

    def search(X):
        sub = q.restrict(sorted(X))
        a = analyze(sub)
        if a.rank < target_rank or not a.connected:
            return None
        if a.corank == 0:
            return sorted(X)
        for v in sorted(X):
            res = search(X - {v})
            if res is not None:
                return res
        return None

    X = search(frozenset(range(1, q.n + 1)))
    if X is None:
        raise AssertionError("no positive connected core found")
    return X


def _spanning_tree_arrows(B: BidirectedGraph) -> list[int]:
    seen = {1}
    tree = []
    grew = True
    while grew:
        grew = False
        for a in range(1, B.n + 1):
            u, v = B.underlying(a)
            if u == v:
                continue
            if (u in seen) != (v in seen):
                seen.add(u)
                seen.add(v)
                tree.append(a)
                grew = True
    return tree


# -- the pivot/partition machinery for type C --------------------------------


def pivot_saturate(q: IntegralQuadraticForm, i0: int):
    """Rigid G-transformation T with (q∘T)_{i0,j} > 0 for all j != i0.

    Gabrielov steps shrink the zero set S = {j : q_{i0 j} = 0}; sign
    inversions then fix the signs. Diagonal coefficients are untouched.
    """
    rep = analyze(q)
    if not rep.connected:
        raise InvalidInput("pivot_saturate needs a connected form")
    if not rep.cox_regular:
        raise InvalidInput("pivot_saturate needs a Cox-regular form")
    if q.coefficient(i0, i0) == 0:
        raise InvalidInput("pivot variable must have a nonzero diagonal")
    T = GTransform.identity(q.n)
    cur = q
    while True:
        S = [j for j in range(1, cur.n + 1) if j != i0 and cur.coefficient(i0, j) == 0]
        if not S:
            break
        step = None
        for j in S:
            for i in range(cur.n, 0, -1):
                if i == i0 or i in S:
                    continue
                if cur.coefficient(i, j) != 0:
                    step = (i, j)
                    break
            if step:
                break
        if step is None:
            raise InvalidInput("form is disconnected around the pivot")
        T, cur = T.then_gabrielov(cur, *step)
    for j in range(1, cur.n + 1):
        if j != i0 and cur.coefficient(i0, j) < 0:
            T, cur = T.then_sign(cur, j)
    assert all(
        cur.coefficient(i0, j) > (1 if j == i0 else 0) or j == i0
        for j in range(1, cur.n + 1)
    )
    assert cur.diag == q.diag
    return cur, T


@dataclass(frozen=True)
class TechCPartition:
    """Partition of 1..n into the two-head-loop class and per-vertex classes."""

    m: int
    u2: tuple  # indices of class U^2_{1,-1}
    groups: tuple  # entry v-2 is (plus, minus) for vertex v = 2..m

    def all_parts(self):
        yield (2, 1, -1), self.u2
        for v, (plus, minus) in enumerate(self.groups, start=2):
            yield (1, v, 1), plus
            yield (1, v, -1), minus

    def locate(self, idx):
        for (k, v, eps), part in self.all_parts():
            if idx in part:
                return (k, v, eps)
        raise InvalidInput(f"index {idx} not in partition")


def techc_partition(q: IntegralQuadraticForm) -> TechCPartition:
    """Inductive partition of a saturated type-C form (pivot at index 1).

    Index t joins: the loop class if q_t = 2; the class of a neighbour i with
    q_it = 2; the opposite side of a neighbour i with q_it = 0; or a fresh
    class when q_it = 1 throughout. The coefficient law is verified at the
    end and failure signals that the input was not of type C.
    """
    if q.diag[0] != 2 or any(q.coefficient(1, j) <= 0 for j in range(2, q.n + 1)):
        raise InvalidInput("techc_partition needs q_1 = 2 and q_1j > 0 for all j")
    u2 = [1]
    groups: list[tuple[list, list]] = []
    for t in range(2, q.n + 1):
        if q.diag[t - 1] == 2:
            u2.append(t)
            continue
        if q.diag[t - 1] != 1:
            raise NotTypeC(f"diagonal coefficient q_{t} not in {{1, 2}}")
        singles = [i for plus, minus in groups for i in plus + minus]
        hit2 = next((i for i in sorted(singles) if q.coefficient(i, t) == 2), None)
        if hit2 is not None:
            v, eps = _locate(groups, hit2)
            side = groups[v - 2][0 if eps == 1 else 1]
            side.append(t)
            continue
        hit0 = next((i for i in sorted(singles) if q.coefficient(i, t) == 0), None)
        if hit0 is not None:
            v, eps = _locate(groups, hit0)
            side = groups[v - 2][1 if eps == 1 else 0]
            side.append(t)
            continue
        if all(q.coefficient(i, t) == 1 for i in singles):
            groups.append(([t], []))
            continue
        raise NotTypeC(f"coefficient pattern at index {t} fits no case")
    part = TechCPartition(
        m=len(groups) + 1,
        u2=tuple(u2),
        groups=tuple((tuple(p), tuple(mn)) for p, mn in groups),
    )
    _verify_partition_law(q, part)
    return part


def _locate(groups, idx):
    for v, (plus, minus) in enumerate(groups, start=2):
        if idx in plus:
            return v, 1
        if idx in minus:
            return v, -1
    raise AssertionError


def _verify_partition_law(q, part):
    where = {}
    for key, members in part.all_parts():
        for i in members:
            where[i] = key
    if set(where) != set(range(1, q.n + 1)):
        raise NotTypeC("partition does not cover all indices")
    if not part.u2:
        raise NotTypeC("loop class is empty")
    for v, (plus, minus) in enumerate(part.groups, start=2):
        if not plus and not minus:
            raise NotTypeC(f"class of vertex {v} is empty")
    for i in range(1, q.n + 1):
        for j in range(i, q.n + 1):
            k, v, eps = where[i]
            k2, v2, eps2 = where[j]
            if v == v2:
                expected = (k * abs(eps + eps2)) // (2 if i == j else 1)
            else:
                expected = k * k2
            if q.coefficient(i, j) != expected:
                raise NotTypeC(
                    f"coefficient law fails at ({i}, {j}): "
                    f"{q.coefficient(i, j)} != {expected}"
                )


def star_realization(q: IntegralQuadraticForm, rep: FormAnalysis | None = None):
    """G-transformation T and graph B' with q∘T = incidence form of B'.

    B' consists of two-head loops at vertex 1, directed arrows v -> 1 and
    two-head arrows v -- 1, according to the saturated partition.
    """
    rep = rep or analyze(q)
    if not rep.non_negative:
        raise NotNonNegative("type-C realization needs a non-negative form")
    if not _is_type_c(rep, q):
        raise NotTypeC("form is not of Dynkin type C")
    T = GTransform.identity(q.n)
    cur = q
    pivot = next(i for i in range(1, q.n + 1) if q.diag[i - 1] == 2)
    if pivot != 1:
        pi = list(range(1, q.n + 1))
        pi[0], pi[pivot - 1] = pi[pivot - 1], pi[0]
        T, cur = T.then_perm(cur, pi)
    sat, T_sat = pivot_saturate(cur, 1)
    T = GTransform(T.matrix @ T_sat.matrix, T.steps + T_sat.steps)
    cur = sat
    part = techc_partition(cur)
    ends = [None] * q.n
    for i in part.u2:
        ends[i - 1] = ((1, -1), (1, -1))
    for v, (plus, minus) in enumerate(part.groups, start=2):
        for i in plus:
            ends[i - 1] = ((v, 1), (1, -1))
        for i in minus:
            ends[i - 1] = ((v, -1), (1, -1))
    B = BidirectedGraph(part.m, ends)
    assert B.incidence_form() == cur
    return T, cur, B, part


def realize(q: IntegralQuadraticForm, rep: FormAnalysis | None = None) -> BidirectedGraph:
    """A bidirected graph whose incidence form is exactly q.

    Unit forms of type A/D are realized by backtracking over incidence rows;
    type E is rejected. Non-unit type-C forms go through the saturated
    partition and are pulled back with inverse graph transformations.
    """
    rep = rep or analyze(q)
    if not rep.non_negative:
        raise NotNonNegative("realize needs a non-negative form")
    if not rep.connected or not rep.irreducible:
        raise InvalidInput("realize needs a connected irreducible form")
    if rep.unit:
        typ, _ = dynkin_type(q, rep)
        if typ.family == "E":
            raise NotIncidenceForm(f"unit forms of type {typ} are not incidence forms")
        m = rep.rank + 1 if typ.family == "A" else rep.rank
        B = _realize_unit_backtracking(q, m)
        if B is None:
            raise AssertionError("backtracking realizer found no graph")
        assert B.incidence_form() == q
        return B
    T, cur, B, _ = star_realization(q, rep)
    for step in reversed(T.steps):
        if step[0] == "gabrielov":
            B = graph_gabrielov(B, step[1], step[2])
        elif step[0] == "sign":
            B = sign_flip(B, step[1])
        else:
            pi = step[1]
            inv = [0] * len(pi)
            for k, p in enumerate(pi, start=1):
                inv[p - 1] = k
            B = arrow_permutation(B, inv)
    assert B.incidence_form() == q
    return B


def _realize_unit_backtracking(q: IntegralQuadraticForm, m: int):
    """Assign incidence rows e_u*eps + e_u2*eps2 matching all Gram products.

    Arrows are processed in a connectivity order of the form's bigraph, so
    each new row shares a vertex with an earlier one; fresh vertices are used
    in increasing order with their first sign pinned to +1 (switching symmetry).
    """
    n = q.n
    order = _bigraph_bfs_order(q)
    G = q.gram()
    rows: dict[int, tuple] = {}

    def products_ok(i, row):
        for j, rj in rows.items():
            if _sparse_dot(row, rj) != G[i - 1, j - 1]:
                return False
        return True

    def candidates(used_count, first):
        if first:
            yield ((1, 1), (2, -1))
            return
        top = min(used_count + 1, m)
        for u in range(1, top + 1):
            for u2 in range(u + 1, top + 1):
                fresh = u2 == used_count + 1
                for e in (1, -1):
                    for e2 in ((1,) if fresh else (1, -1)):
                        yield ((u, e), (u2, e2))

    def rec(k, used_count):
        if k == len(order):
            return dict(rows) if used_count == m else None
        i = order[k]
        first = k == 0
        for ends in candidates(used_count, first):
            row = ends
            if not products_ok(i, row):
                continue
            rows[i] = row
            new_used = max(used_count, ends[0][0], ends[1][0])
            if new_used <= m:
                res = rec(k + 1, new_used)
                if res is not None:
                    return res
            del rows[i]
        return None

    sol = rec(0, 0)
    if sol is None:
        return None
    return BidirectedGraph(m, [sol[i] for i in range(1, n + 1)])


def _sparse_dot(ends_a, ends_b):
    total = 0
    for (u, e) in ends_a:
        for (w, f) in ends_b:
            if u == w:
                total += e * f
    return total


def _bigraph_bfs_order(q):
    n = q.n
    adj = {i: set() for i in range(1, n + 1)}
    for (i, j) in q.off:
        adj[i].add(j)
        adj[j].add(i)
    order = [1]
    seen = {1}
    queue = [1]
    while queue:
        v = queue.pop(0)
        for w in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
    if len(order) != n:
        raise InvalidInput("form is not connected")
    return order


# -- canonical reduction of type C (seven steps) ----------------------------


def canonical_c(q: IntegralQuadraticForm):
    """G-transformation onto the canonical (c1,c2)-extension of type C.

    Returns (T, r, c1, c2) with q∘T equal to the incidence form of the
    canonical graph; c1 + c2 = crk(q) and c2 = dl(q) - 1. The final equality
    is asserted, not assumed.
    """
    rep = analyze(q)
    T, cur, B, part = star_realization(q, rep)

    state = {"T": T, "q": cur, "B": B}

    def push_gab(i, j):
        state["T"], q2 = state["T"].then_gabrielov(state["q"], i, j)
        state["B"] = graph_gabrielov(state["B"], i, j)
        state["q"] = q2
        assert state["B"].incidence_form() == q2

    def push_sign(i):
        state["T"], q2 = state["T"].then_sign(state["q"], i)
        state["B"] = sign_flip(state["B"], i)
        state["q"] = q2

    def push_perm(pi):
        state["T"], q2 = state["T"].then_perm(state["q"], pi)
        state["B"] = arrow_permutation(state["B"], pi)
        state["q"] = q2

    loop_arrow = part.u2[0]
    groups = {
        v: sorted(plus) + sorted(minus)
        for v, (plus, minus) in enumerate(part.groups, start=2)
    }
    minus_sets = {
        v: sorted(minus) for v, (_, minus) in enumerate(part.groups, start=2)
    }
    # step 2: turn every two-head arrow v--1 into a directed arrow v->1
    for v in sorted(minus_sets):
        for j in minus_sets[v]:
            push_gab(loop_arrow, j)
            push_sign(j)
    # step 3: move parallel extras of groups v >= 3 into group 2
    group_arrows = {v: list(groups[v]) for v in groups}
    if len(group_arrows) > 1:
        vs = sorted(group_arrows)
        anchor = min(group_arrows[vs[0]])
        for v in vs[1:]:
            keep = min(group_arrows[v])
            for j in [a for a in group_arrows[v] if a != keep]:
                push_gab(anchor, j)
                push_gab(keep, j)
                push_sign(j)
                group_arrows[v].remove(j)
                group_arrows[vs[0]].append(j)
    # step 4: relabel arrows into canonical order
    vs = sorted(group_arrows)
    singles = [min(group_arrows[v]) for v in vs[1:]]
    multi = sorted(group_arrows[vs[0]])
    extra_loops = [i for i in part.u2 if i != loop_arrow]
    new_order = [loop_arrow] + singles + [multi[0]] + multi[1:] + extra_loops
    r = len(singles) + 2
    c1 = len(multi) - 1
    c2 = len(extra_loops)
    if new_order != list(range(1, q.n + 1)):
        push_perm(tuple(new_order))
    # step 5: extras of the multi group become two-tail arrows
    for k in range(1, c1 + 1):
        push_gab(1, r + k)
    # step 6: walk the loop down the chain
    for i in range(1, r):
        push_gab(i + 1, i)
    # step 7: flip remaining loops from two-head to two-tail
    for k in range(1, c2 + 1):
        push_sign(r + c1 + k)
    target = canonical_c_graph(r, c1, c2).incidence_form()
    assert state["q"] == target
    assert q.compose(state["T"].matrix) == target
    assert c1 + c2 == rep.corank
    assert c2 == rep.dotted_loops - 1
    return state["T"], r, c1, c2


def dynkin_plus_zero(q: IntegralQuadraticForm, variant: str = "C"):
    """Z-equivalence S with q∘S = q_{C_r} + zero^c (or q_{D_r} + zero^c).

    The matrix S is unimodular but not in general a G-transformation: the
    table rewrites that strip loops are plain Z-equivalences.
    """
    if variant not in ("C", "D"):
        raise InvalidInput("variant must be 'C' or 'D'")
    rep = analyze(q)
    T, cur, B, part = star_realization(q, rep)

    state = {"M": T.matrix, "q": cur, "B": B}

    def push_gab(i, j):
        Mstep = _gabrielov_matrix(state["q"], i, j)
        state["B"] = graph_gabrielov(state["B"], i, j)
        state["q"] = gabrielov_update(state["q"], i, j)
        state["M"] = state["M"] @ Mstep

    def push_sign(i):
        Mstep = _sign_matrix(q.n, i)
        state["B"] = sign_flip(state["B"], i)
        state["q"] = state["q"].compose(Mstep)
        state["M"] = state["M"] @ Mstep

    def push_perm(pi):
        Mstep = _perm_matrix(pi)
        state["B"] = arrow_permutation(state["B"], pi)
        state["q"] = state["q"].permuted(pi)
        state["M"] = state["M"] @ Mstep

    def push_rewrite(i, j, eps):
        Mstep = rewrite_matrix(q.n, i, j, eps)
        state["B"] = endpoint_rewrite(state["B"], i, j, eps)
        state["q"] = state["q"].compose(Mstep)
        state["M"] = state["M"] @ Mstep

    loop_arrow = part.u2[0]
    minus_sets = {
        v: sorted(minus) for v, (_, minus) in enumerate(part.groups, start=2)
    }
    for v in sorted(minus_sets):
        for j in minus_sets[v]:
            push_gab(loop_arrow, j)
            push_sign(j)
    groups = {
        v: sorted(plus) + sorted(minus)
        for v, (plus, minus) in enumerate(part.groups, start=2)
    }
    group_arrows = {v: list(groups[v]) for v in groups}
    if len(group_arrows) > 1:
        vs = sorted(group_arrows)
        anchor = min(group_arrows[vs[0]])
        for v in vs[1:]:
            keep = min(group_arrows[v])
            for j in [a for a in group_arrows[v] if a != keep]:
                push_gab(anchor, j)
                push_gab(keep, j)
                push_sign(j)
                group_arrows[v].remove(j)
                group_arrows[vs[0]].append(j)
    vs = sorted(group_arrows)
    singles = [min(group_arrows[v]) for v in vs[1:]]
    multi = sorted(group_arrows[vs[0]])
    extra_loops = [i for i in part.u2 if i != loop_arrow]
    new_order = [loop_arrow] + singles + [multi[0]] + multi[1:] + extra_loops
    r = len(singles) + 2
    c1 = len(multi) - 1
    c2 = len(extra_loops)
    c = c1 + c2
    if new_order != list(range(1, q.n + 1)):
        push_perm(tuple(new_order))
    # step 1': parallel extras become directed loops (rewrite S^+_{r, r+k})
    for k in range(1, c1 + 1):
        push_rewrite(r, r + k, 1)
    # step 2': extra two-head loops become directed loops (rewrite S^+_{1, ...})
    for k in range(1, c2 + 1):
        push_rewrite(1, r + c1 + k, 1)
    # step 3': walk the loop down the chain
    for i in range(1, r):
        push_gab(i + 1, i)
    target_c = canonical_c_graph(r, 0, 0).incidence_form()
    if c:
        target_c = target_c.direct_sum(zero_form(c))
    if variant == "C":
        assert state["q"] == target_c
        assert q.compose(state["M"]) == target_c
        return state["M"], target_c
    if r < 4:
        raise InvalidInput("variant 'D' needs rank >= 4")
    push_rewrite(2, 1, -1)
    target_d = dynkin_unit_form("D", r)
    if c:
        target_d = target_d.direct_sum(zero_form(c))
    assert state["q"] == target_d
    assert q.compose(state["M"]) == target_d
    return state["M"], target_d
