import random

import pytest

from bidiforms.bidigraph import canonical_a, loops_graph
from bidiforms.errors import InvalidInput, NotPositive
from bidiforms.walks import (
    Walk,
    brute_force_roots,
    roots_positive,
    theorem_c_roots,
    trivial_walk,
    walk_root_cover,
)
from tests.test_bidigraph import B_3V, B_4V, Q_A3, random_connected

# unbalanced 3-vertex graph of the worked examples: arrows
# 1: u1 -> u2, 2: u2 -> u3, 3: two-head u1 u2


def test_inc_worked_example_walk():
    w = Walk.parse_text(B_3V, "3 2 2 3 1 1 2")
    assert w.inc() == (-1, -1, -1)
    w4 = Walk.parse_text(B_4V, "4 3 3 2 2 1 1")
    assert w4.inc() == (-1, -1, -1)


def test_inc_trivial_walk_is_zero():
    assert trivial_walk(B_3V, 2).inc() == (0, 0, 0)


def test_inc_one_vertex_basis():
    B = loops_graph(0, 1, 3)  # i1 two-tail, i2..i4 two-head
    for k in range(2, 5):
        w = Walk(B, 1, [(1, False), (k, False)])
        expected = tuple(1 if t in (0, k - 1) else 0 for t in range(4))
        assert w.inc() == expected
        assert B.incidence_form().evaluate(w.inc()) == 0


def test_one_vertex_radical_basis_golden():
    # the vectors e1+ek form a basis of the radical of the one-vertex graph form
    from bidiforms.exact_linalg import IntMatrix, hermite_normal_form, integer_kernel

    for n in (2, 3, 5):
        B = loops_graph(0, 1, n - 1)
        q = B.incidence_form()
        ys = [Walk(B, 1, [(1, False), (k, False)]).inc() for k in range(2, n + 1)]
        kernel = integer_kernel(q.gram())
        assert len(kernel) == n - 1 == len(ys)
        # equal lattices iff equal Hermite normal forms
        assert hermite_normal_form(IntMatrix(ys)) == hermite_normal_form(
            IntMatrix(kernel)
        )


def test_inc_intertwining_identity():
    rng = random.Random(21)
    for _ in range(40):
        B = random_connected(rng)
        w = random_walk(rng, B)
        x = w.inc()
        It = B.incidence_matrix().transpose()
        lhs = It.matvec(x)
        expected = [0] * B.m
        expected[w.start - 1] += 1
        expected[w.end - 1] -= w.sigma()
        assert list(lhs) == expected


def random_walk(rng, B, max_len=6):
    w = trivial_walk(B, rng.randint(1, B.m))
    for _ in range(rng.randint(0, max_len)):
        v = w.end
        options = []
        for a in range(1, B.n + 1):
            u, u2 = B.underlying(a)
            if v in (u, u2):
                if B.is_directed_loop(a):
                    options.append((a, False))
                    options.append((a, True))
                else:
                    options.append((a, False))
        if not options:
            break
        a, inv = rng.choice(options)
        step_end = [u for u in B.underlying(a) if u != v] or [v]
        w = w.compose(Walk(B, v, [(a, inv)], [v, step_end[0]]))
    return w


def test_compose_inc_law():
    rng = random.Random(23)
    for _ in range(40):
        B = random_connected(rng)
        w1 = random_walk(rng, B)
        w2 = random_walk(rng, B)
        if w1.end != w2.start:
            continue
        w = w1.compose(w2)
        lhs = w.inc()
        rhs = tuple(
            a + w1.sigma() * b for a, b in zip(w1.inc(), w2.inc())
        )
        assert lhs == rhs


def test_inverse_inc_law():
    rng = random.Random(25)
    for _ in range(40):
        B = random_connected(rng)
        w = random_walk(rng, B)
        assert w.inverse().inc() == tuple(-w.sigma() * c for c in w.inc())
    assert trivial_walk(B_3V, 1).inverse().inc() == (0, 0, 0)


def test_conjugation_law():
    rng = random.Random(27)
    hits = 0
    while hits < 15:
        B = random_connected(rng)
        w = random_walk(rng, B)
        wp = random_walk(rng, B)
        if not (wp.is_closed() and wp.sigma() == 1 and w.end == wp.start):
            continue
        conj = w.compose(wp).compose(w.inverse())
        assert conj.inc() == tuple(w.sigma() * c for c in wp.inc())
        hits += 1


def test_power_laws():
    # negative closed walk of the 3-vertex example
    w = Walk.parse_text(B_3V, "3 2 2 1 1 3 2 2 3")
    assert w.sigma() == -1
    assert w.inc() == (-1, -2, -1)
    assert w.power(2).inc() == (0, 0, 0)
    assert w.power(3).inc() == w.inc()
    # positive closed walks scale linearly
    rng = random.Random(29)
    hits = 0
    while hits < 10:
        B = random_connected(rng)
        wp = random_walk(rng, B)
        if not (wp.is_closed() and wp.sigma() == 1):
            continue
        for k in (2, 3):
            assert wp.power(k).inc() == tuple(k * c for c in wp.inc())
        hits += 1


def test_reduce_preserves_inc():
    rng = random.Random(31)
    for _ in range(60):
        B = random_connected(rng)
        w = random_walk(rng, B)
        back = w.compose(w.inverse())
        assert back.reduce().length == 0
        assert back.reduce().inc() == back.inc() == (0,) * B.n
        ww = w.compose(w.inverse()).compose(w)
        assert ww.reduce().inc() == ww.inc() == w.inc()


def test_walk_text_round_trip():
    w = Walk.parse_text(B_3V, "3 2 2 3 1 1 2")
    assert Walk.parse_text(B_3V, w.format_text()) == w
    B = loops_graph(1, 0, 0)
    w = Walk(B, 1, [(1, True), (1, False)])
    assert "^-1" in w.format_text()
    assert Walk.parse_text(B, w.format_text()) == w


def test_walk_validation_errors():
    with pytest.raises(InvalidInput):
        Walk(B_3V, 1, [(2, False)])  # arrow 2 is not incident to vertex 1
    with pytest.raises(InvalidInput):
        Walk(B_3V, 1, [(1, True)])  # formal inverse of a non-directed-loop


def test_theorem_c_roots_a3():
    expected_ones = set()
    for v in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 1, 1)]:
        expected_ones.add(v)
        expected_ones.add(tuple(-c for c in v))
    for B in (B_3V, B_4V):
        rs = theorem_c_roots(B, 1, 8)
        assert rs.vectors == frozenset(expected_ones)
    assert brute_force_roots(Q_A3, 1, 3).vectors == frozenset(expected_ones)


def test_theorem_c_two_roots():
    assert theorem_c_roots(B_4V, 2, 10).vectors == frozenset()
    expected = set()
    for v in [(1, 0, 1), (1, 0, -1), (1, 2, 1)]:
        expected.add(v)
        expected.add(tuple(-c for c in v))
    assert theorem_c_roots(B_3V, 2, 10).vectors == frozenset(expected)
    assert brute_force_roots(Q_A3, 2, 3).vectors == frozenset(expected)


def test_brute_force_trivial_cases():
    assert brute_force_roots(Q_A3, -1, 2).vectors == frozenset()
    assert (0, 0, 0) in brute_force_roots(Q_A3, 0, 1).vectors


def test_oracle_sandwich_random():
    rng = random.Random(33)
    for _ in range(40):
        m = rng.randint(1, 5)
        B = random_connected(rng, m=m, n=rng.randint(max(1, m - 1), 5))
        q = B.incidence_form()
        sets, complete = walk_root_cover(B, bound=2)
        assert complete
        for d in (0, 1, 2):
            for x in sets[d]:
                assert q.evaluate(x) == d
        beta = 1 if not sets[2] else 0
        from bidiforms.bidigraph import balance

        assert balance(B).beta == beta


def test_roots_positive_tree_counts():
    for n in range(1, 7):
        B = canonical_a(n, 0)
        rep = roots_positive(B)
        assert len(rep.vectors) == n * n + n + 1
        assert rep.value_counts[1] == n * n + n


def test_roots_positive_single_arrow():
    rep = roots_positive(canonical_a(1, 0))
    assert rep.vectors == frozenset({(0,), (1,), (-1,)})


def test_roots_positive_one_tree_counts():
    rng = random.Random(35)
    B = B_3V  # unbalanced 1-tree with n = 3
    rep = roots_positive(B)
    assert len(rep.vectors) == 2 * 9 + 1
    assert rep.value_counts[2] == 6
    q = B.incidence_form()
    twos = {x for x in rep.vectors if q.evaluate(x) == 2}
    assert twos == brute_force_roots(q, 2, 3).vectors
    ones = {x for x in rep.vectors if q.evaluate(x) == 1}
    assert ones == brute_force_roots(q, 1, 3).vectors


def test_roots_positive_rejects_non_positive():
    with pytest.raises(NotPositive):
        roots_positive(canonical_a(2, 1))  # corank 1
    with pytest.raises(NotPositive):
        roots_positive(loops_graph(1, 1, 0))  # directed loop
