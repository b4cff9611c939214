import random

import pytest

from bidiforms.errors import GentlenessViolation, InvalidInput
from bidiforms.gentle import (
    GentlePresentation,
    cartan,
    euler_pipeline,
    threads,
    validate,
)
from bidiforms.qform import IntegralQuadraticForm, analyze

EX_LOOP_PAIR = GentlePresentation(
    2, [("a", 1, 2), ("b", 2, 1)], [("a", "b")]
)
A2_QUIVER = GentlePresentation(2, [("a", 1, 2)], [])
LAMBDA_K = GentlePresentation(1, [], [])


def test_validate_known_good():
    assert validate(EX_LOOP_PAIR) == []
    assert validate(A2_QUIVER) == []
    assert validate(LAMBDA_K) == []


def test_validate_degree_violation():
    pres = GentlePresentation(
        4,
        [("a", 1, 2), ("b", 1, 3), ("c", 1, 4)],
        [],
    )
    problems = validate(pres)
    assert any("outdegree" in p for p in problems)


def test_validate_noncomposable_relation():
    pres = GentlePresentation(3, [("a", 1, 2), ("b", 1, 3)], [("a", "b")])
    assert any("not composable" in p for p in validate(pres))


def test_threads_loop_pair():
    permitted, forbidden, phi = threads(EX_LOOP_PAIR)
    fkeys = [(th.path, th.vertices) for th in forbidden]
    pkeys = [(th.path, th.vertices) for th in permitted]
    assert (("a", "b"), (1, 2, 1)) in fkeys
    assert ((), (2,)) in fkeys
    assert (("b", "a"), (2, 1, 2)) in pkeys
    assert ((), (1,)) in pkeys
    # phi: forbidden alpha-beta -> trivial permitted at 1, trivial at 2 -> beta-alpha
    f_ab = fkeys.index((("a", "b"), (1, 2, 1)))
    assert permitted[phi[f_ab]].is_trivial and permitted[phi[f_ab]].start == 1
    f_triv = fkeys.index(((), (2,)))
    assert permitted[phi[f_triv]].path == ("b", "a")


def test_threads_a2_quiver():
    permitted, forbidden, _ = threads(A2_QUIVER)
    assert sorted((th.path, th.vertices) for th in forbidden) == [
        ((), (1,)),
        ((), (2,)),
        (("a",), (1, 2)),
    ]
    assert sorted((th.path, th.vertices) for th in permitted) == [
        ((), (1,)),
        ((), (2,)),
        (("a",), (1, 2)),
    ]


def test_threads_lambda_k():
    permitted, forbidden, _ = threads(LAMBDA_K)
    assert [th.vertices for th in permitted] == [(1,), (1,)]
    assert [th.vertices for th in forbidden] == [(1,), (1,)]


def test_cartan_examples():
    assert cartan(EX_LOOP_PAIR).to_lists() == [[1, 1], [1, 2]]
    assert cartan(LAMBDA_K).to_lists() == [[1]]
    assert cartan(A2_QUIVER).to_lists() == [[1, 0], [1, 1]]


def test_euler_pipeline_loop_pair():
    rep = euler_pipeline(EX_LOOP_PAIR)
    assert rep.form == IntegralQuadraticForm([2, 1], {(1, 2): -2})
    assert rep.incidence.to_lists() == [[2, 0], [-1, 1]]
    B = rep.graph
    assert B.m == 2 and B.n == 2
    assert len(B.bidirected_loops()) == 1
    assert B.incidence_form() == rep.form
    assert rep.components == (((1, 2), "C2", 0),)


def test_euler_pipeline_lambda_k():
    rep = euler_pipeline(LAMBDA_K)
    assert rep.form == IntegralQuadraticForm([1])
    assert rep.graph.n == 1 and not rep.graph.is_loop(1)
    assert rep.components == (((1,), "A1", 0),)


def test_euler_pipeline_a2():
    rep = euler_pipeline(A2_QUIVER)
    assert rep.form.gram().to_lists() == [[2, -1], [-1, 2]]
    assert rep.components == (((1, 2), "A2", 0),)


def random_gentle(rng, max_vertices=6):
    """Random valid gentle presentation with finite global dimension."""
    while True:
        m = rng.randint(1, max_vertices)
        if m == 1:
            return LAMBDA_K
        indeg = {v: 0 for v in range(1, m + 1)}
        outdeg = {v: 0 for v in range(1, m + 1)}
        arrows = []

        def add(u, v):
            arrows.append((f"x{len(arrows)}", u, v))
            outdeg[u] += 1
            indeg[v] += 1

        ok = True
        for v in range(2, m + 1):
            anchors = [
                w
                for w in range(1, v)
                if outdeg[w] < 2 or indeg[w] < 2
            ]
            if not anchors:
                ok = False
                break
            w = rng.choice(anchors)
            if outdeg[w] < 2 and (indeg[w] >= 2 or rng.randrange(2) == 0):
                add(w, v)
            else:
                add(v, w)
        if not ok:
            continue
        for _ in range(rng.randint(0, 2)):
            pairs = [
                (u, v)
                for u in range(1, m + 1)
                for v in range(1, m + 1)
                if u != v and outdeg[u] < 2 and indeg[v] < 2
            ]
            if pairs:
                add(*rng.choice(pairs))
        pres0 = GentlePresentation(m, arrows, [])
        relations = []
        for v in range(1, m + 1):
            ins = [a for a, _, t in arrows if t == v]
            outs = [a for a, s, _ in arrows if s == v]
            if len(ins) == 2 and len(outs) == 2:
                if rng.randrange(2) == 0:
                    relations += [(ins[0], outs[0]), (ins[1], outs[1])]
                else:
                    relations += [(ins[0], outs[1]), (ins[1], outs[0])]
            elif len(ins) == 2 and len(outs) == 1:
                relations.append((rng.choice(ins), outs[0]))
            elif len(ins) == 1 and len(outs) == 2:
                relations.append((ins[0], rng.choice(outs)))
            elif len(ins) == 1 and len(outs) == 1 and rng.randrange(2) == 0:
                relations.append((ins[0], outs[0]))
        pres = GentlePresentation(m, arrows, relations)
        if not validate(pres):
            return pres


def test_random_presentations_identities():
    rng = random.Random(71)
    for _ in range(50):
        pres = random_gentle(rng)
        permitted, forbidden, phi = threads(pres)
        C = cartan(pres)
        for v in range(1, pres.m + 1):
            assert sum(th.vertices.count(v) for th in permitted) == 2
            assert sum(th.vertices.count(v) for th in forbidden) == 2
        for fi, th in enumerate(forbidden):
            eta = permitted[phi[fi]]
            assert C.matvec(th.floor_vector(pres.m)) == eta.ceil_vector(pres.m)
            assert eta.start == th.start
        rep = euler_pipeline(pres)
        G = rep.form.gram()
        assert (rep.incidence @ rep.incidence.transpose()) == G
        a = analyze(rep.form)
        assert a.non_negative
        for _, label, _ in rep.components:
            base = label.split("*")[-1]
            assert label == "zero" or base[0] in "ADC"
        for r in range(rep.incidence.rows):
            norm = sum(v * v for v in rep.incidence.row(r))
            assert norm in (0, 2, 4)


def test_presentation_json_round_trip():
    rng = random.Random(73)
    for _ in range(10):
        pres = random_gentle(rng, max_vertices=5)
        assert GentlePresentation.from_json_dict(pres.to_json_dict()) == pres


def test_ensure_valid_raises():
    bad = GentlePresentation(1, [("a", 1, 1)], [])
    with pytest.raises(GentlenessViolation):
        threads(bad)


def test_unknown_arrow_in_relation():
    with pytest.raises(InvalidInput):
        GentlePresentation(2, [("a", 1, 2)], [("a", "zzz")])
