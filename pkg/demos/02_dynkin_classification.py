#!/usr/bin/env python3
# Dynkin classification: unit forms land in A/D/E, the non-unitary incidence
# forms in type C; only A, D and C are realizable by bidirected graphs.

from bidiforms import (
    IntegralQuadraticForm,
    NotIncidenceForm,
    analyze,
    canonical_c,
    canonical_c_graph,
    dynkin_type,
    dynkin_unit_form,
    realize,
)

# the 4-variable running example: one dotted loop, mixed edge signs
q = IntegralQuadraticForm(
    [2, 1, 1, 1], {(1, 2): -2, (1, 3): 2, (2, 3): -1, (2, 4): 1, (3, 4): -1}
)
rep = analyze(q)
print("rank", rep.rank, "corank", rep.corank, "cox-regular", rep.cox_regular)

typ, crk = dynkin_type(q)
print("Dynkin type:", typ, "corank", crk)

# realize it as an incidence form: 3 vertices, 4 arrows, one bidirected loop
B = realize(q)
print("graph:", B)
print("round trip ok:", B.incidence_form() == q)

# canonical reduction: an explicit G-transformation onto the canonical
# (c1, c2)-extension of the type-C Dynkin bigraph
T, r, c1, c2 = canonical_c(q)
print(f"canonical extension: r={r}, c1={c1}, c2={c2}")
print("steps:", T.steps)
target = canonical_c_graph(r, c1, c2).incidence_form()
print("q o T == canonical target:", q.compose(T.matrix) == target)

# type E unit forms are classified but never incidence forms
e6 = dynkin_unit_form("E", 6)
print("E6 classified as:", dynkin_type(e6)[0])
try:
    realize(e6)
except NotIncidenceForm as exc:
    print("realize(E6) rejected:", exc)
