#!/usr/bin/env python3
# Solving q(x) = d. Type-C forms of rank >= 4 reduce to the canonical C_4
# block: write d as four squares, push through a fixed determinant-2 bridge
# matrix, and pull back. Unit forms search their positive core exactly.

from bidiforms import IntegralQuadraticForm, canonical_c_graph, four_squares, solve
from bidiforms.roots_dioph import LAGRANGE_BRIDGE

q_c4 = canonical_c_graph(4, 0, 0).incidence_form()
print("q_C4:", q_c4)

# the bridge turns q_C4 into the Lagrange form (not a Z-equivalence: det = 2)
print("bridge:", LAGRANGE_BRIDGE.to_lists(), " det =", LAGRANGE_BRIDGE.det())

d = 14
print("four squares of 14:", four_squares(d))
rep = solve(q_c4, d)
print(f"q_C4{rep.x} = {q_c4.evaluate(rep.x)}  via {rep.strategy}")

# a corank-2 canonical extension is universal as well (rank 5 >= 4)
q_big = canonical_c_graph(5, 1, 1).incidence_form()
for d in (0, 1, 97, 203, 290):
    rep = solve(q_big, d)
    assert q_big.evaluate(rep.x) == d
    print(f"d={d:>3}: x = {rep.x}")

# unit forms go through their positive core; 203 and 290 are classic
# stress values for quaternary universality checks
q_a4 = IntegralQuadraticForm([1] * 4, {(1, 2): -1, (2, 3): -1, (3, 4): -1})
print("q_A4(0,5,1,14) =", q_a4.evaluate((0, 5, 1, 14)))
print("q_A4(1,0,0,17) =", q_a4.evaluate((1, 0, 0, 17)))
for d in (203, 290):
    rep = solve(q_a4, d)
    print(f"d={d}: x = {rep.x}  via {rep.strategy}")
