#!/usr/bin/env python3
# Bidirected graphs and their incidence forms: two different graphs can
# carry the same quadratic form, and balance tells them apart.

from bidiforms import BidirectedGraph, balance, canonical_a, rank_corank

# a 3-vertex graph: two directed arrows and one two-head arrow
B = BidirectedGraph(3, [((1, 1), (2, -1)), ((2, 1), (3, -1)), ((1, -1), (2, -1))])
# the directed path quiver on 4 vertices
Bp = canonical_a(3, 0)

print("I(B)  =", B.incidence_matrix().to_lists())
print("I(B') =", Bp.incidence_matrix().to_lists())

q = B.incidence_form()
qp = Bp.incidence_form()
print("q_B  :", q)
print("q_B' :", qp)
print("same form?", q == qp)  # True: vertex counts differ, the form does not

# balance distinguishes them: B has a closed walk with one bidirected arrow
print("beta(B)  =", balance(B).beta, " witness:", balance(B).witness)
print("beta(B') =", balance(Bp).beta)

# rank m - beta and corank n - m + beta, straight from the graph
print("rank/corank of q_B :", rank_corank(B))
print("rank/corank of q_B':", rank_corank(Bp))

# a balanced graph can be switched into an honest quiver
O = balance(Bp).quiver_switch
print("quiver switch signs:", O.signs)

# the bigraph (line signed graph) view of the shared form
print("line bigraph:", B.line_bigraph())
