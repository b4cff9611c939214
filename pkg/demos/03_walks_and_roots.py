#!/usr/bin/env python3
# Walks generate roots: open walks give 1-roots, positive closed walks the
# radical, negative closed walks certain 2-roots. For positive forms the
# walk roots form a finite root system.

from bidiforms import (
    BidirectedGraph,
    Walk,
    brute_force_roots,
    root_system_report,
    roots_positive,
    theorem_c_roots,
)

B = BidirectedGraph(3, [((1, 1), (2, -1)), ((2, 1), (3, -1)), ((1, -1), (2, -1))])
q = B.incidence_form()

# a hand-picked open walk and its inc vector
w = Walk.parse_text(B, "3 2 2 3 1 1 2")
print("walk:", w.format_text(), " sigma:", w.sigma(), " inc:", w.inc())
print("q(inc) =", q.evaluate(w.inc()))

# all 1-roots via walks, cross-checked against plain enumeration
ones = theorem_c_roots(B, 1, 8)
print("walk 1-roots:", sorted(ones.vectors))
print("agrees with box enumeration:", ones.vectors == brute_force_roots(q, 1, 3).vectors)

# the unbalanced graph also reaches all six 2-roots through negative closed walks
twos = theorem_c_roots(B, 2, 10)
print("walk 2-roots:", sorted(twos.vectors))

# B is an unbalanced 1-tree, so the whole incidence-root set is finite:
# 2n^2 + 1 vectors with exactly 2n of value two
rep = roots_positive(B)
print("|roots| =", len(rep.vectors), " by value:", rep.value_counts)

# and it is a bona fide finite root system of type C_n
print(root_system_report(B))

# power laws of closed negative walks: odd powers repeat, even powers vanish
neg = Walk.parse_text(B, "3 2 2 1 1 3 2 2 3")
print("inc(w) =", neg.inc(), " inc(w^2) =", neg.power(2).inc(), " inc(w^3) =", neg.power(3).inc())
