#!/usr/bin/env python3
# Euler forms of gentle presentations: count relation-avoiding paths into the
# Cartan matrix, read the incidence matrix off the forbidden threads, and land
# on a non-negative form of type A, D or C.

from bidiforms import GentlePresentation, cartan, euler_pipeline, threads

# two vertices, arrows a: 1->2 and b: 2->1, with the single relation ab
pres = GentlePresentation(2, [("a", 1, 2), ("b", 2, 1)], [("a", "b")])

C = cartan(pres)
print("Cartan matrix:", C.to_lists())

permitted, forbidden, phi = threads(pres)
print("permitted threads:", [(t.path, t.vertices) for t in permitted])
print("forbidden threads:", [(t.path, t.vertices) for t in forbidden])
for fi, th in enumerate(forbidden):
    print(f"  phi{th.path or th.vertices} = {permitted[phi[fi]].path or permitted[phi[fi]].vertices}")

rep = euler_pipeline(pres)
print("Euler form:", rep.form)
print("thread incidence matrix:", rep.incidence.to_lists())
print("bidirected graph:", rep.graph)
print("components:", rep.components)  # type C_2, positive

# a longer example: a commutative-looking square with two relations
square = GentlePresentation(
    4,
    [("a", 1, 2), ("b", 2, 4), ("c", 1, 3), ("d", 3, 4)],
    [("a", "b"), ("c", "d")],
)
rep2 = euler_pipeline(square)
print("square quiver Euler form:", rep2.form)
print("components:", rep2.components)
