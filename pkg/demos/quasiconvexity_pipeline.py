"""
Relatively quasiconvex subgroups of Z/2 * Z/3
=============================================

From a folded subgroup graph to a certificate, an induced peripheral
structure, and a distortion fit.
"""

from relhyp import validate_spec
from relhyp.quasiconvexity import (
    cap_check,
    distortion_profile,
    induced_structure,
    iota_check,
    prequasiconvex,
    rel0hyp_certify,
)
from relhyp.subgroups import fold

G = validate_spec({
    "factors": [
        {"id": "A", "kind": "cyclic", "order": 2, "names": {"a": 1}},
        {"id": "B", "kind": "cyclic", "order": 3, "names": {"b": 1, "B": 2}},
    ]
})
e = G.element

AB = fold(G, [e("a.b")])
D = fold(G, [e("a"), e("b.a.B")])  # infinite dihedral

# geodesics from 1 to (ab)^k pass through a; Y = {a} covers them
print("Y = {}  :", prequasiconvex(AB, [], 4).verdict)
print("Y = {a} :", prequasiconvex(AB, [e("a")], 6).verdict)

# in a free product of the peripheral factors the coned-off graph is a tree
c = rel0hyp_certify(AB, 8)
print("certificate:", c.ok, "Y =", [G.serialize(y) for y in c.Y], "S =", [G.serialize(s) for s in c.S])

# the dihedral subgroup meets A and bAb^-1
st = induced_structure(D, [e("b")])
print("induced family:", [(i.factor, G.serialize(i.y)) for i in st.family])
rep = iota_check(st, 6)
print("iota injective:", rep.injective, " circuits:", rep.circuits, " vertices:", rep.vertices)

# word length in <ab> against relative length in G
p = distortion_profile(AB, [e("a.b")], [], 12)
print(f"outer = {p.slope:.3f} * inner + {p.intercept:.3f}")

# intersections of quasiconvex subgroups
for K, L in ((AB, fold(G, [e("b.a")])), (D, fold(G, [e("b")])), (AB, D)):
    I, Z, r = cap_check(K, L, 6)
    print("intersection generators:", [G.serialize(g) for g in I.generators()] or "trivial", r.verdict)
