"""
A walk through Z/2 * Z/3
========================

Normal forms, the two Cayley graphs, and the path dictionary between them.
"""

from relhyp import validate_spec
from relhyp.graphs import GraphOracle, Kind
from relhyp.paths import classify, decompose, lift, path_from_word, pi

G = validate_spec({
    "factors": [
        {"id": "A", "kind": "cyclic", "order": 2, "names": {"a": 1}},
        {"id": "B", "kind": "cyclic", "order": 3, "names": {"b": 1, "B": 2}},
    ]
})

# words collapse to alternating syllables
for w in ("a.a.b", "b.b.b.a", "a.b.a.b.b"):
    print(f"{w:>12} -> {G.serialize(G.element(w))}")

rel = GraphOracle(G, Kind.RELATIVE)
coned = GraphOracle(G, Kind.CONED)

# relative distance counts syllables, the coned-off graph doubles it
g = G.element("a.b.a.b")
print("d_rel =", rel.distance((), g, 10), " d_coned =", coned.distance((), g, 10))

# sizes of relative balls
print("ball sizes:", [len(rel.ball((), r)) for r in range(6)])

# a path, its image in the coned-off graph, and back
p = path_from_word(rel, (), "a.b.a")
q = pi(p, coned)
print("p    :", [rel.serialize_label(e.label) for e in p.edges])
print("pi(p):", [coned.serialize_vertex(v) for v in q.vertices()])
assert lift(q, coned) == p

d = decompose(p, rel)
print("components:", [(c.factor, c.length) for c in d.components], "phase vertices:", len(d.phase_vertices))

# b·1·b² returns to 1 inside the coset B it entered first: backtracking
loop = path_from_word(rel, (), "b.a.a.b")
print("backtracking free?", classify(loop, rel).backtracking_free)
