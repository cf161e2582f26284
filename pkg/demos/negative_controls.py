"""
Z^2 relative to <x>
===================

Z^2 is not hyperbolic relative to the cyclic subgroup <x>.  Each sampler
below sees the failure from a different angle.
"""

import warnings

from relhyp import validate_spec
from relhyp.conditions import area, bcp_harness, dehn_table, embedded_growth, fineness_sample, slim_triangle_delta
from relhyp.graphs import GraphOracle, Kind
from relhyp.paths import path_from_word

warnings.simplefilter("ignore", UserWarning)  # the relator set is closed for us

spec = {
    "backend": "presented",
    "generators": [["x", "X"], ["t", "T"]],
    "relators": ["x.t.X.T"],
}
P = validate_spec(dict(spec, factors=[{"id": "H", "kind": "Z", "embedding": "x"}]))
Z2 = validate_spec(spec)

# fineness: circuits of length 6 through the cone edge at 1 keep appearing
s = fineness_sample(P, "1~H", 6, range(4, 11))
print("circuits through [1, v(<x>)]:", s.table)

# paths 1 -> t -> t x^k -> x^k avoid H-edges out of H, so the ball grows with M
print("embedded ball sizes by M:", embedded_growth(P, "H", 3, 3, range(1, 9)))

# components x^k in p = x^k t and q = t x^k are never connected; their depth is k
rel = GraphOracle(P, Kind.RELATIVE, truncation=8)
plain = GraphOracle(P, Kind.PLAIN)
for k in range(1, 7):
    p = path_from_word(rel, (), [f"H:{k}", "t"])
    q = path_from_word(rel, (), ["t", f"H:{k}"])
    print(f"k={k}  depth={bcp_harness([(p, q)], 2, 2, rel, plain).max_depth}")

# triangles in the plain Cayley graph get fatter with the radius
o = GraphOracle(Z2, Kind.PLAIN)
print("delta estimates:", [slim_triangle_delta(o, R, 30, seed=0) for R in (2, 4, 6)])

# quadratic areas: x^n t x^-n t^-1 needs n relators
for n in range(1, 5):
    w = ".".join(["x"] * n + ["t"] + ["X"] * n + ["T"])
    print(w, "area", area(Z2, w, n + 1).area)
table, _ = dehn_table(Z2, 6, 10)
print("dehn table:", table)
