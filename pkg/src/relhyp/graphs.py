"""Lazy neighbour oracles for Γ(G,X), Γ̄(G,ℍ,X) and Γ̂(G,ℍ,X).

Vertices are group elements (as produced by the backend) or ``Cone``
records.  Edges are ``Edge(origin, label, terminus)`` triples; the inverse of
an edge swaps its ends and inverts its label.

ℤ factors make Γ̄ locally infinite, so relative and coned oracles take a
truncation bound ``M``: only 𝓗-letters ``h`` with ``|h| <= M`` become edges,
and a vertex is joined to the cone of its ℤ-coset only if it lies within
``M`` steps of the canonical coset representative.  Both truncations keep the
graph symmetric, so BFS distances are honest distances of a subgraph.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

from .algebra import Letter
from .errors import (
    BudgetExceeded,
    ConeVertexInPlainGraph,
    ExplorationBudgetExceeded,
    NotWithinCap,
)


class Kind(enum.Enum):
    PLAIN = "plain"
    RELATIVE = "relative"
    CONED = "coned"


class Cone(NamedTuple):
    factor: str
    key: object


class ConeLabel(NamedTuple):
    factor: str
    sign: int  # +1 towards the cone vertex, -1 away from it


class Edge(NamedTuple):
    origin: object
    label: object
    terminus: object


class FactorFamily:
    """A peripheral factor of the ambient group seen as a coset family."""

    def __init__(self, group, fid):
        self.group = group
        self.id = fid
        self.factor = group.factors[fid]

    @property
    def finite(self):
        return self.factor.is_finite

    def letters(self, truncation):
        g = self.group
        return [(Letter(self.id, k), g.letter_value(Letter(self.id, k))) for k in self.factor.elements(truncation)]

    def key(self, g):
        return self.group.coset_key(g, self.id)

    def offset(self, g):
        """Factor element h with key(g)·h = g."""
        return self.group.factor_element_between(self.key(g), g, self.id)

    def in_window(self, g, truncation):
        if self.finite:
            return True
        k = self.offset(g)
        return k is not None and abs(k) <= truncation

    def members(self, key, truncation):
        vals = [()] + [v for _, v in self.letters(truncation)]
        return [self.group.mul(key, v) for v in vals]

    def element_between(self, g1, g2):
        return self.group.factor_element_between(g1, g2, self.id)

    def label_inverse(self, label):
        return Letter(self.id, self.factor.inv(label.value))

    def label_for(self, h):
        return Letter(self.id, h)


@dataclass
class Path:
    """A path given by its start vertex and its edges."""

    start: object
    edges: tuple = ()

    def __post_init__(self):
        self.edges = tuple(self.edges)
        v = self.start
        for e in self.edges:
            if e.origin != v:
                raise ValueError("edges of a path must be consecutive")
            v = e.terminus

    @property
    def end(self):
        return self.edges[-1].terminus if self.edges else self.start

    def __len__(self):
        return len(self.edges)

    @property
    def length(self):
        return len(self.edges)

    @property
    def labels(self):
        return tuple(e.label for e in self.edges)

    def vertices(self):
        return [self.start] + [e.terminus for e in self.edges]

    def subpath(self, i, j):
        """Edges ``i..j-1``."""
        start = self.edges[i].origin if i < len(self.edges) else self.end
        return Path(start, self.edges[i:j])

    def __eq__(self, other):
        return isinstance(other, Path) and self.start == other.start and self.edges == other.edges

    def __hash__(self):
        return hash((self.start, self.edges))


class GraphOracle:
    """Adjacency oracle for one of the three graphs.

    ``system`` maps edge labels to group elements (the X-part); by default it
    is the declared X of the group.  ``families`` lists the peripheral coset
    families; by default the peripheral factors.
    """

    def __init__(self, group, kind=Kind.RELATIVE, truncation=None, system=None, families=None, inverse_labels=None):
        self.group = group
        self.kind = Kind(kind)
        self.truncation = truncation
        if system is None:
            system = {l: group.letter_value(l) for l in group.x_letters()}
            inverse_labels = {l: group.letter_inverse(l) for l in system}
        self.system = dict(system)
        if inverse_labels is None:
            inverse_labels = symmetric_inverse_labels(group, self.system)
        self.inverse_labels = dict(inverse_labels)
        if families is None:
            families = [FactorFamily(group, f.id) for f in group.peripheral]
        self.families = {f.id: f for f in families}
        if self.kind is Kind.PLAIN:
            self.families = {}
        self._letters = {}
        self._cache = {}

    def budgets(self):
        return {"truncation": self.truncation}

    # ---- labels -----------------------------------------------------------------

    def family_letters(self, fam):
        if fam.id not in self._letters:
            if not fam.finite and self.truncation is None:
                raise ExplorationBudgetExceeded(f"factor {fam.id} is infinite and no truncation M was given")
            self._letters[fam.id] = fam.letters(self.truncation)
        return self._letters[fam.id]

    def label_inverse(self, label):
        if isinstance(label, ConeLabel):
            return ConeLabel(label.factor, -label.sign)
        if label in self.inverse_labels:
            return self.inverse_labels[label]
        if isinstance(label, Letter) and label.factor in self.families:
            return self.families[label.factor].label_inverse(label)
        raise KeyError(label)

    def edge_inverse(self, e):
        return Edge(e.terminus, self.label_inverse(e.label), e.origin)

    def serialize_label(self, label):
        if isinstance(label, ConeLabel):
            return f"~{label.factor}{'+' if label.sign > 0 else '-'}"
        if isinstance(label, Letter):
            if label.factor == "":
                return str(label.value)
            return f"{label.factor}:{label.value}"
        return str(label)

    def serialize_vertex(self, v):
        if isinstance(v, Cone):
            return f"v({self.group.serialize(v.key)}*{v.factor})"
        return self.group.serialize(v)

    def serialize_edge(self, e):
        return f"{self.serialize_vertex(e.origin)}-{self.serialize_label(e.label)}->{self.serialize_vertex(e.terminus)}"

    # ---- adjacency ----------------------------------------------------------------

    def neighbors(self, v):
        """Outgoing edges of ``v`` in a deterministic order."""
        hit = self._cache.get(v)
        if hit is not None:
            return hit
        g = self.group
        out = []
        if isinstance(v, Cone):
            if self.kind is not Kind.CONED:
                raise ConeVertexInPlainGraph(f"cone vertex {v} in a {self.kind.value} graph")
            fam = self.families[v.factor]
            if not fam.finite and self.truncation is None:
                raise ExplorationBudgetExceeded(f"cone over infinite coset of {fam.id} needs a truncation")
            for m in fam.members(v.key, self.truncation):
                out.append(Edge(v, ConeLabel(fam.id, -1), m))
        else:
            for label, val in self.system.items():
                out.append(Edge(v, label, g.mul(v, val)))
            if self.kind is Kind.RELATIVE:
                for fam in self.families.values():
                    for label, val in self.family_letters(fam):
                        out.append(Edge(v, label, g.mul(v, val)))
            elif self.kind is Kind.CONED:
                for fam in self.families.values():
                    if fam.finite or self.truncation is None or fam.in_window(v, self.truncation):
                        if not fam.finite and self.truncation is None:
                            raise ExplorationBudgetExceeded(f"factor {fam.id} needs a truncation")
                        out.append(Edge(v, ConeLabel(fam.id, 1), Cone(fam.id, fam.key(v))))
        out = tuple(out)
        if len(self._cache) < 200_000:
            self._cache[v] = out
        return out

    def degree(self, v):
        return len(self.neighbors(v))

    # ---- metric ---------------------------------------------------------------------

    def distance(self, u, v, cap):
        """BFS distance if at most ``cap``, else ``None`` (not within cap)."""
        if cap < 0:
            raise ValueError("cap must be non-negative")
        if u == v:
            return 0
        du, dv = {u: 0}, {v: 0}
        fu, fv = [u], [v]
        ru = rv = 0
        while fu and fv and ru + rv < cap:
            if len(fu) <= len(fv):
                ru += 1
                fu, hit = self._expand(fu, du, dv, ru)
            else:
                rv += 1
                fv, hit = self._expand(fv, dv, du, rv)
            if hit is not None:
                return hit
        return None

    def _expand(self, frontier, mine, other, r):
        nxt = []
        best = None
        for x in frontier:
            for e in self.neighbors(x):
                y = e.terminus
                if y in mine:
                    continue
                mine[y] = r
                if y in other:
                    d = r + other[y]
                    best = d if best is None else min(best, d)
                nxt.append(y)
        return nxt, best

    def distances_from(self, u, radius, max_vertices=2_000_000):
        dist = {u: 0}
        frontier = [u]
        for r in range(1, radius + 1):
            nxt = []
            for x in frontier:
                for e in self.neighbors(x):
                    y = e.terminus
                    if y not in dist:
                        dist[y] = r
                        nxt.append(y)
            if len(dist) > max_vertices:
                raise BudgetExceeded(f"ball exceeded {max_vertices} vertices")
            frontier = nxt
        return dist

    def geodesics(self, u, v, cap, max_count=1000):
        """All geodesics from ``u`` to ``v`` in lexicographic label order.

        Returns ``(paths, truncated)``.
        """
        d = self.distance(u, v, cap)
        if d is None:
            raise NotWithinCap(f"distance exceeds cap {cap}")
        if d == 0:
            return [Path(u, ())], False
        du = self.distances_from(u, d)
        dv = self.distances_from(v, d)
        out = []
        truncated = False
        stack = [(u, ())]
        while stack:
            x, edges = stack.pop()
            if x == v:
                out.append(Path(u, edges))
                if len(out) >= max_count:
                    truncated = bool(stack)
                    break
                continue
            k = len(edges)
            nxt = [
                e for e in self.neighbors(x)
                if du.get(e.terminus) == k + 1 and dv.get(e.terminus) == d - k - 1
            ]
            nxt.sort(key=lambda e: self.serialize_label(e.label), reverse=True)
            for e in nxt:
                stack.append((e.terminus, edges + (e,)))
        return out, truncated

    def ball(self, center, radius, max_vertices=500_000):
        if radius < 0:
            raise ValueError("radius must be non-negative")
        return Ball(self, center, radius, max_vertices)


class Ball:
    """BFS ball with distances and parent edges."""

    def __init__(self, oracle, center, radius, max_vertices=500_000):
        self.oracle = oracle
        self.center = center
        self.radius = radius
        self.dist = {center: 0}
        self.parent = {center: None}
        frontier = [center]
        for r in range(1, radius + 1):
            nxt = []
            for x in frontier:
                for e in oracle.neighbors(x):
                    y = e.terminus
                    if y not in self.dist:
                        self.dist[y] = r
                        self.parent[y] = e
                        nxt.append(y)
            if len(self.dist) > max_vertices:
                raise BudgetExceeded(f"ball exceeded {max_vertices} vertices")
            frontier = nxt

    def __len__(self):
        return len(self.dist)

    def __contains__(self, v):
        return v in self.dist

    def vertices(self, kind=None):
        vs = list(self.dist)
        if kind == "group":
            vs = [v for v in vs if not isinstance(v, Cone)]
        return vs

    def path_to(self, v):
        edges = []
        while self.parent[v] is not None:
            e = self.parent[v]
            edges.append(e)
            v = e.origin
        return Path(self.center, tuple(reversed(edges)))

    def dump(self):
        o = self.oracle
        rows = []
        for v, d in self.dist.items():
            e = self.parent[v]
            rows.append((d, o.serialize_vertex(v), "-" if e is None else o.serialize_edge(e)))
        rows.sort()
        return "\n".join(f"{v}\t{d}\t{e}" for d, v, e in rows) + "\n"


def symmetric_inverse_labels(group, system):
    """Pair up labels whose values are mutually inverse."""
    inv = {}
    by_value = {}
    for label, val in system.items():
        by_value.setdefault(val, []).append(label)
    for label, val in system.items():
        if isinstance(label, Letter) and label.factor == "":
            other = group.letter_inverse(label)
            if other in system:
                inv[label] = other
                continue
        cands = by_value.get(group.inv(val), [])
        if not cands:
            raise KeyError(f"system is not symmetric: no inverse for {label}")
        inv[label] = cands[0]
    return inv


def extend_system(group, extra):
    """X ⊔ Y: the declared X plus named extra elements and their inverses."""
    system = {l: group.letter_value(l) for l in group.x_letters()}
    for name, val in extra.items():
        system[name] = val
        if group.inv(val) != val:
            system[f"{name}^-1"] = group.inv(val)
    return system
