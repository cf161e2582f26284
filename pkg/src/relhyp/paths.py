"""Components, phase vertices, backtracking and the π dictionary Γ̄ ↔ Γ̂.

Paths of Γ̄ are handled through their 𝓗-components: maximal runs of edges
labelled by one peripheral factor.  Two components are connected when their
initial vertices lie in the same left coset, which is decided with the coset
keys of the oracle's families.  For a cycle, subpaths of cyclic shifts count
as subpaths, so a run that wraps around the base point is one component; pass
``cyclic=False`` to read a closed path linearly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import Letter
from .errors import DanglingConeEdge, NotWithinCap, SpecError, ZeroBiedge, Tri
from .graphs import Cone, ConeLabel, Edge, Kind, Path


@dataclass
class Component:
    factor: str
    start: int  # index of the first edge
    length: int
    first: object  # q₋
    last: object  # q₊
    key: object  # coset key of q₋

    def edge_indices(self, n):
        return [(self.start + i) % n for i in range(self.length)]


@dataclass
class Decomposition:
    components: list
    phase_positions: list
    phase_vertices: set
    connected: list = field(default_factory=list)  # pairs of component indices

    def isolated(self, i):
        return all(i not in pair for pair in self.connected)


@dataclass
class PathClass:
    is_cycle: bool
    is_arc: bool
    is_circuit: bool
    locally_minimal: bool
    backtracking_free: bool


@dataclass
class Penetration:
    factor: str
    key: object
    start: int  # index of the first edge
    length: int  # number of edges (twice the number of biedges)
    first: object
    last: object


def _factor_of(oracle, label):
    if isinstance(label, Letter) and label.factor in oracle.families:
        return label.factor
    return None


def _runs(labels_factor, cyclic):
    """Maximal runs of equal non-None entries, merging across the end if cyclic."""
    n = len(labels_factor)
    runs = []
    i = 0
    while i < n:
        f = labels_factor[i]
        if f is None:
            i += 1
            continue
        j = i
        while j < n and labels_factor[j] == f:
            j += 1
        runs.append([f, i, j - i])
        i = j
    if cyclic and len(runs) > 1:
        first, last = runs[0], runs[-1]
        if first[0] == last[0] and first[1] == 0 and last[1] + last[2] == n:
            last[2] += first[2]
            runs = runs[1:]
    return runs


def decompose(path, oracle, cyclic=None):
    """𝓗-components of a Γ̄-path, its phase vertices and connectivity."""
    n = len(path.edges)
    if cyclic is None:
        cyclic = n > 0 and path.start == path.end
    facs = [_factor_of(oracle, e.label) for e in path.edges]
    comps = []
    for f, i, length in _runs(facs, cyclic):
        fam = oracle.families[f]
        first = path.edges[i].origin
        last = path.edges[(i + length - 1) % n].terminus
        comps.append(Component(f, i, length, first, last, fam.key(first)))
    positions = set()
    for c in comps:
        positions.add(c.start % n if cyclic else c.start)
        end = c.start + c.length
        positions.add(end % n if cyclic else end)
    for i, f in enumerate(facs):
        if f is None:
            positions.add(i)
            positions.add((i + 1) % n if cyclic else i + 1)
    verts = path.vertices()
    phase_positions = sorted(positions)
    conn = [
        (a, b)
        for a in range(len(comps))
        for b in range(a + 1, len(comps))
        if comps[a].factor == comps[b].factor and comps[a].key == comps[b].key
    ]
    return Decomposition(comps, phase_positions, {verts[p] for p in phase_positions}, conn)


def connected_across(p, q, oracle):
    """Pairs (i, j) with component i of p connected to component j of q."""
    dp, dq = decompose(p, oracle, cyclic=False), decompose(q, oracle, cyclic=False)
    return [
        (i, j)
        for i, a in enumerate(dp.components)
        for j, b in enumerate(dq.components)
        if a.factor == b.factor and a.key == b.key
    ]


def _basic_flags(path, oracle):
    edges = path.edges
    n = len(edges)
    verts = path.vertices()
    is_cycle = n > 0 and path.start == path.end
    is_arc = len(set(verts)) == len(verts)
    origins = [e.origin for e in edges]
    is_circuit = (
        is_cycle
        and len(set(origins)) == n
        and (n == 1 or edges[0] != oracle.edge_inverse(edges[-1]))
    )
    return is_cycle, is_arc, is_circuit


def is_coned_path(path):
    return any(isinstance(e.label, ConeLabel) for e in path.edges)


def classify(path, oracle, cyclic=None):
    """Cycle/arc/circuit flags plus local minimality and backtracking."""
    is_cycle, is_arc, is_circuit = _basic_flags(path, oracle)
    if is_coned_path(path):
        pens = penetrations(path, oracle, cyclic)
        lm = all(p.length == 2 for p in pens)
        keys = [(p.factor, p.key) for p in pens]
        bt_free = len(set(keys)) == len(keys)
    else:
        d = decompose(path, oracle, cyclic)
        lm = all(c.length == 1 for c in d.components)
        bt_free = not d.connected
    return PathClass(is_cycle, is_arc, is_circuit, lm, bt_free)


def pi(path, coned):
    """Replace each 𝓗-edge by the cone-biedge through its coset."""
    edges = []
    for e in path.edges:
        f = _factor_of(coned, e.label)
        if f is None:
            edges.append(e)
            continue
        cone = Cone(f, coned.families[f].key(e.origin))
        edges.append(Edge(e.origin, ConeLabel(f, 1), cone))
        edges.append(Edge(cone, ConeLabel(f, -1), e.terminus))
    return Path(path.start, tuple(edges))


def lift(path, coned):
    """Inverse of :func:`pi` on paths made of cone-biedges and X-edges."""
    if isinstance(path.start, Cone) or isinstance(path.end, Cone):
        raise DanglingConeEdge("path must start and end at group elements")
    edges = []
    es = path.edges
    i = 0
    while i < len(es):
        e = es[i]
        if not isinstance(e.label, ConeLabel):
            edges.append(e)
            i += 1
            continue
        if e.label.sign != 1 or i + 1 >= len(es):
            raise DanglingConeEdge(f"unpaired cone-edge at position {i}")
        e2 = es[i + 1]
        if not isinstance(e2.label, ConeLabel) or e2.label.sign != -1 or e2.origin != e.terminus:
            raise DanglingConeEdge(f"unpaired cone-edge at position {i}")
        g1, g2 = e.origin, e2.terminus
        if g1 == g2:
            raise ZeroBiedge(f"cone-biedge at position {i} returns to its start")
        fam = coned.families[e.label.factor]
        h = fam.element_between(g1, g2)
        if h is None or h == 0:
            raise DanglingConeEdge(f"cone-biedge at position {i} leaves its coset")
        edges.append(Edge(g1, fam.label_for(h), g2))
        i += 2
    return Path(path.start, tuple(edges))


def penetrations(path, oracle, cyclic=None):
    """Maximal runs of cone-biedges through one cone vertex."""
    es = path.edges
    n = len(es)
    if cyclic is None:
        cyclic = n > 0 and path.start == path.end and not isinstance(path.start, Cone)
    # one entry per edge: the cone vertex of the biedge it belongs to
    marks = [None] * n
    i = 0
    while i < n:
        e = es[i]
        if isinstance(e.label, ConeLabel):
            cone = e.terminus if e.label.sign == 1 else e.origin
            marks[i] = cone
            if e.label.sign == 1 and i + 1 < n:
                marks[i + 1] = cone
                i += 2
                continue
        i += 1
    out = []
    for cone, s, length in _runs(marks, cyclic):
        first = es[s].origin
        last = es[(s + length - 1) % n].terminus
        out.append(Penetration(cone.factor, cone.key, s, length, first, last))
    return out


def phase_vertices_coned(path, oracle, cyclic=None):
    """Ends of penetrating subpaths and of X-edges."""
    n = len(path.edges)
    if cyclic is None:
        cyclic = n > 0 and path.start == path.end
    verts = path.vertices()
    pos = set()
    for p in penetrations(path, oracle, cyclic):
        pos.add(p.start % n if cyclic else p.start)
        end = p.start + p.length
        pos.add(end % n if cyclic else end)
    for i, e in enumerate(path.edges):
        if not isinstance(e.label, ConeLabel):
            pos.add(i)
            pos.add((i + 1) % n if cyclic else i + 1)
    return {verts[p] for p in pos}


def is_quasigeodesic(path, mu, C, oracle, cap):
    """``(Tri, witness)``: every subpath satisfies l ≤ μ·d + C."""
    if mu < 1 or C < 0:
        raise ValueError("need mu >= 1 and C >= 0")
    verts = path.vertices()
    n = len(path.edges)
    unknown = None
    cache = {}
    # longest subpaths first so that the witness is maximal
    for length in range(n, 0, -1):
        for i in range(0, n - length + 1):
            j = i + length
            pair = (verts[i], verts[j])
            if pair not in cache:
                cache[pair] = oracle.distance(verts[i], verts[j], cap)
            d = cache[pair]
            if d is None:
                unknown = unknown or (i, j)
                continue
            if length > mu * d + C:
                return Tri.NO, (i, j)
    if unknown is not None:
        return Tri.UNKNOWN, unknown
    return Tri.YES, None


def k_similar(p, q, k, oracle, cap):
    d1 = oracle.distance(p.start, q.start, cap)
    d2 = oracle.distance(p.end, q.end, cap)
    if d1 is None or d2 is None:
        raise NotWithinCap(f"endpoint distance exceeds cap {cap}")
    return d1 <= k and d2 <= k


def path_from_word(oracle, start, tokens):
    """Build a path from edge-label tokens.

    Tokens are X-labels, 𝓗-letters (``F:k`` or an alias), or ``~`` followed
    by an 𝓗-letter for the cone-biedge from g to g·h.
    """
    group = oracle.group
    if isinstance(tokens, str):
        tokens = [t for t in tokens.split(".") if t]
    v = start
    edges = []
    names = {oracle.serialize_label(l): l for l in oracle.system}
    for tok in tokens:
        biedge = tok.startswith("~")
        if biedge:
            tok = tok[1:]
        if not biedge and tok in names:
            label = names[tok]
            w = group.mul(v, oracle.system[label])
            edges.append(Edge(v, label, w))
            v = w
            continue
        if biedge and tok.endswith(":0") and tok[:-2] in oracle.families:
            edges.extend(biedge_path(oracle, v, tok[:-2], v).edges)
            continue
        letter = group.parse_letter(tok)
        if letter.factor == "":
            raise SpecError(f"{tok!r} is not an edge label of this graph")
        if letter.factor not in oracle.families:
            raise SpecError(f"{tok!r} is not a peripheral letter")
        w = group.mul(v, group.letter_value(letter))
        if biedge:
            fam = oracle.families[letter.factor]
            cone = Cone(fam.id, fam.key(v))
            edges.append(Edge(v, ConeLabel(fam.id, 1), cone))
            edges.append(Edge(cone, ConeLabel(fam.id, -1), w))
        else:
            edges.append(Edge(v, letter, w))
        v = w
    return Path(start, tuple(edges))


def biedge_path(oracle, g1, fid, g2):
    """The two-edge path g1 → v(g1 H) → g2 (no coset check)."""
    fam = oracle.families[fid]
    cone = Cone(fid, fam.key(g1))
    return Path(g1, (Edge(g1, ConeLabel(fid, 1), cone), Edge(cone, ConeLabel(fid, -1), g2)))
