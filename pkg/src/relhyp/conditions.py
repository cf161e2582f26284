"""Conditions (a) and (b), samplers for fineness and slim triangles, BCP
harness, embedded balls, and brute-force relative Dehn areas."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .algebra import Letter
from .errors import (
    AreaCapExceeded,
    NotTrivialWithinBudget,
    ReplacementNotFound,
)
from .graphs import Cone, ConeLabel, Edge, GraphOracle, Kind, Path
from .paths import classify, decompose, is_quasigeodesic
from .presented import certificate_product
from .subgroups import hyperbolic_family


# ---- Condition (b) ------------------------------------------------------------------


def condition_b(L, y, y2):
    """ℍ_{L,y,y'} as a list of factor ids (exact per pair).

    The list is always finite here because only finitely many factors are
    representable; the per-pair answer is what carries information.
    """
    return hyperbolic_family(L, None, [(y, y2)])[0]


# ---- Condition (a): free decomposition ------------------------------------------------


@dataclass
class DecompositionReport:
    verified_members: dict  # factor id -> witness cycle with an isolated component
    excluded_members: dict  # factor id -> certificate text
    undetermined: list
    v_paths: dict  # factor id -> condition-(v) path from 1 into H∖{1}
    circuit_bound: int
    radius: int
    truncation: object = None

    def __post_init__(self):
        assert not set(self.verified_members) & set(self.excluded_members)


def _in_factor(group, g, fid):
    return group.factor_element_between((), g, fid) is not None


def _forbidden(group, e, fid):
    return isinstance(e.label, Letter) and e.label.factor == fid and _in_factor(group, e.origin, fid)


def condition_v_path(oracle, fid, radius):
    """Shortest path from 1 to some h ∈ H∖{1} avoiding edges in H×(H∖{1})."""
    group = oracle.group
    parent = {(): None}
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for e in oracle.neighbors(v):
                if _forbidden(group, e, fid):
                    continue
                w = e.terminus
                if w in parent:
                    continue
                parent[w] = e
                if w != () and _in_factor(group, w, fid):
                    edges = []
                    while parent[w] is not None:
                        edges.append(parent[w])
                        w = parent[w].origin
                    return Path((), tuple(reversed(edges)))
                nxt.append(w)
        frontier = nxt
    return None


def isolated_component_cycle(oracle, fid, bound):
    """A cycle at 1 of length <= bound with an isolated H-component whose ends differ."""
    stack = [((), ())]
    while stack:
        v, edges = stack.pop()
        if edges and v == ():
            p = Path((), edges)
            d = decompose(p, oracle)
            for i, c in enumerate(d.components):
                if c.factor == fid and c.first != c.last and d.isolated(i):
                    return p
        if len(edges) >= bound:
            continue
        for e in reversed(oracle.neighbors(v)):
            if edges and e == oracle.edge_inverse(edges[-1]):
                continue
            stack.append((e.terminus, edges + (e,)))
    return None


def _isolated_with_distinct_ends(cycle, oracle, fid):
    d = decompose(cycle, oracle)
    return any(c.factor == fid and c.first != c.last and d.isolated(i) for i, c in enumerate(d.components))


def free_decomposition(group, circuit_bound=4, radius=4, truncation=2):
    """Three-way partition of the peripheral factors for ℍ_X.

    Both characterisations are searched: a cycle with an isolated
    H-component whose ends differ, and a path from 1 into H∖{1} avoiding
    edges of H×(H∖{1}).  Closing a (v)-path with one H-edge yields a (iii)
    cycle, so either witness verifies H; the two searches are recorded
    separately so callers can cross-check them.  A factor is excluded when no
    X-value has a syllable in it (free-product backend only).
    """
    oracle = GraphOracle(group, Kind.RELATIVE, truncation=truncation)
    verified, excluded, vpaths, undetermined = {}, {}, {}, []
    for f in group.peripheral:
        path = condition_v_path(oracle, f.id, radius)
        cycle = isolated_component_cycle(oracle, f.id, circuit_bound)
        if path is not None:
            vpaths[f.id] = path
            if cycle is None:
                h = group.factor_element_between((), path.end, f.id)
                back = Edge(path.end, Letter(f.id, group.factors[f.id].inv(h)), ())
                cycle = Path((), path.edges + (back,))
        if cycle is not None:
            if not _isolated_with_distinct_ends(cycle, oracle, f.id):
                raise RuntimeError("witness cycle lacks an isolated component")
            verified[f.id] = cycle
            continue
        if group.backend == "free_product":
            vals = [group.letter_value(l) for l in group.x_letters()]
            if all(fid != f.id for v in vals for fid, _ in v):
                excluded[f.id] = "no X-value has a syllable in this factor"
                continue
        undetermined.append(f.id)
    return DecompositionReport(verified, excluded, undetermined, vpaths, circuit_bound, radius, truncation)


# ---- fineness --------------------------------------------------------------------------


@dataclass
class FinenessSample:
    edge: Edge
    n: int
    table: list  # (R, count)

    @property
    def R(self):
        return self.table[-1][0]

    @property
    def count(self):
        return self.table[-1][1]

    @property
    def stabilized(self):
        return len(self.table) < 2 or self.table[-1][1] == self.table[-2][1]

    @property
    def monotone(self):
        return all(a[1] <= b[1] for a, b in zip(self.table, self.table[1:]))


def count_circuits(oracle, edge, n, allowed):
    """Circuits of length <= n beginning with ``edge`` inside ``allowed``."""
    start = edge.origin
    inv = oracle.edge_inverse(edge)
    count = 0
    stack = [(edge.terminus, 1, frozenset([start, edge.terminus]))]
    while stack:
        v, length, seen = stack.pop()
        for e in oracle.neighbors(v):
            w = e.terminus
            if w == start:
                if length + 1 <= n and e != inv:
                    count += 1
                continue
            if w in seen or w not in allowed or length + 1 >= n:
                continue
            stack.append((w, length + 1, seen | {w}))
    return count


def fineness_sample(group, edge_spec, n, radii, truncation=None):
    """Circuit counts through an edge of Γ̂ for growing exploration radius R.

    Unless ``truncation`` is given the cone truncation grows with R (M = R).
    """
    table = []
    edge = None
    for R in radii:
        oracle = GraphOracle(group, Kind.CONED, truncation=R if truncation is None else truncation)
        edge = resolve_edge(oracle, edge_spec)
        allowed = set(oracle.distances_from(edge.origin, R))
        table.append((R, count_circuits(oracle, edge, n, allowed)))
    return FinenessSample(edge, n, table)


def resolve_edge(oracle, spec):
    """``g~F`` is the cone-edge [g, v(gF)]; ``g>label`` an X-edge."""
    group = oracle.group
    if isinstance(spec, Edge):
        return spec
    if "~" in spec:
        g, fid = spec.split("~")
        g = group.parse_element(g)
        fam = oracle.families[fid]
        return Edge(g, ConeLabel(fid, 1), Cone(fid, fam.key(g)))
    g, label = spec.split(">")
    g = group.parse_element(g)
    for l, val in oracle.system.items():
        if oracle.serialize_label(l) == label:
            return Edge(g, l, group.mul(g, val))
    raise KeyError(label)


# ---- embedded balls (hyperbolic embedding) ------------------------------------------------------


def embedded_ball(group, fid, n, R, truncation):
    """{h ∈ H∖{1}} reachable from 1 by ≤ n edges avoiding H×(H∖{1}) within radius R."""
    oracle = GraphOracle(group, Kind.RELATIVE, truncation=truncation)
    allowed = oracle.distances_from((), R)
    seen = {(): 0}
    frontier = [()]
    for step in range(1, n + 1):
        nxt = []
        for v in frontier:
            for e in oracle.neighbors(v):
                if _forbidden(group, e, fid):
                    continue
                w = e.terminus
                if w in seen or w not in allowed:
                    continue
                seen[w] = step
                nxt.append(w)
        frontier = nxt
    found = [w for w in seen if w != () and _in_factor(group, w, fid)]
    return sorted(found, key=group.element_key)


def embedded_growth(group, fid, n, R, truncations):
    return [(M, len(embedded_ball(group, fid, n, R, M))) for M in truncations]


# ---- BCP harness ---------------------------------------------------------------------------


@dataclass
class BCPReport:
    checked: int
    rejected: list  # (index, reason)
    depths: list  # (pair index, component span, d_Y)
    max_depth: int
    violations: list = field(default_factory=list)


def bcp_harness(pairs, mu, C, relative, plain_Y, cap=20, bound=None):
    """Depths d_Y(s₋, s₊) of unmatched components over path pairs."""
    rejected, depths, violations = [], [], []
    checked = 0
    for idx, (p, q) in enumerate(pairs):
        if p.start != q.start or p.end != q.end:
            rejected.append((idx, "endpoints differ"))
            continue
        bad = None
        for r in (p, q):
            if is_quasigeodesic(r, mu, C, relative, cap)[0].value != "Yes":
                bad = "not a quasigeodesic"
            elif not classify(r, relative, cyclic=False).backtracking_free:
                bad = "has backtracking"
        if bad:
            rejected.append((idx, bad))
            continue
        checked += 1
        for r, s in ((p, q), (q, p)):
            dr = decompose(r, relative, cyclic=False)
            ds = decompose(s, relative, cyclic=False)
            for c in dr.components:
                if any(c.factor == o.factor and c.key == o.key for o in ds.components):
                    continue
                d = plain_Y.distance(c.first, c.last, cap)
                depths.append((idx, (c.start, c.start + c.length), d))
                if bound is not None and (d is None or d > bound):
                    violations.append((idx, d))
    known = [d for _, _, d in depths if d is not None]
    return BCPReport(checked, rejected, depths, max(known, default=0), violations)


# ---- slim triangles ---------------------------------------------------------------------------


def slim_triangle_delta(oracle, R, trials, seed):
    """Largest side-to-other-sides distance over sampled geodesic triangles."""
    rng = random.Random(seed)
    verts = [v for v in oracle.distances_from((), R) if not isinstance(v, Cone)]
    verts.sort(key=oracle.serialize_vertex)
    best = 0
    cap = 4 * R + 2
    for _ in range(trials):
        a, b, c = (rng.choice(verts) for _ in range(3))
        sides = []
        for u, v in ((a, b), (b, c), (c, a)):
            paths, _ = oracle.geodesics(u, v, cap, max_count=1)
            sides.append(paths[0].vertices())
        for i in range(3):
            others = set(sides[(i + 1) % 3]) | set(sides[(i + 2) % 3])
            for x in sides[i]:
                d = min(oracle.distance(x, y, cap) for y in others)
                best = max(best, d)
    return best


# ---- relative Dehn areas ---------------------------------------------------------------------------


@dataclass
class AreaResult:
    word: tuple
    area: int
    certificate: list  # (prefix, relator)


def area(group, word, area_cap):
    """Exact area of a trivial word when it is at most ``area_cap``."""
    word = group.free_reduce(group.parse_word(word) if isinstance(word, str) else tuple(word))
    if group.abelian_image(word) != group.abelian_image(()):
        raise NotTrivialWithinBudget("word is non-trivial (abelianization)")
    found = group.area(word, area_cap)
    if found is None:
        if group.canonical(word) != ():
            raise NotTrivialWithinBudget("word not certified trivial within budget")
        raise AreaCapExceeded(f"no certificate with at most {area_cap} relators")
    a, cert = found
    if certificate_product(group, cert) != word:
        raise RuntimeError("certificate does not reproduce the word")
    return AreaResult(word, a, cert)


def trivial_words(group, n_max, truncation=None):
    """Freely reduced trivial words over X ⊔ 𝓗 of length <= n_max."""
    letters = group.x_letters()
    for f in group.peripheral:
        letters += group.h_letters(f.id, truncation)
    out = [()]
    frontier = [()]
    for _ in range(n_max):
        nxt = []
        for w in frontier:
            for l in letters:
                if w and (w[-1].factor == l.factor != "" or group.letter_inverse(w[-1]) == l):
                    continue
                nxt.append(w + (l,))
        frontier = nxt
        out.extend(w for w in nxt if group.canonical(w) == ())
    return out


def dehn_table(group, n_max, area_cap, truncation=None):
    """``({n: max area over trivial words of length <= n}, [(word, area)])``."""
    rows = []
    for w in trivial_words(group, n_max, truncation):
        rows.append((w, area(group, w, area_cap).area))
    table = {}
    for n in range(n_max + 1):
        table[n] = max((a for w, a in rows if len(w) <= n), default=0)
    return table, rows


# ---- circuit replacement ------------------------------------------------------------------------------


def lemma_circuit_transform(circuit, plain_XY, a_bound):
    """Replace cone-biedges of a Γ̂-circuit by Γ(G, X⊔Y) geodesics of length <= a."""
    edges = []
    es = circuit.edges
    i = 0
    while i < len(es):
        e = es[i]
        if not isinstance(e.label, ConeLabel):
            edges.append(e)
            i += 1
            continue
        g1, g2 = e.origin, es[i + 1].terminus
        try:
            paths, _ = plain_XY.geodesics(g1, g2, a_bound, max_count=1)
        except Exception:
            raise ReplacementNotFound(f"no path of length <= {a_bound} for biedge at {i}") from None
        edges.extend(paths[0].edges)
        i += 2
    out = Path(circuit.start, tuple(edges))
    if len(out) > a_bound * len(circuit):
        raise ReplacementNotFound("replacement exceeded a·L")
    return out
