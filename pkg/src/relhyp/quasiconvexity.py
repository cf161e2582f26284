"""Relative quasiconvexity checks, distortion profiles and induced structures.

Verdicts are stamped with the radius (and ℤ truncation) they were checked
at.  A Pass means no violation was found among the subgroup elements of the
relative ball; only :func:`rel0hyp_certify` upgrades that to a structural
statement, for free products with an empty relative generating system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Letter, ensure_free_product
from .conditions import count_circuits
from .errors import (
    BackendMismatch,
    GenerationFailure,
    GeodesicEnumerationTruncated,
    YNotReduced,
)
from .graphs import Cone, ConeLabel, Edge, GraphOracle, Kind, Path
from .paths import classify, is_quasigeodesic
from .subgroups import (
    PeripheralInstance,
    YSet,
    double_coset_members,
    hyperbolic_family,
    peripheral_family,
    reduced_family,
    factor_conjugate_intersection,
    teq_Y,
    intersect,
)

PASS, FAIL, INCONCLUSIVE = "Pass", "Fail", "Inconclusive"


def _member(L, g):
    return True if L is None else L.contains(g)


def _with_one(Y):
    ys = [()] + [y for y in Y if y != ()]
    out = []
    for y in ys:
        if y not in out:
            out.append(y)
    return out


def _covering(L, group, v, ys):
    """First y with v·y⁻¹ ∈ L, or None."""
    for y in ys:
        if _member(L, group.mul(v, group.inv(y))):
            return y
    return None


def subgroup_ball(L, oracle, radius):
    """Elements of L in the relative ball, sorted by (distance, normal form)."""
    dist = oracle.distances_from((), radius)
    G = oracle.group
    out = [g for g in dist if not isinstance(g, Cone) and _member(L, g)]
    out.sort(key=lambda g: (dist[g], G.element_key(g)))
    return out, dist


# ---- pre-quasiconvexity ---------------------------------------------------------------


@dataclass
class QcReport:
    Y: list
    radius: int
    mode: str
    verdict: str
    truncation: object = None
    pairs_checked: int = 0
    coverage: dict = field(default_factory=dict)  # y -> number of vertices it covered
    geodesic: Path | None = None
    vertex: object = None
    heuristic: bool = False
    condition_b: list = field(default_factory=list)  # ((y, y'), factor ids)
    note: str = ""


def prequasiconvex(L, Y, radius, mode="all", truncation=None, max_geodesics=1000):
    """Check that geodesics of Γ̄ from 1 to l ∈ L stay in L ∪ LY.

    Pairs (l₁, l₂) reduce to (1, l₁⁻¹l₂) by left-invariance.  ``mode`` is
    ``"all"`` (every geodesic) or ``"first"`` (lexicographically first
    geodesic only; the report is then marked heuristic).
    """
    G = L.group
    ensure_free_product(G)
    if mode not in ("all", "first"):
        raise ValueError("mode must be 'all' or 'first'")
    M = radius if truncation is None else truncation
    oracle = GraphOracle(G, Kind.RELATIVE, truncation=M)
    ys = _with_one(Y)
    coverage = {y: 0 for y in ys}
    elements, _ = subgroup_ball(L, oracle, radius)
    rep = QcReport(list(Y), radius, mode, PASS, M, heuristic=(mode == "first"))
    for l in elements:
        if l == ():
            continue
        paths, truncated = oracle.geodesics((), l, radius, max_count=1 if mode == "first" else max_geodesics)
        if truncated and mode == "all":
            raise GeodesicEnumerationTruncated(f"more than {max_geodesics} geodesics to {G.serialize(l)}")
        rep.pairs_checked += 1
        for p in paths:
            for v in p.vertices():
                y = _covering(L, G, v, ys)
                if y is None:
                    rep.verdict = FAIL
                    rep.geodesic, rep.vertex = p, v
                    rep.coverage = coverage
                    return rep
                coverage[y] += 1
    rep.coverage = coverage
    return rep


def quasiconvex(L, Y, radius, coset_pairs=None, mode="all", truncation=None):
    """Pre-quasiconvexity plus Condition (b) over the given coset pairs.

    Without explicit pairs, all pairs of distinct right cosets among
    Y ∪ {1} are used.  Each per-pair list is finite because the factor family
    is finite, so Condition (b) never fails here; the lists are reported.
    """
    rep = prequasiconvex(L, Y, radius, mode, truncation)
    ys = _with_one(Y)
    if coset_pairs is None:
        coset_pairs = [(a, b) for a in ys for b in ys if a != b and not L.coset_equal(a, b)]
    lists = hyperbolic_family(L, None, coset_pairs)
    rep.condition_b = list(zip(coset_pairs, lists))
    rep.note = "Condition (b) holds for every pair: the peripheral family is finite"
    return rep


# ---- strong quasiconvexity ------------------------------------------------------------------


@dataclass
class StrongReport:
    strong: bool
    infinite: list  # (g, factor id)
    exceptional: list  # (g, factor id, intersection) with non-trivial finite intersection
    samples: int


def strong_check(L, g_samples):
    """Finiteness of L ∩ gHg⁻¹ over sampled g and all peripheral factors."""
    G = L.group
    ensure_free_product(G)
    infinite, exceptional = [], []
    for g in g_samples:
        for f in G.peripheral:
            K = factor_conjugate_intersection(L, g, f.id)
            if f.is_finite:
                if len(K) > 1:
                    exceptional.append((g, f.id, K))
            elif K != 0:
                infinite.append((g, f.id))
    return StrongReport(not infinite, infinite, exceptional, len(g_samples))


# ---- induced peripheral families as coset families ---------------------------------------------


class InducedFamily:
    """The conjugate intersection L ∩ yHy⁻¹ as a coset family of L.

    Letters are the elements y·h·y⁻¹; the coset l·(L ∩ yHy⁻¹) is keyed by the
    coset l·y·H of G, which is the vertex correspondence ι.
    """

    def __init__(self, group, L, inst, index):
        self.group = group
        self.L = L
        self.inst = inst
        self.index = index
        self.base = inst.factor
        self.id = f"{inst.factor}@{index}"
        self.factor = group.factors[inst.factor]
        self._anchor = {}

    @property
    def finite(self):
        return self.inst.is_finite(self.group)

    def _value(self, h):
        return self.group.letter_value(Letter(self.base, h)) if h else ()

    def _hs(self, truncation):
        if self.factor.is_finite:
            return [h for h in self.inst.intersection if h]
        d = self.inst.intersection
        if not d:
            return []
        hs = []
        for k in range(1, truncation // d + 1):
            hs.extend((k * d, -k * d))
        return hs

    def letters(self, truncation):
        G, y = self.group, self.inst.y
        return [(self.label_for(h), G.conj(y, self._value(h))) for h in self._hs(truncation)]

    def key(self, g):
        return self.group.coset_key(self.group.mul(g, self.inst.y), self.base)

    def _anchor_h(self, key):
        # h0 with key·h0·y⁻¹ ∈ L (ℤ factors only)
        if key not in self._anchor:
            zc = double_coset_members(self.L, key, self.base, self.inst.y)
            self._anchor[key] = 0 if zc is None else zc.offset
        return self._anchor[key]

    def in_window(self, g, truncation):
        if self.finite:
            return True
        key = self.key(g)
        h = self.group.factor_element_between(key, self.group.mul(g, self.inst.y), self.base)
        return h is not None and abs(h - self._anchor_h(key)) <= truncation

    def members(self, key, truncation):
        G, y = self.group, self.inst.y
        if self.factor.is_finite:
            hs = range(self.factor.order)
        else:
            h0 = self._anchor_h(key)
            hs = [h0] + [h0 + h for h in self._hs(truncation)]
        out = []
        for h in hs:
            g = G.multiply(key, self._value(h), G.inv(y))
            if _member(self.L, g):
                out.append(g)
        return out

    def element_between(self, g1, g2):
        G, y = self.group, self.inst.y
        return G.factor_element_between(G.mul(g1, y), G.mul(g2, y), self.base)

    def label_inverse(self, label):
        return self.label_for(self.factor.inv(label.value))

    def label_for(self, h):
        return Letter(self.id, h)


def _system(group, elements, prefix=""):
    """Named labels for a finite set of elements and their inverses."""
    system, inverse = {}, {}
    for s in elements:
        if s == ():
            continue
        name = f"{prefix}[{group.serialize(s)}]"
        if name in system:
            continue
        si = group.inv(s)
        iname = f"{prefix}[{group.serialize(si)}]"
        system[name] = s
        system[iname] = si
        inverse[name], inverse[iname] = iname, name
    return system, inverse


def inner_oracle(group, L, S, family, kind=Kind.RELATIVE, truncation=None):
    """Γ̄ or Γ̂ of (L, family, S) over group-element vertices."""
    system, inverse = _system(group, S)
    fams = [InducedFamily(group, L, inst, i) for i, inst in enumerate(family)]
    return GraphOracle(group, kind, truncation=truncation, system=system, families=fams, inverse_labels=inverse)


def whole_group_family(group, Y):
    """ℍ_{G,Y}: every yHy⁻¹ in full."""
    out = []
    for f in sorted(group.peripheral, key=lambda f: f.id):
        for i, y in enumerate(Y):
            K = list(range(f.order)) if f.is_finite else 1
            out.append(PeripheralInstance(y, i, f.id, K))
    return out


# ---- distortion ---------------------------------------------------------------------------


@dataclass
class DistortionProfile:
    samples: list  # (l, inner, outer)
    slope: float  # outer ≈ slope·inner + intercept
    intercept: float
    residual: float
    inverse_slope: float  # inner ≈ inverse_slope·outer + inverse_intercept
    inverse_intercept: float
    inverse_residual: float
    lipschitz: int  # max outer length of a generator image
    lipschitz_holds: bool
    radius: int
    truncation: object


def _fit(xs, ys):
    if len(set(xs)) < 2:
        return 0.0, float(ys[0]) if ys else 0.0, 0.0
    slope, intercept = np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)
    res = float(np.max(np.abs(np.asarray(ys) - (slope * np.asarray(xs) + intercept))))
    return float(slope), float(intercept), res


def distortion_profile(L, S, Y, radius, truncation=None, inner_cap=None, group=None):
    """Inner distances over S ⊔ 𝓗_{L,Y} against outer distances over X ⊔ 𝓗.

    ``L=None`` stands for the whole of ``group`` (membership is then
    trivial), which also works for presented groups.
    """
    G = group if L is None else L.group
    if G is None:
        raise ValueError("L=None needs the ambient group")
    return _profile(G, L, S, Y, radius, truncation, inner_cap)


def _profile(G, L, S, Y, radius, truncation, inner_cap):
    M = radius if truncation is None else truncation
    family = whole_group_family(G, list(Y)) if L is None else peripheral_family(L, list(Y))
    inner = inner_oracle(G, L, list(S), family, Kind.RELATIVE, M)
    outer = GraphOracle(G, Kind.RELATIVE, truncation=M)
    elements, dist = subgroup_ball(L, outer, radius)
    cap = inner_cap if inner_cap is not None else 4 * radius + 4
    samples = []
    for l in elements:
        d_in = inner.distance((), l, cap)
        if d_in is None:
            raise GenerationFailure(f"{G.serialize(l)} is not reached within inner cap {cap}")
        samples.append((l, d_in, dist[l]))
    gens = [v for v in inner.system.values()]
    for fam in inner.families.values():
        gens.extend(v for _, v in fam.letters(M))
    lip = max((outer.distance((), g, 4 * radius + 4) or 0 for g in gens), default=0)
    xs = [s[1] for s in samples]
    ys = [s[2] for s in samples]
    a, b, r = _fit(xs, ys)
    ia, ib, ir = _fit(ys, xs)
    holds = all(o <= i * lip for _, i, o in samples)
    return DistortionProfile(samples, a, b, r, ia, ib, ir, lip, holds, radius, M)


# ---- quasigeodesic witnesses inside L ∪ LY -----------------------------------------------------


def rundqc_witness(L, Y, mu, C, radius, truncation=None):
    """For each l ∈ L in the ball, a locally minimal (μ,C)-quasigeodesic from 1
    to l without backtracking whose vertices lie in L ∪ LY (or None)."""
    G = L.group
    ensure_free_product(G)
    M = radius if truncation is None else truncation
    oracle = GraphOracle(G, Kind.RELATIVE, truncation=M)
    ys = _with_one(Y)
    elements, dist = subgroup_ball(L, oracle, radius)
    out = {}
    for l in elements:
        out[l] = _witness(oracle, L, G, ys, l, dist[l], mu, C)
    return out


def _witness(oracle, L, G, ys, l, d, mu, C):
    if l == ():
        return Path((), ())
    bound = int(mu * d + C)
    to_l = oracle.distances_from(l, bound)
    stack = [((), ())]
    while stack:
        v, edges = stack.pop()
        if v == l and edges:
            p = Path((), edges)
            cls = classify(p, oracle, cyclic=False)
            if cls.locally_minimal and cls.backtracking_free and is_quasigeodesic(p, mu, C, oracle, bound)[0].value == "Yes":
                return p
        k = len(edges)
        nxt = []
        for e in oracle.neighbors(v):
            w = e.terminus
            r = to_l.get(w)
            if r is None or k + 1 + r > bound:
                continue
            if any(w == x.origin for x in edges) or _covering(L, G, w, ys) is None:
                continue
            nxt.append(e)
        nxt.sort(key=lambda e: oracle.serialize_label(e.label), reverse=True)
        stack.extend((e.terminus, edges + (e,)) for e in nxt)
    return None


# ---- induced structure and ι -------------------------------------------------------------------------


@dataclass
class InducedStructure:
    L: object
    Y: list
    S: list
    family: list  # ℍ^r_{L,Y} (or ℍ_{L,Y} when built unreduced)
    infinite: list  # members of the family that are infinite
    relative: GraphOracle
    coned: GraphOracle
    target: GraphOracle  # Γ̂(G, ℍ, X ⊔ Y ⊔ Y⁻¹ ⊔ S)
    reduced: bool
    truncation: object

    def iota_vertex(self, v):
        if isinstance(v, Cone):
            return Cone(self.coned.families[v.factor].base, v.key)
        return v

    def iota_edge(self, e):
        """Image path (list of edges) of an edge of Γ̂(L, family, S)."""
        G = self.L.group
        if not isinstance(e.label, ConeLabel):
            return [Edge(e.origin, e.label, e.terminus)]
        fam = self.coned.families[e.label.factor]
        j = fam.index
        y = fam.inst.y
        cone = self.iota_vertex(e.terminus if e.label.sign == 1 else e.origin)
        if e.label.sign == 1:
            l = e.origin
            ly = G.mul(l, y)
            up = Edge(ly, ConeLabel(fam.base, 1), cone)
            return [up] if y == () else [Edge(l, self._ylabel(j, 1), ly), up]
        l = e.terminus
        ly = G.mul(l, y)
        down = Edge(cone, ConeLabel(fam.base, -1), ly)
        return [down] if y == () else [down, Edge(ly, self._ylabel(j, -1), l)]

    def _ylabel(self, j, sign):
        G = self.L.group
        y = self.Y[self.family_y_index(j)]
        name = f"y[{G.serialize(y)}]"
        if sign == 1:
            return name
        return self.target.inverse_labels[name]

    def family_y_index(self, j):
        return self.family[j].y_index


def induced_structure(L, Y, S=None, reduced=True, truncation=4):
    """Γ̄ and Γ̂ of (L, ℍ^r_{L,Y}, S) with the correspondence ι.

    ``1`` is put in front of Y when missing.  Without S, the generating set
    W₁ ⊔ W₂ is built: yxy'⁻¹ ∈ L for x ∈ X, and one element of each
    non-empty L ∩ yHy'⁻¹ with y ≠ y'.  ``reduced=False`` keeps the whole of
    ℍ_{L,Y} and skips the coset check (a negative control for ι).
    """
    G = L.group
    ensure_free_product(G)
    ys = _with_one(Y)
    if reduced:
        for i in range(len(ys)):
            for j in range(i):
                if L.coset_equal(ys[i], ys[j]):
                    raise YNotReduced("elements of Y must lie in different right cosets of L")
        ys = YSet(ys, True)
        family = reduced_family(L, ys)
    else:
        family = peripheral_family(L, ys)
    ys = list(ys)
    if S is None:
        S = generating_W(L, ys)
    S = [s for s in S if s != ()]
    relative = inner_oracle(G, L, S, family, Kind.RELATIVE, truncation)
    coned = inner_oracle(G, L, S, family, Kind.CONED, truncation)
    infinite = [inst for inst in family if not inst.is_finite(G)]
    # target system X ⊔ Y ⊔ Y⁻¹ ⊔ S
    system = {l: G.letter_value(l) for l in G.x_letters()}
    inverse = {l: G.letter_inverse(l) for l in G.x_letters()}
    sys_s, inv_s = _system(G, S)
    system.update(sys_s)
    inverse.update(inv_s)
    sys_y, inv_y = _system(G, [y for y in ys if y != ()], prefix="y")
    system.update(sys_y)
    inverse.update(inv_y)
    target = GraphOracle(G, Kind.CONED, truncation=truncation, system=system, inverse_labels=inverse)
    return InducedStructure(L, ys, S, family, infinite, relative, coned, target, reduced, truncation)


def generating_W(L, Y):
    """W₁ ⊔ W₂ for (L, ℍ_{L,Y})."""
    G = L.group
    out = []
    for y in Y:
        for x in G.x_letters():
            for y2 in Y:
                w = G.multiply(y, G.letter_value(x), G.inv(y2))
                if L.contains(w):
                    out.append(w)
    for y in Y:
        for y2 in Y:
            if y == y2:
                continue
            for f in sorted(G.peripheral, key=lambda f: f.id):
                hs = double_coset_members(L, y, f.id, y2)
                if hs is None or (isinstance(hs, list) and not hs):
                    continue
                h = hs[0] if isinstance(hs, list) else hs.offset
                out.append(G.multiply(y, ((f.id, h),) if h else (), G.inv(y2)))
    uniq = []
    for w in out:
        if w != () and w not in uniq and G.inv(w) not in uniq:
            uniq.append(w)
    return uniq


def _reduce_cycle(edges, oracle):
    """Cancel adjacent e·e⁻¹ pairs, cyclically."""
    out = []
    for e in edges:
        if out and out[-1] == oracle.edge_inverse(e):
            out.pop()
        else:
            out.append(e)
    while len(out) >= 2 and out[0] == oracle.edge_inverse(out[-1]):
        out = out[1:-1]
    return out


def enumerate_circuits(oracle, start, n):
    """Circuits of length <= n based at ``start`` (each direction listed)."""
    found = []
    stack = [(start, ())]
    while stack:
        v, edges = stack.pop()
        for e in oracle.neighbors(v):
            w = e.terminus
            if w == start and edges:
                if len(edges) + 1 <= n and e != oracle.edge_inverse(edges[0]):
                    found.append(Path(start, edges + (e,)))
                continue
            if len(edges) + 1 >= n or w == start or any(w == x.origin for x in edges):
                continue
            stack.append((w, edges + (e,)))
    return found


@dataclass
class IotaReport:
    injective: bool
    collisions: list  # (v1, v2, image)
    vertices: int
    circuits: int
    bound_violations: list  # (circuit, image length)
    non_circuits: list
    cone_edge_circuits: dict  # cone-edge id -> count of circuits at length n
    radius: int

    @property
    def ok(self):
        return self.injective and not self.bound_violations and not self.non_circuits


def iota_check(structure, radius):
    """Injectivity of ι on the radius ball and the twice-length bound on circuits."""
    st = structure
    ball = st.coned.distances_from((), radius)
    images = {}
    collisions = []
    for v in sorted(ball, key=st.coned.serialize_vertex):
        img = st.iota_vertex(v)
        if img in images and images[img] != v:
            collisions.append((images[img], v, img))
        images.setdefault(img, v)
    circuits = enumerate_circuits(st.coned, (), radius)
    violations, bad = [], []
    for c in circuits:
        img = []
        for e in c.edges:
            img.extend(st.iota_edge(e))
        img = _reduce_cycle(img, st.target)
        if len(img) > 2 * len(c):
            violations.append((c, len(img)))
        p = Path(img[0].origin, tuple(img)) if img else None
        if p is None or not classify(p, st.target).is_circuit:
            bad.append(c)
    per_edge = {}
    for e in st.coned.neighbors(()):
        per_edge[st.coned.serialize_edge(e)] = count_circuits(st.coned, e, radius, set(ball))
    return IotaReport(not collisions, collisions, len(ball), len(circuits), violations, bad, per_edge, radius)


# ---- tree certificate -----------------------------------------------------------------------------


@dataclass
class TreeCertificate:
    Y: list
    S: list
    family: list
    qc: QcReport
    image_vertices: int
    image_edges: int
    image_is_forest: bool
    generated: bool
    radius: int

    @property
    def ok(self):
        return self.qc.verdict == PASS and self.image_is_forest and self.generated


def coned_geodesic(group, g, start=()):
    """Edges of the unique geodesic from ``start`` to start·g in Γ̂(G, ℍ, ∅)."""
    edges = []
    v = start
    for fid, h in g:
        cone = Cone(fid, group.coset_key(v, fid))
        w = group.mul(v, ((fid, h),))
        edges.append((v, cone))
        edges.append((cone, w))
        v = w
    return edges


def rel0hyp_certify(L, radius=8, truncation=None):
    """Quasiconvexity certificate for L in a free product of its peripheral factors."""
    G = L.group
    ensure_free_product(G)
    if G.x_letters():
        raise BackendMismatch("the tree certificate needs an empty relative generating system")
    M = radius if truncation is None else truncation
    tree, _, order = L.spanning_tree()
    Y = [tree[v] for v in order]
    st = induced_structure(L, Y, truncation=M)
    qc = prequasiconvex(L, Y, radius, "all", M)
    # generation: every element of L in the ball is reached in Γ̄(L, ℍ^r, S)
    outer = GraphOracle(G, Kind.RELATIVE, truncation=M)
    elements, _ = subgroup_ball(L, outer, radius)
    generated = all(st.relative.distance((), l, 4 * radius + 4) is not None for l in elements)
    # image of ι in the tree Γ̂(G, ℍ, ∅)
    pieces = []
    for s in st.S:
        pieces.append(coned_geodesic(G, s))
    for inst in st.family:
        p = coned_geodesic(G, inst.y)
        p.append((inst.y, Cone(inst.factor, G.coset_key(inst.y, inst.factor))))
        pieces.append(p)
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    seen_edges = set()
    forest = True
    ball = [v for v in st.coned.distances_from((), radius) if not isinstance(v, Cone)]
    for l in ball:
        for piece in pieces:
            for a, b in piece:
                a = a if isinstance(a, Cone) else G.mul(l, a)
                b = b if isinstance(b, Cone) else G.mul(l, b)
                if isinstance(a, Cone):
                    a = Cone(a.factor, G.coset_key(G.mul(l, a.key), a.factor))
                if isinstance(b, Cone):
                    b = Cone(b.factor, G.coset_key(G.mul(l, b.key), b.factor))
                key = frozenset((a, b))
                if key in seen_edges:
                    continue
                seen_edges.add(key)
                ra, rb = find(a), find(b)
                if ra == rb:
                    forest = False
                else:
                    parent[ra] = rb
    return TreeCertificate(Y, st.S, st.family, qc, len(parent), len(seen_edges), forest, generated, radius)


# ---- intersections ----------------------------------------------------------------------------------


def intersection_Y(K, YK, L, YL, bound=6):
    """Finite Z with geodesics of K ∩ L covered by (K ∩ L)·Z, built from Y_K ∪ Y_L."""
    X = _with_one(list(YK) + list(YL))
    return teq_Y((), K, (), L, X, bound=bound).Y


def cap_check(K, L, radius, bound=6):
    """Intersect two subgroups, certify each, and check the intersection."""
    cK = rel0hyp_certify(K, radius)
    cL = rel0hyp_certify(L, radius)
    I = intersect(K, L)
    Z = intersection_Y(K, cK.Y, L, cL.Y, bound)
    return I, Z, prequasiconvex(I, Z, radius)
