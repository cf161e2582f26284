"""Folded subgroup graphs over free products and the families ℍ_{L,Y}.

A ``SubgroupGraph`` is a based graph whose vertices are glued together by
*pieces*.  An F-piece for a factor F is a transitive right F-set ``K\\F``
together with the vertices that occupy some of its points: vertex ``v`` sits
at the coset ``K·p_v``.  Reading a syllable ``h`` of F at ``v`` moves to the
vertex sitting at ``K·p_v·h`` (if any).  For ℤ factors ``K = dℤ`` and
positions are integers.

Folding merges pieces that share a vertex and identifies vertices that sit at
the same coset, until every vertex has at most one piece per factor.  The
result reads exactly the normal forms of elements of the subgroup as closed
paths at the base vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .algebra import ensure_free_product
from .errors import EnumerationTruncated, SameCoset, YNotReduced


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if b < a:
            a, b = b, a
        self.parent[b] = a
        return True


@dataclass
class Piece:
    fid: str
    K: object  # frozenset for finite factors, period d >= 0 for ℤ
    pos: dict = field(default_factory=dict)  # vertex -> position (list while folding)


def _coset_key(factor, K, p):
    if factor.is_finite:
        return min(factor.table[k][p] for k in K)
    return p % K if K else p


def _trivial(factor):
    return frozenset([0]) if factor.is_finite else 0


def _closure(factor, K, extra):
    if factor.is_finite:
        return factor.subgroup_closure(set(K) | set(extra))
    d = K
    for x in extra:
        d = math.gcd(d, abs(x))
    return d


def _transform(factor, piece, c):
    """Re-coordinatise a piece by left multiplication with ``c``."""
    if factor.is_finite:
        K = frozenset(factor.mul(factor.mul(c, k), factor.inv(c)) for k in piece.K)
        pos = {v: [factor.mul(c, q) for q in qs] for v, qs in piece.pos.items()}
    else:
        K = piece.K
        pos = {v: [c + q for q in qs] for v, qs in piece.pos.items()}
    return Piece(piece.fid, K, pos)


class SubgroupGraph:
    """Folded graph of a finitely generated subgroup of a free product."""

    def __init__(self, group, base, pieces, generators=None):
        self.group = group
        self.base = base
        self.pieces = pieces
        self._generators = None if generators is None else list(generators)
        self.vertex_pieces = {base: {}}
        for i, P in enumerate(pieces):
            f = group.factors[P.fid]
            P.at = {_coset_key(f, P.K, p): v for v, p in P.pos.items()}
            for v in P.pos:
                self.vertex_pieces.setdefault(v, {})[P.fid] = i

    # ---- reading ------------------------------------------------------------------

    @property
    def vertices(self):
        return sorted(self.vertex_pieces)

    def step(self, v, fid, h):
        """Vertex reached from ``v`` by the syllable ``h`` of ``fid`` (or None)."""
        i = self.vertex_pieces.get(v, {}).get(fid)
        if i is None:
            return None
        P = self.pieces[i]
        f = self.group.factors[fid]
        return P.at.get(_coset_key(f, P.K, f.mul(P.pos[v], h)))

    def read(self, g, start=None):
        """Read a normal form; returns ``(end vertex or None, syllables read)``."""
        v = self.base if start is None else start
        for n, (fid, h) in enumerate(g):
            w = self.step(v, fid, h)
            if w is None:
                return None, n, v
            v = w
        return v, len(g), v

    def contains(self, g):
        end, _, _ = self.read(g)
        return end == self.base

    def coset_equal(self, g1, g2):
        """Right cosets: L·g1 = L·g2."""
        G = self.group
        return self.contains(G.mul(g1, G.inv(g2)))

    def piece_at(self, v, fid):
        i = self.vertex_pieces.get(v, {}).get(fid)
        return None if i is None else self.pieces[i]

    # ---- structure ----------------------------------------------------------------

    def spanning_tree(self):
        """BFS tree: ``{vertex: element read along the tree from the base}``."""
        G = self.group
        tree = {self.base: ()}
        via = {}
        order = [self.base]
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for fid in sorted(self.vertex_pieces[v]):
                P = self.pieces[self.vertex_pieces[v][fid]]
                f = G.factors[fid]
                for w in sorted(P.pos):
                    if w in tree:
                        continue
                    h = f.mul(f.inv(P.pos[v]), P.pos[w])
                    tree[w] = G.mul(tree[v], ((fid, h),) if h else ())
                    via[w] = self.vertex_pieces[v][fid]
                    order.append(w)
        return tree, via, order

    def generators(self):
        """A generating set read off a spanning tree (cached)."""
        if self._generators is not None:
            return list(self._generators)
        G = self.group
        tree, via, order = self.spanning_tree()
        gens = []
        for i, P in enumerate(self.pieces):
            f = G.factors[P.fid]
            members = [v for v in order if v in P.pos]
            root = next((v for v in members if via.get(v) != i), members[0])
            pr = P.pos[root]
            stab = sorted(P.K - {0}) if f.is_finite else ([P.K] if P.K else [])
            for k in stab:
                h = f.mul(f.mul(f.inv(pr), k), pr)
                gens.append(G.multiply(tree[root], ((P.fid, h),), G.inv(tree[root])))
            for w in members:
                if w == root or via.get(w) == i:
                    continue
                h = f.mul(f.inv(pr), P.pos[w])
                gens.append(G.multiply(tree[root], ((P.fid, h),) if h else (), G.inv(tree[w])))
        out = []
        for g in gens:
            if g and g not in out and G.inv(g) not in out:
                out.append(g)
        self._generators = out
        return list(out)

    def is_trivial(self):
        return not self.generators()

    def dump(self):
        G = self.group
        lines = [f"base\t{self.base}"]
        for P in self.pieces:
            f = G.factors[P.fid]
            K = ",".join(map(str, sorted(P.K))) if f.is_finite else f"{P.K}Z"
            entries = ",".join(f"{v}@{p}" for v, p in sorted(P.pos.items()))
            lines.append(f"piece\t{P.fid}\t{K}\t{entries}")
        return "\n".join(lines) + "\n"

    def isomorphic_signature(self):
        """Invariant used to compare folded graphs up to relabelling."""
        tree, _, order = self.spanning_tree()
        index = {v: i for i, v in enumerate(order)}
        sig = []
        G = self.group
        for P in self.pieces:
            f = G.factors[P.fid]
            root = min(P.pos, key=index.get)
            pr = P.pos[root]
            K = frozenset(f.mul(f.mul(f.inv(pr), k), pr) for k in P.K) if f.is_finite else P.K
            rel = tuple(sorted((index[v], _coset_key(f, K, f.mul(f.inv(pr), p))) for v, p in P.pos.items()))
            sig.append((P.fid, K if not f.is_finite else tuple(sorted(K)), rel))
        return len(order), tuple(sorted(sig, key=repr))


def fold(group, generators):
    """Folded graph of the subgroup generated by ``generators``."""
    ensure_free_product(group)
    gens = [g for g in generators if g]
    uf = _UnionFind()
    uf.add(0)
    nxt = 1
    pieces = []
    for g in gens:
        prev = 0
        for i, (fid, h) in enumerate(g):
            if i == len(g) - 1:
                end = 0
            else:
                end = nxt
                nxt += 1
                uf.add(end)
            f = group.factors[fid]
            pos = {prev: [0]}
            pos.setdefault(end, []).append(h)
            pieces.append(Piece(fid, _trivial(f), pos))
            prev = end
    pieces = _fold_pieces(group, uf, pieces)
    # relabel vertices compactly in BFS order from the base
    raw = SubgroupGraph(group, 0, pieces)
    _, _, order = raw.spanning_tree()
    ren = {v: i for i, v in enumerate(order)}
    out = [Piece(P.fid, P.K, {ren[v]: p for v, p in P.pos.items() if v in ren}) for P in pieces]
    out = [P for P in out if P.pos]
    return SubgroupGraph(group, 0, out, gens)


def _fold_pieces(group, uf, pieces):
    while True:
        changed = False
        # re-key positions by current representatives
        for P in pieces:
            pos = {}
            for v, qs in P.pos.items():
                pos.setdefault(uf.find(v), []).extend(qs)
            P.pos = pos
        # merge pieces of one factor sharing a vertex
        owner = {}
        merged = []
        for P in pieces:
            target = None
            for v in P.pos:
                if (P.fid, v) in owner:
                    target = owner[(P.fid, v)]
                    break
            if target is None:
                merged.append(P)
                for v in P.pos:
                    owner[(P.fid, v)] = P
                continue
            changed = True
            f = group.factors[P.fid]
            shared = next(v for v in P.pos if v in target.pos)
            a, b = target.pos[shared][0], P.pos[shared][0]
            Q = _transform(f, P, f.mul(a, f.inv(b)))
            target.K = _closure(f, target.K, Q.K if f.is_finite else [Q.K])
            for v, qs in Q.pos.items():
                target.pos.setdefault(v, []).extend(qs)
                owner[(P.fid, v)] = target
        pieces = merged
        # normalise stabilisers and identify vertices at equal cosets
        for P in pieces:
            f = group.factors[P.fid]
            while True:
                extra = []
                for qs in P.pos.values():
                    extra.extend(f.mul(q, f.inv(qs[0])) for q in qs[1:])
                K = _closure(f, P.K, extra)
                P.K = K
                P.pos = {v: [qs[0]] for v, qs in P.pos.items()}
                seen = {}
                clash = False
                for v in sorted(P.pos):
                    key = _coset_key(f, K, P.pos[v][0])
                    if key in seen:
                        if uf.union(seen[key], v):
                            changed = True
                        clash = True
                    else:
                        seen[key] = v
                if not clash:
                    break
                pos = {}
                for v, qs in P.pos.items():
                    pos.setdefault(uf.find(v), []).extend(qs)
                P.pos = pos
        if not changed:
            break
    for P in pieces:
        P.pos = {v: qs[0] for v, qs in P.pos.items()}
    return pieces


# ---- operations built on folding ------------------------------------------------------


def conjugate(L, g):
    """Folded graph of g·L·g⁻¹."""
    G = L.group
    return fold(G, [G.conj(g, s) for s in L.generators()])


def _crt(a, m, b, n):
    """x ≡ a (m), x ≡ b (n) with modulus 0 meaning equality; returns (x, lcm) or None."""
    if m == 0 and n == 0:
        return (a, 0) if a == b else None
    if m == 0:
        return (a, 0) if (a - b) % n == 0 else None
    if n == 0:
        return (b, 0) if (b - a) % m == 0 else None
    g = math.gcd(m, n)
    if (b - a) % g:
        return None
    l = m // g * n
    # solve a + m·t ≡ b (n)
    t = ((b - a) // g * pow(m // g, -1, n // g)) % (n // g) if n // g > 1 else 0
    return ((a + m * t) % l, l)


def intersect(L, K):
    """Folded graph of L ∩ K via the product construction."""
    G = L.group
    ensure_free_product(G)
    start = (L.base, K.base)
    index = {start: 0}
    order = [start]
    pieces = []
    done = set()
    i = 0
    while i < len(order):
        u, v = order[i]
        i += 1
        for fid in sorted(set(L.vertex_pieces[u]) & set(K.vertex_pieces[v])):
            P, Q = L.piece_at(u, fid), K.piece_at(v, fid)
            f = G.factors[fid]
            if f.is_finite:
                pu, qv = P.pos[u], Q.pos[v]
                tag = (fid, id(P), id(Q), frozenset(
                    (_coset_key(f, P.K, f.mul(pu, h)), _coset_key(f, Q.K, f.mul(qv, h))) for h in range(f.order)
                ))
                if tag in done:
                    continue
                done.add(tag)
                stab = frozenset(
                    h for h in range(f.order)
                    if _coset_key(f, P.K, f.mul(pu, h)) == _coset_key(f, P.K, pu)
                    and _coset_key(f, Q.K, f.mul(qv, h)) == _coset_key(f, Q.K, qv)
                )
                pos = {}
                for h in range(f.order):
                    a = P.at.get(_coset_key(f, P.K, f.mul(pu, h)))
                    b = Q.at.get(_coset_key(f, Q.K, f.mul(qv, h)))
                    if a is None or b is None:
                        continue
                    w = (a, b)
                    if w not in index:
                        index[w] = len(order)
                        order.append(w)
                    pos.setdefault(index[w], h)
                pieces.append(Piece(fid, stab, pos))
            else:
                pu, qv = P.pos[u], Q.pos[v]
                period = _lcm(P.K, Q.K)
                pos = {}
                for a, pa in P.pos.items():
                    for b, qb in Q.pos.items():
                        sol = _crt(pa - pu, P.K, qb - qv, Q.K)
                        if sol is None:
                            continue
                        w = (a, b)
                        if w not in index:
                            index[w] = len(order)
                            order.append(w)
                        pos[index[w]] = sol[0]
                tag = (fid, id(P), id(Q), frozenset(pos))
                if tag in done:
                    continue
                done.add(tag)
                pieces.append(Piece(fid, period, pos))
    # several product pieces may describe one orbit seen from different vertices
    uniq = {}
    for P in pieces:
        key = (P.fid, frozenset(P.pos))
        uniq.setdefault(key, P)
    uf = _UnionFind()
    for w in range(len(order)):
        uf.add(w)
    work = [Piece(P.fid, P.K, {v: [p] for v, p in P.pos.items()}) for P in uniq.values()]
    work = _fold_pieces(G, uf, work)
    raw = SubgroupGraph(G, uf.find(0), work)
    _, _, reach = raw.spanning_tree()
    ren = {v: n for n, v in enumerate(reach)}
    out = [Piece(P.fid, P.K, {ren[v]: p for v, p in P.pos.items() if v in ren}) for P in work]
    return SubgroupGraph(G, 0, [P for P in out if P.pos])


def _lcm(a, b):
    if a == 0 or b == 0:
        return 0
    return a // math.gcd(a, b) * b


@dataclass(frozen=True)
class ZCoset:
    """The set offset + period·ℤ (period 0: the single integer offset)."""

    offset: int
    period: int

    def __contains__(self, h):
        return h == self.offset if self.period == 0 else (h - self.offset) % self.period == 0

    def elements(self, bound):
        if self.period == 0:
            return [self.offset] if abs(self.offset) <= bound else []
        r = self.offset % self.period
        return [h for h in range(-bound, bound + 1) if (h - r) % self.period == 0]


def factor_conjugate_intersection(L, y, fid):
    """{h ∈ H : y·h·y⁻¹ ∈ L}: sorted elements (finite H) or the period d (ℤ)."""
    G = L.group
    f = G.factors[fid]
    if f.is_finite:
        return [h for h in range(f.order) if L.contains(G.conj(y, ((fid, h),) if h else ()))]
    Lc = conjugate(L, G.inv(y))
    P = Lc.piece_at(Lc.base, fid)
    return 0 if P is None else P.K


def double_coset_members(L, y, fid, y2):
    """{h ∈ H : y·h·y2⁻¹ ∈ L} (identity included when it qualifies).

    Finite factors give a sorted list; ℤ factors give a ``ZCoset`` or None.
    """
    G = L.group
    f = G.factors[fid]
    if f.is_finite:
        return [
            h for h in range(f.order)
            if L.contains(G.multiply(y, ((fid, h),) if h else (), G.inv(y2)))
        ]
    Lc = conjugate(L, G.inv(y))
    w = G.mul(G.inv(y), y2)
    base = Lc.base
    P = Lc.piece_at(base, fid)
    d = 0 if P is None else P.K
    pb = 0 if P is None else P.pos[base]

    def in_piece(v):
        return v == base or (P is not None and v in P.pos)

    def pos(v):
        return pb if v == base and P is None else P.pos[v]

    end, n, last = Lc.read(w)
    if end is not None and in_piece(end):
        return ZCoset(pos(end) - pb if d == 0 else (pos(end) - pb) % d, d)
    if end is None and n == len(w) - 1 and w[-1][0] == fid and in_piece(last):
        off = pos(last) - pb + w[-1][1]
        return ZCoset(off if d == 0 else off % d, d)
    return None


@dataclass
class PeripheralInstance:
    y: object
    y_index: int
    factor: str
    intersection: object  # sorted finite list of h, or period d for ℤ

    def is_finite(self, group):
        return group.factors[self.factor].is_finite or self.intersection == 0

    def elements(self, group, bound=None):
        """Elements y·h·y⁻¹ of L ∩ yHy⁻¹ (ℤ: |h| <= bound)."""
        f = group.factors[self.factor]
        if f.is_finite:
            hs = [h for h in self.intersection if h]
        else:
            d = self.intersection
            hs = []
            if d and bound:
                for k in range(1, bound // d + 1):
                    hs.extend((k * d, -k * d))
        return [group.conj(self.y, ((self.factor, h),)) for h in hs]


@dataclass
class YSet:
    elements: list
    distinct_right_cosets: bool = False

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def reduce_Y(L, Y):
    """Keep the first representative of each right coset of L."""
    kept = []
    for y in Y:
        if not any(L.coset_equal(y, z) for z in kept):
            kept.append(y)
    return YSet(kept, True)


def peripheral_family(L, Y):
    """ℍ_{L,Y}: non-trivial L ∩ yHy⁻¹ ordered by (factor id, Y index)."""
    G = L.group
    ys = list(Y)
    out = []
    for f in sorted(G.peripheral, key=lambda f: f.id):
        for i, y in enumerate(ys):
            K = factor_conjugate_intersection(L, y, f.id)
            nontrivial = (len(K) > 1) if f.is_finite else K != 0
            if nontrivial:
                out.append(PeripheralInstance(y, i, f.id, K))
    return out


def reduced_family(L, Y):
    """ℍ^r_{L,Y}: keep L∩y_jHy_j⁻¹ when L ∩ y_i H y_j⁻¹ = ∅ for all i < j."""
    if not isinstance(Y, YSet) or not Y.distinct_right_cosets:
        raise YNotReduced("Y must be a reduced YSet (use reduce_Y)")
    ys = list(Y)
    out = []
    for inst in peripheral_family(L, Y):
        j = inst.y_index
        if all(_empty(double_coset_members(L, ys[i], inst.factor, ys[j])) for i in range(j)):
            out.append(inst)
    return out


def _empty(s):
    return s is None or (isinstance(s, list) and not s)


def hyperbolic_family(L, Y, pairs):
    """ℍ_{L,y,y'} for each pair, as lists of factor ids (Condition (b))."""
    G = L.group
    out = []
    for y, y2 in pairs:
        if L.coset_equal(y, y2):
            raise SameCoset("L·y = L·y'")
        out.append([f.id for f in G.peripheral if not _empty(double_coset_members(L, y, f.id, y2))])
    return out


def enumerate_elements(S, radius, limit=100_000):
    """Elements of ⟨S⟩ that are products of at most ``radius`` generators."""
    G = S.group
    gens = S.generators()
    letters = gens + [G.inv(g) for g in gens if G.inv(g) != g]
    seen = {(): 0}
    frontier = [()]
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for s in letters:
                h = G.mul(g, s)
                if h not in seen:
                    seen[h] = r
                    nxt.append(h)
        frontier = nxt
        if len(seen) > limit:
            break
    exhausted = not frontier
    return sorted(seen, key=G.element_key), exhausted


@dataclass
class TeqResult:
    Y: list
    witnesses: dict  # (x1, x2) -> z
    checked: int
    truncated: bool


def teq_Y(a, H, b, K, X, bound=6, strict=False):
    """Representatives z_{x1,x2} of a·H·x1 ∩ b·K·x2 over x1, x2 ∈ X ∪ {1}.

    H and K are folded graphs; H is enumerated up to ``bound`` generator
    products.  Every enumerated element of each M_{x1,x2} is checked to lie
    in (aHa⁻¹ ∩ bKb⁻¹)·z_{x1,x2}.
    """
    G = H.group
    xs = [()] + [x for x in X if x]
    xs = sorted(set(xs), key=G.element_key)
    hs, exhausted = enumerate_elements(H, bound)
    witnesses = {}
    members = {}
    for x1 in xs:
        for x2 in xs:
            found = []
            for h in hs:
                z = G.multiply(a, h, x1)
                if K.contains(G.multiply(G.inv(b), z, G.inv(x2))):
                    found.append(z)
            if found:
                z0 = min(found, key=G.element_key)
                witnesses[(x1, x2)] = z0
                members[(x1, x2)] = found
    checked = 0
    for key, zs in members.items():
        z0 = witnesses[key]
        for z in zs:
            c = G.mul(z, G.inv(z0))
            if not (H.contains(G.conj(G.inv(a), c)) and K.contains(G.conj(G.inv(b), c))):
                raise RuntimeError("containment check failed for an enumerated witness")
            checked += 1
    Y = []
    for z in sorted(witnesses.values(), key=G.element_key):
        if z not in Y:
            Y.append(z)
    res = TeqResult(Y, witnesses, checked, not exhausted)
    if strict and not exhausted:
        raise EnumerationTruncated(f"subgroup enumeration stopped at {bound} generator products", res)
    return res
