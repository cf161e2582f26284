"""Bounded word problem for finite relative presentations.

Elements are words over X ⊔ 𝓗 brought to a canonical form in three steps:

1. letters of factors that carry an embedding word are substituted away;
2. the word is rewritten with relator halves ``u -> v`` (``u v⁻¹`` a cyclic
   shift of a relator) that strictly decrease it in shortlex order;
3. the irreducible word is compared against a per-group registry bucketed by
   the rational abelianization image, and merged with an earlier word when a
   relator certificate proves them equal.

Step 2 alone is a complete normal form whenever the induced rewriting system
is confluent (for instance ℤ² with its commutator).  Otherwise step 3 only
merges what it can certify, which is the honest bounded behaviour.
"""

from __future__ import annotations

import math
from fractions import Fraction

import sympy

from .algebra import Group, Letter
from .errors import BackendMismatch, BudgetExceeded, CosetKeyUnknown, RelatorsNotClosed, SpecError, Tri

REWRITE_STEPS = 200_000
REGISTRY_AREA = 4


def cyclic_shifts(word):
    return [word[i:] + word[:i] for i in range(len(word))]


def cyclically_reduce(group, word):
    w = list(group.free_reduce(word))
    while len(w) > 1:
        a, b = w[0], w[-1]
        if a.factor == "" and b.factor == "" and group.letter_inverse(a) == b:
            w = w[1:-1]
        elif a.factor != "" and a.factor == b.factor:
            v = group.factors[a.factor].mul(b.value, a.value)
            w = w[1:-1] + ([Letter(a.factor, v)] if v != 0 else [])
        else:
            break
    return tuple(w)


def symmetric_closure(group, relators):
    out = set()
    for r in relators:
        r = cyclically_reduce(group, r)
        if not r:
            continue
        for s in cyclic_shifts(r):
            out.add(s)
            out.add(group.word_inverse(s))
    return out


def replacement_rules(group, closed, monotone=True):
    """All splits ``r = u·v⁻¹`` of closed relators, as ``u -> (v, r)``.

    With ``monotone`` only the splits with ``|v| <= |u|`` are kept.
    """
    rules = {}
    for r in sorted(closed, key=group.word_key):
        n = len(r)
        for i in range(n + 1):
            u = r[:i]
            v = group.word_inverse(r[i:])
            if monotone and len(v) > len(u):
                continue
            rules.setdefault(u, []).append((v, r))
    return rules


def certificate_search(group, word, rules, cap, max_states=400_000):
    """Fewest relator applications turning ``word`` into the empty word.

    Returns ``(area, certificate)`` with certificate a list of
    ``(prefix, relator)`` pairs such that ``word`` equals the product of
    ``prefix·relator·prefix⁻¹`` in F; ``None`` if nothing is found within
    ``cap`` applications.
    """
    start = group.free_reduce(word)
    if not start:
        return 0, []
    by_first = {}
    inserts = []
    for u, vs in rules.items():
        if u:
            by_first.setdefault(u[0], []).append((u, vs))
        else:
            inserts.extend(vs)
    parent = {start: None}
    frontier = [start]
    for depth in range(1, cap + 1):
        nxt = []
        for w in frontier:
            n = len(w)
            for i in range(n + 1):
                moves = []
                if i < n:
                    for u, vs in by_first.get(w[i], ()):
                        if w[i:i + len(u)] == u:
                            moves.extend((u, v, r) for v, r in vs)
                moves.extend(((), v, r) for v, r in inserts)
                for u, v, r in moves:
                    w2 = group.free_reduce(w[:i] + v + w[i + len(u):])
                    if w2 in parent:
                        continue
                    parent[w2] = (w, w[:i], r)
                    if not w2:
                        return depth, _unwind(parent, w2)
                    nxt.append(w2)
                    if len(parent) > max_states:
                        raise BudgetExceeded(f"certificate search exceeded {max_states} states")
        frontier = nxt
        if not frontier:
            break
    return None


def _unwind(parent, w):
    cert = []
    while parent[w] is not None:
        w, prefix, r = parent[w]
        cert.append((prefix, r))
    cert.reverse()
    return cert


def certificate_product(group, certificate):
    """The F-word Π prefix·relator·prefix⁻¹ for a certificate."""
    out = ()
    for prefix, r in certificate:
        out = group.free_reduce(out + prefix + r + group.word_inverse(prefix))
    return out


class PresentedGroup(Group):
    """G = ⟨X, 𝓗 | R⟩ with tri-valued equality."""

    backend = "presented"

    def __init__(self, factors, generators, relators, auto_close=True):
        factors = list(factors)
        super().__init__(factors, generators)
        raw = [self.free_reduce(tuple(r)) for r in relators]
        for r in raw:
            for l in r:
                if l.factor == "" and l.value not in self._inverse_name:
                    raise SpecError(f"relator uses unknown symbol {l.value}")
        self.relators = [r for r in raw if r]
        closed = symmetric_closure(self, self.relators)
        self.closure_added = not closed <= set(self.relators) or any(
            cyclically_reduce(self, r) != r for r in self.relators
        )
        if self.closure_added and not auto_close:
            raise RelatorsNotClosed("relators are not closed under inversion and cyclic shifts")
        self.closed_relators = closed
        embed_rel = []
        for f in factors:
            if f.embedding is not None:
                emb = self.free_reduce(self.parse_word(f.embedding) if isinstance(f.embedding, str) else tuple(f.embedding))
                if any(l.factor != "" for l in emb):
                    raise SpecError(f"embedding of {f.id} must be a word over X")
                f.embedding = emb
                if f.is_finite:
                    embed_rel.append(emb * f.order)
                embed_rel.append((Letter(f.id, 1),) + self.word_inverse(emb))
        self.embedding_relators = embed_rel
        self.relative_relators = symmetric_closure(self, self.relators + embed_rel)
        self.omega = sorted(
            {l for r in self.relative_relators for l in r if l.factor != ""},
            key=self.letter_key,
        )
        sub = [self.substitute(r) for r in self.relators + embed_rel]
        self.rewrite_relators = symmetric_closure(self, sub)
        rules = replacement_rules(self, self.rewrite_relators)
        best = {}
        for u, vs in rules.items():
            for v, _ in vs:
                if len(v) < len(u) or (len(v) == len(u) and self.word_key(v) < self.word_key(u)):
                    if u not in best or self.word_key(v) < self.word_key(best[u]):
                        best[u] = v
        self._rules = {}
        for u, v in best.items():
            self._rules.setdefault(u[0], []).append((u, v))
        self._max_rule = max((len(u) for u in best), default=0)
        self._cert_rules = replacement_rules(self, self.rewrite_relators)
        self._area_rules = replacement_rules(self, self.relative_relators)
        self._setup_abelianization()
        self._registry = {}
        self._alias = {}
        self._mul_cache = {}

    # ---- abelianization over ℚ -------------------------------------------------

    def _coordinates(self):
        coords = []
        for g in self.generators:
            coords.append(("", g.name))
        for f in self.factors.values():
            if f.embedding is None and not f.is_finite:
                coords.append((f.id, None))
        return coords

    def exponent_vector(self, word):
        idx = self._coord_index
        v = [0] * len(idx)
        for l in word:
            if l.factor == "":
                name = l.value
                if name in idx:
                    v[idx[name]] += 1
                else:
                    v[idx[self._inverse_name[name]]] -= 1
            elif l.factor in idx:
                v[idx[l.factor]] += l.value
        return v

    def _setup_abelianization(self):
        coords = self._coordinates()
        self._coord_index = {c[1] if c[0] == "" else c[0]: i for i, c in enumerate(coords)}
        rows = [self.exponent_vector(r) for r in self.rewrite_relators]
        for g in self.generators:
            if g.self_inverse:
                row = [0] * len(coords)
                row[self._coord_index[g.name]] = 2
                rows.append(row)
        n = len(coords)
        if rows and n:
            M = sympy.Matrix(rows)
            basis = M.nullspace()
        else:
            basis = [sympy.eye(n)[:, i] for i in range(n)]
        self._projection = [[Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in b] for b in basis]

    def abelian_image(self, word):
        v = self.exponent_vector(self.substitute(word))
        return tuple(sum((p * x for p, x in zip(row, v)), Fraction(0)) for row in self._projection)

    # ---- canonical forms ------------------------------------------------------

    def substitute(self, word):
        out = []
        for l in word:
            f = self.factors.get(l.factor) if l.factor else None
            if f is not None and f.embedding is not None:
                k = l.value
                if f.is_finite and k > f.order // 2:
                    k -= f.order
                e = f.embedding if k > 0 else self.word_inverse(f.embedding)
                out.extend(e * abs(k))
            else:
                out.append(l)
        return self.free_reduce(out)

    def rewrite(self, word):
        w = list(self.free_reduce(word))
        i = 0
        steps = 0
        while i < len(w):
            hit = None
            for u, v in self._rules.get(w[i], ()):
                if tuple(w[i:i + len(u)]) == u:
                    hit = (u, v)
                    break
            if hit is None:
                i += 1
                continue
            steps += 1
            if steps > REWRITE_STEPS:
                raise BudgetExceeded("rewriting did not terminate within budget")
            u, v = hit
            old = len(w)
            w = list(self.free_reduce(tuple(w[:i]) + v + tuple(w[i + len(u):])))
            i = max(0, i - self._max_rule - (old - len(w)))
        return tuple(w)

    def canonical(self, word):
        w = self.rewrite(self.substitute(tuple(word)))
        if w in self._alias:
            return self._alias[w]
        bucket = self._registry.setdefault(self.abelian_image(w), [])
        if w not in bucket:
            for rep in bucket:
                found = certificate_search(self, w + self.word_inverse(rep), self._cert_rules, REGISTRY_AREA, 20_000)
                if found is not None:
                    self._alias[w] = rep
                    return rep
            bucket.append(w)
        return w

    # ---- group interface -----------------------------------------------------------

    def mul(self, g, h):
        key = (g, h)
        r = self._mul_cache.get(key)
        if r is None:
            r = self.canonical(g + h)
            self._mul_cache[key] = r
        return r

    def inv(self, g):
        return self.canonical(self.word_inverse(g))

    def letter_value(self, letter):
        return self.canonical((letter,))

    def reduce(self, word):
        raise BackendMismatch("normal forms exist only for the free-product backend")

    def equal(self, g, h, budget=REGISTRY_AREA):
        """Yes with a relator certificate, No by the abelianization, else Unknown."""
        g = self.canonical(self.parse_word(g) if isinstance(g, str) else g)
        h = self.canonical(self.parse_word(h) if isinstance(h, str) else h)
        if g == h:
            return Tri.YES
        if self.abelian_image(g) != self.abelian_image(h):
            return Tri.NO
        if certificate_search(self, g + self.word_inverse(h), self._cert_rules, budget) is not None:
            return Tri.YES
        return Tri.UNKNOWN

    def equal_words(self, u, v, budget=REGISTRY_AREA):
        """Like :meth:`equal` but on raw words, returning the certificate too."""
        u = self.parse_word(u) if isinstance(u, str) else tuple(u)
        v = self.parse_word(v) if isinstance(v, str) else tuple(v)
        w = self.substitute(u + self.word_inverse(v))
        if self.abelian_image(w) != tuple(Fraction(0) for _ in self._projection):
            return Tri.NO, None
        found = certificate_search(self, w, self._cert_rules, budget)
        if found is not None:
            return Tri.YES, found[1]
        return Tri.UNKNOWN, None

    def _factor_power(self, f, k):
        return self.canonical((Letter(f.id, k),)) if k else ()

    def coset_key(self, g, fid):
        f = self.factors[fid]
        if f.is_finite:
            return min((self.mul(g, self._factor_power(f, k)) for k in range(f.order)), key=self.word_key)
        u = self.abelian_image(self._factor_power(f, 1))
        i = next((j for j, x in enumerate(u) if x != 0), None)
        if i is None:
            raise CosetKeyUnknown(f"factor {fid} has trivial rational image; coset keys undecidable here")
        v = self.abelian_image(g)
        # unique k with v_i + k·u_i in [0, |u_i|)
        q = v[i] / u[i]
        k = -math.floor(q) if u[i] > 0 else -math.ceil(q)
        return self.mul(g, self._factor_power(f, k))

    def factor_element_between(self, g1, g2, fid):
        f = self.factors[fid]
        d = self.mul(self.inv(g1), g2)
        if not d:
            return 0
        if f.is_finite:
            for k in range(1, f.order):
                if self._factor_power(f, k) == d:
                    return k
            return None
        u = self.abelian_image(self._factor_power(f, 1))
        v = self.abelian_image(d)
        i = next((j for j, x in enumerate(u) if x != 0), None)
        if i is None:
            raise CosetKeyUnknown(f"factor {fid} has trivial rational image")
        k = v[i] / u[i]
        if k.denominator != 1 or k == 0:
            return None
        k = int(k)
        return k if self._factor_power(f, k) == d else None

    def syllable_length(self, g):
        return len(g)

    def element_key(self, g):
        return self.word_key(g)

    def serialize(self, g):
        return self.serialize_word(g)

    def serialize_word(self, word):
        parts = []
        for l in word:
            if l.factor == "":
                parts.append(str(l.value))
            else:
                parts.append(f"{l.factor}:{l.value}")
        return ".".join(parts) or "1"

    def parse_element(self, text):
        if text.strip() in ("", "1"):
            return ()
        return self.canonical(self.parse_word(text))

    def area(self, word, cap, monotone=True):
        """(area, certificate) over the full relative relator set, or None."""
        rules = self._area_rules if monotone else replacement_rules(self, self.relative_relators, monotone=False)
        return certificate_search(self, self.free_reduce(tuple(word)), rules, cap)


__all__ = [
    "PresentedGroup",
    "certificate_search",
    "certificate_product",
    "cyclic_shifts",
    "cyclically_reduce",
    "symmetric_closure",
    "replacement_rules",
]
