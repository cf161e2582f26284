"""Generating systems, words over X ⊔ 𝓗, and the two group backends.

Letters are plain named tuples so that words and normal forms stay hashable
and cheap to build inside breadth-first searches:

* ``Letter('', 'x')`` is the X-letter ``x``;
* ``Letter('A', 1)`` is the non-identity element ``1`` of the factor ``A``.

A ``FreeProductGroup`` element is its normal form, a tuple of syllables
``(factor_id, element)`` with no identity syllables and no two neighbours
from the same factor.  A ``PresentedGroup`` element is a canonical word
(see :mod:`relhyp.presented`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .errors import (
    BackendMismatch,
    InvalidTable,
    NonSymmetricSystem,
    SpecError,
    TrivialFactor,
    Tri,
)


class Letter(NamedTuple):
    factor: str  # '' for X-letters
    value: object

    @property
    def is_x(self):
        return self.factor == ""


def xletter(name):
    return Letter("", name)


@dataclass(frozen=True)
class GeneratorSymbol:
    name: str
    inverse_name: str

    @property
    def self_inverse(self):
        return self.name == self.inverse_name


@dataclass(eq=False)
class Factor:
    """A free factor: a finite group given by a table, or ℤ.

    Finite elements are relabelled so the identity is ``0``; ℤ elements are
    Python ints.
    """

    id: str
    order: int | None = None
    table: tuple | None = None
    inverses: tuple | None = None
    peripheral: bool = True
    names: dict = field(default_factory=dict)
    free_symbol: GeneratorSymbol | None = None
    embedding: tuple | None = None  # Presented backend: word for the generator of a ℤ factor

    @property
    def is_finite(self):
        return self.order is not None

    def mul(self, a, b):
        if self.order is None:
            return a + b
        return self.table[a][b]

    def inv(self, a):
        if self.order is None:
            return -a
        return self.inverses[a]

    def power(self, a, k):
        if self.order is None:
            return a * k
        r = 0
        base = a if k >= 0 else self.inverses[a]
        for _ in range(abs(k)):
            r = self.table[r][base]
        return r

    def elements(self, truncation=None):
        """Non-identity elements in a fixed order; ℤ is cut at ``|k| <= truncation``."""
        if self.order is not None:
            return list(range(1, self.order))
        if truncation is None:
            raise ValueError(f"factor {self.id} is infinite; a truncation bound is required")
        out = []
        for k in range(1, truncation + 1):
            out.extend((k, -k))
        return out

    def subgroup_closure(self, gens):
        """Subgroup generated by ``gens`` (finite factor) as a frozenset."""
        seen = {0}
        frontier = [0]
        gens = [g for g in gens if g != 0]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.table[a][g]
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(seen)

    def sort_key(self, a):
        if self.order is None:
            return (abs(a), a < 0)
        return (a,)

    def element_label(self, a):
        for alias, v in sorted(self.names.items()):
            if v == a:
                return alias
        return f"{self.id}:{a}"

    # ---- constructors -------------------------------------------------------

    @classmethod
    def cyclic(cls, fid, n, **kw):
        if n < 2:
            raise TrivialFactor(f"factor {fid} has order {n}")
        table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
        inverses = tuple((-i) % n for i in range(n))
        return cls(fid, n, table, inverses, **kw)

    @classmethod
    def integers(cls, fid, **kw):
        return cls(fid, None, None, None, **kw)

    @classmethod
    def from_table(cls, fid, rows, **kw):
        rows = [list(r) for r in rows]
        n = len(rows)
        if n < 2:
            raise TrivialFactor(f"factor {fid} has order {n}")
        if any(len(r) != n for r in rows):
            raise InvalidTable(f"factor {fid}: table is not square")
        if any(not isinstance(v, int) or not 0 <= v < n for r in rows for v in r):
            raise InvalidTable(f"factor {fid}: entries must be indices 0..{n - 1}")
        ident = [e for e in range(n) if all(rows[e][a] == a and rows[a][e] == a for a in range(n))]
        if not ident:
            raise InvalidTable(f"factor {fid}: no identity element")
        e = ident[0]
        for a, b, c in itertools.product(range(n), repeat=3):
            if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                raise InvalidTable(f"factor {fid}: associativity fails at ({a},{b},{c})")
        inv = []
        for a in range(n):
            cands = [b for b in range(n) if rows[a][b] == e and rows[b][a] == e]
            if not cands:
                raise InvalidTable(f"factor {fid}: element {a} has no inverse")
            inv.append(cands[0])
        # relabel so that the identity is 0
        perm = [e] + [a for a in range(n) if a != e]
        new = {old: i for i, old in enumerate(perm)}
        table = tuple(tuple(new[rows[perm[i]][perm[j]]] for j in range(n)) for i in range(n))
        inverses = tuple(new[inv[perm[i]]] for i in range(n))
        names = {k: new[v] for k, v in kw.pop("names", {}).items()}
        return cls(fid, n, table, inverses, names=names, **kw)


class Group:
    """Shared word machinery for both backends."""

    backend = "abstract"

    def __init__(self, factors: Sequence[Factor], generators: Sequence[GeneratorSymbol]):
        ids = [f.id for f in factors]
        if len(set(ids)) != len(ids):
            raise SpecError(f"duplicate factor ids in {ids}")
        self.factors = {f.id: f for f in factors}
        self.generators = list(generators)
        self._inverse_name = {}
        for g in self.generators:
            for a, b in ((g.name, g.inverse_name), (g.inverse_name, g.name)):
                if self._inverse_name.get(a, b) != b:
                    raise NonSymmetricSystem(f"symbol {a} paired with two inverses")
                self._inverse_name[a] = b
        clash = set(self._inverse_name) & set(self.factors) - {
            f.id for f in factors if f.free_symbol is not None
        }
        if clash:
            raise SpecError(f"names used both as X-symbols and factor ids: {sorted(clash)}")
        self._aliases = {}
        for f in factors:
            for alias, v in f.names.items():
                if v == 0:
                    raise SpecError(f"alias {alias} names the identity of {f.id}")
                self._aliases[alias] = Letter(f.id, v)
        order = []
        for g in self.generators:
            order.append(g.name)
            if not g.self_inverse:
                order.append(g.inverse_name)
        self._x_order = {n: i for i, n in enumerate(order)}
        self._factor_order = {fid: i for i, fid in enumerate(self.factors)}

    # ---- alphabet -----------------------------------------------------------

    @property
    def peripheral(self):
        return [f for f in self.factors.values() if f.peripheral]

    def x_letters(self):
        return [xletter(n) for n in self._x_order]

    def h_letters(self, fid, truncation=None):
        return [Letter(fid, a) for a in self.factors[fid].elements(truncation)]

    def letter_inverse(self, letter):
        if letter.factor == "":
            return Letter("", self._inverse_name[letter.value])
        return Letter(letter.factor, self.factors[letter.factor].inv(letter.value))

    def word_inverse(self, word):
        return tuple(self.letter_inverse(l) for l in reversed(word))

    def letter_key(self, letter):
        if letter.factor == "":
            return (0, self._x_order.get(letter.value, len(self._x_order)), str(letter.value))
        f = self.factors[letter.factor]
        return (1, self._factor_order[letter.factor], f.sort_key(letter.value))

    def word_key(self, word):
        return (len(word), tuple(self.letter_key(l) for l in word))

    def free_reduce(self, word):
        """Reduced form in F = F(X) ∗ (∗ factors)."""
        out = []
        for l in word:
            if out:
                top = out[-1]
                if l.factor == "" and top.factor == "":
                    if self._inverse_name[top.value] == l.value:
                        out.pop()
                        continue
                elif l.factor != "" and top.factor == l.factor:
                    v = self.factors[l.factor].mul(top.value, l.value)
                    out.pop()
                    if v != 0:
                        out.append(Letter(l.factor, v))
                    continue
            if l.factor != "" and l.value == 0:
                continue
            out.append(l)
        return tuple(out)

    # ---- parsing / printing ---------------------------------------------------

    def parse_letter(self, token):
        token = token.strip()
        if token in self._inverse_name:
            return xletter(token)
        if token in self._aliases:
            return self._aliases[token]
        if ":" in token:
            fid, _, val = token.partition(":")
            if fid in self.factors:
                f = self.factors[fid]
                try:
                    v = int(val)
                except ValueError:
                    raise SpecError(f"bad factor element in {token!r}") from None
                if f.is_finite:
                    v %= f.order
                if v == 0:
                    raise SpecError(f"{token!r} is the identity of {fid}")
                return Letter(fid, v)
        raise SpecError(f"unknown letter {token!r}")

    def parse_word(self, text):
        if isinstance(text, str):
            tokens = [t for t in text.replace(" ", "").split(".") if t and t != "1"]
        else:
            tokens = list(text)
        return tuple(t if isinstance(t, Letter) else self.parse_letter(t) for t in tokens)

    def letter_label(self, letter):
        if letter.factor == "":
            return str(letter.value)
        return f"{letter.factor}:{letter.value}"

    def serialize_word(self, word):
        return ".".join(self.letter_label(l) for l in word) or "1"

    # ---- group operations (backend specific) -----------------------------------

    identity = ()

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def letter_value(self, letter):
        raise NotImplementedError

    def evaluate(self, word):
        """Element represented by a word over X ⊔ 𝓗 (or a string literal)."""
        if isinstance(word, str):
            word = self.parse_word(word)
        g = self.identity
        for l in word:
            g = self.mul(g, self.letter_value(l))
        return g

    def element(self, text):
        return self.evaluate(self.parse_word(text))

    def multiply(self, *elements):
        g = self.identity
        for h in elements:
            g = self.mul(g, h)
        return g

    def invert(self, g):
        return self.inv(g)

    def conj(self, g, h):
        """g h g⁻¹."""
        return self.mul(self.mul(g, h), self.inv(g))


class FreeProductGroup(Group):
    """G = ∗ of finite table groups and ℤ factors, with X given by normal forms.

    X-symbols declared without a value become free generators; each such
    symbol gets its own non-peripheral factor (ℤ, or ℤ/2 for a self-inverse
    symbol).
    """

    backend = "free_product"

    def __init__(self, factors, generators, values=None):
        factors = list(factors)
        values = dict(values or {})
        known = {f.id for f in factors}
        self.values = {}
        pending = []
        for g in generators:
            if g.name in values:
                pending.append(g)
                continue
            if g.name in known:
                raise SpecError(f"free generator {g.name} clashes with a factor id")
            if g.self_inverse:
                f = Factor.cyclic(g.name, 2, peripheral=False, free_symbol=g)
            else:
                f = Factor.integers(g.name, peripheral=False, free_symbol=g)
            factors.append(f)
            known.add(g.name)
        super().__init__(factors, generators)
        for g in self.generators:
            if g.name in values:
                v = values[g.name]
                if not isinstance(v, tuple) or (v and not isinstance(v[0], tuple)):
                    v = self.evaluate(self.parse_word(v))
                v = self.normalize(v)
                if g.self_inverse and self.mul(v, v) != ():
                    raise NonSymmetricSystem(f"self-inverse symbol {g.name} has value of order > 2")
                self.values[g.name] = v
                self.values[g.inverse_name] = self.inv(v)
            else:
                s = ((g.name, 1),)
                self.values[g.name] = s
                self.values[g.inverse_name] = self.inv(s)

    # ---- normal forms ------------------------------------------------------------

    def normalize(self, syllables):
        out = []
        for fid, a in syllables:
            f = self.factors[fid]
            if f.is_finite:
                a %= f.order
            if a == 0:
                continue
            if out and out[-1][0] == fid:
                b = f.mul(out[-1][1], a)
                out.pop()
                if b != 0:
                    out.append((fid, b))
            else:
                out.append((fid, a))
        return tuple(out)

    def mul(self, g, h):
        if not g:
            return h
        if not h:
            return g
        i = 0
        n = len(h)
        g = list(g)
        while i < n and g and g[-1][0] == h[i][0]:
            fid = h[i][0]
            c = self.factors[fid].mul(g[-1][1], h[i][1])
            g.pop()
            i += 1
            if c != 0:
                g.append((fid, c))
                break
        g.extend(h[i:])
        return tuple(g)

    def inv(self, g):
        return tuple((fid, self.factors[fid].inv(a)) for fid, a in reversed(g))

    def letter_value(self, letter):
        if letter.factor == "":
            return self.values[letter.value]
        return ((letter.factor, letter.value),) if letter.value != 0 else ()

    def reduce(self, word):
        """Normal form of a word; idempotent."""
        if isinstance(word, str):
            word = self.parse_word(word)
        return self.evaluate(word)

    def equal(self, g, h, budget=None):
        return Tri.YES if g == h else Tri.NO

    def coset_key(self, g, fid):
        """Canonical key of gH: drop a trailing syllable lying in H."""
        if g and g[-1][0] == fid:
            return g[:-1]
        return g

    def factor_part(self, g, fid):
        """Trailing H-syllable value (0 when absent)."""
        if g and g[-1][0] == fid:
            return g[-1][1]
        return 0

    def factor_element_between(self, g1, g2, fid):
        """h ∈ H with g1·h = g2, or None."""
        d = self.mul(self.inv(g1), g2)
        if not d:
            return 0
        if len(d) == 1 and d[0][0] == fid:
            return d[0][1]
        return None

    def syllable_length(self, g):
        return len(g)

    def element_key(self, g):
        return (len(g), tuple((self._factor_order[f], self.factors[f].sort_key(a)) for f, a in g))

    def serialize(self, g):
        parts = []
        for fid, a in g:
            f = self.factors[fid]
            if f.free_symbol is not None:
                sym = f.free_symbol
                if f.is_finite:
                    parts.append(sym.name)
                else:
                    parts.extend([sym.name if a > 0 else sym.inverse_name] * abs(a))
            else:
                parts.append(f"{fid}:{a}")
        return ".".join(parts) or "1"

    def parse_element(self, text):
        if text.strip() in ("", "1"):
            return ()
        return self.evaluate(self.parse_word(text))


def ensure_free_product(group):
    if group.backend != "free_product":
        raise BackendMismatch(f"operation requires the free-product backend, got {group.backend}")
    return group
