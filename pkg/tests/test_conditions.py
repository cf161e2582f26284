from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relhyp.conditions import (
    area,
    bcp_harness,
    condition_b,
    count_circuits,
    dehn_table,
    embedded_ball,
    embedded_growth,
    fineness_sample,
    free_decomposition,
    isolated_component_cycle,
    condition_v_path,
    lemma_circuit_transform,
    slim_triangle_delta,
)
from relhyp.errors import AreaCapExceeded, NotTrivialWithinBudget, ReplacementNotFound, SameCoset
from relhyp.graphs import ConeLabel, GraphOracle, Kind
from relhyp.paths import decompose, path_from_word
from relhyp.subgroups import fold

from conftest import FREE_REL_A, Z2, Z2Z3, Z2_REL_X, ZFREE, build

z2z3 = build(Z2Z3)
z2 = build(Z2)
z2_rel_x = build(Z2_REL_X)
with_u = build(dict(Z2Z3, generators=[["u", "U"]], embeddings={"u": "a.b"}))
with_a = build(dict(Z2Z3, generators=[["u", "U"]], embeddings={"u": "a"}))


# ---- condition (b) ----


def test_condition_b_examples():
    e = z2z3.element
    L = fold(z2z3, [e("a.b")])
    assert sorted(condition_b(L, (), e("a"))) == ["A", "B"]
    with pytest.raises(SameCoset):
        condition_b(L, e("a"), e("a"))


def test_condition_b_same_coset_detected_through_L():
    e = z2z3.element
    L = fold(z2z3, [e("a.b")])
    # ab ∈ L, so L·ab = L·1
    with pytest.raises(SameCoset):
        condition_b(L, (), e("a.b"))


def test_condition_b_conjugate_generated_subgroup():
    G = build(ZFREE)
    e = G.element
    L = fold(G, [e("a"), e("b.a.B")])
    got = condition_b(L, (), e("a.b"))
    # the listing is a deterministic subset of the factors
    assert set(got) <= {"A", "B"}
    assert got == condition_b(L, (), e("a.b"))


# ---- free decomposition ----


def test_decomposition_without_extra_generators():
    r = free_decomposition(z2z3)
    assert r.verified_members == {} and sorted(r.excluded_members) == ["A", "B"]
    assert r.undetermined == []


def test_decomposition_with_u_equal_ab():
    r = free_decomposition(with_u, circuit_bound=3)
    assert sorted(r.verified_members) == ["A", "B"]
    for fid, cyc in r.verified_members.items():
        assert len(cyc) == 3 and cyc.end == ()


def test_decomposition_with_u_equal_a():
    r = free_decomposition(with_a)
    assert sorted(r.verified_members) == ["A"] and sorted(r.excluded_members) == ["B"]
    assert len(r.v_paths["A"]) == 1


@pytest.mark.parametrize("G", [z2z3, with_u, with_a, build(FREE_REL_A), z2_rel_x])
def test_decomposition_witnesses_are_cross_checked(G):
    r = free_decomposition(G, circuit_bound=4, radius=4)
    assert not set(r.verified_members) & set(r.excluded_members)
    assert set(r.verified_members) | set(r.excluded_members) | set(r.undetermined) == {f.id for f in G.peripheral}
    oracle = GraphOracle(G, Kind.RELATIVE, truncation=2)
    for fid, cyc in r.verified_members.items():
        d = decompose(cyc, oracle)
        assert any(c.factor == fid and c.first != c.last and d.isolated(i) for i, c in enumerate(d.components))
        # both characterisations hold for every verified member
        assert condition_v_path(oracle, fid, 4) is not None
        assert isolated_component_cycle(oracle, fid, 4) is not None or fid in r.v_paths


def test_z2_rel_x_is_verified():
    # t·x·t⁻¹ reaches x without an H-edge from H
    r = free_decomposition(z2_rel_x)
    assert list(r.verified_members) == ["H"]


# ---- fineness ----


def test_fineness_tree_is_zero():
    for n in (2, 4, 6):
        s = fineness_sample(z2z3, "1~A", n, range(2, 7))
        assert all(c == 0 for _, c in s.table)


def test_fineness_n2_zero():
    s = fineness_sample(z2_rel_x, "1~H", 2, range(2, 7))
    assert all(c == 0 for _, c in s.table)


def test_fineness_z2_rel_x_grows():
    s = fineness_sample(z2_rel_x, "1~H", 6, range(4, 11))
    counts = [c for _, c in s.table]
    assert s.monotone and not s.stabilized
    assert all(a < b for a, b in zip(counts, counts[1:]))
    assert all(c >= R - 2 for R, c in s.table)


def test_count_circuits_respects_allowed():
    o = GraphOracle(z2, Kind.PLAIN)
    e = next(iter(o.neighbors(())))
    allowed = set(o.distances_from((), 3))
    # the four unit squares through one edge: two of them
    assert count_circuits(o, e, 4, allowed) == 2
    assert count_circuits(o, e, 4, {(), e.terminus}) == 0


# ---- embedded balls ----


@pytest.mark.parametrize("fid", ["A", "B"])
def test_embedded_ball_free_product_empty(fid):
    for n in range(5):
        assert embedded_ball(z2z3, fid, n, 6, 3) == []


def test_embedded_ball_z2_rel_x():
    ball = embedded_ball(z2_rel_x, "H", 3, 4, 3)
    assert {z2_rel_x.element(w) for w in ("x", "x.x", "x.x.x", "X", "X.X", "X.X.X")} <= set(ball)
    assert embedded_ball(z2_rel_x, "H", 0, 4, 3) == []
    sizes = [s for _, s in embedded_growth(z2_rel_x, "H", 3, 4, [1, 2, 3, 4])]
    assert sizes == sorted(sizes) and sizes[-1] > sizes[0]


@given(st.integers(0, 3), st.integers(0, 3), st.integers(1, 4))
def test_embedded_ball_monotone(n, R, M):
    a = set(embedded_ball(z2_rel_x, "H", n, R, M))
    assert a <= set(embedded_ball(z2_rel_x, "H", n + 1, R, M))
    assert a <= set(embedded_ball(z2_rel_x, "H", n, R + 1, M))


# ---- BCP ----


def _pairs(k):
    rel = GraphOracle(z2_rel_x, Kind.RELATIVE, truncation=8)
    return rel, (path_from_word(rel, (), [f"H:{k}", "t"]), path_from_word(rel, (), ["t", f"H:{k}"]))


def test_bcp_depth_grows_with_k():
    plain = GraphOracle(z2_rel_x, Kind.PLAIN)
    for k in range(1, 6):
        rel, pair = _pairs(k)
        r = bcp_harness([pair], 2, 2, rel, plain, cap=20, bound=3)
        assert r.checked == 1 and r.max_depth == k
        assert bool(r.violations) == (k > 3)


def test_bcp_degenerate_and_rejections():
    plain = GraphOracle(z2_rel_x, Kind.PLAIN)
    rel, (p, q) = _pairs(2)
    r = bcp_harness([(p, p)], 2, 2, rel, plain)
    assert r.checked == 1 and r.depths == [] and r.max_depth == 0
    other = path_from_word(rel, (), ["t"])
    r = bcp_harness([(p, other)], 2, 2, rel, plain)
    assert r.checked == 0 and r.rejected == [(0, "endpoints differ")]
    back = path_from_word(rel, (), ["H:1", "t", "T", "H:-1", "H:2", "t"])
    r = bcp_harness([(back, p)], 2, 2, rel, plain)
    assert r.checked == 0 and len(r.rejected) == 1


def test_bcp_tree_is_vacuous():
    rel = GraphOracle(z2z3, Kind.RELATIVE)
    plain = GraphOracle(z2z3, Kind.PLAIN)
    pairs = []
    for w in ("a.b", "b.a.B", "a.B.a"):
        p = path_from_word(rel, (), w)
        pairs.append((p, p))
    r = bcp_harness(pairs, 1, 0, rel, plain)
    assert r.checked == 3 and r.max_depth == 0


# ---- slim triangles ----


def test_delta_tree_zero():
    assert slim_triangle_delta(GraphOracle(z2z3, Kind.RELATIVE), 4, 30, seed=1) == 0


def test_delta_z2_at_least_two():
    assert slim_triangle_delta(GraphOracle(z2, Kind.PLAIN), 6, 40, seed=1) >= 2


def test_delta_single_vertex():
    assert slim_triangle_delta(GraphOracle(z2, Kind.PLAIN), 0, 5, seed=3) == 0


def test_delta_deterministic():
    o = GraphOracle(z2, Kind.PLAIN)
    assert slim_triangle_delta(o, 4, 20, seed=9) == slim_triangle_delta(o, 4, 20, seed=9)


# ---- areas ----


def test_area_examples():
    assert area(z2, "x.t.X.T", 3).area == 1
    r = area(z2, "x.x.t.X.X.T", 4)
    assert r.area == 2 == len(r.certificate)
    assert area(z2, "", 2).area == 0


def test_area_errors():
    with pytest.raises(NotTrivialWithinBudget):
        area(z2, "x.t", 4)
    with pytest.raises(AreaCapExceeded):
        area(z2, "x.x.t.X.X.T", 1)


@given(st.integers(0, 4))
def test_area_monotone_in_cap(extra):
    w = "x.x.t.t.X.X.T.T"
    assert area(z2, w, 4 + extra).area == area(z2, w, 4).area == 4


def lattice_area(group, word):
    """Σ |winding number| over unit cells of a closed lattice loop."""
    steps = {"x": (1, 0), "X": (-1, 0), "t": (0, 1), "T": (0, -1)}
    winding = Counter()
    x = y = 0
    for letter in word:
        dx, dy = steps[letter.value]
        if dx:
            col = min(x, x + dx)
            for k in range(y):
                winding[(col, k)] += dx
            for k in range(y, 0):
                winding[(col, k)] -= dx
        x, y = x + dx, y + dy
    assert (x, y) == (0, 0)
    return sum(abs(v) for v in winding.values())


def test_dehn_table_matches_lattice_oracle():
    table, rows = dehn_table(z2, 6, 10)
    assert rows
    for w, a in rows:
        assert a == lattice_area(z2, w)
    assert table == {0: 0, 1: 0, 2: 0, 3: 0, 4: 1, 5: 1, 6: 2}


def test_lattice_oracle_sanity():
    e = z2.parse_word
    assert lattice_area(z2, e("x.x.t.X.X.T")) == 2
    assert lattice_area(z2, e("x.t.X.T.X.T.x.t")) == 2


# ---- circuit replacement ----


def test_circuit_transform_replaces_biedges():
    coned = GraphOracle(z2_rel_x, Kind.CONED, truncation=4)
    plain = GraphOracle(z2_rel_x, Kind.PLAIN)
    c = path_from_word(coned, (), ["~H:1", "t", "~H:-1", "T"])
    assert len(c) == 6 and c.end == ()
    out = lemma_circuit_transform(c, plain, 2)
    # each biedge spans one x-step, so the 6-circuit becomes the unit square
    assert len(out) == 4 and out.end == ()
    assert not any(isinstance(e.label, ConeLabel) for e in out.edges)


def test_circuit_transform_without_biedges_is_identity():
    plain = GraphOracle(z2, Kind.PLAIN)
    c = path_from_word(plain, (), ["x", "t", "X", "T"])
    assert lemma_circuit_transform(c, plain, 1) == c


def test_circuit_transform_failure():
    coned = GraphOracle(z2_rel_x, Kind.CONED, truncation=4)
    plain = GraphOracle(z2_rel_x, Kind.PLAIN)
    c = path_from_word(coned, (), ["~H:3", "t", "~H:-3", "T"])
    with pytest.raises(ReplacementNotFound):
        lemma_circuit_transform(c, plain, 2)
