import pytest
from hypothesis import given
from hypothesis import strategies as st

from relhyp.errors import DanglingConeEdge, ZeroBiedge
from relhyp.graphs import GraphOracle, Kind, Path
from relhyp.paths import (
    classify,
    decompose,
    is_quasigeodesic,
    k_similar,
    lift,
    path_from_word,
    penetrations,
    phase_vertices_coned,
    pi,
)

from conftest import Z2Z3, Z2_REL_X, build

z2z3 = build(Z2Z3)
z2x = build(Z2_REL_X)
REL = GraphOracle(z2z3, Kind.RELATIVE)
CONED = GraphOracle(z2z3, Kind.CONED)
RELX = GraphOracle(z2x, Kind.RELATIVE, truncation=2)
CONEDX = GraphOracle(z2x, Kind.CONED, truncation=2)

tokens23 = st.lists(st.sampled_from(["A:1", "B:1", "B:2"]), min_size=1, max_size=6)
tokensX = st.lists(st.sampled_from(["x", "X", "t", "T", "H:1", "H:-1", "H:2", "H:-2"]), min_size=1, max_size=5)


def test_decomposition_example():
    p = path_from_word(REL, (), "a.b.a")
    d = decompose(p, REL)
    assert len(d.components) == 3 and len(d.phase_vertices) == 4
    assert not d.connected
    c = classify(p, REL)
    assert c.is_arc and not c.is_cycle and c.locally_minimal and c.backtracking_free


def test_backtracking_and_local_minimality():
    p = path_from_word(REL, (), "b.a.a.b")  # returns to b, inside the coset B entered first
    assert classify(p, REL).backtracking_free is False
    q = path_from_word(REL, (), "b.b")
    assert classify(q, REL).locally_minimal is False


def test_cycle_with_wrapping_component():
    p = path_from_word(REL, (), "b.a.a.b.b")  # b·1·b² = 1, B-run wraps around
    d = decompose(p, REL)
    assert p.start == p.end
    assert [c.factor for c in d.components] == ["A", "B"] or [c.factor for c in d.components] == ["B", "A"]


def test_pi_and_lift_round_trip():
    p = path_from_word(REL, (), "a.b.a")
    q = pi(p, CONED)
    assert len(q) == 6
    assert lift(q, CONED) == p
    assert decompose(p, REL).phase_vertices == phase_vertices_coned(q, CONED)


def test_lift_errors():
    with pytest.raises(ZeroBiedge):
        lift(path_from_word(CONED, (), "~A:0"), CONED)
    half = path_from_word(CONED, (), "~A:1")
    with pytest.raises(DanglingConeEdge):
        lift(Path((), half.edges[:1]), CONED)


def test_quasigeodesic_witness():
    p = path_from_word(REL, (), "b.b")
    verdict, span = is_quasigeodesic(p, 1, 0, REL, 5)
    assert verdict.value == "No" and span == (0, 2)
    q = path_from_word(REL, (), "a.b.a.b")
    assert is_quasigeodesic(q, 1, 0, REL, 8)[0].value == "Yes"
    with pytest.raises(ValueError):
        is_quasigeodesic(q, 0.5, 0, REL, 8)


def test_k_similar():
    p = path_from_word(REL, (), "a.b")
    q = path_from_word(REL, z2z3.element("a"), "b")
    assert k_similar(p, q, 1, REL, 4) and not k_similar(p, q, 0, REL, 4)


@given(tokens23)
def test_dictionary_round_trip_tree(tokens):
    p = path_from_word(REL, (), tokens)
    q = pi(p, CONED)
    assert len(q) == 2 * len(p)
    assert lift(q, CONED) == p
    cp, cq = classify(p, REL, cyclic=False), classify(q, CONED, cyclic=False)
    assert cp.locally_minimal == cq.locally_minimal
    assert cp.backtracking_free == cq.backtracking_free
    assert len(decompose(p, REL, cyclic=False).components) == len(penetrations(q, CONED, cyclic=False))


@given(tokensX)
def test_dictionary_round_trip_z2(tokens):
    p = path_from_word(RELX, (), tokens)
    q = pi(p, CONEDX)
    assert lift(q, CONEDX) == p
    cyc = p.start == p.end
    assert decompose(p, RELX).phase_vertices == phase_vertices_coned(q, CONEDX, cyclic=cyc)
    cp, cq = classify(p, RELX), classify(q, CONEDX)
    assert (cp.locally_minimal, cp.backtracking_free) == (cq.locally_minimal, cq.backtracking_free)
