"""
Tests for structures: candidate conditions, slots, canonical structures,
perfection and exhaustive enumeration.
"""
import pytest

from src.core.errors import CeilingExceeded, DuplicateConstant, MissingConstant, NotClosedAtBound
from src.core.structures import (
    ROOT_CONSTANT,
    TYPE_RELATION,
    UNARY,
    CandidateEnumeration,
    QuotientBounded,
    SemigroupSource,
    Signature,
    StructureBuilder,
    build_canonical_finite,
    disjoint_union,
    is_candidate,
    is_perfect,
    iter_raw_structures,
    raw_structure_count,
    reachable_from,
    slot,
    walk,
)
from src.core.thue_core import SemigroupWitness, find_separating_semigroup, words_up_to
from src.data.fixtures import FIXTURES, fixture_names, load_fixture

SIG_A = Signature(("a",))
SIG_AB = Signature(("a", "b"))


def test_signature_rejects_reserved_symbols():
    with pytest.raises(ValueError):
        Signature(("a", "T"))
    assert SIG_AB.binary_symbols == ("a", "b", TYPE_RELATION)


def test_slot_facts():
    s = slot(2, SIG_AB)
    b, c = s.constant("b2"), s.constant("c2")
    assert s.unary_A == {b}
    for symbol in ("a", "b"):
        assert s.binary_facts[symbol] == {(b, b), (b, c), (c, c)}
    assert s.binary_facts[TYPE_RELATION] == {(b, b), (c, c)}
    with pytest.raises(MissingConstant):
        s.constant(ROOT_CONSTANT)


def test_slot_index_starts_at_one():
    with pytest.raises(ValueError):
        slot(0, SIG_A)


def test_disjoint_union_keeps_constants_apart():
    union = disjoint_union([slot(1, SIG_A), slot(2, SIG_A)])
    assert len(union) == 4
    assert {union.constant(name) for name in ("b1", "c1", "b2", "c2")} == {0, 1, 2, 3}
    with pytest.raises(DuplicateConstant):
        disjoint_union([slot(1, SIG_A), slot(1, SIG_A)])


def test_candidate_conditions(imperfect_chain):
    assert is_candidate(imperfect_chain).ok
    lonely = StructureBuilder(["a"])
    lonely.set_constant(ROOT_CONSTANT, lonely.add_vertex())
    report = is_candidate(lonely.build())
    assert not report.ok
    assert [(v.condition, v.symbol) for v in report.violations] == [("p1", UNARY), ("p1", TYPE_RELATION)]


def test_incoming_edge_demands_outgoing_edges():
    builder = StructureBuilder(["a", "b"])
    a = builder.add_vertex()
    sink = builder.add_vertex()
    builder.set_constant(ROOT_CONSTANT, a)
    builder.add_fact(UNARY, a).add_fact(TYPE_RELATION, a, a)
    builder.add_fact("a", a, sink).add_fact("b", a, a)
    report = is_candidate(builder.build())
    assert [(v.condition, v.vertex) for v in report.violations] == [("p3", sink), ("p3", sink)]


def test_walk_and_reachability(imperfect_chain):
    assert walk(imperfect_chain, 0, ("a", "a")) == {2}
    assert walk(imperfect_chain, 0, ()) == {0}
    assert reachable_from(imperfect_chain, 0) == {0, 1, 2}
    assert reachable_from(imperfect_chain, 2) == {2}


def test_imperfection_witness(imperfect_chain, idempotent):
    report = is_perfect(imperfect_chain, idempotent)
    assert not report.perfect
    assert report.witness.vertex == 0
    assert report.witness.rule_index == 1
    assert report.witness.left_endpoints == {2}
    assert report.witness.right_endpoints == {1}
    assert report.to_dict()["verdict"] == "Imperfect"


def test_quotient_of_idempotent_instance(idempotent):
    d = build_canonical_finite(idempotent, QuotientBounded(6))
    assert len(d) == 2
    assert sorted(d.labels.values()) == ["[a]", "[ε]"]
    a = d.constant(ROOT_CONSTANT)
    assert d.unary_A == {a}
    assert d.binary_facts[TYPE_RELATION] == {(a, v) for v in d.vertices}
    assert is_candidate(d).ok
    assert is_perfect(d, idempotent).perfect


@pytest.mark.parametrize("name", [n for n, info in FIXTURES.items() if info["finite_quotient"]])
def test_finite_quotients(name):
    inst = load_fixture(name)
    d = build_canonical_finite(inst, QuotientBounded(6))
    assert len(d) == FIXTURES[name]["quotient_size"]
    assert is_perfect(d, inst).perfect


@pytest.mark.parametrize("name", [n for n, info in FIXTURES.items() if not info["finite_quotient"]])
def test_infinite_quotients_are_not_certified(name):
    with pytest.raises(NotClosedAtBound):
        build_canonical_finite(load_fixture(name), QuotientBounded(6))


@pytest.mark.parametrize("name", fixture_names("negative"))
def test_canonical_from_witness(name):
    inst = load_fixture(name)
    witness = find_separating_semigroup(inst, 3)
    d = build_canonical_finite(inst, SemigroupSource(witness))
    assert len(d) == witness.order + 1
    assert is_candidate(d).ok
    assert is_perfect(d, inst).perfect
    a = d.constant(ROOT_CONSTANT)
    assert walk(d, a, inst.goal_left) != walk(d, a, inst.goal_right)


def canonical_structure(name):
    inst = load_fixture(name)
    if FIXTURES[name]["finite_quotient"]:
        return build_canonical_finite(inst, QuotientBounded(6))
    return build_canonical_finite(inst, SemigroupSource(find_separating_semigroup(inst, 3)))


@pytest.mark.parametrize("name", [n for n, info in FIXTURES.items() if info["finite_quotient"] or "witness_order" in info])
def test_walk_composes_over_concatenation(name):
    d = canonical_structure(name)
    for w in words_up_to(d.alphabet, 4):
        for cut in range(len(w) + 1):
            u, v = w[:cut], w[cut:]
            for s in d.vertices:
                middle = walk(d, s, u)
                assert walk(d, s, w) == frozenset().union(*(walk(d, t, v) for t in middle))


def test_witness_must_satisfy_rules(idempotent):
    # the two-element group: a·a is the identity, not a
    group = SemigroupWitness(2, ((0, 1), (1, 0)), {"a": 1})
    with pytest.raises(ValueError):
        build_canonical_finite(idempotent, SemigroupSource(group))


def test_raw_structure_counts():
    assert raw_structure_count(SIG_A, 1) == 2
    assert raw_structure_count(SIG_A, 2) == 34
    assert sum(1 for _ in iter_raw_structures(SIG_A, 2)) == 34


def test_candidate_enumeration():
    stream = CandidateEnumeration(SIG_A, 1)
    assert stream.count() == 1
    assert stream.examined == 2
    for d in CandidateEnumeration(SIG_A, 2):
        assert is_candidate(d).ok
        assert d.constant(ROOT_CONSTANT) == 0


def test_enumeration_ceiling():
    with pytest.raises(CeilingExceeded):
        CandidateEnumeration(SIG_A, 5, ceiling=4)


def test_graph_view(imperfect_chain):
    g = imperfect_chain.graph()
    assert set(g.edges()) == {(0, 1), (1, 2), (2, 2)}
