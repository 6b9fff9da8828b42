"""
Tests for query construction and evaluation. The backtracking evaluator is
checked against the exhaustive oracle on every small structure.
"""
import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from src.core.errors import IndexOutOfRange, UnknownSymbol, UnsafeQuery
from src.core.queries import (
    DIAMOND,
    BinaryAtom,
    Component,
    ConjunctiveQuery,
    Inequality,
    NegatedAtom,
    UnaryAtom,
    build_beta_diamond,
    build_beta_lk,
    build_beta_r,
    build_beta_rbar,
    build_beta_rk,
    build_gamma_diamond,
    build_gamma_k,
    build_gamma_neg_union,
    build_gamma_neq_union,
    build_gamma_r,
    build_phi,
    build_phi_union,
    build_psi,
    build_psi_union,
    component_images,
    evaluate,
    evaluate_union,
    failing_literals,
    is_safe,
    oracle_assignments,
    oracle_satisfiable,
    unsafe_variables,
)
from src.core.structures import (
    ROOT_CONSTANT,
    TYPE_RELATION,
    UNARY,
    Signature,
    StructureBuilder,
    disjoint_union,
    iter_raw_structures,
    slot,
)
from src.core.thue_core import parse_thue
from src.data.fixtures import load_fixture


def rendered(q: ConjunctiveQuery):
    return [str(literal) for literal in q.literals]


def single_queries(inst):
    queries = [build_gamma_diamond(inst)]
    for k in range(1, inst.k + 1):
        queries += [build_gamma_k(inst, k), build_beta_lk(inst, k), build_beta_rk(inst, k)]
    for symbol in inst.alphabet:
        queries += [build_gamma_r(inst, symbol), build_beta_r(inst, symbol), build_beta_rbar(inst, symbol)]
    return queries


def test_gamma_k(idempotent):
    q = build_gamma_k(idempotent, 1)
    assert rendered(q) == ["a(x,u1)", "a(u1,y)", "a(x,y')", "y != y'"]
    assert q.components[0].id == "1"
    assert q.components[0].distinguished == "x"


def test_beta_with_split_right_side(commuting):
    q = build_beta_rk(commuting, 1)
    assert rendered(q) == ["a(x,u1)", "b(u1,y)", "b(x,y')", "!a(y',y)"]
    assert q.components[0].id == "[r,1]"


def test_beta_with_one_letter_side(idempotent):
    # r = a has an empty prefix, so the negated edge starts at x
    assert rendered(build_beta_rk(idempotent, 1)) == ["a(x,u1)", "a(u1,y)", "!a(x,y)"]
    assert rendered(build_beta_lk(idempotent, 1)) == ["a(x,y)", "a(x,y')", "!a(y,y')"]


def test_beta_r_and_rbar(commuting):
    assert rendered(build_beta_r(commuting, "a")) == ["T(x,y)", "a(y,z)", "!T(x,z)"]
    assert rendered(build_beta_rbar(commuting, "b")) == ["T(x,y)", "b(z,y)", "!T(x,z)"]
    assert build_beta_rbar(commuting, "b").components[0].id == "~b"


def test_diamond_has_two_names(idempotent):
    assert build_beta_diamond(idempotent) == build_gamma_diamond(idempotent)
    assert rendered(build_gamma_diamond(idempotent)) == ["A(x)", "a(x,y)", "a(x,u1)", "a(u1,y)"]


def test_builder_argument_checks(idempotent):
    with pytest.raises(IndexOutOfRange):
        build_gamma_k(idempotent, 2)
    with pytest.raises(UnknownSymbol):
        build_gamma_r(idempotent, "b")


def test_unions(commuting):
    assert len(build_gamma_neq_union(commuting)) == 1
    assert len(build_gamma_neg_union(commuting)) == 2
    assert build_psi_union(commuting).disjuncts[-1].components[0].id == DIAMOND
    assert len(build_phi_union(commuting)) == 3


def test_psi_components(commuting):
    psi = build_psi(commuting)
    assert [c.id for c in psi.components] == ["a", "b", DIAMOND, "1"]
    assert list(psi.distinguished.values()) == ["x_s_a", "x_s_b", "x_dia", "x_k_1"]
    assert len(psi.links) == 6
    assert all(isinstance(link, Inequality) for link in psi.links)
    assert is_safe(psi)


def test_phi_components(commuting):
    phi = build_phi(commuting)
    assert [c.id for c in phi.components] == ["a", "b", "~a", "~b", DIAMOND, "[l,1]", "[r,1]"]
    assert len(phi.links) == 7 * 6 * 2
    assert len(build_phi(commuting, negate_t=True).links) == 7 * 6 * 3
    assert is_safe(phi)


def test_components_must_not_share_variables():
    first = Component("p", (UnaryAtom(UNARY, "x"),), "x")
    second = Component("q", (BinaryAtom("a", "x", "y"),), "x")
    with pytest.raises(ValueError):
        ConjunctiveQuery((first, second))


def test_unsafe_query_is_rejected():
    q = ConjunctiveQuery((Component("q", (UnaryAtom(UNARY, "x"), NegatedAtom("a", "x", "y"))),))
    assert unsafe_variables(q) == ["y"]
    with pytest.raises(UnsafeQuery):
        evaluate(slot(1, Signature(("a",))), q)


def test_slot_absorbs_gamma_queries_at_b(idempotent):
    s = slot(1, Signature(idempotent.alphabet))
    b, c = s.constant("b1"), s.constant("c1")
    for q in (build_gamma_k(idempotent, 1), build_gamma_r(idempotent, "a"), build_gamma_diamond(idempotent)):
        assert {h["x"] for h in oracle_assignments(s, q)} == {b}
        assert evaluate(s, q, {"x": c}) is None


def test_one_letter_side_has_no_slot_image(idempotent, absorbing):
    s = slot(1, Signature(("a",)))
    assert evaluate(s, build_beta_rk(idempotent, 1)) is None
    assert evaluate(s, build_beta_lk(idempotent, 1)) is not None
    assert evaluate(s, build_beta_rk(absorbing, 1)) is not None
    assert evaluate(s, build_beta_lk(absorbing, 1)) is not None


def test_failing_literals(idempotent):
    s = slot(1, Signature(("a",)))
    b, c = s.constant("b1"), s.constant("c1")
    q = build_gamma_r(idempotent, "a")
    assert failing_literals(s, q, {"x": b, "y": b}) == []
    assert [str(lit) for lit in failing_literals(s, q, {"x": c, "y": c})] == ["A(y)"]
    with pytest.raises(ValueError):
        failing_literals(s, q, {"x": b})


def test_evaluate_union_reports_the_disjunct(idempotent, imperfect_chain):
    hit = evaluate_union(imperfect_chain, build_psi_union(idempotent))
    assert hit is not None
    index, assignment = hit
    assert index == 0
    assert assignment["x"] == 0


def test_component_images_on_two_slots(commuting):
    sig = Signature(commuting.alphabet)
    d = disjoint_union([slot(1, sig), slot(2, sig)])
    psi = build_psi(commuting)
    images = component_images(d, psi)
    assert images["a"] == [d.constant("b1"), d.constant("b2")]
    assert images[DIAMOND] == [d.constant("b1"), d.constant("b2")]
    # four components, two b-vertices
    assert evaluate(d, psi) is None
    assert not oracle_satisfiable(d, psi, by_component=True)


@pytest.mark.parametrize("fixture_name", ["p1_idempotent", "p5_absorbing", "n2_parity"])
def test_evaluator_agrees_with_oracle_on_small_structures(fixture_name):
    inst = load_fixture(fixture_name)
    sig = Signature(inst.alphabet)
    for d in iter_raw_structures(sig, 2, vary_t=True):
        for q in single_queries(inst):
            found = evaluate(d, q)
            assert (found is not None) == oracle_satisfiable(d, q)
            if found is not None:
                assert failing_literals(d, q, found) == []
    psi = build_psi(inst)
    for d in iter_raw_structures(sig, 2):
        assert (evaluate(d, psi) is not None) == oracle_satisfiable(d, psi)


@st.composite
def two_letter_structures(draw, size=3):
    pairs = [(u, v) for u in range(size) for v in range(size)]
    builder = StructureBuilder(["a", "b"])
    for _ in range(size):
        builder.add_vertex()
    builder.set_constant(ROOT_CONSTANT, 0)
    for v in draw(st.sets(st.integers(0, size - 1))):
        builder.add_fact(UNARY, v)
    for symbol in ("a", "b", TYPE_RELATION):
        for u, v in draw(st.sets(st.sampled_from(pairs))):
            builder.add_fact(symbol, u, v)
    return builder.build()


@settings(max_examples=60, deadline=None)
@given(d=two_letter_structures())
def test_evaluator_agrees_with_oracle_on_random_structures(d):
    inst = parse_thue("alphabet: a b\nrule: ab = ba\nrule: aab = b\ngoal: ab = b\n")
    for q in single_queries(inst):
        assert (evaluate(d, q) is not None) == oracle_satisfiable(d, q)


def test_extra_fact_breaks_a_negated_query():
    builder = StructureBuilder(["a"])
    builder.add_vertex()
    builder.add_vertex()
    builder.set_constant(ROOT_CONSTANT, 0)
    builder.add_fact(UNARY, 0).add_fact(TYPE_RELATION, 0, 0).add_fact("a", 0, 1)
    d = builder.build()
    positive = (UnaryAtom(UNARY, "x"), BinaryAtom("a", "x", "y"))
    negated = ConjunctiveQuery((Component("q", positive + (NegatedAtom("a", "y", "x"),)),))
    plain = ConjunctiveQuery((Component("q", positive),))
    assert evaluate(d, negated) == {"x": 0, "y": 1}

    grown = d.with_facts([("a", (1, 0))])
    assert evaluate(grown, negated) is None
    assert not oracle_satisfiable(grown, negated)
    assert evaluate(grown, plain) == {"x": 0, "y": 1}


def slots_only(count, sig):
    return disjoint_union([slot(n, sig) for n in range(1, count + 1)])


@pytest.mark.parametrize("build,slots", [
    (build_psi, lambda inst: inst.n_neq),
    (build_phi, lambda inst: inst.n_neg),
])
def test_components_are_independent_on_slots(commuting, build, slots):
    q = build(commuting)
    d = slots_only(slots(commuting), Signature(commuting.alphabet))
    alone = {c.id: evaluate(d, q.as_single(c.id)) is not None for c in q.components}
    single_images = {c.id: component_images(d, q.as_single(c.id))[c.id] for c in q.components}
    for dropped in q.components:
        rest = ConjunctiveQuery(tuple(c for c in q.components if c.id != dropped.id))
        expected = all(alone[c.id] for c in rest.components)
        assert (evaluate(d, rest) is not None) == expected
        images = component_images(d, rest)
        assert all(images[c.id] == single_images[c.id] for c in rest.components)
