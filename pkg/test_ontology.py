"""
Tests for the reduction ontologies, model checking under UNA / PCWA and the
bounded chase.
"""
import pytest

from src.core.checks_registry import get_enumeration_check
from src.core.errors import MissingConstantInterpretation
from src.core.ontology import (
    ATOMIC,
    BasicConcept,
    ConceptAssertion,
    DisjointInclusion,
    Inclusion,
    ModelCheckFlags,
    Ontology,
    RoleAssertion,
    atomic,
    build_core_ontology,
    build_o_neg,
    build_o_neq,
    build_omega_n,
    chase,
    check_model,
    exists,
)
from src.core.structures import (
    ROOT_CONSTANT,
    TYPE_RELATION,
    UNARY,
    QuotientBounded,
    Signature,
    StructureBuilder,
    build_canonical_finite,
    disjoint_union,
    iter_raw_structures,
    slot,
    well_of_positivity,
)
from src.core.thue_core import parse_thue

SIG_A = Signature(("a",))
SIG_AB = Signature(("a", "b"))
LOOSE = ModelCheckFlags(una=False, pcwa=False)


def test_core_ontology_size(idempotent, commuting):
    for inst in (idempotent, commuting):
        m = len(inst.alphabet)
        assert len(build_core_ontology(inst)) == 2 + m + m * m
    core = build_core_ontology(commuting)
    assert core.constants == (ROOT_CONSTANT,)
    assert Inclusion(exists("b", inverse=True), exists("a")) in core.inclusions
    assert Inclusion(atomic(), exists("b")) in core.inclusions


def test_axioms_render():
    assert str(Inclusion(exists("a", inverse=True), exists("b"))) == "incl ex a- [= ex b"
    assert str(DisjointInclusion(atomic(), exists("a"))) == "disj A [= not ex a"
    assert str(RoleAssertion(TYPE_RELATION, "a", "a")) == "assert T(a,a)"


def test_concepts_are_validated():
    with pytest.raises(ValueError):
        BasicConcept(ATOMIC, UNARY, inverse=True)
    with pytest.raises(ValueError):
        Ontology((), (ConceptAssertion(UNARY, "b1"),))


def test_slot_assertions():
    axioms = build_omega_n(2, SIG_AB)
    assert len(axioms) == 3 + 3 * 2
    assert RoleAssertion("b", "b2", "c2") in axioms
    assert RoleAssertion(TYPE_RELATION, "b2", "c2") not in axioms


def test_reduction_ontologies(commuting):
    o_neq = build_o_neq(commuting)
    assert len(o_neq.constants) == 1 + 2 * commuting.n_neq
    assert len(o_neq) == len(build_core_ontology(commuting)) + commuting.n_neq * 9
    o_neg = build_o_neg(commuting)
    assert o_neg.constants[-2:] == ("b6", "c6")
    assert o_neg.roles == ("T", "a", "b")


def test_quotient_plus_slots_is_a_model(idempotent):
    canonical = build_canonical_finite(idempotent, QuotientBounded(6))
    model = disjoint_union([canonical] + [slot(n, SIG_A) for n in range(1, idempotent.n_neq + 1)])
    report = check_model(model, build_o_neq(idempotent))
    assert report.ok, report.to_dict()
    assert report.to_dict()["una"] is True


def test_missing_constant(idempotent):
    with pytest.raises(MissingConstantInterpretation):
        check_model(slot(1, SIG_A), build_core_ontology(idempotent))


def test_unique_name_assumption(idempotent):
    well = well_of_positivity(SIG_A, build_o_neq(idempotent).constants)
    assert check_model(well, build_o_neq(idempotent), LOOSE).ok
    report = check_model(well, build_o_neq(idempotent), ModelCheckFlags(una=True, pcwa=False))
    assert [v.kind for v in report.violations] == ["una"]


def test_partial_closed_world():
    gadget = slot(1, SIG_A)
    ontology = Ontology(("b1", "c1"), tuple(build_omega_n(1, SIG_A)))
    assert check_model(gadget, ontology).ok
    extra = gadget.with_facts([("a", (gadget.constant("c1"), gadget.constant("b1")))])
    report = check_model(extra, ontology)
    assert [v.kind for v in report.violations] == ["pcwa"]
    assert check_model(extra, ontology, ModelCheckFlags(una=True, pcwa=False)).ok


def test_inclusion_and_disjointness_violations():
    builder = StructureBuilder(["a"])
    root = builder.add_vertex()
    builder.set_constant(ROOT_CONSTANT, root).add_fact(UNARY, root)
    d = builder.build()
    ontology = Ontology((ROOT_CONSTANT,), (Inclusion(atomic(), exists("a")),
                                           DisjointInclusion(atomic(), exists("a", inverse=True))))
    report = check_model(d, ontology, LOOSE)
    assert [v.kind for v in report.violations] == ["inclusion"]
    looped = d.with_facts([("a", (root, root))])
    report = check_model(looped, ontology, LOOSE)
    assert [(x.kind, x.vertex) for x in report.violations] == [("disjoint", root)]


def test_chase_depth_zero(idempotent):
    result = chase(build_core_ontology(idempotent), 0)
    assert result.rounds == 0
    assert not result.fixpoint
    assert len(result.structure) == 1


def test_chase_grows_a_chain(idempotent):
    result = chase(build_core_ontology(idempotent), 2)
    assert result.to_dict() == {"fixpoint": False, "rounds": 2, "vertices": 3, "clashes": []}
    a = result.structure.constant(ROOT_CONSTANT)
    assert result.structure.successors("a", a) == (1,)


def test_chase_reaches_fixpoint_on_assertions():
    ontology = Ontology(("b1", "c1"), tuple(build_omega_n(1, SIG_A)))
    result = chase(ontology, 3)
    assert result.fixpoint
    assert result.rounds == 0
    assert check_model(result.structure, ontology).ok


def test_chase_reports_clashes():
    ontology = Ontology((ROOT_CONSTANT,), (ConceptAssertion(UNARY, ROOT_CONSTANT),
                                           Inclusion(atomic(), exists("a")),
                                           DisjointInclusion(atomic(), exists("a"))))
    result = chase(ontology, 1)
    assert result.fixpoint
    assert [c.kind for c in result.clashes] == ["disjoint"]


def test_negative_depth_is_rejected(idempotent):
    with pytest.raises(ValueError):
        chase(build_core_ontology(idempotent), -1)


@pytest.mark.parametrize("alphabet,max_vertices,vary_t", [
    (("a",), 3, False),
    (("a",), 2, True),
    (("a", "b"), 2, False),
])
def test_core_models_are_exactly_candidates(alphabet, max_vertices, vary_t):
    letters = " ".join(alphabet)
    inst = parse_thue(f"alphabet: {letters}\ngoal: a = a\n")
    predicate = get_enumeration_check("ontology-iff-candidate")["factory"](inst)
    for d in iter_raw_structures(Signature(alphabet), max_vertices, vary_t):
        assert predicate(d) is None
