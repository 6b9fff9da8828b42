"""
Tests for escape witnesses: every case of the neq and neg arguments on small
hand-made models.
"""
import pytest

from src.core.case_analysis import (
    CLEAN_IMPERFECT,
    CLEAN_PERFECT,
    DIRTY,
    SOILED,
    TIDY_IMPERFECT,
    TIDY_PERFECT,
    neg_escape,
    neq_escape,
    slot_vertices,
)
from src.core.queries import DIAMOND
from src.core.structures import (
    ROOT_CONSTANT,
    QuotientBounded,
    SemigroupSource,
    Signature,
    build_canonical_finite,
    disjoint_union,
    slot,
)
from src.core.thue_core import find_separating_semigroup


def with_slots(d, count):
    sig = Signature(d.alphabet)
    return disjoint_union([d] + [slot(n, sig) for n in range(1, count + 1)])


@pytest.fixture
def quotient(idempotent):
    return build_canonical_finite(idempotent, QuotientBounded(6))


def inner(d):
    """The canonical vertex other than a"""
    a = d.constant(ROOT_CONSTANT)
    return next(v for v in d.vertices if v != a)


def test_slot_vertices(idempotent, quotient):
    model = with_slots(quotient, idempotent.n_neq)
    assert slot_vertices(model, 2, include_c=False) == {model.constant("b1"), model.constant("b2")}
    assert len(slot_vertices(model, 2, include_c=True)) == 4


def test_tidy_perfect(idempotent, quotient):
    model = with_slots(quotient, idempotent.n_neq)
    witness = neq_escape(model, idempotent)
    assert witness.case == TIDY_PERFECT
    assert witness.component == DIAMOND
    assert witness.assignment["x"] == model.constant(ROOT_CONSTANT)
    assert witness.escapes


def test_dirty(idempotent, quotient):
    model = with_slots(quotient, idempotent.n_neq)
    s = inner(model)
    dirty = model.with_facts([("a", (s, model.constant("b1")))])
    witness = neq_escape(dirty, idempotent)
    assert witness.case == DIRTY
    assert witness.component == "a"
    assert witness.assignment == {"x": s, "y": model.constant("b1")}
    assert witness.escapes


def test_tidy_imperfect(idempotent, imperfect_chain):
    model = with_slots(imperfect_chain, idempotent.n_neq)
    witness = neq_escape(model, idempotent)
    assert witness.case == TIDY_IMPERFECT
    assert witness.component == "1"
    assert witness.assignment["x"] == 0
    assert witness.escapes
    assert witness.to_dict()["detail"] == "rule 1 breaks at 0"


def test_clean_perfect(idempotent, quotient):
    witness = neg_escape(with_slots(quotient, idempotent.n_neg), idempotent)
    assert witness.case == CLEAN_PERFECT
    assert witness.component == DIAMOND
    assert witness.found and witness.escapes


def test_soiled(idempotent, quotient):
    model = with_slots(quotient, idempotent.n_neg)
    soiled = model.with_facts([("a", (inner(model), model.constant("c1")))])
    witness = neg_escape(soiled, idempotent)
    assert witness.case == SOILED
    assert witness.component in ("a", "~a")
    assert witness.assignment["x"] == model.constant(ROOT_CONSTANT)
    assert witness.escapes


def test_clean_imperfect(idempotent, imperfect_chain):
    witness = neg_escape(with_slots(imperfect_chain, idempotent.n_neg), idempotent)
    assert witness.case == CLEAN_IMPERFECT
    assert witness.component == "[l,1]"
    assert witness.assignment["x"] == 0
    assert witness.escapes


def test_negative_instance_has_no_diamond(free_pair):
    d = build_canonical_finite(free_pair, SemigroupSource(find_separating_semigroup(free_pair, 3)))
    witness = neq_escape(with_slots(d, free_pair.n_neq), free_pair)
    assert witness.case == TIDY_PERFECT
    assert not witness.found
    assert not witness.escapes
