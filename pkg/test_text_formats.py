"""
Tests for the .struct / .cq / .onto readers and writers
"""
import pytest

from src.core.errors import TextFormatError
from src.core.ontology import build_o_neg
from src.core.queries import BinaryAtom, Inequality, NegatedAtom, build_phi, build_psi, build_psi_union
from src.core.structures import QuotientBounded, Signature, build_canonical_finite, disjoint_union, slot
from src.utils.text_formats import (
    parse_cq,
    parse_onto,
    parse_struct,
    parse_ucq,
    write_cq,
    write_onto,
    write_struct,
    write_ucq,
)


def same_structure(left, right):
    return (left.alphabet == right.alphabet and left.vertices == right.vertices
            and left.constants == right.constants and left.facts() == right.facts()
            and left.labels == right.labels)


def test_struct_round_trip(idempotent):
    canonical = build_canonical_finite(idempotent, QuotientBounded(6))
    d = disjoint_union([canonical, slot(1, Signature(idempotent.alphabet))])
    text = write_struct(d)
    assert text.startswith("alphabet a\n")
    assert "const b1 = " in text
    assert same_structure(parse_struct(text), d)


def test_struct_alphabet_defaults_to_letters_in_facts():
    d = parse_struct("vertex 0\nvertex 1\nconst a = 0\nA(0)\nb(0,1)\nT(0,0)  # type\n")
    assert d.alphabet == ("b",)
    assert d.has_fact("T", 0, 0)
    assert d.constant("a") == 0


def test_struct_labels_come_from_comments():
    d = parse_struct("alphabet a\nvertex 0  # root\nvertex 1\n")
    assert d.label(0) == "root"
    assert d.label(1) == "1"


@pytest.mark.parametrize("text,line", [
    ("vertex 0\nvertex 0\n", 2),
    ("vertex 0\nB(0)\n", 2),
    ("vertex 0\nA(0,0)\n", 2),
    ("vertex 0\n\na(0,1)\n", 3),
    ("vertex 0\nconst a = 0\nconst a = 0\n", 3),
    ("alphabet a\nalphabet b\n", 2),
    ("vertex 0\nsomething\n", 2),
])
def test_struct_errors_carry_line_numbers(text, line):
    with pytest.raises(TextFormatError) as info:
        parse_struct(text)
    assert info.value.line == line


def test_struct_constant_on_undeclared_vertex():
    with pytest.raises(TextFormatError):
        parse_struct("vertex 0\nconst a = 3\n")


def test_cq_round_trip(commuting):
    for q in (build_psi(commuting), build_phi(commuting), build_phi(commuting, negate_t=True)):
        assert parse_cq(write_cq(q)) == q


def test_ucq_round_trip(commuting):
    union = build_psi_union(commuting)
    parsed = parse_ucq(write_ucq(union))
    assert parsed == union
    assert len(parsed) == len(union)


def test_cq_without_headers():
    q = parse_cq("a(x,y)\n!b(y,x)  # negated\nx != y\n")
    assert len(q.components) == 1
    assert q.components[0].id == "main"
    assert q.literals == (BinaryAtom("a", "x", "y"), NegatedAtom("b", "y", "x"), Inequality("x", "y"))


def test_cq_errors(commuting):
    with pytest.raises(TextFormatError):
        parse_cq(write_ucq(build_psi_union(commuting)))
    with pytest.raises(TextFormatError) as info:
        parse_cq("component p\nA(x)\nB(x)\n")
    assert info.value.line == 3
    with pytest.raises(TextFormatError):
        parse_cq("component p\nA(x)\nlinks\nx != y\n")
    with pytest.raises(TextFormatError):
        parse_cq("component p\nA(x)\nlinks\ncomponent q\n")


def test_empty_union():
    assert len(parse_ucq("# nothing\n")) == 0


def test_onto_round_trip(commuting):
    o = build_o_neg(commuting)
    text = write_onto(o)
    assert text.splitlines()[0].startswith("const a b1 c1")
    assert "incl ex a- [= ex b" in text
    assert parse_onto(text) == o


def test_onto_disjointness():
    o = parse_onto("const a\nassert A(a)\ndisj A [= not ex a-\n")
    assert len(o.disjointness) == 1
    assert str(o.disjointness[0]) == "disj A [= not ex a-"


@pytest.mark.parametrize("text", [
    "const a\nassert B(a)\n",
    "const a\nassert A(a,a)\n",
    "const a\nincl A [= B\n",
    "const a\nassert A(b)\n",
    "const a\nwhatever\n",
])
def test_onto_errors(text):
    with pytest.raises(TextFormatError):
        parse_onto(text)
