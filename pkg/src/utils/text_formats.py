"""
Thue2DLite Text Formats

Line-oriented readers and writers for structures (.struct), conjunctive
queries and their unions (.cq) and ontologies (.onto). '#' starts a comment.
Writers emit canonical, sorted output so files diff cleanly and parse back to
equal objects.
"""
import re
from typing import Dict, List, Optional, Tuple

from src.core.errors import TextFormatError
from src.core.ontology import (
    Axiom,
    BasicConcept,
    ConceptAssertion,
    DisjointInclusion,
    Inclusion,
    Ontology,
    RoleAssertion,
    atomic,
    exists,
)
from src.core.queries import (
    BinaryAtom,
    Component,
    ConjunctiveQuery,
    Inequality,
    Literal,
    NegatedAtom,
    UnaryAtom,
    UnionQuery,
)
from src.core.structures import TYPE_RELATION, UNARY, Structure, StructureBuilder

NAME = r"[A-Za-z0-9_]+"
VAR = r"[A-Za-z0-9_']+"

UNARY_FACT = re.compile(rf"^({NAME})\((\d+)\)$")
BINARY_FACT = re.compile(rf"^({NAME})\((\d+),(\d+)\)$")
CONST_LINE = re.compile(rf"^const\s+({NAME})\s*=\s*(\d+)$")
VERTEX_LINE = re.compile(r"^vertex\s+(\d+)$")

UNARY_LITERAL = re.compile(rf"^({NAME})\(({VAR})\)$")
BINARY_LITERAL = re.compile(rf"^(!?)({NAME})\(({VAR}),({VAR})\)$")
INEQUALITY = re.compile(rf"^({VAR})\s*!=\s*({VAR})$")
COMPONENT_HEADER = re.compile(rf"^component\s+(\S+)(?:\s+distinguished\s+({VAR}))?$")
DISJUNCT_SEPARATOR = "--- disjunct"

ASSERT_UNARY = re.compile(rf"^assert\s+({NAME})\(({NAME})\)$")
ASSERT_BINARY = re.compile(rf"^assert\s+({NAME})\(({NAME}),({NAME})\)$")
INCLUSION = re.compile(r"^incl\s+(.+?)\s*\[=\s*(.+)$")
DISJOINTNESS = re.compile(r"^disj\s+(.+?)\s*\[=\s*not\s+(.+)$")


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((number, line))
    return lines


# ----------------------------------------------------------------- .struct

def parse_struct(text: str) -> Structure:
    """Parse a .struct document; an optional 'alphabet' line fixes letters without facts"""
    alphabet: Optional[List[str]] = None
    vertices: List[int] = []
    constants: Dict[str, int] = {}
    facts: List[Tuple[int, str, Tuple[int, ...]]] = []
    labels: Dict[int, str] = {}

    for number, raw in enumerate(text.splitlines(), start=1):
        body, _, comment = raw.partition("#")
        line = body.strip()
        if not line:
            continue
        if line.startswith("alphabet"):
            if alphabet is not None:
                raise TextFormatError("second alphabet line", number)
            alphabet = line.split()[1:]
            continue
        match = VERTEX_LINE.match(line)
        if match:
            vertex = int(match.group(1))
            if vertex in vertices:
                raise TextFormatError(f"vertex {vertex} declared twice", number)
            vertices.append(vertex)
            if comment.strip():
                labels[vertex] = comment.strip()
            continue
        match = CONST_LINE.match(line)
        if match:
            name = match.group(1)
            if name in constants:
                raise TextFormatError(f"constant {name} interpreted twice", number)
            constants[name] = int(match.group(2))
            continue
        match = UNARY_FACT.match(line)
        if match:
            if match.group(1) != UNARY:
                raise TextFormatError(f"'{match.group(1)}' is not a unary relation", number)
            facts.append((number, UNARY, (int(match.group(2)),)))
            continue
        match = BINARY_FACT.match(line)
        if match:
            if match.group(1) == UNARY:
                raise TextFormatError("A is unary", number)
            facts.append((number, match.group(1), (int(match.group(2)), int(match.group(3)))))
            continue
        raise TextFormatError(f"cannot parse '{line}'", number)

    if alphabet is None:
        alphabet = sorted({symbol for _, symbol, args in facts if len(args) == 2 and symbol != TYPE_RELATION})
    builder = StructureBuilder(alphabet)
    builder.vertices = list(vertices)
    builder.labels = labels
    declared = set(vertices)
    for number, symbol, args in facts:
        if not set(args) <= declared:
            raise TextFormatError(f"fact {symbol}{args} uses an undeclared vertex", number)
        try:
            builder.add_fact(symbol, *args)
        except ValueError as e:
            raise TextFormatError(str(e), number)
    for name, vertex in constants.items():
        if vertex not in declared:
            raise TextFormatError(f"constant {name} interpreted as undeclared vertex {vertex}")
        builder.set_constant(name, vertex)
    return builder.build()


def write_struct(d: Structure) -> str:
    lines = ["alphabet " + " ".join(d.alphabet) if d.alphabet else "alphabet"]
    for vertex in d.vertices:
        label = d.labels.get(vertex)
        lines.append(f"vertex {vertex}" + (f"  # {label}" if label else ""))
    for name, vertex in sorted(d.constants.items()):
        lines.append(f"const {name} = {vertex}")
    for symbol, args in d.facts():
        lines.append(f"{symbol}({','.join(str(v) for v in args)})")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------- .cq

def _parse_literal(line: str, number: int) -> Literal:
    match = INEQUALITY.match(line)
    if match:
        return Inequality(match.group(1), match.group(2))
    match = BINARY_LITERAL.match(line)
    if match:
        negated, symbol, source, target = match.groups()
        if symbol == UNARY:
            raise TextFormatError("A is unary", number)
        return NegatedAtom(symbol, source, target) if negated else BinaryAtom(symbol, source, target)
    match = UNARY_LITERAL.match(line)
    if match:
        if match.group(1) != UNARY:
            raise TextFormatError(f"'{match.group(1)}' is not a unary relation", number)
        return UnaryAtom(UNARY, match.group(2))
    raise TextFormatError(f"cannot parse literal '{line}'", number)


def _parse_single_cq(lines: List[Tuple[int, str]]) -> ConjunctiveQuery:
    blocks: List[Dict] = []
    links: List[Literal] = []
    in_links = False
    for number, line in lines:
        header = COMPONENT_HEADER.match(line)
        if header:
            if in_links:
                raise TextFormatError("component after the links block", number)
            blocks.append({"id": header.group(1), "distinguished": header.group(2), "literals": []})
            continue
        if line == "links":
            in_links = True
            continue
        literal = _parse_literal(line, number)
        if in_links:
            links.append(literal)
        else:
            if not blocks:
                blocks.append({"id": "main", "distinguished": None, "literals": []})
            blocks[-1]["literals"].append(literal)
    try:
        components = tuple(Component(b["id"], tuple(b["literals"]), b["distinguished"]) for b in blocks)
        return ConjunctiveQuery(components, tuple(links))
    except ValueError as e:
        raise TextFormatError(str(e), lines[0][0] if lines else None)


def parse_ucq(text: str) -> UnionQuery:
    """Disjuncts are separated by '--- disjunct' lines"""
    groups: List[List[Tuple[int, str]]] = [[]]
    for number, line in _content_lines(text):
        if line == DISJUNCT_SEPARATOR:
            groups.append([])
        else:
            groups[-1].append((number, line))
    if len(groups) == 1 and not groups[0]:
        return UnionQuery(())
    return UnionQuery(tuple(_parse_single_cq(group) for group in groups))


def parse_cq(text: str) -> ConjunctiveQuery:
    union = parse_ucq(text)
    if len(union) > 1:
        raise TextFormatError("expected a single conjunctive query, found a union")
    return union.disjuncts[0] if union.disjuncts else ConjunctiveQuery(())


def write_cq(q: ConjunctiveQuery) -> str:
    lines = []
    for component in q.components:
        header = f"component {component.id}"
        if component.distinguished:
            header += f" distinguished {component.distinguished}"
        lines.append(header)
        lines.extend(str(literal) for literal in component.literals)
    if q.links:
        lines.append("links")
        lines.extend(str(literal) for literal in q.links)
    return "\n".join(lines) + "\n"


def write_ucq(u: UnionQuery) -> str:
    return f"{DISJUNCT_SEPARATOR}\n".join(write_cq(q) for q in u.disjuncts)


# ------------------------------------------------------------------- .onto

def _parse_concept(text: str, number: int) -> BasicConcept:
    parts = text.split()
    if len(parts) == 1 and parts[0] == UNARY:
        return atomic(UNARY)
    if len(parts) == 2 and parts[0] == "ex":
        role = parts[1]
        inverse = role.endswith("-")
        role = role.rstrip("-")
        if re.fullmatch(NAME, role) and role != UNARY:
            return exists(role, inverse)
    raise TextFormatError(f"cannot parse basic concept '{text}'", number)


def parse_onto(text: str) -> Ontology:
    constants: List[str] = []
    axioms: List[Axiom] = []
    for number, line in _content_lines(text):
        if line.startswith("const ") or line == "const":
            constants.extend(line.split()[1:])
            continue
        match = ASSERT_BINARY.match(line)
        if match:
            role = match.group(1)
            if role == UNARY:
                raise TextFormatError("A is unary", number)
            axioms.append(RoleAssertion(role, match.group(2), match.group(3)))
            continue
        match = ASSERT_UNARY.match(line)
        if match:
            if match.group(1) != UNARY:
                raise TextFormatError(f"'{match.group(1)}' is not a concept name", number)
            axioms.append(ConceptAssertion(UNARY, match.group(2)))
            continue
        match = DISJOINTNESS.match(line)
        if match:
            axioms.append(DisjointInclusion(_parse_concept(match.group(1), number), _parse_concept(match.group(2), number)))
            continue
        match = INCLUSION.match(line)
        if match:
            axioms.append(Inclusion(_parse_concept(match.group(1), number), _parse_concept(match.group(2), number)))
            continue
        raise TextFormatError(f"cannot parse '{line}'", number)
    try:
        return Ontology(tuple(constants), tuple(axioms))
    except ValueError as e:
        raise TextFormatError(str(e))


def write_onto(o: Ontology) -> str:
    lines = ["const " + " ".join(o.constants) if o.constants else "const"]
    lines.extend(str(axiom) for axiom in o.axioms)
    return "\n".join(lines) + "\n"
