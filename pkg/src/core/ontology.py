"""
Ontology - DL-Lite_core axioms, the reduction's ontologies, model checking and a bounded chase

Basic concepts are the atomic concept A and unqualified existentials ∃R / ∃R⁻
over the letters and T. Model checking reads a Structure under two switchable
semantics: the unique name assumption (constants denote distinct vertices)
and the partial closed world assumption (no fact among constant vertices
unless it is asserted).
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

from .errors import MissingConstantInterpretation
from .structures import (
    ROOT_CONSTANT,
    TYPE_RELATION,
    UNARY,
    Signature,
    Structure,
    StructureBuilder,
    slot_constants,
)
from .thue_core import ThueInstance

logger = logging.getLogger(__name__)

ATOMIC = "atomic"
EXISTS = "exists"


@dataclass(frozen=True)
class BasicConcept:
    kind: str
    name: str
    inverse: bool = False

    def __post_init__(self):
        if self.kind not in (ATOMIC, EXISTS):
            raise ValueError(f"unknown concept kind '{self.kind}'")
        if self.kind == ATOMIC and self.inverse:
            raise ValueError("atomic concepts have no inverse")

    def __str__(self) -> str:
        if self.kind == ATOMIC:
            return self.name
        return f"ex {self.name}{'-' if self.inverse else ''}"


def atomic(name: str = UNARY) -> BasicConcept:
    return BasicConcept(ATOMIC, name)


def exists(role: str, inverse: bool = False) -> BasicConcept:
    return BasicConcept(EXISTS, role, inverse)


@dataclass(frozen=True)
class ConceptAssertion:
    concept: str
    constant: str

    def __str__(self) -> str:
        return f"assert {self.concept}({self.constant})"


@dataclass(frozen=True)
class RoleAssertion:
    role: str
    source: str
    target: str

    def __str__(self) -> str:
        return f"assert {self.role}({self.source},{self.target})"


@dataclass(frozen=True)
class Inclusion:
    lhs: BasicConcept
    rhs: BasicConcept

    def __str__(self) -> str:
        return f"incl {self.lhs} [= {self.rhs}"


@dataclass(frozen=True)
class DisjointInclusion:
    """lhs ⊑ ¬rhs"""

    lhs: BasicConcept
    rhs: BasicConcept

    def __str__(self) -> str:
        return f"disj {self.lhs} [= not {self.rhs}"


Axiom = Union[ConceptAssertion, RoleAssertion, Inclusion, DisjointInclusion]
_AXIOM_RANK = {ConceptAssertion: 0, RoleAssertion: 1, Inclusion: 2, DisjointInclusion: 3}


def axiom_constants(axiom: Axiom) -> Tuple[str, ...]:
    if isinstance(axiom, ConceptAssertion):
        return (axiom.constant,)
    if isinstance(axiom, RoleAssertion):
        return (axiom.source, axiom.target)
    return ()


@dataclass(frozen=True)
class Ontology:
    """Constants in declaration order; axioms kept in canonical order"""

    constants: Tuple[str, ...]
    axioms: Tuple[Axiom, ...]

    def __post_init__(self):
        constants = tuple(dict.fromkeys(self.constants))
        axioms = tuple(sorted(set(self.axioms), key=lambda ax: (_AXIOM_RANK[type(ax)], str(ax))))
        for axiom in axioms:
            for name in axiom_constants(axiom):
                if name not in constants:
                    raise ValueError(f"axiom '{axiom}' uses undeclared constant '{name}'")
        object.__setattr__(self, "constants", constants)
        object.__setattr__(self, "axioms", axioms)

    @property
    def assertions(self) -> List[Axiom]:
        return [ax for ax in self.axioms if isinstance(ax, (ConceptAssertion, RoleAssertion))]

    @property
    def inclusions(self) -> List[Inclusion]:
        return [ax for ax in self.axioms if isinstance(ax, Inclusion)]

    @property
    def disjointness(self) -> List[DisjointInclusion]:
        return [ax for ax in self.axioms if isinstance(ax, DisjointInclusion)]

    @property
    def roles(self) -> Tuple[str, ...]:
        """Role names used anywhere, T included"""
        names: Set[str] = set()
        for axiom in self.axioms:
            if isinstance(axiom, RoleAssertion):
                names.add(axiom.role)
            elif isinstance(axiom, (Inclusion, DisjointInclusion)):
                for concept in (axiom.lhs, axiom.rhs):
                    if concept.kind == EXISTS:
                        names.add(concept.name)
        return tuple(sorted(names))

    def __len__(self) -> int:
        return len(self.axioms)

    def merged(self, other: "Ontology") -> "Ontology":
        return Ontology(self.constants + other.constants, self.axioms + other.axioms)


@dataclass(frozen=True)
class ModelCheckFlags:
    una: bool = True
    pcwa: bool = True


# ---------------------------------------------------------------- builders

def build_core_ontology(inst: ThueInstance) -> Ontology:
    """A(a), T(a,a), A ⊑ ∃R and ∃S⁻ ⊑ ∃R for all letters R, S"""
    axioms: List[Axiom] = [ConceptAssertion(UNARY, ROOT_CONSTANT),
                           RoleAssertion(TYPE_RELATION, ROOT_CONSTANT, ROOT_CONSTANT)]
    for r in inst.alphabet:
        axioms.append(Inclusion(atomic(UNARY), exists(r)))
    for s in inst.alphabet:
        for r in inst.alphabet:
            axioms.append(Inclusion(exists(s, inverse=True), exists(r)))
    return Ontology((ROOT_CONSTANT,), tuple(axioms))


def build_omega_n(n: int, sig: Signature) -> List[Axiom]:
    """The assertions describing slot n"""
    b, c = slot_constants(n)
    axioms: List[Axiom] = [ConceptAssertion(UNARY, b), RoleAssertion(TYPE_RELATION, b, b),
                           RoleAssertion(TYPE_RELATION, c, c)]
    for r in sig.binary_alphabet:
        axioms += [RoleAssertion(r, b, b), RoleAssertion(r, b, c), RoleAssertion(r, c, c)]
    return axioms


def build_omega_upto(count: int, sig: Signature) -> List[Axiom]:
    axioms: List[Axiom] = []
    for n in range(1, count + 1):
        axioms += build_omega_n(n, sig)
    return axioms


def _with_slots(inst: ThueInstance, count: int) -> Ontology:
    core = build_core_ontology(inst)
    constants = [name for n in range(1, count + 1) for name in slot_constants(n)]
    return core.merged(Ontology(tuple(constants), tuple(build_omega_upto(count, Signature.of(inst)))))


def build_o_neq(inst: ThueInstance) -> Ontology:
    return _with_slots(inst, inst.n_neq)


def build_o_neg(inst: ThueInstance) -> Ontology:
    return _with_slots(inst, inst.n_neg)


# ----------------------------------------------------------- model checking

def concept_extension(d: Structure, concept: BasicConcept) -> FrozenSet[int]:
    if concept.kind == ATOMIC:
        return d.unary_A if concept.name == UNARY else frozenset()
    if concept.name not in d.binary_facts:
        return frozenset()
    return frozenset(d.targets(concept.name) if concept.inverse else d.sources(concept.name))


@dataclass(frozen=True)
class ModelViolation:
    kind: str
    detail: str
    axiom: Optional[str] = None
    vertex: Optional[int] = None

    def to_dict(self) -> Dict[str, object]:
        payload: Dict[str, object] = {"kind": self.kind, "detail": self.detail}
        if self.axiom is not None:
            payload["axiom"] = self.axiom
        if self.vertex is not None:
            payload["vertex"] = self.vertex
        return payload


@dataclass(frozen=True)
class ModelReport:
    violations: Tuple[ModelViolation, ...]
    flags: ModelCheckFlags

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, object]:
        return {
            "ok": self.ok,
            "una": self.flags.una,
            "pcwa": self.flags.pcwa,
            "violations": [v.to_dict() for v in self.violations],
        }


def _asserted_image(axiom: Axiom, interpretation: Dict[str, int]) -> Tuple[str, Tuple[int, ...]]:
    if isinstance(axiom, ConceptAssertion):
        return axiom.concept, (interpretation[axiom.constant],)
    return axiom.role, (interpretation[axiom.source], interpretation[axiom.target])


def check_model(d: Structure, o: Ontology, flags: ModelCheckFlags = ModelCheckFlags()) -> ModelReport:
    """Itemized list of every way d fails to be a model of o"""
    interpretation: Dict[str, int] = {}
    for name in o.constants:
        if name not in d.constants:
            raise MissingConstantInterpretation(name)
        interpretation[name] = d.constants[name]

    violations: List[ModelViolation] = []
    asserted: Set[Tuple[str, Tuple[int, ...]]] = set()
    for axiom in o.assertions:
        symbol, args = _asserted_image(axiom, interpretation)
        asserted.add((symbol, args))
        present = symbol in (UNARY,) + tuple(d.binary_facts) and d.has_fact(symbol, *args)
        if not present:
            violations.append(ModelViolation("assertion", f"{axiom} does not hold", str(axiom)))

    if flags.una:
        owners: Dict[int, List[str]] = {}
        for name, vertex in interpretation.items():
            owners.setdefault(vertex, []).append(name)
        for vertex, names in sorted(owners.items()):
            if len(names) > 1:
                violations.append(ModelViolation(
                    "una", f"constants {', '.join(names)} share vertex {d.label(vertex)}", vertex=vertex))

    for axiom in o.inclusions:
        rhs = concept_extension(d, axiom.rhs)
        for vertex in sorted(concept_extension(d, axiom.lhs) - rhs):
            violations.append(ModelViolation(
                "inclusion", f"{d.label(vertex)} is in {axiom.lhs} but not in {axiom.rhs}", str(axiom), vertex))

    for axiom in o.disjointness:
        for vertex in sorted(concept_extension(d, axiom.lhs) & concept_extension(d, axiom.rhs)):
            violations.append(ModelViolation(
                "disjoint", f"{d.label(vertex)} is in both {axiom.lhs} and {axiom.rhs}", str(axiom), vertex))

    if flags.pcwa:
        constant_vertices = set(interpretation.values())
        for symbol, args in d.facts():
            if set(args) <= constant_vertices and (symbol, args) not in asserted:
                rendered = f"{symbol}({','.join(d.label(v) for v in args)})"
                violations.append(ModelViolation(
                    "pcwa", f"fact {rendered} among constants is not asserted", vertex=args[0]))

    return ModelReport(tuple(violations), flags)


# -------------------------------------------------------------------- chase

@dataclass(frozen=True)
class ChaseResult:
    structure: Structure
    fixpoint: bool
    rounds: int
    clashes: Tuple[ModelViolation, ...] = ()

    def to_dict(self) -> Dict[str, object]:
        return {
            "fixpoint": self.fixpoint,
            "rounds": self.rounds,
            "vertices": len(self.structure),
            "clashes": [c.to_dict() for c in self.clashes],
        }


def chase(o: Ontology, depth: int, alphabet: Sequence[str] = ()) -> ChaseResult:
    """
    Restricted chase for at most depth rounds.

    Round zero interprets each constant as its own vertex and adds the
    asserted facts. Each round collects the violated (vertex, inclusion) pairs
    first, then repairs each with one fresh vertex (or an A-fact).
    """
    if depth < 0:
        raise ValueError("chase depth must be non-negative")
    letters = sorted((set(o.roles) | set(alphabet)) - {TYPE_RELATION})
    builder = StructureBuilder(letters)
    for name in o.constants:
        builder.set_constant(name, builder.add_vertex(name))
    for axiom in o.assertions:
        symbol, args = _asserted_image(axiom, builder.constants)
        builder.add_fact(symbol, *args)

    fresh = 0
    rounds = 0
    fixpoint = False
    while True:
        current = builder.build()
        pending = []
        for axiom in o.inclusions:
            missing = concept_extension(current, axiom.lhs) - concept_extension(current, axiom.rhs)
            for vertex in sorted(missing):
                pending.append((vertex, axiom.rhs))
        pending = list(dict.fromkeys(pending))
        if not pending:
            fixpoint = True
            break
        if rounds == depth:
            break
        rounds += 1
        for vertex, rhs in pending:
            if rhs.kind == ATOMIC:
                builder.add_fact(rhs.name, vertex)
                continue
            fresh += 1
            new = builder.add_vertex(f"f{fresh}")
            if rhs.inverse:
                builder.add_fact(rhs.name, new, vertex)
            else:
                builder.add_fact(rhs.name, vertex, new)

    result = builder.build()
    clashes = tuple(v for v in check_model(result, o, ModelCheckFlags(una=False, pcwa=False)).violations
                    if v.kind == "disjoint")
    logger.debug("chase stopped after %d rounds (fixpoint=%s, %d vertices)", rounds, fixpoint, len(result))
    return ChaseResult(result, fixpoint, rounds, clashes)
