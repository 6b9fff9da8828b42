"""
Finite relational structures over the signature 𝔄 ∪ {A, T}

Vertices are dense integer ids; constants are a separate name → vertex map so
that several constants may share a vertex when the unique name assumption is
off. Builders cover slots, disjoint unions and certified finite quotients of
the canonical structure; checks cover candidacy (p1)-(p3) and perfection.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from .errors import CeilingExceeded, DuplicateConstant, MissingConstant, NotClosedAtBound
from .thue_core import (
    EMPTY_WORD,
    SemigroupWitness,
    ThueInstance,
    Word,
    bounded_congruence_classes,
    eval_in_semigroup,
    format_word,
)

logger = logging.getLogger(__name__)

UNARY = "A"
TYPE_RELATION = "T"
ROOT_CONSTANT = "a"

Edge = Tuple[int, int]


def slot_constants(n: int) -> Tuple[str, str]:
    return f"b{n}", f"c{n}"


@dataclass(frozen=True)
class Signature:
    binary_alphabet: Tuple[str, ...]

    def __post_init__(self):
        if TYPE_RELATION in self.binary_alphabet:
            raise ValueError("T is reserved and cannot be an alphabet symbol")
        if UNARY in self.binary_alphabet:
            raise ValueError("A is the unary relation and cannot be an alphabet symbol")
        object.__setattr__(self, "binary_alphabet", tuple(sorted(set(self.binary_alphabet))))

    @property
    def binary_symbols(self) -> Tuple[str, ...]:
        return self.binary_alphabet + (TYPE_RELATION,)

    @classmethod
    def of(cls, inst: ThueInstance) -> "Signature":
        return cls(inst.alphabet)


@dataclass(frozen=True)
class Structure:
    """Immutable finite structure; build with StructureBuilder"""

    alphabet: Tuple[str, ...]
    vertices: Tuple[int, ...]
    unary_A: FrozenSet[int]
    binary_facts: Dict[str, FrozenSet[Edge]]
    constants: Dict[str, int]
    labels: Dict[int, str] = field(default_factory=dict, compare=False)
    _succ: Dict[str, Dict[int, Tuple[int, ...]]] = field(default=None, init=False, repr=False, compare=False)
    _pred: Dict[str, Dict[int, Tuple[int, ...]]] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        vertex_set = set(self.vertices)
        facts = {symbol: frozenset(self.binary_facts.get(symbol, ())) for symbol in self.alphabet + (TYPE_RELATION,)}
        extra = set(self.binary_facts) - set(facts)
        if extra:
            raise ValueError(f"binary symbols {sorted(extra)} are outside the signature")
        for symbol, edges in facts.items():
            for u, v in edges:
                if u not in vertex_set or v not in vertex_set:
                    raise ValueError(f"fact {symbol}({u},{v}) references a missing vertex")
        if not set(self.unary_A) <= vertex_set:
            raise ValueError("A-fact references a missing vertex")
        for name, vertex in self.constants.items():
            if vertex not in vertex_set:
                raise ValueError(f"constant {name} interpreted outside the vertex set")
        object.__setattr__(self, "vertices", tuple(sorted(vertex_set)))
        object.__setattr__(self, "unary_A", frozenset(self.unary_A))
        object.__setattr__(self, "binary_facts", facts)
        object.__setattr__(self, "constants", dict(sorted(self.constants.items())))

        succ: Dict[str, Dict[int, List[int]]] = {}
        pred: Dict[str, Dict[int, List[int]]] = {}
        for symbol, edges in facts.items():
            s: Dict[int, List[int]] = {}
            p: Dict[int, List[int]] = {}
            for u, v in sorted(edges):
                s.setdefault(u, []).append(v)
                p.setdefault(v, []).append(u)
            succ[symbol] = {u: tuple(vs) for u, vs in s.items()}
            pred[symbol] = {v: tuple(us) for v, us in p.items()}
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_pred", pred)

    @property
    def signature(self) -> Signature:
        return Signature(self.alphabet)

    def successors(self, symbol: str, vertex: int) -> Tuple[int, ...]:
        return self._succ[symbol].get(vertex, ())

    def predecessors(self, symbol: str, vertex: int) -> Tuple[int, ...]:
        return self._pred[symbol].get(vertex, ())

    def sources(self, symbol: str) -> Tuple[int, ...]:
        """Vertices with at least one outgoing symbol-edge"""
        return tuple(self._succ[symbol])

    def targets(self, symbol: str) -> Tuple[int, ...]:
        return tuple(self._pred[symbol])

    def has_fact(self, symbol: str, u: int, v: Optional[int] = None) -> bool:
        if symbol == UNARY:
            return u in self.unary_A
        return (u, v) in self.binary_facts[symbol]

    def constant(self, name: str) -> int:
        if name not in self.constants:
            raise MissingConstant(name)
        return self.constants[name]

    def label(self, vertex: int) -> str:
        return self.labels.get(vertex, str(vertex))

    def facts(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """All facts, A-facts first, then binary symbols in signature order"""
        result: List[Tuple[str, Tuple[int, ...]]] = [(UNARY, (v,)) for v in sorted(self.unary_A)]
        for symbol in self.alphabet + (TYPE_RELATION,):
            result.extend((symbol, edge) for edge in sorted(self.binary_facts[symbol]))
        return result

    def with_facts(self, extra: Iterable[Tuple[str, Tuple[int, ...]]]) -> "Structure":
        """Copy of the structure with additional facts"""
        builder = StructureBuilder.from_structure(self)
        for symbol, args in extra:
            builder.add_fact(symbol, *args)
        return builder.build()

    def graph(self) -> nx.MultiDiGraph:
        """The 𝔄-edges as a networkx multigraph (T is not a letter edge)"""
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.vertices)
        for symbol in self.alphabet:
            for u, v in self.binary_facts[symbol]:
                g.add_edge(u, v, key=symbol)
        return g

    def __len__(self) -> int:
        return len(self.vertices)


class StructureBuilder:
    """Mutable assembly area for a Structure"""

    def __init__(self, alphabet: Sequence[str]):
        self.alphabet = tuple(sorted(set(alphabet)))
        self.vertices: List[int] = []
        self.unary_A: Set[int] = set()
        self.binary_facts: Dict[str, Set[Edge]] = {s: set() for s in self.alphabet + (TYPE_RELATION,)}
        self.constants: Dict[str, int] = {}
        self.labels: Dict[int, str] = {}

    @classmethod
    def from_structure(cls, d: Structure) -> "StructureBuilder":
        builder = cls(d.alphabet)
        builder.vertices = list(d.vertices)
        builder.unary_A = set(d.unary_A)
        builder.binary_facts = {s: set(edges) for s, edges in d.binary_facts.items()}
        builder.constants = dict(d.constants)
        builder.labels = dict(d.labels)
        return builder

    def add_vertex(self, label: Optional[str] = None) -> int:
        vertex = max(self.vertices) + 1 if self.vertices else 0
        self.vertices.append(vertex)
        if label is not None:
            self.labels[vertex] = label
        return vertex

    def add_fact(self, symbol: str, u: int, v: Optional[int] = None) -> "StructureBuilder":
        if symbol == UNARY:
            self.unary_A.add(u)
        else:
            if symbol not in self.binary_facts:
                raise ValueError(f"'{symbol}' is not a binary symbol of this signature")
            self.binary_facts[symbol].add((u, v))
        return self

    def set_constant(self, name: str, vertex: int) -> "StructureBuilder":
        self.constants[name] = vertex
        return self

    def build(self) -> Structure:
        return Structure(
            alphabet=self.alphabet,
            vertices=tuple(self.vertices),
            unary_A=frozenset(self.unary_A),
            binary_facts={s: frozenset(e) for s, e in self.binary_facts.items()},
            constants=dict(self.constants),
            labels=dict(self.labels),
        )


@dataclass(frozen=True)
class Violation:
    condition: str
    vertex: int
    symbol: str
    detail: str

    def to_dict(self) -> Dict[str, object]:
        return {"condition": self.condition, "vertex": self.vertex, "symbol": self.symbol, "detail": self.detail}


@dataclass(frozen=True)
class CandidateReport:
    violations: Tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, object]:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def is_candidate(d: Structure) -> CandidateReport:
    """Check conditions (p1)-(p3) with a read as the interpretation of constant a"""
    a = d.constant(ROOT_CONSTANT)
    violations: List[Violation] = []
    if not d.has_fact(UNARY, a):
        violations.append(Violation("p1", a, UNARY, "A(a) does not hold"))
    if not d.has_fact(TYPE_RELATION, a, a):
        violations.append(Violation("p1", a, TYPE_RELATION, "T(a,a) does not hold"))
    for s in sorted(d.unary_A):
        for symbol in d.alphabet:
            if not d.successors(symbol, s):
                violations.append(Violation("p2", s, symbol, f"A-vertex has no outgoing {symbol}-edge"))
    entered = sorted({v for symbol in d.alphabet for _, v in d.binary_facts[symbol]})
    for t in entered:
        for symbol in d.alphabet:
            if not d.successors(symbol, t):
                violations.append(Violation("p3", t, symbol, f"vertex with an incoming letter edge lacks an outgoing {symbol}-edge"))
    return CandidateReport(tuple(violations))


def slot(n: int, sig: Signature) -> Structure:
    """The two-vertex gadget with constants b_n, c_n"""
    if n < 1:
        raise ValueError("slot index starts at 1")
    b_name, c_name = slot_constants(n)
    builder = StructureBuilder(sig.binary_alphabet)
    b = builder.add_vertex(b_name)
    c = builder.add_vertex(c_name)
    builder.set_constant(b_name, b).set_constant(c_name, c)
    builder.add_fact(UNARY, b)
    builder.add_fact(TYPE_RELATION, b, b).add_fact(TYPE_RELATION, c, c)
    for symbol in sig.binary_alphabet:
        builder.add_fact(symbol, b, b).add_fact(symbol, b, c).add_fact(symbol, c, c)
    return builder.build()


def disjoint_union(parts: Sequence[Structure]) -> Structure:
    """Relabel the parts apart and merge them; constant names must not clash"""
    alphabet = tuple(sorted({s for part in parts for s in part.alphabet}))
    builder = StructureBuilder(alphabet)
    for part in parts:
        remap = {}
        for vertex in part.vertices:
            remap[vertex] = builder.add_vertex(part.labels.get(vertex))
        for symbol, args in part.facts():
            builder.add_fact(symbol, *(remap[x] for x in args))
        for name, vertex in part.constants.items():
            if name in builder.constants:
                raise DuplicateConstant(name)
            builder.set_constant(name, remap[vertex])
    return builder.build()


@dataclass(frozen=True)
class QuotientBounded:
    max_len: int


@dataclass(frozen=True)
class SemigroupSource:
    witness: SemigroupWitness


CanonicalSource = Union[QuotientBounded, SemigroupSource]


def build_canonical_finite(inst: ThueInstance, source: CanonicalSource) -> Structure:
    """
    Finite stand-in for the canonical structure: letter edges s -R-> s·R, A
    only at the class of ε (the adjoined identity), T from a to every vertex.
    """
    if isinstance(source, SemigroupSource):
        d = _canonical_from_semigroup(inst, source.witness)
    else:
        d = _canonical_from_quotient(inst, source.max_len)
    return d


def _finish_canonical(builder: StructureBuilder, root: int) -> Structure:
    builder.add_fact(UNARY, root)
    for vertex in builder.vertices:
        builder.add_fact(TYPE_RELATION, root, vertex)
    builder.set_constant(ROOT_CONSTANT, root)
    return builder.build()


def _canonical_from_semigroup(inst: ThueInstance, witness: SemigroupWitness) -> Structure:
    if not witness.is_associative():
        raise ValueError("semigroup witness table is not associative")
    missing = [s for s in inst.alphabet if s not in witness.generator_map]
    if missing:
        raise ValueError(f"semigroup witness leaves generators {missing} unassigned")
    for k, rule in enumerate(inst.rules, start=1):
        if eval_in_semigroup(rule.left, witness) != eval_in_semigroup(rule.right, witness):
            raise ValueError(f"rule {k} ({rule}) does not hold in the semigroup witness")
    builder = StructureBuilder(inst.alphabet)
    identity = builder.add_vertex("1")
    elements = [builder.add_vertex(f"e{i}") for i in range(witness.order)]
    for symbol in inst.alphabet:
        g = witness.generator_map[symbol]
        builder.add_fact(symbol, identity, elements[g])
        for i in range(witness.order):
            builder.add_fact(symbol, elements[i], elements[witness.product(i, g)])
    return _finish_canonical(builder, identity)


def _canonical_from_quotient(inst: ThueInstance, max_len: int) -> Structure:
    classes = bounded_congruence_classes(inst.alphabet, inst.rules, max_len)
    class_of: Dict[Word, int] = {}
    for index, cls in enumerate(classes):
        for word in cls:
            class_of[word] = index

    # only classes reached from [ε] become vertices; each must be extendable
    # inside the bound and its letter successors must not depend on the
    # representative chosen
    builder = StructureBuilder(inst.alphabet)
    vertex_of: Dict[int, int] = {}
    root_class = class_of[EMPTY_WORD]
    order = [root_class]
    vertex_of[root_class] = builder.add_vertex(f"[{format_word(classes[root_class][0])}]")
    edges: List[Tuple[str, int, int]] = []
    position = 0
    while position < len(order):
        current = order[position]
        position += 1
        extendable = [w for w in classes[current] if len(w) < max_len]
        if not extendable:
            raise NotClosedAtBound(max_len, f"class of {format_word(classes[current][0])} has no word shorter than the bound")
        for symbol in inst.alphabet:
            targets = {class_of[w + (symbol,)] for w in extendable}
            if len(targets) != 1:
                raise NotClosedAtBound(max_len, f"successor of {format_word(classes[current][0])} under {symbol} is not well defined")
            target = targets.pop()
            if target not in vertex_of:
                vertex_of[target] = builder.add_vertex(f"[{format_word(classes[target][0])}]")
                order.append(target)
            edges.append((symbol, vertex_of[current], vertex_of[target]))
    for symbol, u, v in edges:
        builder.add_fact(symbol, u, v)
    d = _finish_canonical(builder, vertex_of[root_class])

    report = is_perfect(d, inst)
    if not report.perfect:
        raise NotClosedAtBound(max_len, "the bounded quotient is not perfect")
    logger.debug("finite quotient certified at max_len=%d with %d classes", max_len, len(d))
    return d


def walk(d: Structure, start: int, w: Word) -> FrozenSet[int]:
    """Endpoints of all paths from start spelling w"""
    current = {start}
    for symbol in w:
        current = {t for s in current for t in d.successors(symbol, s)}
        if not current:
            break
    return frozenset(current)


def reachable_from(d: Structure, start: int) -> Set[int]:
    """Vertices s with start -w-> s for some word w, start included"""
    return {start} | nx.descendants(d.graph(), start)


@dataclass(frozen=True)
class ImperfectionWitness:
    vertex: int
    rule_index: int
    direction: str
    left_endpoints: FrozenSet[int]
    right_endpoints: FrozenSet[int]

    def to_dict(self) -> Dict[str, object]:
        return {
            "vertex": self.vertex,
            "rule": self.rule_index,
            "direction": self.direction,
            "left_endpoints": sorted(self.left_endpoints),
            "right_endpoints": sorted(self.right_endpoints),
        }


@dataclass(frozen=True)
class PerfectionReport:
    witness: Optional[ImperfectionWitness]
    reachable_count: int

    @property
    def perfect(self) -> bool:
        return self.witness is None

    def to_dict(self) -> Dict[str, object]:
        payload: Dict[str, object] = {
            "verdict": "Perfect" if self.perfect else "Imperfect",
            "reachable_count": self.reachable_count,
        }
        if self.witness is not None:
            payload["witness"] = self.witness.to_dict()
        return payload


def is_perfect(d: Structure, inst: ThueInstance) -> PerfectionReport:
    """Compare l_k- and r_k-endpoints at every vertex reachable from a"""
    a = d.constant(ROOT_CONSTANT)
    reachable = sorted(reachable_from(d, a))
    for s in reachable:
        for k, rule in enumerate(inst.rules, start=1):
            left = walk(d, s, rule.left)
            right = walk(d, s, rule.right)
            if left != right:
                direction = "left-only" if left - right else "right-only"
                return PerfectionReport(ImperfectionWitness(s, k, direction, left, right), len(reachable))
    return PerfectionReport(None, len(reachable))


def well_of_positivity(sig: Signature, constants: Iterable[str] = (ROOT_CONSTANT,)) -> Structure:
    """One vertex on which every atom holds; all constants point at it"""
    builder = StructureBuilder(sig.binary_alphabet)
    v = builder.add_vertex("well")
    builder.add_fact(UNARY, v)
    for symbol in sig.binary_symbols:
        builder.add_fact(symbol, v, v)
    for name in constants:
        builder.set_constant(name, v)
    return builder.build()


DEFAULT_ENUM_CEILING = 4


class CandidateEnumeration:
    """
    Restartable stream of every candidate structure with at most max_vertices
    vertices, constant a fixed to vertex 0.

    By default T is fixed to {(a,a)}, the only T-fact the candidate conditions
    observe; vary_t also enumerates every T relation.
    """

    def __init__(self, sig: Signature, max_vertices: int, ceiling: int = DEFAULT_ENUM_CEILING,
                 vary_t: bool = False):
        if max_vertices > ceiling:
            raise CeilingExceeded(max_vertices, ceiling)
        self.sig = sig
        self.max_vertices = max_vertices
        self.vary_t = vary_t
        self.examined = 0

    def __iter__(self) -> Iterator[Structure]:
        self.examined = 0
        for structure in iter_raw_structures(self.sig, self.max_vertices, self.vary_t):
            self.examined += 1
            if is_candidate(structure).ok:
                yield structure

    def count(self) -> int:
        return sum(1 for _ in self)


def raw_structure_count(sig: Signature, max_vertices: int, vary_t: bool = False) -> int:
    """How many structures iter_raw_structures emits"""
    total = 0
    m = len(sig.binary_alphabet)
    for n in range(1, max_vertices + 1):
        per_size = 2 ** (n - 1) * 2 ** (m * n * n)
        if vary_t:
            per_size *= 2 ** (n * n - 1)
        total += per_size
    return total


def iter_raw_structures(sig: Signature, max_vertices: int, vary_t: bool = False) -> Iterator[Structure]:
    """
    All structures with 1..max_vertices vertices, a = vertex 0, A(0) and
    T(0,0) present. Order: size, A-set, letter relations in alphabet order, T.
    """
    for n in range(1, max_vertices + 1):
        pairs = [(u, v) for u in range(n) for v in range(n)]
        t_pairs = [p for p in pairs if p != (0, 0)]
        a_choices = list(itertools.product((False, True), repeat=n - 1))
        relation_choices = range(2 ** len(pairs))
        t_choices = range(2 ** len(t_pairs)) if vary_t else (0,)
        for a_bits in a_choices:
            for masks in itertools.product(relation_choices, repeat=len(sig.binary_alphabet)):
                for t_mask in t_choices:
                    builder = StructureBuilder(sig.binary_alphabet)
                    for _ in range(n):
                        builder.add_vertex()
                    builder.set_constant(ROOT_CONSTANT, 0)
                    builder.add_fact(UNARY, 0)
                    builder.add_fact(TYPE_RELATION, 0, 0)
                    for vertex, marked in enumerate(a_bits, start=1):
                        if marked:
                            builder.add_fact(UNARY, vertex)
                    for symbol, mask in zip(sig.binary_alphabet, masks):
                        for bit, (u, v) in enumerate(pairs):
                            if mask >> bit & 1:
                                builder.add_fact(symbol, u, v)
                    for bit, (u, v) in enumerate(t_pairs):
                        if t_mask >> bit & 1:
                            builder.add_fact(TYPE_RELATION, u, v)
                    yield builder.build()


def enumerate_candidate_structures(sig: Signature, max_vertices: int, ceiling: int = DEFAULT_ENUM_CEILING,
                                   vary_t: bool = False) -> CandidateEnumeration:
    return CandidateEnumeration(sig, max_vertices, ceiling, vary_t)
