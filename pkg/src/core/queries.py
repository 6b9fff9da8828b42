"""
Queries - Boolean conjunctive queries with inequalities and safe negation

Data model, the query families used by the reduction (γ_k, γ_R, γ_◇, β_[l,k],
β_[r,k], β_R, β_R̄, the unions Γ^≠, Γ^¬, Ψ, Φ and the combined queries ψ, φ),
a backtracking evaluator and a brute-force oracle to check it against.

A query is a tuple of components with pairwise disjoint variables plus a tuple
of link literals between components. Links that only mention distinguished
variables let the evaluator solve each component on its own and then search
over the distinguished variables alone.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import IndexOutOfRange, UnknownSymbol, UnsafeQuery
from .structures import TYPE_RELATION, UNARY, Structure
from .thue_core import ThueInstance, Word

logger = logging.getLogger(__name__)

Assignment = Dict[str, int]


@dataclass(frozen=True)
class UnaryAtom:
    symbol: str
    var: str

    @property
    def variables(self) -> Tuple[str, ...]:
        return (self.var,)

    def __str__(self) -> str:
        return f"{self.symbol}({self.var})"


@dataclass(frozen=True)
class BinaryAtom:
    symbol: str
    source: str
    target: str

    @property
    def variables(self) -> Tuple[str, ...]:
        return (self.source, self.target)

    def __str__(self) -> str:
        return f"{self.symbol}({self.source},{self.target})"


@dataclass(frozen=True)
class Inequality:
    left: str
    right: str

    @property
    def variables(self) -> Tuple[str, ...]:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"{self.left} != {self.right}"


@dataclass(frozen=True)
class NegatedAtom:
    symbol: str
    source: str
    target: str

    @property
    def variables(self) -> Tuple[str, ...]:
        return (self.source, self.target)

    def __str__(self) -> str:
        return f"!{self.symbol}({self.source},{self.target})"


Literal = Union[UnaryAtom, BinaryAtom, Inequality, NegatedAtom]
POSITIVE = (UnaryAtom, BinaryAtom)


def is_positive(literal: Literal) -> bool:
    return isinstance(literal, POSITIVE)


def holds(d: Structure, literal: Literal, assignment: Assignment) -> bool:
    """Truth of a literal whose variables are all assigned"""
    if isinstance(literal, UnaryAtom):
        return d.has_fact(UNARY, assignment[literal.var])
    if isinstance(literal, BinaryAtom):
        return d.has_fact(literal.symbol, assignment[literal.source], assignment[literal.target])
    if isinstance(literal, Inequality):
        return assignment[literal.left] != assignment[literal.right]
    return not d.has_fact(literal.symbol, assignment[literal.source], assignment[literal.target])


def _ordered_variables(literals: Sequence[Literal]) -> Tuple[str, ...]:
    seen: Dict[str, None] = {}
    for literal in literals:
        for var in literal.variables:
            seen.setdefault(var, None)
    return tuple(seen)


@dataclass(frozen=True)
class Component:
    id: str
    literals: Tuple[Literal, ...]
    distinguished: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(self.literals))
        if self.distinguished is not None and self.distinguished not in self.variables:
            raise ValueError(f"distinguished variable {self.distinguished} does not occur in component {self.id}")

    @property
    def variables(self) -> Tuple[str, ...]:
        return _ordered_variables(self.literals)

    def renamed(self, suffix: str) -> "Component":
        def rename(var: str) -> str:
            return f"{var}_{suffix}"
        return Component(self.id, tuple(_rename_literal(lit, rename) for lit in self.literals),
                         rename(self.distinguished) if self.distinguished else None)


def _rename_literal(literal: Literal, rename: Callable[[str], str]) -> Literal:
    if isinstance(literal, UnaryAtom):
        return UnaryAtom(literal.symbol, rename(literal.var))
    if isinstance(literal, BinaryAtom):
        return BinaryAtom(literal.symbol, rename(literal.source), rename(literal.target))
    if isinstance(literal, Inequality):
        return Inequality(rename(literal.left), rename(literal.right))
    return NegatedAtom(literal.symbol, rename(literal.source), rename(literal.target))


@dataclass(frozen=True)
class ConjunctiveQuery:
    """Boolean CQ: components with disjoint variables, plus link literals"""

    components: Tuple[Component, ...]
    links: Tuple[Literal, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "links", tuple(self.links))
        owner: Dict[str, str] = {}
        ids = set()
        for component in self.components:
            if component.id in ids:
                raise ValueError(f"component id {component.id} used twice")
            ids.add(component.id)
            for var in component.variables:
                if var in owner:
                    raise ValueError(f"variable {var} occurs in components {owner[var]} and {component.id}")
                owner[var] = component.id
        for literal in self.links:
            for var in literal.variables:
                if var not in owner:
                    raise ValueError(f"link literal {literal} uses variable {var} outside every component")

    @property
    def literals(self) -> Tuple[Literal, ...]:
        result: List[Literal] = []
        for component in self.components:
            result.extend(component.literals)
        result.extend(self.links)
        return tuple(result)

    @property
    def variables(self) -> Tuple[str, ...]:
        return _ordered_variables(self.literals)

    @property
    def distinguished(self) -> Dict[str, str]:
        """component id → distinguished variable"""
        return {c.id: c.distinguished for c in self.components if c.distinguished}

    def component(self, component_id: str) -> Component:
        for component in self.components:
            if component.id == component_id:
                return component
        raise KeyError(component_id)

    def as_single(self, component_id: str) -> "ConjunctiveQuery":
        """The one-component query of a given component"""
        return ConjunctiveQuery((self.component(component_id),), name=component_id)


@dataclass(frozen=True)
class UnionQuery:
    disjuncts: Tuple[ConjunctiveQuery, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))

    def __len__(self) -> int:
        return len(self.disjuncts)


def single_component_query(component_id: str, literals: Sequence[Literal],
                           distinguished: Optional[str] = None, name: str = "") -> ConjunctiveQuery:
    return ConjunctiveQuery((Component(component_id, tuple(literals), distinguished),), name=name or component_id)


# ---------------------------------------------------------------- builders

DIAMOND = "◇"


class _FreshNames:
    def __init__(self, prefix: str = "u"):
        self.prefix = prefix
        self.counter = 0

    def __call__(self) -> str:
        self.counter += 1
        return f"{self.prefix}{self.counter}"


def _path_atoms(word: Word, start: str, end: str, fresh: _FreshNames) -> List[BinaryAtom]:
    """start -word-> end, auxiliaries named left to right; word must be non-empty"""
    atoms = []
    current = start
    for index, symbol in enumerate(word):
        nxt = end if index == len(word) - 1 else fresh()
        atoms.append(BinaryAtom(symbol, current, nxt))
        current = nxt
    return atoms


def _check_rule_index(inst: ThueInstance, k: int) -> None:
    if not 1 <= k <= inst.k:
        raise IndexOutOfRange(k, inst.k)


def _check_symbol(inst: ThueInstance, symbol: str) -> None:
    if symbol not in inst.alphabet:
        raise UnknownSymbol(f"symbol '{symbol}' is not in the alphabet", symbol=symbol)


def build_gamma_k(inst: ThueInstance, k: int) -> ConjunctiveQuery:
    _check_rule_index(inst, k)
    rule = inst.rule(k)
    fresh = _FreshNames()
    literals: List[Literal] = []
    literals += _path_atoms(rule.left, "x", "y", fresh)
    literals += _path_atoms(rule.right, "x", "y'", fresh)
    literals.append(Inequality("y", "y'"))
    return single_component_query(str(k), literals, "x", name=f"gamma_{k}")


def build_gamma_r(inst: ThueInstance, symbol: str) -> ConjunctiveQuery:
    _check_symbol(inst, symbol)
    literals = [BinaryAtom(symbol, "x", "y"), UnaryAtom(UNARY, "y")]
    return single_component_query(symbol, literals, "x", name=f"gamma_{symbol}")


def build_gamma_diamond(inst: ThueInstance) -> ConjunctiveQuery:
    fresh = _FreshNames()
    literals: List[Literal] = [UnaryAtom(UNARY, "x")]
    literals += _path_atoms(inst.goal_left, "x", "y", fresh)
    literals += _path_atoms(inst.goal_right, "x", "y", fresh)
    return single_component_query(DIAMOND, literals, "x", name="diamond")


# the same query serves both reductions
build_beta_diamond = build_gamma_diamond


def build_beta_rk(inst: ThueInstance, k: int) -> ConjunctiveQuery:
    """x -l_k-> y, x -r'_k-> y', not R_k(y', y) where r_k = r'_k R_k"""
    _check_rule_index(inst, k)
    rule = inst.rule(k)
    prefix, last = rule.right[:-1], rule.right[-1]
    fresh = _FreshNames()
    literals: List[Literal] = _path_atoms(rule.left, "x", "y", fresh)
    end = "x"
    if prefix:
        literals += _path_atoms(prefix, "x", "y'", fresh)
        end = "y'"
    literals.append(NegatedAtom(last, end, "y"))
    return single_component_query(f"[r,{k}]", literals, "x", name=f"beta_r_{k}")


def build_beta_lk(inst: ThueInstance, k: int) -> ConjunctiveQuery:
    """x -l'_k-> y, x -r_k-> y', not L_k(y, y') where l_k = l'_k L_k"""
    _check_rule_index(inst, k)
    rule = inst.rule(k)
    prefix, last = rule.left[:-1], rule.left[-1]
    fresh = _FreshNames()
    literals: List[Literal] = []
    start = "x"
    if prefix:
        literals += _path_atoms(prefix, "x", "y", fresh)
        start = "y"
    literals += _path_atoms(rule.right, "x", "y'", fresh)
    literals.append(NegatedAtom(last, start, "y'"))
    return single_component_query(f"[l,{k}]", literals, "x", name=f"beta_l_{k}")


def build_beta_r(inst: ThueInstance, symbol: str) -> ConjunctiveQuery:
    _check_symbol(inst, symbol)
    literals = [BinaryAtom(TYPE_RELATION, "x", "y"), BinaryAtom(symbol, "y", "z"),
                NegatedAtom(TYPE_RELATION, "x", "z")]
    return single_component_query(symbol, literals, "x", name=f"beta_{symbol}")


def build_beta_rbar(inst: ThueInstance, symbol: str) -> ConjunctiveQuery:
    _check_symbol(inst, symbol)
    literals = [BinaryAtom(TYPE_RELATION, "x", "y"), BinaryAtom(symbol, "z", "y"),
                NegatedAtom(TYPE_RELATION, "x", "z")]
    return single_component_query(f"~{symbol}", literals, "x", name=f"beta_~{symbol}")


def build_gamma_neq_union(inst: ThueInstance) -> UnionQuery:
    return UnionQuery(tuple(build_gamma_k(inst, k) for k in range(1, inst.k + 1)), name="Gamma_neq")


def build_gamma_neg_union(inst: ThueInstance) -> UnionQuery:
    disjuncts = []
    for k in range(1, inst.k + 1):
        disjuncts.append(build_beta_lk(inst, k))
        disjuncts.append(build_beta_rk(inst, k))
    return UnionQuery(tuple(disjuncts), name="Gamma_neg")


def build_psi_union(inst: ThueInstance) -> UnionQuery:
    return UnionQuery(build_gamma_neq_union(inst).disjuncts + (build_gamma_diamond(inst),), name="Psi")


def build_phi_union(inst: ThueInstance) -> UnionQuery:
    return UnionQuery(build_gamma_neg_union(inst).disjuncts + (build_beta_diamond(inst),), name="Phi")


def _rename_tag(component_id: str) -> str:
    if component_id == DIAMOND:
        return "dia"
    if component_id.startswith("~"):
        return f"sbar_{component_id[1:]}"
    if component_id.startswith("["):
        side, k = component_id[1:-1].split(",")
        return f"{side}_{k}"
    if component_id.isdigit():
        return f"k_{component_id}"
    return f"s_{component_id}"


def _combine(parts: Sequence[ConjunctiveQuery]) -> Tuple[Component, ...]:
    return tuple(part.components[0].renamed(_rename_tag(part.components[0].id)) for part in parts)


def build_psi(inst: ThueInstance) -> ConjunctiveQuery:
    """γ_R for every letter, γ_◇, γ_k for every rule; distinguished variables pairwise distinct"""
    parts = [build_gamma_r(inst, symbol) for symbol in inst.alphabet]
    parts.append(build_gamma_diamond(inst))
    parts += [build_gamma_k(inst, k) for k in range(1, inst.k + 1)]
    components = _combine(parts)
    heads = [c.distinguished for c in components]
    links = tuple(Inequality(u, v) for u, v in itertools.combinations(heads, 2))
    return ConjunctiveQuery(components, links, name="psi")


def build_phi(inst: ThueInstance, negate_t: bool = False) -> ConjunctiveQuery:
    """
    β_R, β_R̄ for every letter, β_◇, β_[l,k] and β_[r,k] for every rule; no
    letter edge between distinguished variables of different components.
    negate_t also forbids T between them.
    """
    parts = [build_beta_r(inst, symbol) for symbol in inst.alphabet]
    parts += [build_beta_rbar(inst, symbol) for symbol in inst.alphabet]
    parts.append(build_beta_diamond(inst))
    for k in range(1, inst.k + 1):
        parts.append(build_beta_lk(inst, k))
        parts.append(build_beta_rk(inst, k))
    components = _combine(parts)
    heads = [c.distinguished for c in components]
    symbols = inst.alphabet + ((TYPE_RELATION,) if negate_t else ())
    links = tuple(
        NegatedAtom(symbol, u, v)
        for u, v in itertools.permutations(heads, 2)
        for symbol in symbols
    )
    return ConjunctiveQuery(components, links, name="phi")


# -------------------------------------------------------------- evaluation

def unsafe_variables(q: ConjunctiveQuery) -> List[str]:
    positive = {var for lit in q.literals if is_positive(lit) for var in lit.variables}
    return sorted({var for lit in q.literals if not is_positive(lit) for var in lit.variables} - positive)


def is_safe(q: ConjunctiveQuery) -> bool:
    return not unsafe_variables(q)


class _Backtracker:
    """
    Homomorphism search for a list of literals.

    The next variable is the unbound one with the fewest candidate vertices
    given its already bound neighbours. Every literal is checked as soon as
    all its variables are bound.
    """

    def __init__(self, d: Structure, literals: Sequence[Literal]):
        self.d = d
        self.literals = tuple(literals)
        self.variables = _ordered_variables(self.literals)
        self.by_var: Dict[str, List[Literal]] = {v: [] for v in self.variables}
        for literal in self.literals:
            for var in set(literal.variables):
                self.by_var[var].append(literal)
        self.nodes = 0

    def candidates(self, var: str, assignment: Assignment) -> List[int]:
        pool = None
        for literal in self.by_var[var]:
            if isinstance(literal, UnaryAtom):
                options = self.d.unary_A
            elif isinstance(literal, BinaryAtom):
                if literal.source == literal.target:
                    continue
                if literal.source == var:
                    if literal.target in assignment:
                        options = self.d.predecessors(literal.symbol, assignment[literal.target])
                    else:
                        options = self.d.sources(literal.symbol)
                else:
                    if literal.source in assignment:
                        options = self.d.successors(literal.symbol, assignment[literal.source])
                    else:
                        options = self.d.targets(literal.symbol)
            else:
                continue
            pool = set(options) if pool is None else pool.intersection(options)
            if not pool:
                return []
        if pool is None:
            return list(self.d.vertices)
        return sorted(pool)

    def consistent(self, var: str, assignment: Assignment) -> bool:
        for literal in self.by_var[var]:
            if all(v in assignment for v in literal.variables) and not holds(self.d, literal, assignment):
                return False
        return True

    def solve(self, fixed: Optional[Assignment] = None) -> Optional[Assignment]:
        assignment: Assignment = {}
        for var, vertex in (fixed or {}).items():
            if var not in self.by_var:
                continue
            assignment[var] = vertex
        for var in list(assignment):
            if not self.consistent(var, assignment):
                return None
        return self._extend(assignment)

    def _extend(self, assignment: Assignment) -> Optional[Assignment]:
        self.nodes += 1
        best_var, best_options = None, None
        for var in self.variables:
            if var in assignment:
                continue
            options = self.candidates(var, assignment)
            if best_options is None or len(options) < len(best_options):
                best_var, best_options = var, options
                if not options:
                    return None
        if best_var is None:
            return dict(assignment)
        for vertex in best_options:
            assignment[best_var] = vertex
            if self.consistent(best_var, assignment):
                result = self._extend(assignment)
                if result is not None:
                    return result
            del assignment[best_var]
        return None


def _solve_literals(d: Structure, literals: Sequence[Literal], fixed: Optional[Assignment] = None) -> Optional[Assignment]:
    return _Backtracker(d, literals).solve(fixed)


def _decomposable(q: ConjunctiveQuery) -> bool:
    heads = set(q.distinguished.values())
    return all(var in heads for lit in q.links for var in lit.variables)


def component_images(d: Structure, q: ConjunctiveQuery,
                     fixed: Optional[Assignment] = None) -> Dict[str, List[int]]:
    """
    For every component with a distinguished variable, the vertices that
    variable can take in some homomorphism of that component alone.
    """
    images: Dict[str, List[int]] = {}
    for component in q.components:
        if component.distinguished is None:
            continue
        head = component.distinguished
        pinned = dict(fixed or {})
        domain = [pinned[head]] if head in pinned else list(d.vertices)
        images[component.id] = [
            v for v in domain
            if _solve_literals(d, component.literals, {**pinned, head: v}) is not None
        ]
    return images


def _link_search(d: Structure, heads: List[str], domains: Dict[str, List[int]],
                 links: Sequence[Literal]) -> Optional[Assignment]:
    """Backtracking with forward checking over the distinguished variables"""
    by_var: Dict[str, List[Literal]] = {h: [] for h in heads}
    for literal in links:
        for var in set(literal.variables):
            by_var[var].append(literal)

    def prune(var: str, assignment: Assignment, live: Dict[str, List[int]]) -> Optional[Dict[str, List[int]]]:
        updated = dict(live)
        for literal in by_var[var]:
            unbound = {x for x in literal.variables if x not in assignment}
            if len(unbound) != 1:
                continue
            other = unbound.pop()
            kept = [v for v in updated[other] if holds(d, literal, {**assignment, other: v})]
            if not kept:
                return None
            updated[other] = kept
        return updated

    def extend(assignment: Assignment, live: Dict[str, List[int]]) -> Optional[Assignment]:
        pending = [h for h in heads if h not in assignment]
        if not pending:
            return dict(assignment)
        var = min(pending, key=lambda h: (len(live[h]), heads.index(h)))
        for vertex in live[var]:
            assignment[var] = vertex
            if all(holds(d, lit, assignment) for lit in by_var[var]
                   if all(x in assignment for x in lit.variables)):
                narrowed = prune(var, assignment, live)
                if narrowed is not None:
                    result = extend(assignment, narrowed)
                    if result is not None:
                        return result
            del assignment[var]
        return None

    return extend({}, dict(domains))


def evaluate(d: Structure, q: ConjunctiveQuery, fixed: Optional[Assignment] = None) -> Optional[Assignment]:
    """
    A satisfying total assignment of q in d, or None.

    fixed pins some variables in advance. Raises UnsafeQuery when a variable
    occurs only in inequality or negated literals.
    """
    unsafe = unsafe_variables(q)
    if unsafe:
        raise UnsafeQuery(unsafe)
    if not q.links or not _decomposable(q) or len(q.components) < 2:
        return _solve_literals(d, q.literals, fixed)

    images = component_images(d, q, fixed)
    heads_by_component = q.distinguished
    if any(not images[cid] for cid in heads_by_component):
        logger.debug("component(s) %s have no image", [cid for cid in heads_by_component if not images[cid]])
        return None
    heads = [heads_by_component[c.id] for c in q.components if c.id in heads_by_component]
    domains = {heads_by_component[cid]: vertices for cid, vertices in images.items()}
    chosen = _link_search(d, heads, domains, q.links)
    if chosen is None:
        return None

    result: Assignment = {}
    for component in q.components:
        pinned = dict(fixed or {})
        if component.distinguished:
            pinned[component.distinguished] = chosen[component.distinguished]
        partial = _solve_literals(d, component.literals, pinned)
        if partial is None:
            return None
        result.update(partial)
    return result


def evaluate_union(d: Structure, u: UnionQuery) -> Optional[Tuple[int, Assignment]]:
    """First satisfied disjunct, with its index"""
    for index, disjunct in enumerate(u.disjuncts):
        assignment = evaluate(d, disjunct)
        if assignment is not None:
            return index, assignment
    return None


def failing_literals(d: Structure, q: ConjunctiveQuery, assignment: Assignment) -> List[Literal]:
    """Literals an assignment violates; empty means the assignment is a witness"""
    missing = [v for v in q.variables if v not in assignment]
    if missing:
        raise ValueError(f"assignment leaves {missing} unassigned")
    return [lit for lit in q.literals if not holds(d, lit, assignment)]


# ------------------------------------------------------------------ oracle

def oracle_assignments(d: Structure, q: ConjunctiveQuery) -> Iterator[Assignment]:
    """Every satisfying assignment, by plain enumeration of |V|^#vars candidates"""
    variables = q.variables
    literals = q.literals
    for values in itertools.product(d.vertices, repeat=len(variables)):
        assignment = dict(zip(variables, values))
        if all(holds(d, lit, assignment) for lit in literals):
            yield assignment


def oracle_count(d: Structure, q: ConjunctiveQuery) -> int:
    return sum(1 for _ in oracle_assignments(d, q))


def oracle_satisfiable(d: Structure, q: ConjunctiveQuery, by_component: bool = False) -> bool:
    """
    Exhaustive satisfiability. by_component enumerates each component's own
    assignments to get the distinguished images, then enumerates combinations
    of images against the links; usable when links only touch distinguished
    variables.
    """
    if not by_component or not _decomposable(q):
        return next(oracle_assignments(d, q), None) is not None

    images: Dict[str, set] = {}
    for component in q.components:
        sub = ConjunctiveQuery((component,))
        found = set()
        for assignment in oracle_assignments(d, sub):
            if component.distinguished is None:
                found.add(None)
                break
            found.add(assignment[component.distinguished])
        if not found:
            return False
        if component.distinguished is not None:
            images[component.distinguished] = found
    heads = list(images)

    # plain depth-first over heads in declaration order; a link is tested once both ends are bound
    def combine(index: int, assignment: Assignment) -> bool:
        if index == len(heads):
            return True
        head = heads[index]
        for vertex in sorted(images[head]):
            assignment[head] = vertex
            bound = [lit for lit in q.links if head in lit.variables and all(v in assignment for v in lit.variables)]
            if all(holds(d, lit, assignment) for lit in bound) and combine(index + 1, assignment):
                return True
            del assignment[head]
        return False

    return combine(0, {})
