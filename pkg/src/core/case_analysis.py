"""
Case Analysis - escape witnesses in models of the reduction ontologies

For a positive instance every model of the ψ-ontology has a component of ψ
whose distinguished variable can be placed off the b-vertices of the slots,
and every model of the φ-ontology has a component of φ whose distinguished
variable can be placed away from every slot vertex. The slots then absorb the
remaining components. This module finds such a component and homomorphism by
following the three cases of each argument.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Set

from .queries import (
    DIAMOND,
    Assignment,
    ConjunctiveQuery,
    build_beta_lk,
    build_beta_r,
    build_beta_rbar,
    build_beta_rk,
    build_gamma_diamond,
    build_gamma_k,
    build_gamma_r,
    evaluate,
)
from .structures import ROOT_CONSTANT, TYPE_RELATION, Structure, is_perfect, reachable_from, slot_constants
from .thue_core import ThueInstance

logger = logging.getLogger(__name__)

DIRTY = "dirty"
TIDY_PERFECT = "tidy-perfect"
TIDY_IMPERFECT = "tidy-imperfect"
SOILED = "soiled"
CLEAN_PERFECT = "clean-perfect"
CLEAN_IMPERFECT = "clean-imperfect"


@dataclass(frozen=True)
class EscapeWitness:
    case: str
    component: Optional[str]
    assignment: Optional[Assignment]
    escapes: bool
    detail: str = ""

    @property
    def found(self) -> bool:
        return self.assignment is not None

    def to_dict(self) -> Dict[str, object]:
        return {
            "case": self.case,
            "component": self.component,
            "assignment": self.assignment,
            "escapes": self.escapes,
            "detail": self.detail,
        }


def slot_vertices(d: Structure, count: int, include_c: bool) -> Set[int]:
    vertices = set()
    for n in range(1, count + 1):
        b, c = slot_constants(n)
        vertices.add(d.constant(b))
        if include_c:
            vertices.add(d.constant(c))
    return vertices


def _pinned(d: Structure, q: ConjunctiveQuery, vertex: int) -> Optional[Assignment]:
    return evaluate(d, q, {q.components[0].distinguished: vertex})


def _shortest_entry(d: Structure, start: int, targets: Set[int]):
    """(penultimate vertex, letter, target) on a shortest non-empty path into targets"""
    frontier: List[int] = [start]
    seen = {start}
    while frontier:
        next_frontier = []
        for u in frontier:
            for symbol in d.alphabet:
                for v in d.successors(symbol, u):
                    if v in targets:
                        return u, symbol, v
                    if v not in seen:
                        seen.add(v)
                        next_frontier.append(v)
        frontier = next_frontier
    return None


def neq_escape(d: Structure, inst: ThueInstance) -> EscapeWitness:
    """Component of ψ and homomorphism with the distinguished variable outside the b-vertices"""
    a = d.constant(ROOT_CONSTANT)
    blocked = slot_vertices(d, inst.n_neq, include_c=False)

    entry = _shortest_entry(d, a, blocked)
    if entry is not None:
        s, symbol, b = entry
        assignment = evaluate(d, build_gamma_r(inst, symbol), {"x": s, "y": b})
        return EscapeWitness(DIRTY, symbol, assignment, assignment is not None and s not in blocked,
                             f"{d.label(s)} -{symbol}-> {d.label(b)}")

    report = is_perfect(d, inst)
    if report.perfect:
        assignment = _pinned(d, build_gamma_diamond(inst), a)
        return EscapeWitness(TIDY_PERFECT, DIAMOND, assignment, assignment is not None and a not in blocked,
                             "" if assignment else "goal paths from a do not meet")

    s, k = report.witness.vertex, report.witness.rule_index
    assignment = _pinned(d, build_gamma_k(inst, k), s)
    return EscapeWitness(TIDY_IMPERFECT, str(k), assignment, assignment is not None and s not in blocked,
                         f"rule {k} breaks at {d.label(s)}")


def _unrelated(d: Structure, vertex: int, blocked: Set[int]) -> bool:
    for symbol in d.alphabet + (TYPE_RELATION,):
        if blocked & set(d.successors(symbol, vertex)) or blocked & set(d.predecessors(symbol, vertex)):
            return False
    return True


def _is_soiled(d: Structure, a: int, blocked: Set[int]) -> bool:
    for s in reachable_from(d, a):
        for symbol in d.alphabet:
            if blocked & set(d.successors(symbol, s)) or blocked & set(d.predecessors(symbol, s)):
                return True
    return False


def neg_escape(d: Structure, inst: ThueInstance) -> EscapeWitness:
    """Component of φ and homomorphism with the distinguished variable unrelated to every slot vertex"""
    a = d.constant(ROOT_CONSTANT)
    blocked = slot_vertices(d, inst.n_neg, include_c=True)

    if _is_soiled(d, a, blocked):
        for symbol in inst.alphabet:
            for query in (build_beta_r(inst, symbol), build_beta_rbar(inst, symbol)):
                assignment = _pinned(d, query, a)
                if assignment is not None:
                    return EscapeWitness(SOILED, query.components[0].id, assignment, _unrelated(d, a, blocked),
                                         f"T(a,-) stops along a {symbol}-edge")
        return EscapeWitness(SOILED, None, None, False, "no T-border found from a")

    report = is_perfect(d, inst)
    if report.perfect:
        assignment = _pinned(d, build_gamma_diamond(inst), a)
        return EscapeWitness(CLEAN_PERFECT, DIAMOND, assignment,
                             assignment is not None and _unrelated(d, a, blocked),
                             "" if assignment else "goal paths from a do not meet")

    s, k = report.witness.vertex, report.witness.rule_index
    for query in (build_beta_lk(inst, k), build_beta_rk(inst, k)):
        assignment = _pinned(d, query, s)
        if assignment is not None:
            return EscapeWitness(CLEAN_IMPERFECT, query.components[0].id, assignment,
                                 _unrelated(d, s, blocked), f"rule {k} breaks at {d.label(s)}")
    return EscapeWitness(CLEAN_IMPERFECT, None, None, False, f"rule {k} breaks at {d.label(s)}")
