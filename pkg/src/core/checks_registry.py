"""
Checks Registry for Thue2DLite
Central registry of the verify suite and of the properties cmd_enumerate can
run over exhaustively enumerated structures.
"""

from typing import Any, Callable, Dict, List, Optional

from .errors import UsageError
from .ontology import ModelCheckFlags, build_core_ontology, check_model
from .queries import build_gamma_neg_union, build_gamma_neq_union, evaluate_union
from .structures import Structure, is_candidate, is_perfect
from .thue_core import ThueInstance

# Structure-level properties; "factory" receives the instance once per run and
# returns a predicate giving None or a violation message per structure
Predicate = Callable[[Structure], Optional[str]]


def _imperfect_implies(union_builder: Callable, label: str) -> Callable[[ThueInstance], Predicate]:
    def factory(inst: ThueInstance) -> Predicate:
        union = union_builder(inst)

        def predicate(d: Structure) -> Optional[str]:
            report = is_perfect(d, inst)
            if report.perfect or evaluate_union(d, union) is not None:
                return None
            w = report.witness
            return f"imperfect at vertex {w.vertex} (rule {w.rule_index}) but {label} fails"
        return predicate
    return factory


def _ontology_iff_candidate(inst: ThueInstance) -> Predicate:
    core = build_core_ontology(inst)
    flags = ModelCheckFlags(una=False, pcwa=False)

    def predicate(d: Structure) -> Optional[str]:
        model = check_model(d, core, flags).ok
        candidate = is_candidate(d).ok
        if model == candidate:
            return None
        return f"check_model says {model}, is_candidate says {candidate}"
    return predicate


ENUMERATION_CHECKS: Dict[str, Dict[str, Any]] = {
    "imperfect-implies-gamma-neq": {
        "description": "every imperfect candidate structure satisfies Gamma_neq",
        "factory": _imperfect_implies(build_gamma_neq_union, "Gamma_neq"),
        "candidates_only": True,
    },
    "imperfect-implies-gamma-neg": {
        "description": "every imperfect candidate structure satisfies Gamma_neg",
        "factory": _imperfect_implies(build_gamma_neg_union, "Gamma_neg"),
        "candidates_only": True,
    },
    "ontology-iff-candidate": {
        "description": "a structure is a model of the core ontology exactly when it is a candidate structure",
        "factory": _ontology_iff_candidate,
        "candidates_only": False,
    },
}

# The verify suite, in report order; "function" names a callable in "module"
VERIFY_CHECKS: Dict[str, Dict[str, Any]] = {
    "slot-observations": {
        "property": "every query family maps into a slot; gamma-families only with the distinguished variable on b",
        "function": "check_slot_observations",
    },
    "canonical-perfect": {
        "property": "the certified canonical structure is a perfect candidate structure",
        "function": "check_canonical_perfect",
    },
    "canonical-rejects-gamma-neq": {
        "property": "the canonical structure does not satisfy Gamma_neq",
        "function": "check_canonical_rejects_gamma_neq",
    },
    "canonical-rejects-gamma-neg": {
        "property": "the canonical structure does not satisfy Gamma_neg",
        "function": "check_canonical_rejects_gamma_neg",
    },
    "canonical-diamond": {
        "property": "gamma_diamond holds on the canonical structure exactly for positive instances",
        "function": "check_canonical_diamond",
    },
    "model-o-neq": {
        "property": "canonical structure plus slots is a model of O_neq under UNA and PCWA",
        "function": "check_model_o_neq",
    },
    "model-o-neg": {
        "property": "canonical structure plus slots is a model of O_neg under UNA and PCWA",
        "function": "check_model_o_neg",
    },
    "imperfect-implies-gamma": {
        "property": "every enumerated imperfect candidate structure satisfies Gamma_neq and Gamma_neg",
        "function": "check_imperfect_implies_gamma",
    },
    "canonical-unions-diamond": {
        "property": "for positive instances Psi and Phi hold on the canonical structure via the diamond disjunct",
        "function": "check_canonical_unions_diamond",
    },
    "end-to-end-psi": {
        "property": "psi holds on the slot union of positive instances and fails on that of negative ones",
        "function": "check_end_to_end_psi",
    },
    "end-to-end-phi": {
        "property": "phi holds on the slot union of positive instances and fails on that of negative ones",
        "function": "check_end_to_end_phi",
    },
    "escape-witnesses": {
        "property": "models of positive instances have a component placed off the slots (dirty/tidy, soiled/clean cases)",
        "function": "check_escape_witnesses",
    },
    "well-of-positivity": {
        "property": "the one-vertex structure models the ontology only without UNA and satisfies no inequality query",
        "function": "check_well_of_positivity",
    },
    "pcwa-extra-fact": {
        "property": "a slot with one extra constant-to-constant fact is rejected exactly under PCWA",
        "function": "check_pcwa_extra_fact",
    },
}

VERIFY_MODULE = "src.interface.verification"


def get_enumeration_checks() -> List[str]:
    return list(ENUMERATION_CHECKS)


def get_enumeration_check(name: str) -> Dict[str, Any]:
    if name not in ENUMERATION_CHECKS:
        raise UsageError(f"unknown check '{name}'; choose from {', '.join(ENUMERATION_CHECKS)}")
    return ENUMERATION_CHECKS[name]


def get_verify_suite() -> List[str]:
    return list(VERIFY_CHECKS)


def get_verify_function(name: str) -> Callable:
    """Resolve a suite entry to its implementation"""
    import importlib
    info = VERIFY_CHECKS[name]
    module = importlib.import_module(VERIFY_MODULE)
    return getattr(module, info["function"])
