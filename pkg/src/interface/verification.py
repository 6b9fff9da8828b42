"""
Verification Suite for Thue2DLite

Runs every check of the verify suite against one instance and gathers the
records into a VerificationReport. The shared inputs (rewrite verdict,
separating semigroup, certified canonical structure and its slot unions) are
prepared once; the checks themselves are independent and fan out over the
TaskManager pool.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.core.case_analysis import neg_escape, neq_escape
from src.core.checks_registry import ENUMERATION_CHECKS, VERIFY_CHECKS, get_verify_function, get_verify_suite
from src.core.config import Config
from src.core.errors import Thue2DLiteError
from src.core.ontology import ModelCheckFlags, Ontology, build_o_neg, build_o_neq, build_omega_n, check_model
from src.core.queries import (
    DIAMOND,
    ConjunctiveQuery,
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
    evaluate,
    evaluate_union,
    failing_literals,
    oracle_assignments,
    oracle_satisfiable,
)
from src.core.structures import (
    ROOT_CONSTANT,
    TYPE_RELATION,
    CandidateEnumeration,
    Signature,
    Structure,
    is_candidate,
    is_perfect,
    raw_structure_count,
    slot,
    slot_constants,
    well_of_positivity,
)
from src.core.task_manager import COMPLETED, TaskManager
from src.core.thue_core import EquivalenceVerdict, SemigroupWitness, ThueInstance, find_separating_semigroup
from src.interface.commands import (
    EXIT_NEGATIVE,
    EXIT_OK,
    CanonicalCertificate,
    CommandResult,
    certify_from_quotient,
    certify_from_witness,
    read_instance,
    rewrite_verdict,
    slot_union,
)

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"

POSITIVE = "positive"
NEGATIVE = "negative"
UNKNOWN = "unknown"


@dataclass
class CheckRecord:
    name: str
    property: str
    verdict: str
    detail: str = ""
    payload: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0
    task: str = COMPLETED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "property": self.property,
            "verdict": self.verdict,
            "detail": self.detail,
            "payload": self.payload,
            "seconds": round(self.seconds, 4),
            "task": self.task,
        }


@dataclass
class VerificationReport:
    instance: str
    status: str
    records: List[CheckRecord]
    config: Dict[str, Any]

    def summary(self) -> Dict[str, int]:
        counts = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for record in self.records:
            counts[record.verdict] += 1
        return counts

    @property
    def ok(self) -> bool:
        return all(record.verdict != FAIL for record in self.records)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "instance": self.instance,
            "status": self.status,
            "ok": self.ok,
            "summary": self.summary(),
            "checks": [record.to_dict() for record in self.records],
            "config": self.config,
        }


@dataclass
class VerificationContext:
    """Inputs shared by all checks, built sequentially before the fan-out"""

    inst: ThueInstance
    config: Config
    verdict: EquivalenceVerdict
    witness: Optional[SemigroupWitness]
    certificate: Optional[CanonicalCertificate]
    models: Dict[str, Structure] = field(default_factory=dict)

    @property
    def sig(self) -> Signature:
        return Signature.of(self.inst)

    @property
    def status(self) -> str:
        if self.verdict.equivalent:
            return POSITIVE
        if self.witness is not None or (self.certificate is not None and self.certificate.separates_goal):
            return NEGATIVE
        return UNKNOWN

    def psi(self) -> ConjunctiveQuery:
        return build_psi(self.inst)

    def phi(self) -> ConjunctiveQuery:
        return build_phi(self.inst, negate_t=self.config.phi_negate_T)


def prepare_context(inst: ThueInstance, config: Config) -> VerificationContext:
    verdict = rewrite_verdict(inst, config)
    witness = None if verdict.equivalent else find_separating_semigroup(inst, config.max_semigroup_order)
    if verdict.equivalent:
        certificate = certify_from_quotient(inst, config)
    else:
        certificate = certify_from_witness(inst, witness) or certify_from_quotient(inst, config)
    context = VerificationContext(inst, config, verdict, witness, certificate)
    if certificate is not None:
        context.models["neq"] = slot_union(inst, certificate.structure, inst.n_neq)
        context.models["neg"] = slot_union(inst, certificate.structure, inst.n_neg)
    logger.debug("verify context for %s: status=%s certificate=%s", inst.name, context.status,
                 certificate.kind if certificate else None)
    return context


def _outcome(verdict: str, detail: str = "", **payload: Any) -> Dict[str, Any]:
    return {"verdict": verdict, "detail": detail, "payload": payload}


def _no_certificate(ctx: VerificationContext) -> Dict[str, Any]:
    return _outcome(SKIPPED, f"no finite canonical structure certified (max_order={ctx.config.max_semigroup_order}, "
                             f"quotient_max_len={ctx.config.quotient_max_len})")


# --------------------------------------------------------------- the checks

def one_letter_sides(inst: ThueInstance) -> List[str]:
    """Rule sides of length one, e.g. ['r1'] for a rule aa = a"""
    sides = []
    for k, rule in enumerate(inst.rules, start=1):
        if len(rule.left) == 1:
            sides.append(f"l{k}")
        if len(rule.right) == 1:
            sides.append(f"r{k}")
    return sides


def _slot_families(inst: ThueInstance) -> List[tuple]:
    """
    (family, query, expected to map, distinguished must land on b) for every
    generated query. β_[l,k] (β_[r,k]) maps into a slot only when l_k (r_k)
    has at least two letters: with an empty prefix the negated edge starts at
    x, and every slot vertex has loops.
    """
    families = []
    for k in range(1, inst.k + 1):
        families.append(("gamma_k", build_gamma_k(inst, k), True, True))
    for symbol in inst.alphabet:
        families.append(("gamma_R", build_gamma_r(inst, symbol), True, True))
    families.append(("gamma_diamond", build_gamma_diamond(inst), True, True))
    for k, rule in enumerate(inst.rules, start=1):
        families.append(("beta_l", build_beta_lk(inst, k), len(rule.left) > 1, False))
        families.append(("beta_r", build_beta_rk(inst, k), len(rule.right) > 1, False))
    for symbol in inst.alphabet:
        families.append(("beta_R", build_beta_r(inst, symbol), True, False))
        families.append(("beta_Rbar", build_beta_rbar(inst, symbol), True, False))
    return families


def check_slot_observations(ctx: VerificationContext) -> Dict[str, Any]:
    gadget = slot(1, ctx.sig)
    b = gadget.constant(slot_constants(1)[0])
    results = []
    failures = []
    for family, query, expected, on_b in _slot_families(ctx.inst):
        head = query.components[0].distinguished
        heads = {assignment[head] for assignment in oracle_assignments(gadget, query)}
        ok = bool(heads) == expected and (not heads or not on_b or heads == {b})
        entry = {"family": family, "component": query.components[0].id, "maps": bool(heads),
                 "distinguished_images": sorted(gadget.label(v) for v in heads)}
        results.append(entry)
        if not ok:
            failures.append(entry)
    if failures:
        return _outcome(FAIL, f"{len(failures)} queries do not map into the slot as expected", failures=failures)
    return _outcome(PASS, f"{len(results)} queries checked on the slot", queries=results)


def check_canonical_perfect(ctx: VerificationContext) -> Dict[str, Any]:
    if ctx.certificate is None:
        return _no_certificate(ctx)
    d = ctx.certificate.structure
    candidate = is_candidate(d)
    report = is_perfect(d, ctx.inst)
    verdict = PASS if candidate.ok and report.perfect else FAIL
    return _outcome(verdict, f"{ctx.certificate.kind} certificate with {len(d)} vertices",
                    candidate=candidate.to_dict(), perfection=report.to_dict())


def _rejects(ctx: VerificationContext, union) -> Dict[str, Any]:
    if ctx.certificate is None:
        return _no_certificate(ctx)
    hit = evaluate_union(ctx.certificate.structure, union)
    if hit is None:
        return _outcome(PASS, f"none of {len(union)} disjuncts holds")
    index, assignment = hit
    return _outcome(FAIL, f"disjunct {union.disjuncts[index].name} holds", assignment=assignment)


def check_canonical_rejects_gamma_neq(ctx: VerificationContext) -> Dict[str, Any]:
    return _rejects(ctx, build_gamma_neq_union(ctx.inst))


def check_canonical_rejects_gamma_neg(ctx: VerificationContext) -> Dict[str, Any]:
    return _rejects(ctx, build_gamma_neg_union(ctx.inst))


def check_canonical_diamond(ctx: VerificationContext) -> Dict[str, Any]:
    if ctx.certificate is None:
        return _no_certificate(ctx)
    if ctx.status == UNKNOWN:
        return _outcome(SKIPPED, "instance neither rewritten nor separated within bounds")
    d = ctx.certificate.structure
    a = d.constant(ROOT_CONSTANT)
    holds = evaluate(d, build_gamma_diamond(ctx.inst), {"x": a}) is not None
    expected = ctx.status == POSITIVE
    verdict = PASS if holds == expected else FAIL
    return _outcome(verdict, f"diamond {'holds' if holds else 'fails'} at a on a {ctx.status} instance")


def _model_check(ctx: VerificationContext, variant: str, ontology: Ontology) -> Dict[str, Any]:
    if ctx.certificate is None:
        return _no_certificate(ctx)
    report = check_model(ctx.models[variant], ontology, ModelCheckFlags(una=True, pcwa=True))
    return _outcome(PASS if report.ok else FAIL, f"{len(ctx.models[variant])} vertices", report=report.to_dict())


def check_model_o_neq(ctx: VerificationContext) -> Dict[str, Any]:
    return _model_check(ctx, "neq", build_o_neq(ctx.inst))


def check_model_o_neg(ctx: VerificationContext) -> Dict[str, Any]:
    return _model_check(ctx, "neg", build_o_neg(ctx.inst))


def enumeration_size(sig: Signature, config: Config) -> int:
    """Largest vertex count whose raw enumeration fits the budget, or 0"""
    size = 0
    for n in range(1, min(config.enum_max_vertices, config.enum_ceiling) + 1):
        if raw_structure_count(sig, n) > config.enum_budget:
            break
        size = n
    return size


def check_imperfect_implies_gamma(ctx: VerificationContext) -> Dict[str, Any]:
    size = enumeration_size(ctx.sig, ctx.config)
    if size == 0:
        return _outcome(SKIPPED, f"even one-vertex structures exceed enum_budget={ctx.config.enum_budget}")
    predicates = {name: ENUMERATION_CHECKS[name]["factory"](ctx.inst)
                  for name in ("imperfect-implies-gamma-neq", "imperfect-implies-gamma-neg")}
    stream = CandidateEnumeration(ctx.sig, size, ctx.config.enum_ceiling)
    candidates = 0
    violations: Dict[str, List[str]] = {name: [] for name in predicates}
    for d in stream:
        candidates += 1
        for name, predicate in predicates.items():
            message = predicate(d)
            if message is not None:
                violations[name].append(message)
    failed = {name: found[:5] for name, found in violations.items() if found}
    verdict = FAIL if failed else PASS
    return _outcome(verdict, f"{candidates} candidate structures with at most {size} vertices",
                    max_vertices=size, examined=stream.examined, candidates=candidates, violations=failed)


def _union_via_diamond(d: Structure, union) -> Dict[str, Any]:
    hit = evaluate_union(d, union)
    return {"holds": hit is not None,
            "disjunct": union.disjuncts[hit[0]].components[0].id if hit else None}


def check_canonical_unions_diamond(ctx: VerificationContext) -> Dict[str, Any]:
    if ctx.certificate is None:
        return _no_certificate(ctx)
    if ctx.status == UNKNOWN:
        return _outcome(SKIPPED, "instance neither rewritten nor separated within bounds")
    d = ctx.certificate.structure
    psi = _union_via_diamond(d, build_psi_union(ctx.inst))
    phi = _union_via_diamond(d, build_phi_union(ctx.inst))
    if ctx.status == POSITIVE:
        ok = all(r["holds"] and r["disjunct"] == DIAMOND for r in (psi, phi))
    else:
        ok = not psi["holds"] and not phi["holds"]
    return _outcome(PASS if ok else FAIL, f"{ctx.status} instance", Psi=psi, Phi=phi)


def _end_to_end(ctx: VerificationContext, variant: str, query: ConjunctiveQuery) -> Dict[str, Any]:
    if ctx.certificate is None:
        return _no_certificate(ctx)
    if ctx.status == UNKNOWN:
        return _outcome(SKIPPED, "instance neither rewritten nor separated within bounds")
    model = ctx.models[variant]
    short = one_letter_sides(ctx.inst)
    if ctx.status == POSITIVE and variant == "neg" and short:
        return _outcome(SKIPPED, f"one-letter rule sides {', '.join(short)}: their beta components have no "
                                 f"slot image, so phi is not expected to hold", one_letter_sides=short)
    assignment = evaluate(model, query)
    if ctx.status == POSITIVE:
        if assignment is None:
            return _outcome(FAIL, f"{query.name} fails on the slot union of a positive instance")
        broken = failing_literals(model, query, assignment)
        verdict = FAIL if broken else PASS
        return _outcome(verdict, f"{query.name} holds", broken=[str(lit) for lit in broken],
                        assignment={var: model.label(v) for var, v in sorted(assignment.items())})
    if assignment is not None:
        return _outcome(FAIL, f"{query.name} holds on the slot union of a negative instance",
                        assignment={var: model.label(v) for var, v in sorted(assignment.items())})
    confirmed = not oracle_satisfiable(model, query, by_component=True)
    return _outcome(PASS if confirmed else FAIL, f"{query.name} fails on {len(model)} vertices",
                    oracle_confirms=confirmed)


def check_end_to_end_psi(ctx: VerificationContext) -> Dict[str, Any]:
    return _end_to_end(ctx, "neq", ctx.psi())


def check_end_to_end_phi(ctx: VerificationContext) -> Dict[str, Any]:
    return _end_to_end(ctx, "neg", ctx.phi())


def _inner_vertex(ctx: VerificationContext, model: Structure) -> Optional[int]:
    """A canonical vertex other than a; the canonical part comes first in the slot union"""
    a = model.constant(ROOT_CONSTANT)
    for vertex in range(len(ctx.certificate.structure)):
        if vertex != a:
            return vertex
    return None


def check_escape_witnesses(ctx: VerificationContext) -> Dict[str, Any]:
    if ctx.certificate is None:
        return _no_certificate(ctx)
    if ctx.status != POSITIVE:
        return _outcome(SKIPPED, "escape witnesses exist only for positive instances")
    scenarios = [("neq", ctx.models["neq"], neq_escape), ("neg", ctx.models["neg"], neg_escape)]
    s = _inner_vertex(ctx, ctx.models["neq"])
    if s is not None and ctx.inst.alphabet:
        symbol = ctx.inst.alphabet[0]
        b1, c1 = slot_constants(1)
        dirty = ctx.models["neq"].with_facts([(symbol, (s, ctx.models["neq"].constant(b1)))])
        soiled = ctx.models["neg"].with_facts([(symbol, (s, ctx.models["neg"].constant(c1)))])
        scenarios += [("neq", dirty, neq_escape), ("neg", soiled, neg_escape)]
    results = []
    for variant, model, finder in scenarios:
        witness = finder(model, ctx.inst)
        results.append({"variant": variant, **witness.to_dict()})
    ok = all(r["assignment"] is not None and r["escapes"] for r in results)
    return _outcome(PASS if ok else FAIL, ", ".join(r["case"] for r in results), scenarios=results)


def check_well_of_positivity(ctx: VerificationContext) -> Dict[str, Any]:
    ontology = build_o_neq(ctx.inst)
    well = well_of_positivity(ctx.sig, ontology.constants)
    without_una = check_model(well, ontology, ModelCheckFlags(una=False, pcwa=False))
    with_una = check_model(well, ontology, ModelCheckFlags(una=True, pcwa=False))
    psi_holds = evaluate(well, ctx.psi()) is not None
    gamma_holds = evaluate_union(well, build_gamma_neq_union(ctx.inst)) is not None
    ok = without_una.ok and not with_una.ok and not psi_holds and not gamma_holds
    return _outcome(PASS if ok else FAIL, "one vertex interprets every constant",
                    model_without_una=without_una.ok, model_with_una=with_una.ok,
                    psi_holds=psi_holds, gamma_neq_holds=gamma_holds)


def check_pcwa_extra_fact(ctx: VerificationContext) -> Dict[str, Any]:
    b1, c1 = slot_constants(1)
    ontology = Ontology((b1, c1), tuple(build_omega_n(1, ctx.sig)))
    gadget = slot(1, ctx.sig)
    extra = (TYPE_RELATION, (gadget.constant(b1), gadget.constant(c1)))
    augmented = gadget.with_facts([extra])
    plain = check_model(gadget, ontology, ModelCheckFlags(una=True, pcwa=True)).ok
    with_pcwa = check_model(augmented, ontology, ModelCheckFlags(una=True, pcwa=True)).ok
    without_pcwa = check_model(augmented, ontology, ModelCheckFlags(una=True, pcwa=False)).ok
    ok = plain and not with_pcwa and without_pcwa
    return _outcome(PASS if ok else FAIL, f"slot with extra fact T({b1},{c1})",
                    slot_model=plain, augmented_with_pcwa=with_pcwa, augmented_without_pcwa=without_pcwa)


# ------------------------------------------------------------------- runner

def _run_check(name: str, ctx: VerificationContext) -> CheckRecord:
    try:
        outcome = get_verify_function(name)(ctx)
    except Thue2DLiteError as e:
        outcome = _outcome(FAIL, f"{type(e).__name__}: {e}")
    return CheckRecord(name, VERIFY_CHECKS[name]["property"], outcome["verdict"], outcome["detail"],
                       outcome["payload"])


def run_verification(inst: ThueInstance, config: Config) -> VerificationReport:
    ctx = prepare_context(inst, config)
    suite = get_verify_suite()
    records = []
    with TaskManager(max_workers=config.workers) as manager:
        for name in suite:
            manager.create_subtask(name, _run_check, name, ctx)
        results = manager.execute_parallel_tasks(suite)
        for name in suite:
            result = results[name]
            state = manager.get_task_status(name)
            if not isinstance(result, CheckRecord):
                # the check itself raised something other than a Thue2DLiteError
                result = CheckRecord(name, VERIFY_CHECKS[name]["property"], FAIL, state["error"] or "")
            result.seconds = state["seconds"]
            result.task = state["status"]
            records.append(result)
    return VerificationReport(inst.name, ctx.status, records, config.to_dict())


def cmd_verify(instance_path: str, config: Config) -> CommandResult:
    inst = read_instance(instance_path)
    report = run_verification(inst, config)
    marks = {PASS: "✅", FAIL: "❌", SKIPPED: "⏭"}
    lines = [f"{marks[r.verdict]} {r.name}: {r.detail}" for r in report.records]
    counts = report.summary()
    lines.append(f"{inst.name} ({report.status}): {counts[PASS]} passed, {counts[FAIL]} failed, "
                 f"{counts[SKIPPED]} skipped")
    return CommandResult(EXIT_OK if report.ok else EXIT_NEGATIVE, report.to_dict(), lines)
