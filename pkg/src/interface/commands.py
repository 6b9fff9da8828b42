"""
Thue2DLite Commands

The operations behind the command line. Every command returns a
CommandResult (exit code, JSON payload, human-readable lines) and writes its
files atomically; printing is left to the CLI.
"""
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.core.case_analysis import slot_vertices
from src.core.checks_registry import get_enumeration_check
from src.core.config import Config
from src.core.errors import NotClosedAtBound, UsageError
from src.core.ontology import ModelCheckFlags, Ontology, build_o_neg, build_o_neq, chase, check_model
from src.core.queries import (
    ConjunctiveQuery,
    build_phi,
    build_psi,
    component_images,
    evaluate,
    evaluate_union,
)
from src.core.structures import (
    ROOT_CONSTANT,
    CandidateEnumeration,
    QuotientBounded,
    SemigroupSource,
    Signature,
    Structure,
    build_canonical_finite,
    disjoint_union,
    iter_raw_structures,
    slot,
    walk,
)
from src.core.thue_core import (
    EquivalenceVerdict,
    SemigroupWitness,
    ThueInstance,
    decide_equiv_bounded,
    default_max_word_len,
    find_separating_semigroup,
    parse_thue,
)
from src.utils.text_formats import parse_onto, parse_struct, parse_ucq, write_cq, write_onto, write_struct

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_UNKNOWN = 2
EXIT_INPUT = 3
EXIT_USAGE = 64

VARIANTS = ("neq", "neg")


@dataclass
class CommandResult:
    exit_code: int
    payload: Dict[str, Any]
    lines: List[str] = field(default_factory=list)


def read_instance(path: str) -> ThueInstance:
    return parse_thue(Path(path).read_text(encoding="utf-8"), name=Path(path).stem)


def write_atomic(path: Path, text: str) -> None:
    """Write through a temporary file in the same directory and rename it into place"""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise UsageError(f"variant must be one of {', '.join(VARIANTS)}, got '{variant}'")


def compile_variant(inst: ThueInstance, variant: str, config: Config):
    """(ontology, combined query, slot count) of one reduction"""
    _check_variant(variant)
    if variant == "neq":
        return build_o_neq(inst), build_psi(inst), inst.n_neq
    return build_o_neg(inst), build_phi(inst, negate_t=config.phi_negate_T), inst.n_neg


def rewrite_verdict(inst: ThueInstance, config: Config) -> EquivalenceVerdict:
    max_word_len = config.max_word_len if config.max_word_len is not None else default_max_word_len(inst)
    longest_goal = max(len(inst.goal_left), len(inst.goal_right))
    if max_word_len < longest_goal:
        logger.warning("max_word_len=%d is shorter than the goal words of %s; raised to %d",
                       max_word_len, inst.name, longest_goal)
        max_word_len = longest_goal
    return decide_equiv_bounded(inst.goal_left, inst.goal_right, inst.rules, max_word_len, config.max_expansions)


@dataclass
class CanonicalCertificate:
    """A certified finite canonical structure and where it came from"""

    structure: Structure
    kind: str
    goal: tuple
    witness: Optional[SemigroupWitness] = None
    max_len: Optional[int] = None

    @property
    def separates_goal(self) -> bool:
        """The goal words lead from a to different vertices, so the instance is negative"""
        a = self.structure.constant(ROOT_CONSTANT)
        return walk(self.structure, a, self.goal[0]) != walk(self.structure, a, self.goal[1])

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"kind": self.kind, "vertices": len(self.structure)}
        if self.witness is not None:
            payload["witness"] = self.witness.to_dict()
        if self.max_len is not None:
            payload["max_len"] = self.max_len
        return payload


def certify_from_witness(inst: ThueInstance, witness: Optional[SemigroupWitness]) -> Optional[CanonicalCertificate]:
    if witness is None:
        return None
    d = build_canonical_finite(inst, SemigroupSource(witness))
    return CanonicalCertificate(d, "semigroup", (inst.goal_left, inst.goal_right), witness=witness)


def certify_from_quotient(inst: ThueInstance, config: Config) -> Optional[CanonicalCertificate]:
    try:
        d = build_canonical_finite(inst, QuotientBounded(config.quotient_max_len))
    except NotClosedAtBound as e:
        logger.debug("%s", e)
        return None
    return CanonicalCertificate(d, "quotient", (inst.goal_left, inst.goal_right), max_len=config.quotient_max_len)


def slot_union(inst: ThueInstance, d: Structure, count: int) -> Structure:
    sig = Signature.of(inst)
    return disjoint_union([d] + [slot(n, sig) for n in range(1, count + 1)])


# ------------------------------------------------------------------ compile

def cmd_compile(instance_path: str, variant: str, out_dir: str, config: Config) -> CommandResult:
    inst = read_instance(instance_path)
    ontology, query, count = compile_variant(inst, variant, config)
    out = Path(out_dir)
    manifest = {
        "instance": inst.name,
        "variant": variant,
        "k": inst.k,
        "m": inst.m,
        "n": count,
        "components": [c.id for c in query.components],
        "constants": len(ontology.constants),
        "axioms": len(ontology),
        "link_literals": len(query.links),
        "phi_negate_T": config.phi_negate_T if variant == "neg" else False,
        "chase": chase(ontology, config.chase_depth, inst.alphabet).to_dict(),
    }
    write_atomic(out / "ontology.onto", write_onto(ontology))
    write_atomic(out / "query.cq", write_cq(query))
    write_atomic(out / "manifest.json", dump_json(manifest))
    lines = [f"✅ compiled {inst.name} ({variant}): n={count}, {len(query.components)} components, "
             f"{len(ontology)} axioms -> {out}"]
    return CommandResult(EXIT_OK, manifest, lines)


# ------------------------------------------------------------------ rewrite

def cmd_rewrite(instance_path: str, config: Config) -> CommandResult:
    inst = read_instance(instance_path)
    verdict = rewrite_verdict(inst, config)
    payload = {"instance": inst.name, **verdict.to_dict()}
    if verdict.equivalent:
        payload["entailment"] = "positive instance: O_neq entails psi"
        lines = [f"✅ Equivalent in {len(verdict.path)} steps"]
        lines += [f"   {step}" for step in payload["path"]["steps"]]
        return CommandResult(EXIT_OK, payload, lines)
    return CommandResult(EXIT_UNKNOWN, payload, [f"⏭ Unknown: {verdict.exhausted} exhausted after {verdict.expansions} expansions"])


# ------------------------------------------------------------- countermodel

def _component_report(d: Structure, q: ConjunctiveQuery, canonical: set) -> List[Dict[str, Any]]:
    images = component_images(d, q)
    report = []
    for component in q.components:
        vertices = images.get(component.id, [])
        report.append({
            "id": component.id,
            "images": [d.label(v) for v in vertices],
            "in_canonical": [d.label(v) for v in vertices if v in canonical],
            "in_slots": [d.label(v) for v in vertices if v not in canonical],
        })
    return report


def cmd_countermodel(instance_path: str, variant: str, out_dir: str, config: Config) -> CommandResult:
    _check_variant(variant)
    inst = read_instance(instance_path)
    certificate = certify_from_witness(inst, find_separating_semigroup(inst, config.max_semigroup_order))
    if certificate is None:
        certificate = certify_from_quotient(inst, config)
        if certificate is not None and not certificate.separates_goal:
            certificate = None
    if certificate is None:
        payload = {
            "instance": inst.name,
            "variant": variant,
            "found": False,
            "reason": f"no separating semigroup up to order {config.max_semigroup_order} and no separating "
                      f"finite quotient at max_len {config.quotient_max_len}",
        }
        return CommandResult(EXIT_UNKNOWN, payload, ["⏭ no countermodel within bounds"])

    ontology, query, count = compile_variant(inst, variant, config)
    model = slot_union(inst, certificate.structure, count)
    model_report = check_model(model, ontology, ModelCheckFlags(una=True, pcwa=True))
    assignment = evaluate(model, query)
    canonical = set(range(len(certificate.structure)))
    components = _component_report(model, query, canonical)
    blocked = slot_vertices(model, count, include_c=(variant == "neg"))
    payload = {
        "instance": inst.name,
        "variant": variant,
        "found": True,
        "certificate": certificate.to_dict(),
        "n": count,
        "vertices": len(model),
        "model_check": model_report.to_dict(),
        "query_satisfied": assignment is not None,
        "components": components,
        "components_without_canonical_image": [c["id"] for c in components if not c["in_canonical"]],
        "slot_capacity": count,
        "component_count": len(query.components),
        "slot_vertices": sorted(model.label(v) for v in blocked),
    }
    verified = model_report.ok and assignment is None
    payload["verified"] = verified
    if not verified:
        return CommandResult(EXIT_NEGATIVE, payload, ["❌ candidate countermodel failed verification"])

    out = Path(out_dir)
    write_atomic(out / "model.struct", write_struct(model))
    write_atomic(out / "report.json", dump_json(payload))
    lines = [
        f"✅ countermodel for {inst.name} ({variant}): {len(model)} vertices from a {certificate.kind} certificate",
        f"   {len(query.components)} components, {count} slots; "
        f"no canonical image for {', '.join(payload['components_without_canonical_image']) or 'none'}",
    ]
    return CommandResult(EXIT_OK, payload, lines)


# --------------------------------------------------------------------- eval

def cmd_eval(query_path: str, model_path: str, config: Config, ontology_path: Optional[str] = None) -> CommandResult:
    union = parse_ucq(Path(query_path).read_text(encoding="utf-8"))
    model = parse_struct(Path(model_path).read_text(encoding="utf-8"))
    payload: Dict[str, Any] = {"disjuncts": len(union)}
    lines: List[str] = []
    if ontology_path:
        ontology = parse_onto(Path(ontology_path).read_text(encoding="utf-8"))
        report = check_model(model, ontology, ModelCheckFlags(una=config.una, pcwa=config.pcwa))
        payload["model_check"] = report.to_dict()
        lines.append(("✅" if report.ok else "❌") + f" model check: {len(report.violations)} violations")
    hit = evaluate_union(model, union)
    payload["satisfied"] = hit is not None
    if hit is None:
        lines.append("❌ query not satisfied")
        return CommandResult(EXIT_NEGATIVE, payload, lines)
    index, assignment = hit
    payload["disjunct"] = index
    payload["assignment"] = {var: model.label(v) for var, v in assignment.items()}
    lines.append(f"✅ satisfied by disjunct {index}")
    return CommandResult(EXIT_OK, payload, lines)


def cmd_check_model(model_path: str, ontology_path: str, config: Config) -> CommandResult:
    model = parse_struct(Path(model_path).read_text(encoding="utf-8"))
    ontology: Ontology = parse_onto(Path(ontology_path).read_text(encoding="utf-8"))
    report = check_model(model, ontology, ModelCheckFlags(una=config.una, pcwa=config.pcwa))
    lines = [("✅ model" if report.ok else "❌ not a model") + f" (una={config.una}, pcwa={config.pcwa})"]
    lines += [f"   {v.kind}: {v.detail}" for v in report.violations]
    return CommandResult(EXIT_OK if report.ok else EXIT_NEGATIVE, report.to_dict(), lines)


# ---------------------------------------------------------------- enumerate

MAX_REPORTED_VIOLATIONS = 10

# what the enumeration covers of the T relation
T_SCOPE = {False: "fixed to {(a,a)}", True: "all relations"}


def cmd_enumerate(instance_path: str, max_vertices: int, check: str, config: Config,
                  vary_t: bool = False) -> CommandResult:
    info = get_enumeration_check(check)
    inst = read_instance(instance_path)
    sig = Signature.of(inst)
    predicate = info["factory"](inst)
    stream = CandidateEnumeration(sig, max_vertices, config.enum_ceiling, vary_t)
    structures = stream if info["candidates_only"] else iter_raw_structures(sig, max_vertices, vary_t)

    examined = 0
    violations = []
    violation_count = 0
    for d in structures:
        examined += 1
        message = predicate(d)
        if message is not None:
            violation_count += 1
            if len(violations) < MAX_REPORTED_VIOLATIONS:
                violations.append({"message": message, "structure": write_struct(d)})
    payload = {
        "instance": inst.name,
        "check": check,
        "max_vertices": max_vertices,
        "vary_t": vary_t,
        "t_relation": T_SCOPE[vary_t],
        "examined": examined,
        "raw_structures": stream.examined if info["candidates_only"] else examined,
        "violations": violation_count,
        "examples": violations,
    }
    mark = "✅" if violation_count == 0 else "❌"
    lines = [f"{mark} {check}: {examined} structures (T {T_SCOPE[vary_t]}), {violation_count} violations"]
    return CommandResult(EXIT_OK if violation_count == 0 else EXIT_NEGATIVE, payload, lines)
