"""
The verify suite on the fixture corpus
"""
import pytest

from src.core.checks_registry import get_verify_suite
from src.core.structures import Signature
from src.core.task_manager import COMPLETED
from src.data.fixtures import FIXTURES, NEGATIVE, POSITIVE, UNRESOLVED, fixture_path, load_fixture
import src.interface.verification as verification
from src.interface.verification import (
    FAIL,
    PASS,
    SKIPPED,
    UNKNOWN,
    check_end_to_end_phi,
    check_imperfect_implies_gamma,
    cmd_verify,
    enumeration_size,
    one_letter_sides,
    prepare_context,
    run_verification,
)

STATUS = {POSITIVE: "positive", NEGATIVE: "negative", UNRESOLVED: UNKNOWN}

# checks that need a certified finite canonical structure
CERTIFIED_CHECKS = {
    "canonical-perfect", "canonical-rejects-gamma-neq", "canonical-rejects-gamma-neg", "canonical-diamond",
    "model-o-neq", "model-o-neg", "canonical-unions-diamond", "end-to-end-psi", "end-to-end-phi",
    "escape-witnesses",
}

EXPECTED_SKIPS = {
    "p1_idempotent": {"end-to-end-phi"},
    "p2_semilattice": {"end-to-end-phi"},
    "p3_commuting": CERTIFIED_CHECKS,
    "p4_cyclic": {"end-to-end-phi"},
    "p5_absorbing": set(),
    "n1_free": {"escape-witnesses"},
    "n2_parity": {"escape-witnesses"},
    "n3_commuting": {"escape-witnesses"},
    "u1_period_four": CERTIFIED_CHECKS,
    "u2_period_four": CERTIFIED_CHECKS,
}


def verdicts(report):
    return {record.name: record.verdict for record in report.records}


@pytest.mark.parametrize("name", list(FIXTURES))
def test_verify_passes(name, config):
    result = cmd_verify(str(fixture_path(name)), config)
    assert result.exit_code == 0, result.lines
    assert result.payload["status"] == STATUS[FIXTURES[name]["expected"]]
    assert [c["name"] for c in result.payload["checks"]] == get_verify_suite()
    assert result.payload["summary"]["fail"] == 0
    skipped = {c["name"] for c in result.payload["checks"] if c["verdict"] == SKIPPED}
    assert skipped == EXPECTED_SKIPS[name]
    assert {c["task"] for c in result.payload["checks"]} == {COMPLETED}


def test_positive_instance_checks(absorbing, config):
    found = verdicts(run_verification(absorbing, config))
    assert set(found.values()) == {PASS}


def test_one_letter_side_skips_phi(idempotent, config):
    assert one_letter_sides(idempotent) == ["r1"]
    outcome = check_end_to_end_phi(prepare_context(idempotent, config))
    assert outcome["verdict"] == SKIPPED
    assert outcome["payload"]["one_letter_sides"] == ["r1"]


def test_negative_instance_checks(free_pair, config):
    report = run_verification(free_pair, config)
    found = verdicts(report)
    assert found["escape-witnesses"] == SKIPPED
    assert found["end-to-end-psi"] == PASS
    assert found["end-to-end-phi"] == PASS
    phi = next(r for r in report.records if r.name == "end-to-end-phi")
    assert phi.payload["oracle_confirms"]


def test_unresolved_instance(config):
    report = run_verification(load_fixture("u1_period_four"), config)
    assert report.status == UNKNOWN
    assert report.ok
    found = verdicts(report)
    assert found["canonical-perfect"] == SKIPPED
    assert found["well-of-positivity"] == PASS
    assert found["pcwa-extra-fact"] == PASS


def test_imperfect_structures_satisfy_gamma(idempotent, config):
    outcome = check_imperfect_implies_gamma(prepare_context(idempotent, config))
    assert outcome["verdict"] == PASS
    assert outcome["payload"]["max_vertices"] == 3
    assert outcome["payload"]["candidates"] > 0


def test_enumeration_size_respects_budget(config):
    assert enumeration_size(Signature(("a",)), config) == 3
    assert enumeration_size(Signature(("a", "b")), config) == 2
    assert enumeration_size(Signature(("a",)), config.updated(enum_budget=1)) == 0


def test_report_serialises(free_pair, config):
    payload = run_verification(free_pair, config).to_dict()
    assert payload["ok"]
    assert payload["config"]["max_semigroup_order"] == 3
    assert all(set(check) == {"name", "property", "verdict", "detail", "payload", "seconds", "task"}
               for check in payload["checks"])
    assert FAIL not in {check["verdict"] for check in payload["checks"]}


def test_semigroup_search_runs_once_per_context(free_pair, config, monkeypatch):
    calls = []
    search = verification.find_separating_semigroup

    def counting(inst, max_order):
        calls.append(inst.name)
        return search(inst, max_order)

    monkeypatch.setattr(verification, "find_separating_semigroup", counting)
    ctx = prepare_context(free_pair, config)
    assert calls == ["n1_free"]
    assert ctx.certificate.kind == "semigroup"
    assert ctx.certificate.witness == ctx.witness
