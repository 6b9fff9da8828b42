"""
Thue2DLite Fixture Corpus

Small Thue instances shipped under fixtures/: positive ones with short rewrite
paths, negative ones with separating semigroups of order at most 3, and
negative ones that no search resolves at the default bounds.
"""
from pathlib import Path
from typing import Dict, List

from src.core.thue_core import ThueInstance, parse_thue

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "fixtures"

POSITIVE = "positive"
NEGATIVE = "negative"
UNRESOLVED = "unresolved"

# finite_quotient: the bounded quotient certifies at the default quotient_max_len
FIXTURES: Dict[str, Dict] = {
    "p1_idempotent": {"expected": POSITIVE, "finite_quotient": True, "quotient_size": 2},
    "p2_semilattice": {"expected": POSITIVE, "finite_quotient": True, "quotient_size": 4},
    "p3_commuting": {"expected": POSITIVE, "finite_quotient": False},
    "p4_cyclic": {"expected": POSITIVE, "finite_quotient": True, "quotient_size": 3},
    "p5_absorbing": {"expected": POSITIVE, "finite_quotient": True, "quotient_size": 3},
    "n1_free": {"expected": NEGATIVE, "finite_quotient": False, "witness_order": 2},
    "n2_parity": {"expected": NEGATIVE, "finite_quotient": True, "quotient_size": 3, "witness_order": 2},
    "n3_commuting": {"expected": NEGATIVE, "finite_quotient": False, "witness_order": 2},
    "u1_period_four": {"expected": UNRESOLVED, "finite_quotient": False},
    "u2_period_four": {"expected": UNRESOLVED, "finite_quotient": False},
}


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture '{name}'")
    return FIXTURE_DIR / f"{name}.thue"


def load_fixture(name: str) -> ThueInstance:
    path = fixture_path(name)
    return parse_thue(path.read_text(encoding="utf-8"), name=name)


def fixture_names(expected: str = None) -> List[str]:
    """Fixture names in corpus order, optionally filtered by expected verdict"""
    return [name for name, info in FIXTURES.items() if expected is None or info["expected"] == expected]


def load_all() -> Dict[str, ThueInstance]:
    return {name: load_fixture(name) for name in FIXTURES}
