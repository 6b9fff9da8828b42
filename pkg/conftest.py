"""
Shared pytest fixtures: the instance corpus and small hand-built structures.
"""
import pytest

from src.core.config import Config
from src.core.structures import ROOT_CONSTANT, TYPE_RELATION, UNARY, StructureBuilder
from src.core.thue_core import parse_thue
from src.data.fixtures import load_fixture


@pytest.fixture
def config():
    """Defaults, independent of the caller's environment and config file"""
    return Config()


@pytest.fixture
def idempotent():
    return load_fixture("p1_idempotent")


@pytest.fixture
def absorbing():
    return load_fixture("p5_absorbing")


@pytest.fixture
def free_pair():
    return load_fixture("n1_free")


@pytest.fixture
def commuting():
    """Π = {(ab, ba)}, goal ab = ba"""
    return parse_thue("alphabet: a b\nrule: ab = ba\ngoal: ab = ba\n", name="commuting")


@pytest.fixture
def imperfect_chain():
    """a -a-> 1 -a-> 2 -a-> 2: candidate, but aa and a end apart at a"""
    builder = StructureBuilder(["a"])
    for _ in range(3):
        builder.add_vertex()
    builder.set_constant(ROOT_CONSTANT, 0)
    builder.add_fact(UNARY, 0).add_fact(TYPE_RELATION, 0, 0)
    builder.add_fact("a", 0, 1).add_fact("a", 1, 2).add_fact("a", 2, 2)
    return builder.build()
