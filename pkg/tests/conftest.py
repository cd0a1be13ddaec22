# 测试公共夹具：语料库路径与理论加载

from pathlib import Path

import pytest

from src.frontend import load_theory, parse_theory

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
PROOFS = CORPUS / "proofs"

# 每个逻辑配置对应的语料库理论
PROFILE_THEORIES = {
    "EQ": "eq_bool",
    "MON": "mon_partial",
    "COMON": "comon_counter",
    "EXC": "exc_core",
    "EXC_PLUS": "handlers",
    "ST": "states",
    "ST_PLUS": "states_plus",
}


def corpus_theory(name: str):
    return load_theory(CORPUS / f"{name}.dth")


@pytest.fixture
def demo():
    return corpus_theory("demo")


@pytest.fixture
def exc_core():
    return corpus_theory("exc_core")


@pytest.fixture
def states():
    return corpus_theory("states")


@pytest.fixture
def eq_bool():
    return corpus_theory("eq_bool")


@pytest.fixture
def handlers():
    return corpus_theory("handlers")


@pytest.fixture
def small_exc():
    """One exception name with two payloads and a propagator on Bool."""
    return parse_theory(
        """
        theory small exceptions logic EXC
        exception T of {a, b}
        type Bool = {tt, ff}
        op half : Bool -> Bool deco 1 { tt => ff; ff => exn T a }
        """
    )


@pytest.fixture
def one_location():
    return parse_theory(
        """
        theory cell states logic ST
        location X of {0, 1}
        """
    )
