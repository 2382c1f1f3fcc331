from __future__ import annotations

import pytest
from loguru import logger

from ctxparse.core.corpus import ParseTree
from ctxparse.core.corpus import Treebank
from ctxparse.core.grammar import train
from ctxparse.core.index import build_index
from ctxparse.core.transforms import AmbiguationConfig

T0_TEXT = "(S (Num (Num (Num 1) * (Num x)) + (Num (Num 2) * (Num x))) .)"
T0_SENTENCE = "1 * x + 2 * x ."

# All parses of T0_SENTENCE under the depth-2 grammar of T0, T0 last.
FIVE_PARSES = (
    "(S (Num (Num 1) * (Num (Num (Num x) + (Num 2)) * (Num x))) .)",
    "(S (Num (Num 1) * (Num (Num x) + (Num (Num 2) * (Num x)))) .)",
    "(S (Num (Num (Num 1) * (Num (Num x) + (Num 2))) * (Num x)) .)",
    "(S (Num (Num (Num (Num 1) * (Num x)) + (Num 2)) * (Num x)) .)",
    T0_TEXT,
)

REAL_NEGNEG_HOL = (
    '(Comb (Const "!" (Tyapp "fun" (Tyapp "fun" (Tyapp "real") (Tyapp "bool")) (Tyapp "bool"))) '
    '(Abs "A0" (Tyapp "real") (Comb (Comb (Const "=" (Tyapp "fun" (Tyapp "real") '
    '(Tyapp "fun" (Tyapp "real") (Tyapp "bool")))) (Comb (Const "real_neg" '
    '(Tyapp "fun" (Tyapp "real") (Tyapp "real"))) (Comb (Const "real_neg" '
    '(Tyapp "fun" (Tyapp "real") (Tyapp "real"))) (Var "A0" (Tyapp "real"))))) '
    '(Var "A0" (Tyapp "real")))))'
)

REAL_NEGNEG_TYPED = (
    '("(Type bool)" ! ("(Type (fun real bool))" (Abs ("(Type real)" (Var A0)) '
    '("(Type bool)" ("(Type real)" real_neg ("(Type real)" real_neg ("(Type real)" (Var A0)))) '
    '= ("(Type real)" (Var A0))))))'
)

REAL_NEGNEG_WRAPPED = (
    '("(Type bool)" ! ("(Type (fun real bool))" (Abs ("(Type real)" (Var A0)) '
    '("(Type bool)" ("(Type real)" ($#real_neg --) ("(Type real)" ($#real_neg --) ("(Type real)" (Var A0)))) '
    '($#= =) ("(Type real)" (Var A0))))))'
)

REAL_NEGNEG_SENTENCE = "! A0 -- -- A0 = A0"

# u and v each occur at both types across the corpus
TYPED_CORPUS = (
    '("(Type bool)" ("(Type real)" (Var u)) & ("(Type complex)" (Var v)))',
    '("(Type bool)" ("(Type complex)" (Var u)) & ("(Type real)" (Var v)))',
    '("(Type bool)" ("(Type real)" (Var u)) & ("(Type real)" (Var v)))',
)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-scale runs; deselect with -m \"not slow\"")


@pytest.fixture(autouse=True)
def quiet_logging():
    logger.disable("ctxparse")
    yield
    logger.enable("ctxparse")


@pytest.fixture
def t0() -> ParseTree:
    return ParseTree.parse(T0_TEXT)


@pytest.fixture
def t0_treebank(t0) -> Treebank:
    return Treebank((t0,))


@pytest.fixture
def grammar2(t0_treebank):
    return train(t0_treebank, 2)


@pytest.fixture
def grammar3(t0_treebank):
    return train(t0_treebank, 3)


@pytest.fixture
def index3(grammar3):
    return build_index(grammar3)


@pytest.fixture
def negneg_config() -> AmbiguationConfig:
    return AmbiguationConfig(overload_map={"real_neg": "--", "=": "="}, infix_symbols=frozenset({"="}))


@pytest.fixture
def treebank_file(tmp_path):
    path = tmp_path / "treebank.txt"
    path.write_text(f"# arithmetic\n{T0_TEXT}\n", encoding="utf-8")
    return path
