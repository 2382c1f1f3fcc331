from __future__ import annotations

import pytest

from ctxparse.core.corpus import ParseTree
from ctxparse.core.corpus import strip_wrappers
from ctxparse.core.corpus import tree_yield
from ctxparse.core.transforms import AmbiguationConfig
from ctxparse.core.transforms import AmbiguationConfigError
from ctxparse.core.transforms import Ambiguator
from ctxparse.core.transforms import MalformedHolTree
from ctxparse.core.transforms import ambiguate
from ctxparse.core.transforms import compress_types
from ctxparse.core.transforms import wrap_concepts
from tests.conftest import REAL_NEGNEG_HOL
from tests.conftest import REAL_NEGNEG_SENTENCE
from tests.conftest import REAL_NEGNEG_TYPED
from tests.conftest import REAL_NEGNEG_WRAPPED

VEC = '(Tyapp "vec")'
VECTOR_ADD = (
    f'(Comb (Comb (Const "vector_add" (Tyapp "fun" {VEC} (Tyapp "fun" {VEC} {VEC}))) '
    f'(Var "u" {VEC})) (Var "v" {VEC}))'
)
CAST = '(Comb (Const "real_of_num" (Tyapp "fun" (Tyapp "num") (Tyapp "real"))) (Const "1" (Tyapp "num")))'


@pytest.fixture
def negneg():
    return ParseTree.parse(REAL_NEGNEG_HOL)


class TestCompressTypes:
    def test_real_negneg(self, negneg):
        assert str(compress_types(negneg)) == REAL_NEGNEG_TYPED

    def test_variable(self):
        tree = ParseTree.parse('(Var "A0" (Tyapp "real"))')
        assert str(compress_types(tree)) == '("(Type real)" (Var A0))'

    def test_type_variable(self):
        tree = ParseTree.parse('(Var "y" (Tyvar "A"))')
        assert str(compress_types(tree)) == '("(Type A)" (Var y))'

    def test_prefix_application(self):
        cfg = AmbiguationConfig()
        assert str(compress_types(ParseTree.parse(VECTOR_ADD), cfg)) == (
            '("(Type vec)" vector_add ("(Type vec)" (Var u)) ("(Type vec)" (Var v)))'
        )

    @pytest.mark.parametrize(
        "text",
        [
            "(Comb)",
            '(Comb (Const "f" (Tyapp "bool")))',
            '(Const "c")',
            '(Lam "x" (Tyapp "bool"))',
            '(Comb (Const "f" (Tyapp "bool")) (Var "x" (Tyapp "bool")))',
            '(Comb (Const "f" (Tyapp "fun" (Tyapp "num") (Tyapp "bool"))) (Var "x" (Tyapp "real")))',
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(MalformedHolTree):
            compress_types(ParseTree.parse(text))

    def test_error_path(self):
        tree = ParseTree.parse('(Abs "x" (Tyapp "real") (Comb))')
        with pytest.raises(MalformedHolTree) as info:
            compress_types(tree)
        assert info.value.path == (2,)


class TestWrapConcepts:
    def test_real_negneg(self, negneg_config):
        typed = ParseTree.parse(REAL_NEGNEG_TYPED)
        assert str(wrap_concepts(typed, negneg_config)) == REAL_NEGNEG_WRAPPED

    def test_empty_map_is_identity(self):
        typed = ParseTree.parse(REAL_NEGNEG_TYPED)
        assert wrap_concepts(typed, AmbiguationConfig()) == typed

    def test_idempotent(self, negneg_config):
        once = wrap_concepts(ParseTree.parse(REAL_NEGNEG_TYPED), negneg_config)
        assert wrap_concepts(once, negneg_config) == once

    def test_height_and_leaves(self, negneg_config):
        typed = ParseTree.parse(REAL_NEGNEG_TYPED)
        wrapped = wrap_concepts(typed, negneg_config)
        assert len(wrapped.leaves()) == len(typed.leaves())
        assert wrapped.height() in (typed.height(), typed.height() + 1)

    def test_variables_untouched(self):
        cfg = AmbiguationConfig(strip_prefixes=("A",))
        typed = ParseTree.parse('("(Type real)" (Var A0))')
        assert wrap_concepts(typed, cfg) == typed


class TestAmbiguate:
    def test_real_negneg(self, negneg):
        cfg = AmbiguationConfig(overload_map={"real_neg": "--"}, infix_symbols=frozenset({"="}))
        assert str(ambiguate(negneg, cfg)) == REAL_NEGNEG_SENTENCE

    def test_overloaded_infix(self):
        cfg = AmbiguationConfig(overload_map={"vector_add": "+"}, infix_symbols=frozenset({"+"}))
        assert ambiguate(ParseTree.parse(VECTOR_ADD), cfg).tokens == ("u", "+", "v")

    def test_prefix_stripping(self):
        cfg = AmbiguationConfig(strip_prefixes=("vector_",), infix_symbols=frozenset({"add"}))
        assert ambiguate(ParseTree.parse(VECTOR_ADD), cfg).tokens == ("u", "add", "v")

    def test_casting_functor_deleted(self):
        cfg = AmbiguationConfig(delete_functors=frozenset({"real_of_num"}))
        assert ambiguate(ParseTree.parse(CAST), cfg).tokens == ("1",)

    def test_empty_config_plain_yield(self):
        tree = ParseTree.parse('(Var "x" (Tyapp "bool"))')
        assert ambiguate(tree, AmbiguationConfig()).tokens == ("x",)

    def test_wrapped_yield_matches_sentence(self, negneg, negneg_config):
        ambiguator = Ambiguator(negneg_config)
        training_tree = ambiguator.apply(negneg)
        assert training_tree == ParseTree.parse(REAL_NEGNEG_WRAPPED)
        assert tree_yield(strip_wrappers(training_tree)) == ambiguator.sentence(negneg)

    def test_stripped_typed_yield_with_consistent_config(self, negneg, negneg_config):
        typed = compress_types(negneg, negneg_config)
        rendered = tuple(negneg_config.surface(token) for token in strip_wrappers(typed).leaves())
        assert rendered == ambiguate(negneg, negneg_config).tokens


class TestAmbiguationConfig:
    def test_from_file(self, tmp_path):
        path = tmp_path / "amb.cfg"
        path.write_text(
            "# tables\n[overload]\nreal_neg -> --\nvector_add -> +\n"
            "[prefixes]\nreal_\nint_\n[functors]\nCx\n[infix]\n+\n=\n/\\\n",
            encoding="utf-8",
        )
        cfg = AmbiguationConfig.from_file(path)
        assert dict(cfg.overload_map) == {"real_neg": "--", "vector_add": "+"}
        assert cfg.strip_prefixes == ("real_", "int_")
        assert cfg.delete_functors == frozenset({"Cx"})
        assert cfg.infix_symbols == frozenset({"+", "=", "/\\"})

    def test_render(self):
        cfg = AmbiguationConfig(overload_map={"real_neg": "--"}, strip_prefixes=("real_", "real_of_"))
        assert cfg.render("real_neg") == "--"
        assert cfg.render("real_of_num") == "num"
        assert cfg.render("real_add") == "add"
        assert cfg.render("sin") is None
        assert cfg.surface("sin") == "sin"

    def test_shipped_config_loads(self):
        from pathlib import Path

        cfg = AmbiguationConfig.from_file(Path(__file__).parent.parent / "configs" / "ambiguation.cfg")
        assert cfg.render("real_neg") == "--"
        assert cfg.is_infix("real_add")
        assert "Cx" in cfg.delete_functors

    def test_unknown_section(self, tmp_path):
        path = tmp_path / "amb.cfg"
        path.write_text("[colors]\nred\n", encoding="utf-8")
        with pytest.raises(AmbiguationConfigError):
            AmbiguationConfig.from_file(path)

    def test_overload_without_token(self, tmp_path):
        path = tmp_path / "amb.cfg"
        path.write_text("[overload]\nreal_neg\n", encoding="utf-8")
        with pytest.raises(AmbiguationConfigError):
            AmbiguationConfig.from_file(path)
