# 前端：语料库理论、错误位置与打印/解析往返

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.error_handler import (
    DuplicateName,
    EffectSideError,
    TheorySyntaxError,
    UndeclaredName,
    UnknownProfile,
)
from src.frontend import (
    check_theory,
    parse_term,
    parse_theory,
    parse_value,
    pretty_term,
    tokenize,
)
from src.generators import sample_terms
from src.profiles import EXTENDS, PROFILE_NAMES, PROFILES
from src.values import Atom, Packet

from tests.conftest import CORPUS, PROFILE_THEORIES, corpus_theory

CORPUS_NAMES = sorted(p.stem for p in CORPUS.glob("*.dth"))
ROUND_TRIP_TERMS = 1000


class TestCorpus:
    @pytest.mark.parametrize("name", CORPUS_NAMES)
    def test_theory_is_well_formed(self, name):
        theory = corpus_theory(name)
        assert theory.name == name
        assert check_theory(theory) == []

    @pytest.mark.property_test
    @pytest.mark.parametrize("profile", PROFILE_NAMES)
    def test_generated_terms_parse_back_in_every_profile(self, profile):
        theory = corpus_theory(PROFILE_THEORIES[profile])
        assert theory.profile.name == profile
        terms = sample_terms(theory, ROUND_TRIP_TERMS, seed=42, max_depth=4)
        assert len(terms) == ROUND_TRIP_TERMS
        for term in terms:
            assert parse_term(pretty_term(term), theory) == term

    @pytest.mark.property_test
    @settings(max_examples=30, deadline=None)
    @given(profile=st.sampled_from(PROFILE_NAMES), seed=st.integers(0, 10_000))
    def test_pretty_printed_terms_parse_back(self, profile, seed):
        theory = corpus_theory(PROFILE_THEORIES[profile])
        for term in sample_terms(theory, 3, seed=seed, max_depth=4):
            assert parse_term(pretty_term(term), theory) == term


class TestProfiles:
    @pytest.mark.parametrize("child", sorted(EXTENDS))
    def test_formation_is_inherited(self, child):
        profile = PROFILES[child]
        for parent in EXTENDS[child]:
            for key, (left, right) in PROFILES[parent].formation:
                bound = profile.bound(key)
                assert bound is not None, f"{child} drops {key} from {parent}"
                assert bound[0] >= left and bound[1] >= right


class TestErrors:
    def test_empty_carrier_reports_its_line(self):
        with pytest.raises(TheorySyntaxError, match="at least one element") as info:
            parse_theory("theory e exceptions logic EXC\nexception T of {}")
        assert info.value.line == 2

    def test_duplicate_exception_name(self):
        with pytest.raises(DuplicateName, match="exception T is declared twice"):
            parse_theory("theory e exceptions logic EXC\nexception T of {a}\nexception T of {b}\n")

    def test_unknown_profile(self):
        with pytest.raises(UnknownProfile, match="FOO"):
            parse_theory("theory e exceptions logic FOO\n")

    def test_profile_side_mismatch(self):
        with pytest.raises(EffectSideError):
            parse_theory("theory e states logic EXC\n")

    def test_location_in_exceptions_theory(self):
        with pytest.raises(EffectSideError, match="need a states theory"):
            parse_theory("theory e exceptions logic EXC\nlocation X of {0, 1}\n")

    def test_undeclared_effect_type(self):
        with pytest.raises(UndeclaredName, match="undeclared exception 'Q'") as info:
            parse_theory(
                "theory e exceptions logic EXC\n"
                "exception T of {a}\n"
                "op bad : V_Q -> V_T deco 0 { a => a }\n"
            )
        assert info.value.line == 3

    def test_unbalanced_parentheses(self, demo):
        with pytest.raises(TheorySyntaxError) as info:
            parse_term("(half . half", demo)
        assert info.value.line == 1

    def test_state_value_must_bind_every_location(self, states):
        with pytest.raises(TheorySyntaxError, match="must bind exactly X, Y"):
            parse_value("(1, {X=0})", states)


class TestValuesAndTokens:
    def test_core_only_theory(self):
        theory = parse_theory("theory bare exceptions logic MON\n")
        assert theory.effects == ()
        assert check_theory(theory) == []

    def test_packet_value(self, demo):
        assert parse_value("exn T a", demo) == Packet("T", Atom("a"))

    def test_op_above_profile_leaf_bound(self):
        theory = parse_theory(
            "theory e none logic EQ\n"
            "type Bool = {tt, ff}\n"
            "op half : Bool -> Bool deco 1 { tt => ff; ff => tt }\n"
        )
        diagnostics = check_theory(theory)
        assert len(diagnostics) == 1
        assert diagnostics[0].startswith("line 3: op half has decoration 1")

    def test_propagator_composition_token(self):
        tokens = tokenize("f (.) g")
        assert [t.text for t in tokens[:-1]] == ["f", "(.)", "g"]
        assert tokens[1].kind == "op"
        assert tokens[-1].kind == "eof"
