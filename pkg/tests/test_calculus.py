import pytest

from src.calculus import (
    check_formation,
    copair_source,
    infer_decoration,
    injection,
    typecheck,
)
from src.error_handler import EffectSideError, TypeMismatch, UndeclaredName
from src.frontend import parse_term
from src.models import (
    EMPTY,
    UNIT,
    Base,
    Copr,
    Decoration,
    EffectVal,
    Id,
    Initial,
    Prod,
    Sum,
)
from src.profiles import get_profile


class TestTypecheck:
    def test_roundtrip_through_empty_type(self, small_exc):
        term = parse_term("untag[T] . tag[T]")
        assert typecheck(term, small_exc) == (EffectVal("T"), EffectVal("T"))

    def test_tag_targets_empty_type(self, small_exc):
        assert typecheck(parse_term("tag[T]"), small_exc) == (EffectVal("T"), EMPTY)

    def test_pair_and_copair_types(self, small_exc):
        bool_t = Base("Bool")
        assert typecheck(parse_term("pair(id[Bool], half)"), small_exc) == (
            bool_t, Prod(bool_t, bool_t)
        )
        assert typecheck(parse_term("copair(half | id[Bool])"), small_exc) == (
            Sum(bool_t, bool_t), bool_t
        )

    def test_copair_with_empty_leg_collapses(self, small_exc):
        term = parse_term("copair(id[V_T] | untag[T])")
        assert typecheck(term, small_exc) == (EffectVal("T"), EffectVal("T"))

    def test_composition_mismatch(self, small_exc):
        with pytest.raises(TypeMismatch):
            typecheck(parse_term("half . tag[T]"), small_exc)

    def test_undeclared_operation(self, small_exc):
        with pytest.raises(UndeclaredName):
            typecheck(parse_term("nothing . half"), small_exc)

    def test_exception_construct_in_states_theory(self, one_location):
        with pytest.raises(EffectSideError):
            typecheck(parse_term("tag[X]"), one_location)


class TestDecorations:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("id[Bool]", Decoration.PURE),
            ("half", Decoration.PROPAGATOR),
            ("tag[T]", Decoration.PROPAGATOR),
            ("untag[T]", Decoration.CATCHER),
            ("untag[T] . tag[T]", Decoration.CATCHER),
            ("final[Bool] . half", Decoration.PROPAGATOR),
            # 传播子组合：外层的捕获子被降为传播子
            ("untag[T] (.) tag[T]", Decoration.PROPAGATOR),
        ],
    )
    def test_minimal_decoration(self, small_exc, text, expected):
        assert infer_decoration(parse_term(text), small_exc) == expected

    def test_state_decorations(self, one_location):
        assert infer_decoration(parse_term("lookup[X]"), one_location) == Decoration.ACCESSOR
        assert infer_decoration(parse_term("update[X]"), one_location) == Decoration.MODIFIER


class TestFormation:
    def test_pair_of_propagators_rejected_in_exc(self, small_exc):
        violations = check_formation(parse_term("pair(half, half)"), get_profile("EXC"), small_exc)
        assert len(violations) == 1
        assert violations[0].rule == "pair"
        assert violations[0].decorations == (1, 1)
        assert str(violations[0]) == "<root>: pair requires d≤0, got (1, 1)"

    def test_prop_comp_needs_exc_plus(self, small_exc):
        term = parse_term("untag[T] (.) tag[T]")
        assert [v.rule for v in check_formation(term, get_profile("EXC"), small_exc)] == ["prop-comp"]
        assert check_formation(term, get_profile("EXC_PLUS"), small_exc) == []

    def test_left_copair_bounds(self, small_exc):
        profile = get_profile("EXC")
        assert check_formation(parse_term("lcopair(id[V_T] | untag[T])"), profile, small_exc) == []
        violations = check_formation(parse_term("lcopair(untag[T] | untag[T])"), profile, small_exc)
        assert violations[0].rule == "l-copair"

    def test_violation_path_points_into_term(self, small_exc):
        term = parse_term("final[Bool * Bool] . pair(half, half)")
        violations = check_formation(term, get_profile("MON"), small_exc)
        assert violations[0].path == ("inner",)

    def test_exception_ops_unavailable_in_mon(self, small_exc):
        violations = check_formation(parse_term("tag[T]"), get_profile("MON"), small_exc)
        assert violations[0].rule == "tag"


class TestCoproductHelpers:
    def test_copair_source_collapses(self):
        a = Base("A")
        assert copair_source(a, EMPTY) == a
        assert copair_source(EMPTY, a) == a
        assert copair_source(a, UNIT) == Sum(a, UNIT)

    def test_injection_degenerates(self):
        a = Base("A")
        assert injection(1, a, EMPTY) == Id(a)
        assert injection(2, a, EMPTY) == Initial(a)
        assert injection(2, EMPTY, a) == Id(a)
        assert injection(1, a, UNIT) == Copr(1, a, UNIT)
