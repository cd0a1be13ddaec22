import pytest

from src import model_states, semantics
from src.config_manager import Limits
from src.error_handler import CarrierTooLarge
from src.frontend import parse_equation, parse_term, parse_theory, parse_value
from src.models import Decoration, PairKind
from src.values import Atom, StatePoint, StateVal, TupleVal, UNIT_VAL


def _state(**bindings):
    return StateVal(tuple((k, Atom(str(v))) for k, v in bindings.items()))


class TestEvaluation:
    def test_update_writes_the_location(self, states):
        point = StatePoint(Atom("1"), _state(X=0, Y=0))
        result = semantics.apply(parse_term("update[X]"), states, point)
        assert result == StatePoint(UNIT_VAL, _state(X=1, Y=0))

    def test_lookup_reads_without_changing_state(self, states):
        point = StatePoint(UNIT_VAL, _state(X=0, Y=1))
        result = semantics.apply(parse_term("lookup[Y]"), states, point)
        assert result == StatePoint(Atom("1"), _state(X=0, Y=1))

    def test_state_points_parse_against_the_theory(self, states):
        assert parse_value("(1, {X=0, Y=0})", states) == StatePoint(Atom("1"), _state(X=0, Y=0))

    def test_sequential_pair_evaluates_left_first(self):
        theory = parse_theory(
            """
            theory seq states logic ST
            location X of {0, 1}
            op one : 1 -> V_X deco 0 { () => 1 }
            """
        )
        term = parse_term("seqpair(update[X] . one, lookup[X])", theory)
        result = semantics.apply(term, theory, StatePoint(UNIT_VAL, _state(X=0)))
        assert result.value == TupleVal(UNIT_VAL, Atom("1"))
        assert result.state == _state(X=1)


class TestDecide:
    def test_lookup_update_weak_but_not_strong(self, states):
        assert semantics.decide(parse_equation("lookup[X] . update[X] ~ id[V_X]"), states).holds
        verdict = semantics.decide(parse_equation("lookup[X] . update[X] == id[V_X]"), states)
        assert not verdict.holds
        assert isinstance(verdict.counterexample.input, StatePoint)

    def test_update_of_other_location_is_invisible(self, states):
        eq = parse_equation("lookup[Y] . update[X] ~ lookup[Y] . final[V_X]")
        assert semantics.decide(eq, states).holds

    def test_ordered_reads_as_weak(self, states):
        eq = parse_equation("lookup[X] . update[X] << id[V_X]")
        assert semantics.decide(eq, states).holds


class TestClassification:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("id[V_X]", Decoration.PURE),
            ("lookup[X]", Decoration.ACCESSOR),
            ("update[X]", Decoration.MODIFIER),
            ("lookup[X] . update[X]", Decoration.MODIFIER),
        ],
    )
    def test_semantic_decoration(self, states, text, expected):
        assert semantics.evaluate(parse_term(text), states).min_deco == expected

    def test_restrict_accessor_to_level_one(self, states):
        den = semantics.evaluate(parse_term("lookup[X]"), states)
        level1 = model_states.restrict(den, 1)
        assert level1.level == Decoration.ACCESSOR
        assert level1(StatePoint(UNIT_VAL, _state(X=1, Y=0))) == Atom("1")


class TestEnvironment:
    def test_state_space_over_cap(self, states):
        with pytest.raises(CarrierTooLarge):
            model_states.build_environment(states, Limits(max_states=3))

    def test_state_enumeration_order(self, one_location):
        env = model_states.build_environment(one_location)
        assert env.states == (_state(X=0), _state(X=1))

    def test_comonad_profile_without_locations_uses_state_model(self):
        theory = parse_theory(
            """
            theory pure_comon none logic COMON
            type Bool = {tt, ff}
            """
        )
        assert semantics.model_for(theory) is model_states
        assert semantics.environment(theory).states == (StateVal(()),)


class TestSolutions:
    @pytest.fixture
    def plus(self):
        return parse_theory(
            """
            theory plus states logic ST_PLUS
            location X of {0, 1}
            op zero : 1 -> V_X deco 0 { () => 0 }
            op one : 1 -> V_X deco 0 { () => 1 }
            """
        )

    def test_copair_of_modifiers_is_unique(self, plus):
        env = semantics.environment(plus)
        f = semantics.evaluate(parse_term("update[X] . zero", plus), plus)
        g = semantics.evaluate(parse_term("update[X] . one", plus), plus)
        solutions = model_states.copair_solutions(f, g, env)
        assert solutions.count == 1
        assert solutions.unique().rows == model_states._copair(f, g, env).rows

    @pytest.mark.parametrize("kind", [PairKind.LEFT, PairKind.RIGHT])
    def test_sequential_pair_is_unique(self, states, kind):
        env = semantics.environment(states)
        accessor = semantics.evaluate(parse_term("lookup[Y]"), states)
        modifier = semantics.evaluate(parse_term("update[X] . lookup[X]"), states)
        first, second = (accessor, modifier) if kind is PairKind.LEFT else (modifier, accessor)
        solutions = model_states.pair_solutions(kind, first, second, env)
        assert solutions.count == 1
        assert solutions.unique().rows == model_states._pair(kind, first, second, env).rows
