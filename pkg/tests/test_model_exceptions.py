import pytest

from src import model_exceptions, semantics
from src.config_manager import Limits
from src.error_handler import CarrierTooLarge, DecorationMismatch, IncompleteConstTable
from src.frontend import parse_equation, parse_term, parse_theory
from src.models import Base, Decoration, PairKind, Prod, Strength
from src.values import Atom, Carriers, Packet, TupleVal, UNIT_VAL


def _den(text, theory):
    return semantics.evaluate(parse_term(text), theory)


class TestDecide:
    def test_untag_tag_is_weakly_identity(self, demo):
        verdict = semantics.decide(parse_equation("untag[T] . tag[T] ~ id[V_T]"), demo)
        assert verdict.holds

    def test_strong_version_fails_on_a_packet(self, demo):
        verdict = semantics.decide(parse_equation("untag[T] . tag[T] == id[V_T]"), demo)
        assert not verdict.holds
        cx = verdict.counterexample
        assert isinstance(cx.input, Packet)
        assert cx.input.name == "T"
        assert cx.strength is Strength.STRONG

    def test_ordered_comparison(self):
        # half 只在 tt 上有定义，取值 ff 与 flip 一致
        theory = parse_theory(
            """
            theory ord exceptions logic EXC
            exception T of {a}
            type Bool = {tt, ff}
            op half : Bool -> Bool deco 1 { tt => ff; ff => exn T a }
            op flip : Bool -> Bool deco 0 { tt => ff; ff => tt }
            op same : Bool -> Bool deco 0 { tt => tt; ff => ff }
            """
        )
        assert semantics.decide(parse_equation("half << flip"), theory).holds
        assert not semantics.decide(parse_equation("half << same"), theory).holds

    def test_counterexample_for_propagator_against_identity(self, demo):
        verdict = semantics.decide(parse_equation("half ~ id[Bool]"), demo)
        assert verdict.counterexample.input == Atom("tt")
        assert verdict.counterexample.lhs == Atom("ff")


class TestApply:
    def test_propagator_raises(self, demo):
        assert semantics.apply(parse_term("half"), demo, Atom("tt")) == Atom("ff")
        assert semantics.apply(parse_term("half"), demo, Atom("ff")) == Packet("T", Atom("a"))

    def test_packets_pass_through_propagators(self, demo):
        packet = Packet("R", Atom("a"))
        assert semantics.apply(parse_term("half"), demo, packet) == packet

    def test_untag_recovers_only_its_own_name(self, exc_core):
        term = parse_term("untag[T] . tag[T]")
        assert semantics.apply(term, exc_core, Packet("T", Atom("b"))) == Atom("b")
        assert semantics.apply(term, exc_core, Packet("R", Atom("a"))) == Packet("R", Atom("a"))

    def test_left_copair_sends_packets_to_second_leg(self, exc_core):
        term = parse_term("lcopair(id[V_T] | untag[T])")
        assert semantics.apply(term, exc_core, Atom("a")) == Atom("a")
        assert semantics.apply(term, exc_core, Packet("T", Atom("b"))) == Atom("b")
        assert semantics.apply(term, exc_core, Packet("R", Atom("b"))) == Packet("R", Atom("b"))

    def test_untagall_catches_everything(self, exc_core):
        term = parse_term("untagall")
        assert semantics.apply(term, exc_core, Packet("R", Atom("b"))) == UNIT_VAL


class TestTables:
    def test_classify(self):
        a, p = Atom("a"), Packet("T", Atom("a"))
        assert model_exceptions.classify(((a, a),), 1) == Decoration.PURE
        assert model_exceptions.classify(((a, p),), 1) == Decoration.PROPAGATOR
        assert model_exceptions.classify(((a, a), (p, a)), 2) == Decoration.CATCHER

    def test_restrict_then_lift_keeps_propagator(self, demo):
        env = semantics.environment(demo)
        den = _den("half", demo)
        level1 = model_exceptions.restrict(den, 1)
        assert model_exceptions.lift(1, 2, level1, env).rows == den.rows

    def test_propagator_has_no_pure_restriction(self, demo):
        with pytest.raises(DecorationMismatch):
            model_exceptions.restrict(_den("half", demo), 0)

    def test_decompose_propagator(self, demo):
        parts = model_exceptions.decompose(_den("half", demo))
        assert parts.domain == (Atom("tt"),)
        assert parts.exceptional == (Atom("ff"),)

    def test_left_pair_raises_with_its_propagator(self, demo):
        env = semantics.environment(demo)
        pair = model_exceptions.interp_left_pair(_den("id[Bool]", demo), _den("half", demo), env)
        assert pair(Atom("tt")) == TupleVal(Atom("tt"), Atom("ff"))
        assert pair(Atom("ff")) == Packet("T", Atom("a"))


class TestEnvironment:
    def test_exception_set_over_cap(self, demo):
        with pytest.raises(CarrierTooLarge):
            model_exceptions.build_environment(demo, Limits(max_carrier=2))

    def test_incomplete_op_table(self):
        theory = parse_theory(
            """
            theory partial exceptions logic EXC
            exception T of {a}
            type Bool = {tt, ff}
            op half : Bool -> Bool deco 1 { tt => ff }
            """
        )
        with pytest.raises(IncompleteConstTable, match="no row for input ff"):
            model_exceptions.build_environment(theory)

    def test_row_outside_decoration(self):
        theory = parse_theory(
            """
            theory loud exceptions logic EXC
            exception T of {a}
            type Bool = {tt, ff}
            op noisy : Bool -> Bool deco 0 { tt => exn T a; ff => ff }
            """
        )
        with pytest.raises(IncompleteConstTable, match="not allowed at decoration 0"):
            model_exceptions.build_environment(theory)

    def test_oversized_carrier_is_reported_with_its_type(self):
        carriers = Carriers({"Bool": ("tt", "ff")}, {}, max_carrier=3)
        with pytest.raises(CarrierTooLarge, match=r"carrier of \(Bool \* Bool\) has 4 elements"):
            carriers.carrier(Prod(Base("Bool"), Base("Bool")))


class TestSolutions:
    def test_left_pair_is_the_only_solution(self, demo):
        env = semantics.environment(demo)
        v, f = _den("id[Bool]", demo), _den("half", demo)
        solutions = model_exceptions.left_pair_solutions(v, f, env)
        assert solutions.count == 1
        assert solutions.unique().rows == model_exceptions.interp_left_pair(v, f, env).rows

    def test_right_pair_is_the_only_solution(self, demo):
        env = semantics.environment(demo)
        f, v = _den("half", demo), _den("id[Bool]", demo)
        solutions = model_exceptions.right_pair_solutions(f, v, env)
        assert solutions.count == 1
        assert solutions.unique().rows == model_exceptions.interp_right_pair(f, v, env).rows

    def test_left_pair_needs_a_pure_first_component(self, demo):
        env = semantics.environment(demo)
        solutions = model_exceptions.left_pair_solutions(_den("half", demo), _den("half", demo), env)
        assert solutions.count == 0
        assert list(solutions) == []

    def test_copair_of_propagators_is_unique(self, demo):
        env = semantics.environment(demo)
        f, g = _den("half", demo), _den("id[Bool]", demo)
        solutions = model_exceptions.copair_solutions(f, g, env)
        expected = model_exceptions._copair(PairKind.SYMMETRIC, f, g, env)
        assert solutions.count == 1
        assert solutions.unique().rows == expected.rows

    def test_copair_of_catchers_has_no_solution(self, exc_core):
        env = semantics.environment(exc_core)
        solutions = model_exceptions.copair_solutions(
            _den("untag[T]", exc_core), _den("initial[V_T]", exc_core), env
        )
        assert solutions.count == 0
        assert solutions.unique() is None

    def test_unconstrained_points_multiply(self, demo):
        # 两条腿都是 Empty 上的恒等：Empty+Empty 只有异常包输入，每点唯一
        env = semantics.environment(demo)
        leg = _den("id[0]", demo)
        solutions = model_exceptions.copair_solutions(leg, leg, env)
        assert solutions.count == 1
        assert all(choice == (x,) for x, choice in zip(solutions.domain, solutions.choices))
