import pytest

from src import semantics
from src.elaborator import (
    elaborate_catch_core,
    elaborate_conditional,
    elaborate_seq_pair,
    elaborate_throw,
    elaborate_try_catch,
    normalize_handlers,
)
from src.error_handler import EmptyHandlerList, FormationError, TypeMismatch
from src.frontend import parse_term, parse_theory
from src.models import (
    Base,
    Comp,
    Copair,
    Handler,
    Id,
    Initial,
    PairKind,
    PropComp,
    Tag,
    TryCatchSpec,
    Untag,
    UntagAll,
)
from src.values import Atom, InL, InR, Packet, UNIT_VAL

BOOL = Base("Bool")


class TestThrow:
    def test_throw_is_initial_after_tag(self, handlers):
        assert elaborate_throw(BOOL, "T", handlers) == Comp(Initial(BOOL), Tag("T"))

    def test_throw_raises_its_payload(self, handlers):
        term = elaborate_throw(BOOL, "R", handlers)
        assert semantics.apply(term, handlers, Atom("b")) == Packet("R", Atom("b"))


class TestHandlers:
    def test_inline_catch_all_moves_to_slot(self):
        fallback = parse_term("fallback")
        first = Handler("T", parse_term("fromT"))
        kept, catch_all = normalize_handlers(
            (first, Handler(None, fallback), Handler("R", parse_term("recover"))), None
        )
        assert kept == (first,)
        assert catch_all == fallback

    def test_single_handler_core(self, handlers):
        core = elaborate_catch_core((Handler("T", parse_term("fromT")),), BOOL, None, handlers)
        assert core == Comp(Copair(PairKind.SYMMETRIC, parse_term("fromT"), Initial(BOOL)),
                            Untag("T"))

    def test_catch_all_alone(self, handlers):
        fallback = parse_term("fallback")
        assert elaborate_catch_core((), BOOL, fallback, handlers) == Comp(fallback, UntagAll())

    def test_empty_handler_list(self, handlers):
        with pytest.raises(EmptyHandlerList):
            elaborate_catch_core((), BOOL, None, handlers)

    def test_handler_with_wrong_source(self, handlers):
        with pytest.raises(TypeMismatch):
            elaborate_catch_core((Handler("R", parse_term("fromT")),), BOOL, None, handlers)


class TestTryCatch:
    def test_shape(self, handlers):
        spec = TryCatchSpec(parse_term("risky"), (Handler("R", parse_term("recover")),))
        term = elaborate_try_catch(spec, handlers)
        assert isinstance(term, PropComp)
        assert term.inner == parse_term("risky")
        assert term.outer.kind is PairKind.LEFT
        assert term.outer.first == Id(BOOL)

    def test_first_matching_handler_wins(self, handlers):
        spec = TryCatchSpec(
            parse_term("risky"),
            (Handler("R", parse_term("recover")), Handler("R", parse_term("fallback . final[V_R]"))),
        )
        term = elaborate_try_catch(spec, handlers)
        # risky tt 抛出 R b；第一个处理器给出 recover b = ff，第二个会给出 tt
        assert semantics.apply(term, handlers, Atom("tt")) == Atom("ff")

    def test_unhandled_name_propagates(self, handlers):
        spec = TryCatchSpec(parse_term("risky"), (Handler("T", parse_term("fromT")),))
        term = elaborate_try_catch(spec, handlers)
        assert semantics.apply(term, handlers, Atom("ff")) == Packet("U", Atom("a"))

    def test_needs_propagator_composition(self):
        theory = parse_theory(
            """
            theory plain exceptions logic EXC
            exception T of {a}
            type Bool = {tt, ff}
            op back : V_T -> Bool deco 0 { a => tt }
            """
        )
        spec = TryCatchSpec(Comp(Initial(BOOL), Tag("T")), (Handler("T", parse_term("back")),))
        with pytest.raises(FormationError, match="try/catch"):
            elaborate_try_catch(spec, theory)


class TestConditional:
    def test_branches_on_the_boolean(self):
        theory = parse_theory(
            """
            theory cond exceptions logic MON
            exception Undef of {u}
            type Nat = {z, s}
            op isz : Nat -> 1 + 1 deco 0 { z => inl (); s => inr () }
            op zero : 1 -> Nat deco 0 { () => z }
            op one : 1 -> Nat deco 0 { () => s }
            """
        )
        term = elaborate_conditional(parse_term("isz"), parse_term("zero"),
                                     parse_term("one"), theory)
        assert semantics.apply(term, theory, Atom("z")) == Atom("z")
        assert semantics.apply(term, theory, Atom("s")) == Atom("s")
        assert semantics.apply(parse_term("isz"), theory, Atom("z")) == InL(UNIT_VAL)
        assert semantics.apply(parse_term("isz"), theory, Atom("s")) == InR(UNIT_VAL)

    def test_condition_must_be_boolean(self, handlers):
        with pytest.raises(TypeMismatch):
            elaborate_conditional(parse_term("id[Bool]"), parse_term("fallback"),
                                  parse_term("fallback"), handlers)


class TestSequentialPair:
    def test_needs_left_and_right_pairs(self, demo):
        with pytest.raises(FormationError, match="sequential pair"):
            elaborate_seq_pair(parse_term("half"), parse_term("half"), demo)
