# 程序员层面的构造（throw、try/catch、条件、顺序对）展开为核心项

from typing import Optional, Sequence, Tuple

from src.calculus import check_formation, infer_decoration, typecheck
from src.error_handler import (
    DecorationMismatch,
    EmptyHandlerList,
    FormationError,
    TypeMismatch,
)
from src.logging_config import get_logger
from src.models import (
    UNIT,
    Comp,
    Copair,
    Decoration,
    EffectVal,
    Handler,
    Id,
    Initial,
    Pair,
    PairKind,
    Proj,
    PropComp,
    Sum,
    Tag,
    Term,
    TryCatchSpec,
    TypeExpr,
    Untag,
    UntagAll,
)
from src.theory import Side, Theory

logger = get_logger(__name__)


def _ensure_formation(term: Term, theory: Theory, construct: str) -> Term:
    violations = check_formation(term, theory.profile, theory)
    if violations:
        details = "; ".join(str(v) for v in violations)
        raise FormationError(f"{construct} is not well-formed in {theory.profile.name}: {details}",
                             violations)
    return term


def _expect(term: Term, theory: Theory, source: TypeExpr, target: TypeExpr,
            max_deco: Decoration, role: str) -> None:
    actual_source, actual_target = typecheck(term, theory)
    if actual_source != source:
        raise TypeMismatch(source, actual_source, (role,), "source")
    if actual_target != target:
        raise TypeMismatch(target, actual_target, (role,), "target")
    deco = infer_decoration(term, theory)
    if deco > max_deco:
        raise DecorationMismatch(f"{role} must have decoration ≤{int(max_deco)}, it has {int(deco)}")


def elaborate_throw(target: TypeExpr, name: str, theory: Theory) -> Term:
    theory.require_side(Side.EXCEPTIONS, "throw")
    theory.effect(name)
    return Comp(Initial(target), Tag(name))


def normalize_handlers(handlers: Sequence[Handler],
                       catch_all: Optional[Term]) -> Tuple[Tuple[Handler, ...], Optional[Term]]:
    """Move an inline catch-all clause to the catch-all slot; clauses after it never run."""
    kept = []
    for index, handler in enumerate(handlers):
        if handler.name is None:
            dropped = len(handlers) - index - 1 + (1 if catch_all is not None else 0)
            if dropped:
                logger.warning(
                    f"{dropped} handler(s) after the catch-all clause are unreachable"
                )
            return tuple(kept), handler.body
        kept.append(handler)
    return tuple(kept), catch_all


def elaborate_catch_core(handlers: Sequence[Handler], target: TypeExpr,
                         catch_all: Optional[Term], theory: Theory) -> Term:
    """The catcher 0 -> B built from handler clauses, first match wins."""
    theory.require_side(Side.EXCEPTIONS, "catch")
    handlers, catch_all = normalize_handlers(handlers, catch_all)
    if not handlers and catch_all is None:
        raise EmptyHandlerList("try/catch needs at least one handler")

    core: Optional[Term] = None
    if catch_all is not None:
        _expect(catch_all, theory, UNIT, target, Decoration.PROPAGATOR, "catch-all")
        core = Comp(catch_all, UntagAll())

    for handler in reversed(handlers):
        theory.effect(handler.name)
        _expect(handler.body, theory, EffectVal(handler.name), target, Decoration.PROPAGATOR,
                f"handler {handler.name}")
        if core is None:
            core = Comp(Copair(PairKind.SYMMETRIC, handler.body, Initial(target)),
                        Untag(handler.name))
        else:
            core = Comp(Copair(PairKind.LEFT, handler.body, core), Untag(handler.name))
    return core


def elaborate_try_catch(spec: TryCatchSpec, theory: Theory) -> Term:
    source, target = typecheck(spec.body, theory)
    _expect(spec.body, theory, source, target, Decoration.PROPAGATOR, "try body")
    core = elaborate_catch_core(spec.handlers, target, spec.catch_all, theory)
    term = PropComp(Copair(PairKind.LEFT, Id(target), core), spec.body)
    return _ensure_formation(term, theory, "try/catch")


def elaborate_conditional(b: Term, f: Term, g: Term, theory: Theory) -> Term:
    b_source, b_target = typecheck(b, theory)
    if b_target != Sum(UNIT, UNIT):
        raise TypeMismatch(Sum(UNIT, UNIT), b_target, ("condition",), "a condition yields 1+1")
    f_source, f_target = typecheck(f, theory)
    g_source, g_target = typecheck(g, theory)
    if f_source != UNIT:
        raise TypeMismatch(UNIT, f_source, ("then",), "branch source")
    if g_source != UNIT:
        raise TypeMismatch(UNIT, g_source, ("else",), "branch source")
    if f_target != g_target:
        raise TypeMismatch(f_target, g_target, ("else",), "branches need a common target")
    return _ensure_formation(Comp(Copair(PairKind.SYMMETRIC, f, g), b), theory, "conditional")


def elaborate_seq_pair(a1: Term, a2: Term, theory: Theory) -> Term:
    """⟨a1, a2⟩ with a1 evaluated before a2."""
    source, t1 = typecheck(a1, theory)
    source2, t2 = typecheck(a2, theory)
    if source != source2:
        raise TypeMismatch(source, source2, ("second",), "sequential pair components")
    term = Comp(
        Pair(PairKind.LEFT, Proj(1, t1, source), Comp(a2, Proj(2, t1, source))),
        Pair(PairKind.RIGHT, a1, Id(source)),
    )
    return _ensure_formation(term, theory, "sequential pair")
