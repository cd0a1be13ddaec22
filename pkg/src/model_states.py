# 状态余单子 ◻X = X × S 上的有限集合语义

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Optional, Tuple

from src.calculus import copair_source, injection, typecheck
from src.config_manager import Limits
from src.error_handler import (
    CarrierTooLarge,
    DecorationMismatch,
    EffectSideError,
    FormationError,
    IllegalLift,
    IncompleteConstTable,
    TypeMismatch,
    UndeclaredName,
)
from src.logging_config import get_logger
from src.models import (
    UNIT,
    Comp,
    Const,
    Copair,
    Copr,
    Counterexample,
    Decoration,
    EffectVal,
    EmptyType,
    Equation,
    Final,
    Id,
    Initial,
    Injection,
    Lookup,
    Pair,
    PairKind,
    Prod,
    Proj,
    PropComp,
    Strength,
    Sum,
    Tag,
    Term,
    TypeExpr,
    Untag,
    UntagAll,
    Update,
    Verdict,
)
from src.theory import OpDecl, Side, Theory
from src.values import (
    UNIT_VAL,
    Carriers,
    InL,
    InR,
    StatePoint,
    StateVal,
    TupleVal,
    PointwiseSolutions,
    TableSpace,
    Value,
    format_value,
    solve_pointwise,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class StDenotation:
    """A finite table at representation level `level`.

    level 0: A -> B, level 1: A×S -> B, level 2: A×S -> B×S.
    """

    source: TypeExpr
    target: TypeExpr
    level: Decoration
    rows: Tuple[Tuple[object, object], ...]
    min_deco: Decoration

    @cached_property
    def table(self) -> Dict[object, object]:
        return dict(self.rows)

    def __call__(self, x: object) -> object:
        return self.table[x]


def classify(rows: Tuple[Tuple[object, object], ...], level: int) -> Decoration:
    if level == 0:
        return Decoration.PURE
    if level == 2:
        if any(y.state != x.state for x, y in rows):
            return Decoration.MODIFIER
        values = [(x, y.value) for x, y in rows]
    else:
        values = list(rows)
    seen: Dict[Value, Value] = {}
    for x, y in values:
        if seen.setdefault(x.value, y) != y:
            return Decoration.ACCESSOR
    return Decoration.PURE


class StateEnvironment:
    """Carriers, the full state set S and the installed Const denotations of one theory."""

    def __init__(self, theory: Theory, carriers: Carriers, states: Tuple[StateVal, ...],
                 limits: Limits):
        self.theory = theory
        self.carriers = carriers
        self.states = states
        self.limits = limits
        self.consts: Dict[str, StDenotation] = {}
        self._cache: Dict[Term, StDenotation] = {}

    def carrier(self, t: TypeExpr) -> Tuple[Value, ...]:
        return self.carriers.carrier(t)

    def points(self, t: TypeExpr) -> Tuple[StatePoint, ...]:
        return tuple(StatePoint(x, s) for x in self.carrier(t) for s in self.states)

    def inputs(self, t: TypeExpr, level: int = 2) -> Tuple[object, ...]:
        return self.carrier(t) if level == 0 else self.points(t)

    def outputs(self, t: TypeExpr, level: int = 2) -> Tuple[object, ...]:
        return self.points(t) if level == 2 else self.carrier(t)

    def table(self, source: TypeExpr, target: TypeExpr,
              step: Callable[[StatePoint], StatePoint]) -> StDenotation:
        rows = tuple((p, step(p)) for p in self.points(source))
        return StDenotation(source, target, Decoration.MODIFIER, rows, classify(rows, 2))

    def pure(self, source: TypeExpr, target: TypeExpr,
             fn: Callable[[Value], Value]) -> StDenotation:
        return self.table(source, target, lambda p: StatePoint(fn(p.value), p.state))

    def counit(self, t: TypeExpr) -> StDenotation:
        """ε_X : X×S -> X as a level-1 table."""
        rows = tuple((p, p.value) for p in self.points(t))
        return StDenotation(t, t, Decoration.ACCESSOR, rows, Decoration.PURE)


def build_environment(theory: Theory, limits: Optional[Limits] = None) -> StateEnvironment:
    limits = limits or Limits()
    if theory.side is Side.EXCEPTIONS:
        raise EffectSideError(f"theory '{theory.name}' is exception-sided; use the exception model")

    base_types = {decl.name: decl.atoms for decl in theory.base_types}
    effect_carriers = {decl.name: decl.carrier for decl in theory.effects}
    carriers = Carriers(base_types, effect_carriers, limits.max_carrier)

    count = 1
    for decl in theory.effects:
        count *= len(decl.carrier)
    if count > limits.max_states:
        raise CarrierTooLarge(f"state set has {count} elements (limit {limits.max_states})")

    names = theory.effect_names()
    states = tuple(
        StateVal(tuple(zip(names, combo)))
        for combo in itertools.product(*(decl.carrier for decl in theory.effects))
    )

    env = StateEnvironment(theory, carriers, states, limits)
    for op in theory.ops:
        env.consts[op.name] = _const_denotation(op, env)
    logger.debug(f"State model for '{theory.name}': |S|={len(states)}, {len(env.consts)} ops")
    return env


def _const_denotation(op: OpDecl, env: StateEnvironment) -> StDenotation:
    level = int(op.deco)
    domain = env.inputs(op.source, level)
    codomain = set(env.outputs(op.target, level))
    given = dict(op.rows)

    rows = []
    for x in domain:
        if x not in given:
            raise IncompleteConstTable(
                f"op '{op.name}' has no row for input {format_value(x)}"
            ).at(op.line, 1)
        if given[x] not in codomain:
            raise IncompleteConstTable(
                f"op '{op.name}' maps {format_value(x)} to {format_value(given[x])}, "
                f"which is not allowed at decoration {level}"
            ).at(op.line, 1)
        rows.append((x, given[x]))
    if set(given) - set(domain):
        raise IncompleteConstTable(
            f"op '{op.name}' has rows outside its domain"
        ).at(op.line, 1)

    frozen = tuple(rows)
    den = StDenotation(op.source, op.target, Decoration(level), frozen, classify(frozen, level))
    return lift(level, 2, den, env)


def lift(d_from: int, d_to: int, den: StDenotation, env: StateEnvironment) -> StDenotation:
    if d_from > d_to:
        raise IllegalLift(f"cannot lift from decoration {d_from} down to {d_to}")
    if den.level != d_from:
        raise IllegalLift(f"denotation is represented at level {den.level}, not {d_from}")
    if d_from == d_to:
        return den
    if d_from == 0:
        # precompose with ε: the state is ignored
        rows = tuple((p, den(p.value)) for p in env.points(den.source))
        den = StDenotation(den.source, den.target, Decoration.ACCESSOR, rows, den.min_deco)
        if d_to == 1:
            return den
    rows = tuple((p, StatePoint(y, p.state)) for p, y in den.rows)
    return StDenotation(den.source, den.target, Decoration.MODIFIER, rows, den.min_deco)


def restrict(den: StDenotation, level: int) -> StDenotation:
    """Lower representation: ε ∘ f2 at level 1, the plain function at level 0."""
    if level >= den.level:
        return den
    if den.min_deco > level:
        raise DecorationMismatch(f"a table of decoration {den.min_deco} has no level-{level} form")
    rows = den.rows
    if den.level == 2:
        rows = tuple((p, y.value) for p, y in rows)
    if level == 0:
        rows = tuple(dict((p.value, y) for p, y in rows).items())
    return StDenotation(den.source, den.target, Decoration(level), rows, den.min_deco)


def evaluate(term: Term, env: StateEnvironment) -> StDenotation:
    cached = env._cache.get(term)
    if cached is None:
        cached = _evaluate(term, env)
        env._cache[term] = cached
    return cached


def _evaluate(term: Term, env: StateEnvironment) -> StDenotation:
    if isinstance(term, Id):
        return env.pure(term.t, term.t, lambda x: x)

    if isinstance(term, Comp):
        return compose(evaluate(term.outer, env), evaluate(term.inner, env))

    if isinstance(term, PropComp):
        raise FormationError("propagator composition (.) is not available for states")

    if isinstance(term, Pair):
        return _pair(term.kind, evaluate(term.first, env), evaluate(term.second, env), env)

    if isinstance(term, Proj):
        target = term.left if term.index == 1 else term.right
        pick = (lambda t: t.first) if term.index == 1 else (lambda t: t.second)
        return env.pure(Prod(term.left, term.right), target, pick)

    if isinstance(term, Final):
        return env.pure(term.t, UNIT, lambda x: UNIT_VAL)

    if isinstance(term, Copair):
        return _copair(evaluate(term.first, env), evaluate(term.second, env), env)

    if isinstance(term, Copr):
        box = InL if term.index == 1 else InR
        source = term.left if term.index == 1 else term.right
        return env.pure(source, Sum(term.left, term.right), box)

    if isinstance(term, Initial):
        return env.pure(EmptyType(), term.t, lambda x: x)

    if isinstance(term, Injection):
        return evaluate(injection(term.index, term.left, term.right), env)

    if isinstance(term, Lookup):
        typecheck(term, env.theory)
        name = term.name
        return env.table(UNIT, EffectVal(name), lambda p: StatePoint(p.state[name], p.state))

    if isinstance(term, Update):
        typecheck(term, env.theory)
        name = term.name
        return env.table(EffectVal(name), UNIT,
                         lambda p: StatePoint(UNIT_VAL, p.state.updated(name, p.value)))

    if isinstance(term, (Tag, Untag, UntagAll)):
        raise EffectSideError("tag/untag have no meaning in the state model")

    if isinstance(term, Const):
        try:
            return env.consts[term.opname]
        except KeyError:
            raise UndeclaredName("operation", term.opname) from None

    raise TypeError(f"cannot evaluate {term!r}")


def compose(outer: StDenotation, inner: StDenotation) -> StDenotation:
    if inner.target != outer.source:
        raise TypeMismatch(outer.source, inner.target, (), "composition")
    rows = tuple((p, outer(q)) for p, q in inner.rows)
    return StDenotation(inner.source, outer.target, Decoration.MODIFIER, rows, classify(rows, 2))


def _pair(kind: PairKind, first: StDenotation, second: StDenotation,
          env: StateEnvironment) -> StDenotation:
    if first.source != second.source:
        raise TypeMismatch(first.source, second.source, (), "pair components need a common source")
    target = Prod(first.target, second.target)

    if kind is PairKind.SYMMETRIC:
        if first.min_deco > Decoration.ACCESSOR or second.min_deco > Decoration.ACCESSOR:
            raise FormationError("a symmetric pair needs accessor components in the state model")
        return env.table(first.source, target, lambda p: StatePoint(
            TupleVal(first(p).value, second(p).value), p.state))

    if kind is PairKind.LEFT:
        if first.min_deco > Decoration.ACCESSOR:
            raise FormationError("the first component of a left pair must be an accessor")

        def left(p: StatePoint) -> StatePoint:
            after = second(p)
            return StatePoint(TupleVal(first(p).value, after.value), after.state)

        return env.table(first.source, target, left)

    if second.min_deco > Decoration.ACCESSOR:
        raise FormationError("the second component of a right pair must be an accessor")

    def right(p: StatePoint) -> StatePoint:
        after = first(p)
        return StatePoint(TupleVal(after.value, second(p).value), after.state)

    return env.table(first.source, target, right)


def _copair(first: StDenotation, second: StDenotation, env: StateEnvironment) -> StDenotation:
    """Case split through distributivity: (A1+A2)×S ≅ A1×S + A2×S."""
    if first.target != second.target:
        raise TypeMismatch(first.target, second.target, (), "copair legs need a common target")
    source = copair_source(first.source, second.source)

    def route(p: StatePoint) -> StatePoint:
        if isinstance(second.source, EmptyType):
            return first(p)
        if isinstance(first.source, EmptyType):
            return second(p)
        leg = first if isinstance(p.value, InL) else second
        return leg(StatePoint(p.value.value, p.state))

    return env.table(source, first.target, route)


def _same(y: StatePoint, z: StatePoint, strong: bool) -> bool:
    # 弱相等只比较值，不看最终状态
    return y == z if strong else y.value == z.value


def compare(lhs: StDenotation, rhs: StDenotation, strength: Strength,
            equation: Optional[Equation] = None) -> Verdict:
    if lhs.source != rhs.source:
        raise TypeMismatch(lhs.source, rhs.source, ("lhs",), "equation sides need a common source")
    if lhs.target != rhs.target:
        raise TypeMismatch(lhs.target, rhs.target, ("lhs",), "equation sides need a common target")
    eq = equation or Equation(Id(lhs.source), Id(rhs.source), strength)

    strong = strength is Strength.STRONG
    for p, y in lhs.rows:
        z = rhs(p)
        if not _same(y, z, strong):
            return Verdict(eq, False, Counterexample(p, y, z, strength))
    return Verdict(eq, True)


def decide(eq: Equation, env: StateEnvironment) -> Verdict:
    # << is read as ∼ on the state side
    verdict = compare(evaluate(eq.lhs, env), evaluate(eq.rhs, env), eq.strength, eq)
    logger.debug(f"decide {eq.strength.value}: {verdict}")
    return verdict


# ---------------------------------------------------------------------------
# Function spaces and point-by-point solving
# ---------------------------------------------------------------------------


def _builder(source: TypeExpr, target: TypeExpr, level: int,
             env: StateEnvironment) -> Callable[[Tuple], StDenotation]:
    def build(rows: Tuple) -> StDenotation:
        den = StDenotation(source, target, Decoration(level), rows, classify(rows, level))
        return lift(level, 2, den, env) if level < 2 else den

    return build


def table_space(env: StateEnvironment, source: TypeExpr, target: TypeExpr,
                level: int) -> TableSpace:
    """Every table of the given level, each lifted to level 2 when built."""
    return TableSpace(env.inputs(source, level), env.outputs(target, level),
                      _builder(source, target, level, env))


def copair_solutions(f: StDenotation, g: StDenotation,
                     env: StateEnvironment) -> PointwiseSolutions:
    """Modifiers h on f.source + g.source with h∘in1 == f and h∘in2 == g."""
    source = Sum(f.source, g.source)

    def accepts(p: StatePoint, y: StatePoint) -> bool:
        leg = f if isinstance(p.value, InL) else g
        return y == leg(StatePoint(p.value.value, p.state))

    return solve_pointwise(env.inputs(source, 2), env.outputs(f.target, 2), accepts,
                           _builder(source, f.target, 2, env))


def pair_solutions(kind: PairKind, first: StDenotation, second: StDenotation,
                   env: StateEnvironment) -> PointwiseSolutions:
    """Modifiers h with the weak law on the accessor side and the strong law on the other."""
    if first.source != second.source:
        raise TypeMismatch(first.source, second.source, (), "pair components need a common source")
    target = Prod(first.target, second.target)
    first_strong = kind is not PairKind.LEFT
    second_strong = kind is PairKind.LEFT

    def accepts(p: StatePoint, y: StatePoint) -> bool:
        head = StatePoint(y.value.first, y.state)
        tail = StatePoint(y.value.second, y.state)
        return _same(head, first(p), first_strong) and _same(tail, second(p), second_strong)

    return solve_pointwise(env.inputs(first.source, 2), env.outputs(target, 2), accepts,
                           _builder(first.source, target, 2, env))
