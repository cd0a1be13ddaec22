# 异常单子 M X = X + E 上的有限集合语义
#
# 值 A+E 直接用普通值与 Packet 的并表示，因此 η 在表示上是恒等映射；
# 所有求值结果都以第 2 层（A+E → B+E）的稠密表给出。

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
    NotAPropagator,
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
    Packet,
    TupleVal,
    PointwiseSolutions,
    TableSpace,
    Value,
    format_value,
    solve_pointwise,
)

logger = get_logger(__name__)


def is_packet(value: object) -> bool:
    return isinstance(value, Packet)


@dataclass(frozen=True)
class ExcDenotation:
    """A finite function table at representation level `level`.

    level 0: A -> B, level 1: A -> B+E, level 2: A+E -> B+E.
    """

    source: TypeExpr
    target: TypeExpr
    level: Decoration
    rows: Tuple[Tuple[Value, Value], ...]
    min_deco: Decoration

    @cached_property
    def table(self) -> Dict[Value, Value]:
        return dict(self.rows)

    def __call__(self, x: Value) -> Value:
        return self.table[x]

    def ordinary_rows(self) -> Tuple[Tuple[Value, Value], ...]:
        return tuple((x, y) for x, y in self.rows if not is_packet(x))

    def packet_rows(self) -> Tuple[Tuple[Value, Value], ...]:
        return tuple((x, y) for x, y in self.rows if is_packet(x))


@dataclass(frozen=True)
class Decomposition:
    """Split of a propagator's source into its domain of definition and exceptional part."""

    domain: Tuple[Value, ...]
    exceptional: Tuple[Value, ...]
    normal: Tuple[Tuple[Value, Value], ...]
    abrupt: Tuple[Tuple[Value, Packet], ...]


def classify(rows: Tuple[Tuple[Value, Value], ...], level: int) -> Decoration:
    """Semantic minimal decoration of a table."""
    if level == 0:
        return Decoration.PURE
    if level == 2:
        for x, y in rows:
            if is_packet(x) and y != x:
                return Decoration.CATCHER
    for x, y in rows:
        if not is_packet(x) and is_packet(y):
            return Decoration.PROPAGATOR
    return Decoration.PURE


class ExceptionEnvironment:
    """Carriers, the exception set E and the installed Const denotations of one theory."""

    def __init__(self, theory: Theory, carriers: Carriers, exceptions: Tuple[Packet, ...],
                 limits: Limits):
        self.theory = theory
        self.carriers = carriers
        self.exceptions = exceptions
        self.limits = limits
        self.consts: Dict[str, ExcDenotation] = {}
        self._cache: Dict[Term, ExcDenotation] = {}

    def carrier(self, t: TypeExpr) -> Tuple[Value, ...]:
        return self.carriers.carrier(t)

    def inputs(self, t: TypeExpr, level: int = 2) -> Tuple[Value, ...]:
        if level == 2:
            return self.carrier(t) + self.exceptions
        return self.carrier(t)

    def outputs(self, t: TypeExpr, level: int = 2) -> Tuple[Value, ...]:
        if level == 0:
            return self.carrier(t)
        return self.carrier(t) + self.exceptions

    def table(self, source: TypeExpr, target: TypeExpr,
              ordinary: Callable[[Value], Value],
              packet: Optional[Callable[[Packet], Value]] = None) -> ExcDenotation:
        """Level-2 table from an ordinary-input map and a packet map (identity by default)."""
        rows = [(x, ordinary(x)) for x in self.carrier(source)]
        rows += [(p, packet(p) if packet else p) for p in self.exceptions]
        frozen = tuple(rows)
        return ExcDenotation(source, target, Decoration.MODIFIER, frozen, classify(frozen, 2))

    def eta(self, t: TypeExpr) -> ExcDenotation:
        """η_A : A -> A+E as a level-1 table."""
        rows = tuple((x, x) for x in self.carrier(t))
        return ExcDenotation(t, t, Decoration.CONSTRUCTOR, rows, Decoration.PURE)


def build_environment(theory: Theory, limits: Optional[Limits] = None) -> ExceptionEnvironment:
    limits = limits or Limits()
    if theory.side is Side.STATES:
        raise EffectSideError(f"theory '{theory.name}' is state-sided; use the state model")

    base_types = {decl.name: decl.atoms for decl in theory.base_types}
    effect_carriers = {decl.name: decl.carrier for decl in theory.effects}
    carriers = Carriers(base_types, effect_carriers, limits.max_carrier)

    exceptions = tuple(
        Packet(decl.name, payload) for decl in theory.effects for payload in decl.carrier
    )
    if len(exceptions) > limits.max_carrier:
        raise CarrierTooLarge(
            f"exception set has {len(exceptions)} elements (limit {limits.max_carrier})"
        )

    env = ExceptionEnvironment(theory, carriers, exceptions, limits)
    for op in theory.ops:
        env.consts[op.name] = _const_denotation(op, env)
    logger.debug(
        f"Exception model for '{theory.name}': |E|={len(exceptions)}, {len(env.consts)} ops"
    )
    return env


def _const_denotation(op: OpDecl, env: ExceptionEnvironment) -> ExcDenotation:
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
        y = given[x]
        if y not in codomain:
            raise IncompleteConstTable(
                f"op '{op.name}' maps {format_value(x)} to {format_value(y)}, "
                f"which is not allowed at decoration {level}"
            ).at(op.line, 1)
        rows.append((x, y))
    extra = set(given) - set(domain)
    if extra:
        first = sorted(format_value(x) for x in extra)[0]
        raise IncompleteConstTable(
            f"op '{op.name}' has a row for {first}, outside its domain"
        ).at(op.line, 1)

    frozen = tuple(rows)
    den = ExcDenotation(op.source, op.target, Decoration(level), frozen, classify(frozen, level))
    return lift(level, 2, den, env)


def lift(d_from: int, d_to: int, den: ExcDenotation, env: ExceptionEnvironment) -> ExcDenotation:
    if d_from > d_to:
        raise IllegalLift(f"cannot lift from decoration {d_from} down to {d_to}")
    if den.level != d_from:
        raise IllegalLift(f"denotation is represented at level {den.level}, not {d_from}")
    if den.min_deco > d_from:
        raise IllegalLift(f"denotation has decoration {den.min_deco}, above {d_from}")
    if d_from == d_to:
        return den
    rows = den.rows
    if d_to == 2:
        rows = rows + tuple((p, p) for p in env.exceptions)
    return ExcDenotation(den.source, den.target, Decoration(d_to), rows, den.min_deco)


def restrict(den: ExcDenotation, level: int) -> ExcDenotation:
    """Lower representation: f2 ∘ η at level 1, and the plain function at level 0."""
    if level >= den.level:
        return den
    if level == 0 and den.min_deco > 0:
        raise DecorationMismatch(f"a table of decoration {den.min_deco} has no pure restriction")
    rows = den.ordinary_rows()
    return ExcDenotation(den.source, den.target, Decoration(level), rows,
                         classify(rows, level))


def evaluate(term: Term, env: ExceptionEnvironment) -> ExcDenotation:
    cached = env._cache.get(term)
    if cached is None:
        cached = _evaluate(term, env)
        env._cache[term] = cached
    return cached


def _evaluate(term: Term, env: ExceptionEnvironment) -> ExcDenotation:
    if isinstance(term, Id):
        return env.table(term.t, term.t, lambda x: x)

    if isinstance(term, Comp):
        inner = evaluate(term.inner, env)
        outer = evaluate(term.outer, env)
        return compose(outer, inner, env)

    if isinstance(term, PropComp):
        inner = evaluate(term.inner, env)
        outer = evaluate(term.outer, env)
        if inner.min_deco > Decoration.PROPAGATOR:
            raise FormationError("the inner factor of (.) must be a propagator")
        # k ⊙ f = k2 ∘ f1 lifted: incoming packets bypass k
        return env.table(inner.source, outer.target, lambda x: outer(inner(x)))

    if isinstance(term, Pair):
        first = evaluate(term.first, env)
        second = evaluate(term.second, env)
        if term.kind is PairKind.LEFT:
            return interp_left_pair(first, second, env)
        if term.kind is PairKind.RIGHT:
            return interp_right_pair(first, second, env)
        if first.min_deco > 0 or second.min_deco > 0:
            raise FormationError("a symmetric pair needs pure components in the exception model")
        return env.table(first.source, Prod(first.target, second.target),
                         lambda x: TupleVal(first(x), second(x)))

    if isinstance(term, Proj):
        pick = (lambda t: t.first) if term.index == 1 else (lambda t: t.second)
        target = term.left if term.index == 1 else term.right
        return env.table(Prod(term.left, term.right), target, pick)

    if isinstance(term, Final):
        return env.table(term.t, UNIT, lambda x: UNIT_VAL)

    if isinstance(term, Copair):
        return _copair(term.kind, evaluate(term.first, env), evaluate(term.second, env), env)

    if isinstance(term, Copr):
        box = InL if term.index == 1 else InR
        source = term.left if term.index == 1 else term.right
        return env.table(source, Sum(term.left, term.right), box)

    if isinstance(term, Initial):
        return env.table(EmptyType(), term.t, lambda x: x)

    if isinstance(term, Injection):
        return evaluate(injection(term.index, term.left, term.right), env)

    if isinstance(term, Tag):
        name = term.name
        typecheck(term, env.theory)
        return env.table(EffectVal(name), EmptyType(), lambda a: Packet(name, a))

    if isinstance(term, Untag):
        name = term.name
        typecheck(term, env.theory)
        return env.table(EmptyType(), EffectVal(name), lambda x: x,
                         lambda p: p.payload if p.name == name else p)

    if isinstance(term, UntagAll):
        return env.table(EmptyType(), UNIT, lambda x: x, lambda p: UNIT_VAL)

    if isinstance(term, (Lookup, Update)):
        raise EffectSideError("lookup/update have no meaning in the exception model")

    if isinstance(term, Const):
        try:
            return env.consts[term.opname]
        except KeyError:
            raise UndeclaredName("operation", term.opname) from None

    raise TypeError(f"cannot evaluate {term!r}")


def compose(outer: ExcDenotation, inner: ExcDenotation, env: ExceptionEnvironment) -> ExcDenotation:
    if inner.target != outer.source:
        raise TypeMismatch(outer.source, inner.target, (), "composition")
    rows = tuple((x, outer(y)) for x, y in inner.rows)
    return ExcDenotation(inner.source, outer.target, Decoration.MODIFIER, rows,
                         classify(rows, 2))


def _copair(kind: PairKind, first: ExcDenotation, second: ExcDenotation,
            env: ExceptionEnvironment) -> ExcDenotation:
    if first.target != second.target:
        raise TypeMismatch(first.target, second.target, (), "copair legs need a common target")
    source = copair_source(first.source, second.source)

    if isinstance(second.source, EmptyType):
        ordinary = first
    elif isinstance(first.source, EmptyType):
        ordinary = second
    else:
        ordinary = None

    def route(x: Value) -> Value:
        if ordinary is not None:
            return ordinary(x)
        return first(x.value) if isinstance(x, InL) else second(x.value)

    if kind is PairKind.LEFT:
        return env.table(source, first.target, route, second)
    if kind is PairKind.RIGHT:
        return env.table(source, first.target, route, first)
    if first.min_deco > Decoration.PROPAGATOR or second.min_deco > Decoration.PROPAGATOR:
        raise FormationError("a symmetric copair needs propagating legs in the exception model")
    return env.table(source, first.target, route)


def decompose(den: ExcDenotation) -> Decomposition:
    if den.min_deco > Decoration.PROPAGATOR:
        raise NotAPropagator("decomposition needs a propagator")
    rows = den.ordinary_rows()
    return Decomposition(
        domain=tuple(x for x, y in rows if not is_packet(y)),
        exceptional=tuple(x for x, y in rows if is_packet(y)),
        normal=tuple((x, y) for x, y in rows if not is_packet(y)),
        abrupt=tuple((x, y) for x, y in rows if is_packet(y)),
    )


def _require_pure_and_propagator(v: ExcDenotation, f: ExcDenotation, what: str) -> None:
    if v.min_deco > Decoration.PURE:
        raise DecorationMismatch(f"{what}: the first table must be pure, it has {v.min_deco}")
    if f.min_deco > Decoration.PROPAGATOR:
        raise DecorationMismatch(f"{what}: the second table must be a propagator")
    if v.source != f.source:
        raise TypeMismatch(v.source, f.source, (), what)


def geq(v: ExcDenotation, f: ExcDenotation) -> bool:
    """v agrees with the propagator f on f's domain of definition."""
    _require_pure_and_propagator(v, f, "order")
    if v.target != f.target:
        raise TypeMismatch(v.target, f.target, (), "order")
    return all(v(x) == y for x, y in decompose(f).normal)


def interp_left_pair(v: ExcDenotation, f: ExcDenotation,
                     env: ExceptionEnvironment) -> ExcDenotation:
    """Left pair of a pure v and a propagator f: f decides whether the pair raises."""
    _require_pure_and_propagator(v, f, "left pair")

    def pair(x: Value) -> Value:
        y = f(x)
        return y if is_packet(y) else TupleVal(v(x), y)

    return env.table(v.source, Prod(v.target, f.target), pair)


def interp_right_pair(f: ExcDenotation, v: ExcDenotation,
                      env: ExceptionEnvironment) -> ExcDenotation:
    _require_pure_and_propagator(v, f, "right pair")

    def pair(x: Value) -> Value:
        y = f(x)
        return y if is_packet(y) else TupleVal(y, v(x))

    return env.table(v.source, Prod(f.target, v.target), pair)


def _first_difference(lhs: ExcDenotation, rhs: ExcDenotation,
                      inputs: Tuple[Value, ...]) -> Optional[Value]:
    for x in inputs:
        if lhs(x) != rhs(x):
            return x
    return None


def compare(lhs: ExcDenotation, rhs: ExcDenotation, strength: Strength,
            equation: Optional[Equation] = None) -> Verdict:
    if lhs.source != rhs.source:
        raise TypeMismatch(lhs.source, rhs.source, ("lhs",), "equation sides need a common source")
    if lhs.target != rhs.target:
        raise TypeMismatch(lhs.target, rhs.target, ("lhs",), "equation sides need a common target")
    eq = equation or Equation(Id(lhs.source), Id(rhs.source), strength)

    if strength is Strength.ORDERED:
        if lhs.min_deco > Decoration.PROPAGATOR or rhs.min_deco > Decoration.PURE:
            x = lhs.rows[0][0] if lhs.rows else None
            return Verdict(eq, False, Counterexample(
                x, lhs(x) if x is not None else None, rhs(x) if x is not None else None,
                strength, "<< needs a propagator on the left and a pure term on the right"))
        domain = decompose(lhs).domain
        x = _first_difference(lhs, rhs, domain)
    elif strength is Strength.WEAK:
        x = _first_difference(lhs, rhs, tuple(i for i, _ in lhs.ordinary_rows()))
    else:
        x = _first_difference(lhs, rhs, tuple(i for i, _ in lhs.rows))

    if x is None:
        return Verdict(eq, True)
    return Verdict(eq, False, Counterexample(x, lhs(x), rhs(x), strength))


def decide(eq: Equation, env: ExceptionEnvironment) -> Verdict:
    lhs = evaluate(eq.lhs, env)
    rhs = evaluate(eq.rhs, env)
    verdict = compare(lhs, rhs, eq.strength, eq)
    logger.debug(f"decide {eq.strength.value}: {verdict}")
    return verdict


# ---------------------------------------------------------------------------
# Function spaces and point-by-point solving for existence/uniqueness checks
# ---------------------------------------------------------------------------


def _builder(source: TypeExpr, target: TypeExpr, level: int,
             env: ExceptionEnvironment) -> Callable[[Tuple], ExcDenotation]:
    def build(rows: Tuple) -> ExcDenotation:
        den = ExcDenotation(source, target, Decoration(level), rows, classify(rows, level))
        return lift(level, 2, den, env) if level < 2 else den

    return build


def table_space(env: ExceptionEnvironment, source: TypeExpr, target: TypeExpr,
                level: int) -> TableSpace:
    """Every table of the given level, each lifted to level 2 when built."""
    return TableSpace(env.inputs(source, level), env.outputs(target, level),
                      _builder(source, target, level, env))


def copair_solutions(f: ExcDenotation, g: ExcDenotation, env: ExceptionEnvironment,
                     level: int = 2) -> PointwiseSolutions:
    """Tables h on f.source + g.source with h∘in1 == f and h∘in2 == g (strongly).

    An incoming packet reaches h through both injections, so h must agree with f and g there.
    """
    if f.target != g.target:
        raise TypeMismatch(f.target, g.target, (), "copair legs need a common target")
    source = Sum(f.source, g.source)

    def accepts(x: Value, y: Value) -> bool:
        if isinstance(x, InL):
            return y == f(x.value)
        if isinstance(x, InR):
            return y == g(x.value)
        return y == f(x) == g(x)

    # below level 2 the packets pass h untouched
    feasible = level == 2 or all(f(p) == p == g(p) for p in env.exceptions)
    return solve_pointwise(env.inputs(source, level), env.outputs(f.target, level), accepts,
                           _builder(source, f.target, level, env), feasible)


def _pair_solutions(kind: PairKind, v: ExcDenotation, f: ExcDenotation,
                    env: ExceptionEnvironment) -> PointwiseSolutions:
    """Propagators h whose projection onto v's side is << v and onto f's side is == f."""
    if v.source != f.source:
        raise TypeMismatch(v.source, f.source, (), f"{kind.value} pair")
    left = kind is PairKind.LEFT
    target = Prod(v.target, f.target) if left else Prod(f.target, v.target)

    def accepts(x: Value, y: Value) -> bool:
        if is_packet(y):
            return y == f(x)
        pure_part, effect_part = (y.first, y.second) if left else (y.second, y.first)
        return pure_part == v(x) and effect_part == f(x)

    # << needs a pure right-hand side; h propagates packets, so f must as well
    feasible = v.min_deco == Decoration.PURE and all(f(p) == p for p in env.exceptions)
    return solve_pointwise(env.inputs(v.source, 1), env.outputs(target, 1), accepts,
                           _builder(v.source, target, 1, env), feasible)


def left_pair_solutions(v: ExcDenotation, f: ExcDenotation,
                        env: ExceptionEnvironment) -> PointwiseSolutions:
    """Propagators h with pr1∘h << v and pr2∘h == f."""
    return _pair_solutions(PairKind.LEFT, v, f, env)


def right_pair_solutions(f: ExcDenotation, v: ExcDenotation,
                         env: ExceptionEnvironment) -> PointwiseSolutions:
    """Propagators h with pr1∘h == f and pr2∘h << v."""
    return _pair_solutions(PairKind.RIGHT, v, f, env)
