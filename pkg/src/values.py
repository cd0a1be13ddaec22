# 有限模型中的值、载体枚举与字面量格式化

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Iterator, Optional, Tuple, Union

from src.error_handler import CarrierTooLarge, UndeclaredName
from src.models import Base, EffectVal, EmptyType, Prod, Sum, TypeExpr, UnitType


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class UnitVal:
    pass


@dataclass(frozen=True)
class TupleVal:
    first: "Value"
    second: "Value"


@dataclass(frozen=True)
class InL:
    value: "Value"


@dataclass(frozen=True)
class InR:
    value: "Value"


@dataclass(frozen=True)
class Packet:
    """An exception: payload boxed under an exception name."""

    name: str
    payload: "Value"


Value = Union[Atom, UnitVal, TupleVal, InL, InR, Packet]

UNIT_VAL = UnitVal()


@dataclass(frozen=True)
class StateVal:
    """A state: one value per declared location, in declaration order."""

    bindings: Tuple[Tuple[str, Value], ...]

    def __getitem__(self, location: str) -> Value:
        for name, value in self.bindings:
            if name == location:
                return value
        raise KeyError(location)

    def updated(self, location: str, value: Value) -> "StateVal":
        return StateVal(tuple((n, value if n == location else v) for n, v in self.bindings))

    def locations(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.bindings)


@dataclass(frozen=True)
class StatePoint:
    """An element of X×S: a value paired with a state."""

    value: Value
    state: StateVal


def format_value(value: object) -> str:
    if isinstance(value, Atom):
        return value.name
    if isinstance(value, UnitVal):
        return "()"
    if isinstance(value, TupleVal):
        return f"({format_value(value.first)}, {format_value(value.second)})"
    if isinstance(value, InL):
        return f"inl {_wrap(value.value)}"
    if isinstance(value, InR):
        return f"inr {_wrap(value.value)}"
    if isinstance(value, Packet):
        return f"exn {value.name} {_wrap(value.payload)}"
    if isinstance(value, StateVal):
        inner = ", ".join(f"{n}={format_value(v)}" for n, v in value.bindings)
        return "{" + inner + "}"
    if isinstance(value, StatePoint):
        return f"({format_value(value.value)}, {format_value(value.state)})"
    return repr(value)


def _wrap(value: Value) -> str:
    text = format_value(value)
    if isinstance(value, (InL, InR, Packet)):
        return f"({text})"
    return text


class Carriers:
    """Canonical enumeration of type carriers for one theory.

    Atoms in declaration order, tuples lexicographic, sums left then right.
    """

    def __init__(self, base_types: Dict[str, Tuple[str, ...]],
                 effect_carriers: Dict[str, Tuple[Value, ...]], max_carrier: int = 16):
        self.base_types = base_types
        self.effect_carriers = effect_carriers
        self.max_carrier = max_carrier
        self._cache: Dict[TypeExpr, Tuple[Value, ...]] = {}

    def carrier(self, t: TypeExpr) -> Tuple[Value, ...]:
        cached = self._cache.get(t)
        if cached is not None:
            return cached
        values = self._enumerate(t)
        if len(values) > self.max_carrier:
            from src.frontend import pretty_type

            raise CarrierTooLarge(
                f"carrier of {pretty_type(t)} has {len(values)} elements (limit {self.max_carrier})"
            )
        self._cache[t] = values
        return values

    def size(self, t: TypeExpr) -> int:
        return len(self.carrier(t))

    def _enumerate(self, t: TypeExpr) -> Tuple[Value, ...]:
        if isinstance(t, UnitType):
            return (UNIT_VAL,)
        if isinstance(t, EmptyType):
            return ()
        if isinstance(t, Base):
            if t.name not in self.base_types:
                raise UndeclaredName("type", t.name)
            return tuple(Atom(a) for a in self.base_types[t.name])
        if isinstance(t, EffectVal):
            if t.name not in self.effect_carriers:
                raise UndeclaredName("effect name", str(t.name))
            return self.effect_carriers[t.name]
        if isinstance(t, Prod):
            left, right = self.carrier(t.left), self.carrier(t.right)
            return tuple(TupleVal(a, b) for a, b in itertools.product(left, right))
        if isinstance(t, Sum):
            return tuple(InL(a) for a in self.carrier(t.left)) + tuple(
                InR(b) for b in self.carrier(t.right)
            )
        raise TypeError(f"not a concrete type: {t!r}")

    def contains(self, t: TypeExpr, value: Value) -> bool:
        return value in self.carrier(t)


class TableSpace:
    """All total tables domain -> codomain, materialized one at a time by `build`."""

    def __init__(self, domain: Tuple, codomain: Tuple, build: Callable[[Tuple], object]):
        self.domain = domain
        self.codomain = codomain
        self.build = build

    @property
    def size(self) -> int:
        return len(self.codomain) ** len(self.domain)

    def table(self, changes: Optional[Dict[object, object]] = None) -> object:
        """The table sending every point to the first output, except where `changes` says otherwise."""
        changes = changes or {}
        default = self.codomain[0] if self.codomain else None
        return self.build(tuple((x, changes.get(x, default)) for x in self.domain))


@dataclass(frozen=True)
class PointwiseSolutions:
    """Solutions of a law that constrains each input point of an unknown table on its own.

    choices[i] 是 domain[i] 处允许的输出；解就是各点选择的全部组合，
    所以解的个数等于各点选择数的乘积。
    """

    domain: Tuple
    choices: Tuple[Tuple, ...]
    build: Callable[[Tuple], object] = field(compare=False, repr=False)
    feasible: bool = True

    @cached_property
    def _index(self) -> Dict[object, int]:
        return {x: i for i, x in enumerate(self.domain)}

    @property
    def count(self) -> int:
        if not self.feasible:
            return 0
        return math.prod(len(c) for c in self.choices)

    def at(self, point: object) -> Tuple:
        return self.choices[self._index[point]]

    def unique(self) -> Optional[object]:
        if self.count != 1:
            return None
        return self.build(tuple((x, c[0]) for x, c in zip(self.domain, self.choices)))

    def __iter__(self) -> Iterator[object]:
        if not self.feasible:
            return
        for outputs in itertools.product(*self.choices):
            yield self.build(tuple(zip(self.domain, outputs)))


def solve_pointwise(domain: Tuple, codomain: Tuple, accepts: Callable[[object, object], bool],
                    build: Callable[[Tuple], object], feasible: bool = True) -> PointwiseSolutions:
    """Keep, for every input point, the outputs the law accepts there.

    `feasible` is False when a part of the law that does not involve the unknown table
    already fails; then no point has a choice.
    """
    if not feasible:
        return PointwiseSolutions(domain, tuple(() for _ in domain), build, feasible=False)
    choices = tuple(tuple(y for y in codomain if accepts(x, y)) for x in domain)
    return PointwiseSolutions(domain, choices, build)
