# 对象语言的数据模型：类型、带装饰的项、方程与判断

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, Iterator, Optional, Tuple, Union


class Decoration(IntEnum):
    """Decoration levels, totally ordered: 0 < 1 < 2.

    Level 1 is a constructor (propagator) on the monad side and an accessor on
    the comonad side; level 2 is a modifier (catcher on the exception side).
    """

    PURE = 0
    CONSTRUCTOR = 1
    MODIFIER = 2

    # comonad-side and exception-side aliases
    ACCESSOR = 1
    PROPAGATOR = 1
    CATCHER = 2


class PairKind(Enum):
    SYMMETRIC = "symmetric"
    LEFT = "left"
    RIGHT = "right"


class Strength(Enum):
    STRONG = "strong"
    WEAK = "weak"
    # f << v: the pure v agrees with the propagator f on its domain of definition
    ORDERED = "ordered"

    @property
    def symbol(self) -> str:
        return {"strong": "==", "weak": "~", "ordered": "<<"}[self.value]


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Base:
    name: str


@dataclass(frozen=True)
class UnitType:
    pass


@dataclass(frozen=True)
class EmptyType:
    pass


@dataclass(frozen=True)
class Prod:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class Sum:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class EffectVal:
    """V_T for an exception name or a location name T."""

    name: "Name"


# Schema-only type patterns (rule descriptors); never produced by the frontend.
@dataclass(frozen=True)
class TypeVar:
    name: str


@dataclass(frozen=True)
class CopairSource:
    """Source of a copair of legs from `left` and `right` (A+0 collapses to A)."""

    left: "TypeExpr"
    right: "TypeExpr"


TypeExpr = Union[Base, UnitType, EmptyType, Prod, Sum, EffectVal, TypeVar, CopairSource]

UNIT = UnitType()
EMPTY = EmptyType()


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NameVar:
    """Metavariable ranging over declared exception or location names."""

    name: str


Name = Union[str, NameVar]


@dataclass(frozen=True)
class Id:
    t: TypeExpr


@dataclass(frozen=True)
class Comp:
    outer: "Term"
    inner: "Term"


@dataclass(frozen=True)
class PropComp:
    """Propagator composition: outer (.) inner."""

    outer: "Term"
    inner: "Term"


@dataclass(frozen=True)
class Pair:
    kind: PairKind
    first: "Term"
    second: "Term"


@dataclass(frozen=True)
class Proj:
    index: int
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Final:
    t: TypeExpr


@dataclass(frozen=True)
class Copair:
    kind: PairKind
    first: "Term"
    second: "Term"


@dataclass(frozen=True)
class Copr:
    index: int
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Initial:
    t: TypeExpr


@dataclass(frozen=True)
class Tag:
    name: Name


@dataclass(frozen=True)
class Untag:
    name: Name


@dataclass(frozen=True)
class UntagAll:
    pass


@dataclass(frozen=True)
class Lookup:
    name: Name


@dataclass(frozen=True)
class Update:
    name: Name


@dataclass(frozen=True)
class Const:
    opname: str


# Schema-only term patterns.
@dataclass(frozen=True)
class TermVar:
    name: str


@dataclass(frozen=True)
class Injection:
    """Coprojection pattern for copair laws: in1/in2, or id/[] when a side is 0."""

    index: int
    left: TypeExpr
    right: TypeExpr


Term = Union[
    Id, Comp, PropComp, Pair, Proj, Final, Copair, Copr, Initial,
    Tag, Untag, UntagAll, Lookup, Update, Const, TermVar, Injection,
]


def children(term: Term) -> Tuple[Tuple[str, Term], ...]:
    """Immediate subterms with the path label used in diagnostics."""
    if isinstance(term, (Comp, PropComp)):
        return (("outer", term.outer), ("inner", term.inner))
    if isinstance(term, (Pair, Copair)):
        return (("first", term.first), ("second", term.second))
    return ()


def subterms(term: Term) -> Iterator[Term]:
    yield term
    for _, child in children(term):
        yield from subterms(child)


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term
    strength: Strength


# ---------------------------------------------------------------------------
# Programmer-level exception constructs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Handler:
    """One `T => g` clause; name None is the catch-all clause (body: 1 -> B)."""

    name: Optional[str]
    body: Term


@dataclass(frozen=True)
class TryCatchSpec:
    body: Term
    handlers: Tuple[Handler, ...]
    catch_all: Optional[Term] = None


# ---------------------------------------------------------------------------
# Judgments and derivations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TermJudgment:
    term: Term
    source: TypeExpr
    target: TypeExpr
    deco: Decoration


@dataclass(frozen=True)
class EqJudgment:
    eq: Equation


Judgment = Union[TermJudgment, EqJudgment]
Binding = Union[Term, TypeExpr, str]


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgment
    premises: Tuple["Derivation", ...] = ()
    instantiation: Tuple[Tuple[str, Binding], ...] = ()

    def bindings(self) -> Dict[str, Binding]:
        return dict(self.instantiation)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


# ---------------------------------------------------------------------------
# Model verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    """First differing input in canonical enumeration order."""

    input: object
    lhs: object
    rhs: object
    strength: Strength
    reason: Optional[str] = None


@dataclass(frozen=True)
class Verdict:
    equation: Equation
    holds: bool
    counterexample: Optional[Counterexample] = field(default=None)

    def __str__(self) -> str:
        return "holds" if self.holds else "fails"
