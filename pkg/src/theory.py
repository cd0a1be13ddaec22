# 理论数据模型：效应声明、基类型、操作表、公理与检查语句

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

from src.error_handler import EffectSideError, UndeclaredName
from src.models import Decoration, Equation, Term, TryCatchSpec, TypeExpr
from src.profiles import LogicProfile, ProfileSide
from src.values import Value


class Side(Enum):
    EXCEPTIONS = "exceptions"
    STATES = "states"
    NONE = "none"


@dataclass(frozen=True)
class EffectDecl:
    """An exception name or a location name together with its carrier V_T."""

    name: str
    carrier: Tuple[Value, ...]


@dataclass(frozen=True)
class BaseTypeDecl:
    name: str
    atoms: Tuple[str, ...]


@dataclass(frozen=True)
class OpDecl:
    name: str
    source: TypeExpr
    target: TypeExpr
    deco: Decoration
    # (input, output) literal pairs at the representation level of `deco`
    rows: Tuple[Tuple[object, object], ...]
    line: int = 0


@dataclass(frozen=True)
class AxiomDecl:
    name: str
    equation: Equation
    line: int = 0


@dataclass(frozen=True)
class CheckStmt:
    name: str
    equation: Equation
    expect: bool
    line: int = 0


@dataclass(frozen=True)
class EvalStmt:
    term: Term
    input: object
    line: int = 0


@dataclass(frozen=True)
class TryBlock:
    """A surface try/catch kept next to its elaboration for oracle cross-checks."""

    spec: TryCatchSpec
    term: Term
    source: TypeExpr
    target: TypeExpr
    line: int = 0


@dataclass(frozen=True)
class Theory:
    name: str
    side: Side
    profile: LogicProfile
    effects: Tuple[EffectDecl, ...] = ()
    base_types: Tuple[BaseTypeDecl, ...] = ()
    ops: Tuple[OpDecl, ...] = ()
    axioms: Tuple[AxiomDecl, ...] = ()
    checks: Tuple[CheckStmt, ...] = ()
    evals: Tuple[EvalStmt, ...] = ()
    try_blocks: Tuple[TryBlock, ...] = ()

    def effect_names(self) -> Tuple[str, ...]:
        return tuple(e.name for e in self.effects)

    def effect(self, name: str) -> EffectDecl:
        for decl in self.effects:
            if decl.name == name:
                return decl
        kind = "location" if self.side is Side.STATES else "exception"
        raise UndeclaredName(kind, str(name))

    def base_type(self, name: str) -> BaseTypeDecl:
        for decl in self.base_types:
            if decl.name == name:
                return decl
        raise UndeclaredName("type", name)

    def op(self, name: str) -> OpDecl:
        for decl in self.ops:
            if decl.name == name:
                return decl
        raise UndeclaredName("operation", name)

    def axiom(self, name: str) -> Optional[AxiomDecl]:
        for decl in self.axioms:
            if decl.name == name:
                return decl
        return None

    def require_side(self, side: Side, construct: str) -> None:
        if self.side is not side:
            raise EffectSideError(
                f"{construct} requires a {side.value} theory, but '{self.name}' is {self.side.value}"
            )

    @property
    def uses_state_model(self) -> bool:
        """States theories, and side-free theories under a comonad-side profile."""
        if self.side is Side.STATES:
            return True
        return self.side is Side.NONE and self.profile.side is ProfileSide.COMONAD

    def with_profile(self, profile: LogicProfile) -> "Theory":
        return replace(self, profile=profile)
