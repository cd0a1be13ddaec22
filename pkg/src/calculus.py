# 核心演算：类型检查、装饰推断与按逻辑配置的构造检查

from dataclasses import dataclass
from typing import List, Tuple

from src.error_handler import EffectSideError, TypeMismatch, UndeclaredName
from src.logging_config import get_logger
from src.models import (
    EMPTY,
    UNIT,
    Base,
    Comp,
    Const,
    Copair,
    CopairSource,
    Copr,
    Decoration,
    EffectVal,
    EmptyType,
    Final,
    Id,
    Initial,
    Injection,
    NameVar,
    Pair,
    Prod,
    Proj,
    PropComp,
    Sum,
    Tag,
    Term,
    TermVar,
    TypeExpr,
    TypeVar,
    UnitType,
    Untag,
    UntagAll,
    Lookup,
    Update,
    children,
)
from src.profiles import (
    COPAIR_KEYS,
    EXCEPTION_OPS,
    PAIR_KEYS,
    PROP_COMP,
    STATE_OPS,
    LogicProfile,
)
from src.theory import Side, Theory

logger = get_logger(__name__)

Path = Tuple[str, ...]

_EXCEPTION_NODES = (Tag, Untag, UntagAll)
_STATE_NODES = (Lookup, Update)


@dataclass(frozen=True)
class Violation:
    """A Pair/Copair/PropComp node (or leaf) the active profile does not allow."""

    rule: str
    path: Path
    decorations: Tuple[int, ...]
    message: str

    def __str__(self) -> str:
        where = "/".join(self.path) if self.path else "<root>"
        return f"{where}: {self.message}"


def copair_source(left: TypeExpr, right: TypeExpr) -> TypeExpr:
    """Source of a copair whose legs start at `left` and `right`; A+0 and 0+A collapse to A."""
    if isinstance(right, EmptyType):
        return left
    if isinstance(left, EmptyType):
        return right
    return Sum(left, right)


def injection(index: int, left: TypeExpr, right: TypeExpr) -> Term:
    """The coprojection into copair_source(left, right)."""
    if isinstance(right, EmptyType):
        return Id(left) if index == 1 else Initial(left)
    if isinstance(left, EmptyType):
        return Initial(right) if index == 1 else Id(right)
    return Copr(index, left, right)


def check_type(t: TypeExpr, theory: Theory) -> None:
    if isinstance(t, (UnitType, EmptyType)):
        return
    if isinstance(t, Base):
        theory.base_type(t.name)
        return
    if isinstance(t, EffectVal):
        if isinstance(t.name, NameVar):
            raise UndeclaredName("name metavariable", t.name.name)
        theory.effect(t.name)
        return
    if isinstance(t, (Prod, Sum)):
        check_type(t.left, theory)
        check_type(t.right, theory)
        return
    if isinstance(t, (TypeVar, CopairSource)):
        raise UndeclaredName("type metavariable", getattr(t, "name", "copair-source"))
    raise TypeError(f"not a type: {t!r}")


def _effect_name(name, theory: Theory, side: Side, construct: str) -> str:
    if isinstance(name, NameVar):
        raise UndeclaredName("name metavariable", name.name)
    if theory.side is not side:
        raise EffectSideError(
            f"{construct} requires a {side.value} theory, but '{theory.name}' is {theory.side.value}"
        )
    theory.effect(name)
    return name


def typecheck(term: Term, theory: Theory) -> Tuple[TypeExpr, TypeExpr]:
    return _typecheck(term, theory, ())


def _typecheck(term: Term, theory: Theory, path: Path) -> Tuple[TypeExpr, TypeExpr]:
    if isinstance(term, Id):
        check_type(term.t, theory)
        return term.t, term.t
    if isinstance(term, (Comp, PropComp)):
        outer_src, outer_tgt = _typecheck(term.outer, theory, path + ("outer",))
        inner_src, inner_tgt = _typecheck(term.inner, theory, path + ("inner",))
        if inner_tgt != outer_src:
            raise TypeMismatch(outer_src, inner_tgt, path, "composition")
        return inner_src, outer_tgt
    if isinstance(term, Pair):
        src1, tgt1 = _typecheck(term.first, theory, path + ("first",))
        src2, tgt2 = _typecheck(term.second, theory, path + ("second",))
        if src1 != src2:
            raise TypeMismatch(src1, src2, path, "pair components need a common source")
        return src1, Prod(tgt1, tgt2)
    if isinstance(term, Copair):
        src1, tgt1 = _typecheck(term.first, theory, path + ("first",))
        src2, tgt2 = _typecheck(term.second, theory, path + ("second",))
        if tgt1 != tgt2:
            raise TypeMismatch(tgt1, tgt2, path, "copair legs need a common target")
        return copair_source(src1, src2), tgt1
    if isinstance(term, Proj):
        check_type(term.left, theory)
        check_type(term.right, theory)
        return Prod(term.left, term.right), term.left if term.index == 1 else term.right
    if isinstance(term, Copr):
        check_type(term.left, theory)
        check_type(term.right, theory)
        return term.left if term.index == 1 else term.right, Sum(term.left, term.right)
    if isinstance(term, Final):
        check_type(term.t, theory)
        return term.t, UNIT
    if isinstance(term, Initial):
        check_type(term.t, theory)
        return EMPTY, term.t
    if isinstance(term, Injection):
        return _typecheck(injection(term.index, term.left, term.right), theory, path)
    if isinstance(term, Tag):
        name = _effect_name(term.name, theory, Side.EXCEPTIONS, "tag")
        return EffectVal(name), EMPTY
    if isinstance(term, Untag):
        name = _effect_name(term.name, theory, Side.EXCEPTIONS, "untag")
        return EMPTY, EffectVal(name)
    if isinstance(term, UntagAll):
        if theory.side is not Side.EXCEPTIONS:
            raise EffectSideError(f"untagall requires an exceptions theory, '{theory.name}' is "
                                  f"{theory.side.value}")
        return EMPTY, UNIT
    if isinstance(term, Lookup):
        name = _effect_name(term.name, theory, Side.STATES, "lookup")
        return UNIT, EffectVal(name)
    if isinstance(term, Update):
        name = _effect_name(term.name, theory, Side.STATES, "update")
        return EffectVal(name), UNIT
    if isinstance(term, Const):
        op = theory.op(term.opname)
        return op.source, op.target
    if isinstance(term, TermVar):
        raise UndeclaredName("term metavariable", term.name)
    raise TypeError(f"not a term: {term!r}")


def infer_decoration(term: Term, theory: Theory) -> Decoration:
    """Minimal decoration of a well-typed term."""
    if isinstance(term, (Id, Proj, Copr, Final, Initial, Injection)):
        return Decoration.PURE
    if isinstance(term, (Tag, Lookup)):
        return Decoration.CONSTRUCTOR
    if isinstance(term, (Untag, Update, UntagAll)):
        return Decoration.MODIFIER
    if isinstance(term, Const):
        return theory.op(term.opname).deco
    if isinstance(term, PropComp):
        outer = infer_decoration(term.outer, theory)
        inner = infer_decoration(term.inner, theory)
        return Decoration(max(inner, min(outer, Decoration.CONSTRUCTOR)))
    if isinstance(term, (Comp, Pair, Copair)):
        return Decoration(max(infer_decoration(child, theory) for _, child in children(term)))
    if isinstance(term, TermVar):
        raise UndeclaredName("term metavariable", term.name)
    raise TypeError(f"not a term: {term!r}")


def _bound_message(key: str, bound: Tuple[int, int]) -> str:
    if bound[0] == bound[1]:
        return f"{key} requires d≤{bound[0]}"
    return f"{key} requires (d1≤{bound[0]}, d2≤{bound[1]})"


def check_formation(term: Term, profile: LogicProfile, theory: Theory) -> List[Violation]:
    violations: List[Violation] = []
    _collect_violations(term, profile, theory, (), violations)
    if violations:
        logger.debug(f"{len(violations)} formation violation(s) under {profile.name}")
    return violations


def _collect_violations(term: Term, profile: LogicProfile, theory: Theory, path: Path,
                        out: List[Violation]) -> None:
    key = None
    if isinstance(term, Pair):
        key = PAIR_KEYS[term.kind]
    elif isinstance(term, Copair):
        key = COPAIR_KEYS[term.kind]
    elif isinstance(term, PropComp):
        key = PROP_COMP

    if key is not None:
        decos = tuple(int(infer_decoration(child, theory)) for _, child in children(term))
        bound = profile.bound(key)
        if bound is None:
            out.append(Violation(key, path, decos, f"{key} is not available in {profile.name}"))
        elif decos[0] > bound[0] or decos[1] > bound[1]:
            out.append(Violation(key, path, decos,
                                 f"{_bound_message(key, bound)}, got ({decos[0]}, {decos[1]})"))
    elif isinstance(term, _EXCEPTION_NODES + _STATE_NODES):
        needed = EXCEPTION_OPS if isinstance(term, _EXCEPTION_NODES) else STATE_OPS
        if needed not in profile.core_ops:
            op = type(term).__name__.lower()
            out.append(Violation(op, path, (int(infer_decoration(term, theory)),),
                                 f"{op} is not available in {profile.name}"))
    elif isinstance(term, Const):
        deco = int(infer_decoration(term, theory))
        if deco > profile.max_leaf:
            out.append(Violation("deco", path, (deco,),
                                 f"{profile.name} permits decoration ≤{profile.max_leaf} only, "
                                 f"'{term.opname}' has {deco}"))

    for label, child in children(term):
        _collect_violations(child, profile, theory, path + (label,), out)
