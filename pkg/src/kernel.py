# 证明核：逐节点检查派生树，首个失败节点按先序报告

import dataclasses
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from src.calculus import check_formation, copair_source, infer_decoration, injection, typecheck
from src.error_handler import DeckitError, UnknownRule
from src.logging_config import get_logger
from src.models import (
    Base,
    CopairSource,
    Decoration,
    Derivation,
    EffectVal,
    EmptyType,
    EqJudgment,
    Equation,
    Injection,
    Judgment,
    NameVar,
    Prod,
    Sum,
    TermJudgment,
    TermVar,
    TypeVar,
    UnitType,
)
from src.rules import EqPremise, RuleDescriptor, TermConclusion, TermPremise, get_rule
from src.theory import Theory

logger = get_logger(__name__)

AXIOM_PREFIX = "axiom:"

_TYPE_CLASSES = (Base, UnitType, EmptyType, Prod, Sum, EffectVal)
_METAVARS = (TermVar, TypeVar, NameVar)

Bindings = Dict[object, object]


@dataclass(frozen=True)
class KernelVerdict:
    accepted: bool
    nodes: int
    path: Optional[Tuple[int, ...]] = None
    rule: Optional[str] = None
    reason: Optional[str] = None

    def __str__(self) -> str:
        if self.accepted:
            return f"accepted ({self.nodes} nodes)"
        where = "/".join(str(i) for i in self.path) if self.path else "<root>"
        return f"rejected at {where} [{self.rule}]: {self.reason}"


class _Unbound(Exception):
    def __init__(self, var):
        super().__init__(var.name)
        self.var = var


# ---------------------------------------------------------------------------
# Matching and instantiation of schema patterns
# ---------------------------------------------------------------------------


def match(pattern, concrete, bindings: Bindings) -> bool:
    """Bind metavariables of `pattern` so that it equals `concrete`.

    Injection and CopairSource patterns depend on types bound elsewhere; they
    match anything here and are verified after substitution.
    """
    if isinstance(pattern, _METAVARS):
        if pattern in bindings:
            return bindings[pattern] == concrete
        if isinstance(pattern, NameVar) and not isinstance(concrete, str):
            return False
        bindings[pattern] = concrete
        return True
    if isinstance(pattern, (Injection, CopairSource)):
        return True
    if dataclasses.is_dataclass(pattern) and not isinstance(pattern, type):
        if type(pattern) is not type(concrete):
            return False
        return all(
            match(getattr(pattern, field.name), getattr(concrete, field.name), bindings)
            for field in dataclasses.fields(pattern)
        )
    return pattern == concrete


def substitute(pattern, bindings: Bindings):
    if isinstance(pattern, _METAVARS):
        if pattern not in bindings:
            raise _Unbound(pattern)
        return bindings[pattern]
    if isinstance(pattern, Injection):
        return injection(pattern.index, substitute(pattern.left, bindings),
                         substitute(pattern.right, bindings))
    if isinstance(pattern, CopairSource):
        return copair_source(substitute(pattern.left, bindings),
                             substitute(pattern.right, bindings))
    if dataclasses.is_dataclass(pattern) and not isinstance(pattern, type):
        return type(pattern)(**{
            field.name: substitute(getattr(pattern, field.name), bindings)
            for field in dataclasses.fields(pattern)
        })
    return pattern


def explicit_bindings(derivation: Derivation) -> Bindings:
    bindings: Bindings = {}
    for name, value in derivation.instantiation:
        if isinstance(value, str):
            bindings[NameVar(name)] = value
        elif isinstance(value, _TYPE_CLASSES):
            bindings[TypeVar(name)] = value
        else:
            bindings[TermVar(name)] = value
    return bindings


def expand_premises(rule: RuleDescriptor, theory: Theory) -> List[EqPremise]:
    """Equation premises in schema order, `for each T` premises expanded over declared names."""
    expanded: List[EqPremise] = []
    for premise in rule.eq_premises:
        if premise.for_each is None:
            expanded.append(premise)
            continue
        var = NameVar(premise.for_each)
        for name in theory.effect_names():
            eq = substitute_names(premise.equation, {var: name})
            expanded.append(EqPremise(eq))
    return expanded


def substitute_names(pattern, names: Bindings):
    """Replace only name metavariables; other metavariables stay in place."""
    if isinstance(pattern, NameVar):
        return names.get(pattern, pattern)
    if isinstance(pattern, (TermVar, TypeVar)):
        return pattern
    if dataclasses.is_dataclass(pattern) and not isinstance(pattern, type):
        return type(pattern)(**{
            field.name: substitute_names(getattr(pattern, field.name), names)
            for field in dataclasses.fields(pattern)
        })
    return pattern


# ---------------------------------------------------------------------------
# Node checking
# ---------------------------------------------------------------------------


class _Reject(Exception):
    pass


def _judgment_well_formed(judgment: Judgment, theory: Theory) -> None:
    try:
        if isinstance(judgment, EqJudgment):
            eq = judgment.eq
            lhs, rhs = typecheck(eq.lhs, theory), typecheck(eq.rhs, theory)
            if lhs != rhs:
                raise _Reject("equation sides have different types")
            terms = (eq.lhs, eq.rhs)
        else:
            types = typecheck(judgment.term, theory)
            if types != (judgment.source, judgment.target):
                raise _Reject("term judgment does not match the term's type")
            terms = (judgment.term,)
    except DeckitError as error:
        raise _Reject(str(error)) from None
    for term in terms:
        violations = check_formation(term, theory.profile, theory)
        if violations:
            raise _Reject(f"not well-formed in {theory.profile.name}: {violations[0]}")


def _decoration_reason(rule: RuleDescriptor, premise: TermPremise) -> str:
    if premise.max_deco == Decoration.PURE:
        return f"{rule.name} requires pure {premise.name}"
    return f"{rule.name} requires {premise.name} with decoration ≤ {int(premise.max_deco)}"


def _resolve_term_premises(rule: RuleDescriptor, bindings: Bindings, theory: Theory) -> None:
    pending = list(rule.term_premises)
    while pending:
        progressed = False
        for premise in list(pending):
            try:
                term = substitute(premise.term, bindings)
            except _Unbound:
                continue
            try:
                source, target = typecheck(term, theory)
            except DeckitError as error:
                raise _Reject(f"{rule.name}: {premise.name}: {error}") from None
            if not (match(premise.source, source, bindings)
                    and match(premise.target, target, bindings)):
                raise _Reject(f"{rule.name}: {premise.name} has the wrong type")
            pending.remove(premise)
            progressed = True
        if not progressed:
            raise _Unbound(pending[0].term)

    for premise in rule.term_premises:
        term = substitute(premise.term, bindings)
        source, target = typecheck(term, theory)
        if (substitute(premise.source, bindings), substitute(premise.target, bindings)) != (
            source, target
        ):
            raise _Reject(f"{rule.name}: {premise.name} has the wrong type")
        if infer_decoration(term, theory) > premise.max_deco:
            raise _Reject(_decoration_reason(rule, premise))


def _check_conclusion(pattern, judgment: Judgment, bindings: Bindings, theory: Theory) -> None:
    if isinstance(pattern, TermConclusion):
        term = substitute(pattern.term, bindings)
        expected = (term, substitute(pattern.source, bindings), substitute(pattern.target, bindings))
        if expected != (judgment.term, judgment.source, judgment.target):
            raise _Reject("conclusion does not match the rule")
        deco = pattern.deco if pattern.deco is not None else infer_decoration(term, theory)
        if judgment.deco != deco:
            raise _Reject(f"conclusion decoration must be {int(deco)}, got {int(judgment.deco)}")
    elif substitute(pattern, bindings) != judgment.eq:
        raise _Reject("conclusion does not match the rule")


def _try_conclusion(rule: RuleDescriptor, pattern, node: Derivation, premises: List[EqPremise],
                    theory: Theory) -> None:
    judgment = node.conclusion
    bindings = explicit_bindings(node)
    explicit = dict(bindings)
    if not _matches(pattern, judgment, bindings):
        for var in explicit:
            trial = dict(explicit)
            del trial[var]
            if _matches(pattern, judgment, dict(trial)):
                raise _Reject(f"instantiation of {var.name} disagrees with the conclusion")
        raise _Reject(f"conclusion does not match rule {rule.name}")

    for premise, child in zip(premises, node.premises):
        if not isinstance(child.conclusion, EqJudgment):
            raise _Reject(f"{rule.name} premises must be equations")
        if not match(premise.equation, child.conclusion.eq, bindings):
            raise _Reject(f"premise does not match {rule.name}")

    try:
        _resolve_term_premises(rule, bindings, theory)
        _check_conclusion(pattern, judgment, bindings, theory)
        for premise, child in zip(premises, node.premises):
            if substitute(premise.equation, bindings) != child.conclusion.eq:
                raise _Reject(f"premise does not match {rule.name}")
    except _Unbound as unbound:
        raise _Reject(
            f"metavariable {unbound.var.name} is not determined; bind it explicitly"
        ) from None

    for left, right in rule.distinct:
        if bindings.get(NameVar(left)) == bindings.get(NameVar(right)):
            raise _Reject(f"{rule.name} requires distinct {left} and {right}")


def _matches(pattern, judgment: Judgment, bindings: Bindings) -> bool:
    if isinstance(pattern, TermConclusion):
        return (
            isinstance(judgment, TermJudgment)
            and match(pattern.term, judgment.term, bindings)
            and match(pattern.source, judgment.source, bindings)
            and match(pattern.target, judgment.target, bindings)
        )
    return isinstance(judgment, EqJudgment) and match(pattern, judgment.eq, bindings)


def _check_axiom(node: Derivation, theory: Theory) -> None:
    name = node.rule[len(AXIOM_PREFIX):]
    axiom = theory.axiom(name)
    if axiom is None:
        raise _Reject(f"unknown axiom '{name}'")
    if node.premises:
        raise _Reject(f"axiom {name} takes no premises")
    if not isinstance(node.conclusion, EqJudgment) or node.conclusion.eq != axiom.equation:
        raise _Reject(f"conclusion is not axiom {name}")


def check_node(node: Derivation, theory: Theory) -> None:
    """Raise _Reject when the node is not a valid instance of its rule."""
    _judgment_well_formed(node.conclusion, theory)
    if node.rule.startswith(AXIOM_PREFIX):
        _check_axiom(node, theory)
        return

    try:
        rule = get_rule(node.rule, theory.profile)
    except UnknownRule as error:
        raise _Reject(error.message) from None

    premises = expand_premises(rule, theory)
    if len(premises) != len(node.premises):
        raise _Reject(f"{rule.name} expects {len(premises)} premise(s), got {len(node.premises)}")

    kind = TermConclusion if isinstance(node.conclusion, TermJudgment) else Equation
    candidates = [c for c in rule.conclusions if isinstance(c, kind)]
    if not candidates:
        raise _Reject(f"{rule.name} does not conclude a {'term' if kind is TermConclusion else 'equation'} judgment")

    first_failure: Optional[str] = None
    for pattern in candidates:
        try:
            _try_conclusion(rule, pattern, node, premises, theory)
            return
        except _Reject as reject:
            reason = str(reject)
            if first_failure is None or first_failure.startswith("conclusion does not match"):
                first_failure = reason
    raise _Reject(first_failure)


def _preorder(node: Derivation, path: Tuple[int, ...] = ()) -> Iterator[Tuple[Tuple[int, ...], Derivation]]:
    yield path, node
    for index, child in enumerate(node.premises):
        yield from _preorder(child, path + (index,))


def check_derivation(derivation: Derivation, theory: Theory) -> KernelVerdict:
    nodes = 0
    for path, node in _preorder(derivation):
        nodes += 1
        try:
            check_node(node, theory)
        except _Reject as reject:
            logger.debug(f"rejected node {path} ({node.rule}): {reject}")
            return KernelVerdict(False, derivation.size(), path, node.rule, str(reject))
    logger.debug(f"accepted derivation of {nodes} nodes under {theory.profile.name}")
    return KernelVerdict(True, nodes)
