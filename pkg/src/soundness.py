# 可靠性检验：随机实例化推理规则并在有限模型中检查结论；副条件必要性的反例；相容性定理的穷举检查

import concurrent.futures
import dataclasses
import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src import model_exceptions, model_states, semantics
from src.calculus import check_formation, infer_decoration, typecheck
from src.config_manager import Limits
from src.error_handler import DeckitError, EnumerationLimitExceeded, UnknownWitness
from src.frontend import pretty_equation, pretty_term, pretty_type
from src.generators import TermGenerator
from src.kernel import expand_premises, substitute, substitute_names
from src.logging_config import get_logger
from src.models import (
    UNIT,
    Base,
    Comp,
    Counterexample,
    EffectVal,
    Equation,
    Final,
    Id,
    Initial,
    Lookup,
    NameVar,
    PairKind,
    Strength,
    Sum,
    Tag,
    TermVar,
    TypeExpr,
    TypeVar,
    Untag,
    Update,
    Verdict,
)
from src.rules import RuleDescriptor, TermConclusion, get_rule, rule_catalog
from src.theory import Side, Theory
from src.values import InL, StatePoint, TableSpace, format_value

logger = get_logger(__name__)

# probability of binding a bare premise metavariable to the other side
DERIVE_PROBABILITY = 0.8
# probability of searching a different weak partner instead of copying
WEAK_SEARCH_PROBABILITY = 0.3
WEAK_SEARCH_TRIES = 20

Bindings = Dict[object, object]


@dataclass
class Failure:
    instantiation: Dict[str, str]
    conclusion: str
    counterexample: Optional[Counterexample] = None
    detail: str = ""


@dataclass
class SoundnessReport:
    rule: str
    profile: str
    tried: int = 0
    premises_true: int = 0
    failures: List[Failure] = field(default_factory=list)
    budget_exhausted: bool = False

    @property
    def sound(self) -> bool:
        return not self.failures


@dataclass
class Witness:
    variant: str
    found: bool
    instantiation: Dict[str, str] = field(default_factory=dict)
    premises: List[Verdict] = field(default_factory=list)
    conclusion: Optional[Verdict] = None
    note: str = ""


# ---------------------------------------------------------------------------
# Metavariables of a schema
# ---------------------------------------------------------------------------


def _collect(pattern, out: Dict[object, None], skip: Sequence[object] = ()) -> None:
    if isinstance(pattern, (TermVar, TypeVar, NameVar)):
        if pattern not in skip:
            out.setdefault(pattern, None)
        return
    if dataclasses.is_dataclass(pattern) and not isinstance(pattern, type):
        for f in dataclasses.fields(pattern):
            _collect(getattr(pattern, f.name), out, skip)


def schema_metavars(rule: RuleDescriptor) -> List[object]:
    found: Dict[object, None] = {}
    for conclusion in rule.conclusions:
        _collect(conclusion, found)
    for premise in rule.term_premises:
        _collect(premise.term, found)
        _collect(premise.source, found)
        _collect(premise.target, found)
    for premise in rule.eq_premises:
        skip = (NameVar(premise.for_each),) if premise.for_each else ()
        _collect(premise.equation, found, skip)
    return list(found)


def _display(bindings: Bindings) -> Dict[str, str]:
    shown = {}
    for var, value in bindings.items():
        if isinstance(var, TermVar):
            shown[var.name] = pretty_term(value)
        elif isinstance(var, TypeVar):
            shown[var.name] = pretty_type(value)
        else:
            shown[var.name] = str(value)
    return shown


# ---------------------------------------------------------------------------
# Random instantiation
# ---------------------------------------------------------------------------


class _Sampler:
    def __init__(self, rule: RuleDescriptor, theory: Theory, rng: random.Random,
                 generator: TermGenerator, limits: Limits):
        self.rule = rule
        self.theory = theory
        self.rng = rng
        self.generator = generator
        self.limits = limits
        self.metavars = schema_metavars(rule)
        self.premise_of = {p.term: p for p in rule.term_premises if isinstance(p.term, TermVar)}

    def instantiate(self) -> Optional[Tuple[Bindings, List[Equation]]]:
        bindings: Bindings = {}
        names = self.theory.effect_names()
        for var in self.metavars:
            if isinstance(var, NameVar):
                if not names:
                    return None
                bindings[var] = self.rng.choice(names)
        for left, right in self.rule.distinct:
            others = [n for n in names if n != bindings[NameVar(left)]]
            if not others:
                return None
            if bindings[NameVar(right)] == bindings[NameVar(left)]:
                bindings[NameVar(right)] = self.rng.choice(others)
        for var in self.metavars:
            if isinstance(var, TypeVar):
                bindings[var] = self.generator.random_type()

        name_map = {k: v for k, v in bindings.items() if isinstance(k, NameVar)}
        premises = [substitute_names(p.equation, name_map)
                    for p in expand_premises(self.rule, self.theory)]
        self._derivable = {}
        for eq in premises:
            for side, other, on_left in ((eq.lhs, eq.rhs, True), (eq.rhs, eq.lhs, False)):
                if isinstance(side, TermVar) and side != other and side not in self._derivable:
                    self._derivable[side] = (other, eq.strength, on_left)
                    break

        self.bindings = bindings
        for var in self.metavars:
            if isinstance(var, TermVar) and not self._resolve(var, frozenset()):
                return None
        try:
            return bindings, [substitute(eq, bindings) for eq in premises]
        except Exception:  # unbound metavariable: the schema could not be completed
            return None

    def _resolve(self, var: TermVar, stack: frozenset) -> bool:
        if var in self.bindings:
            return True
        premise = self.premise_of.get(var)
        if premise is None:
            return False
        derived = self._derivable.get(var)
        if derived and var not in stack and self.rng.random() < DERIVE_PROBABILITY:
            other, strength, on_left = derived
            found: Dict[object, None] = {}
            _collect(other, found)
            if all(self._resolve(v, stack | {var}) for v in found if isinstance(v, TermVar)):
                value = substitute(other, self.bindings)
                if strength is not Strength.STRONG and self.rng.random() < WEAK_SEARCH_PROBABILITY:
                    value = self._weak_partner(value, premise, strength, on_left) or value
                self.bindings[var] = value
                return True
        source = substitute(premise.source, self.bindings)
        target = substitute(premise.target, self.bindings)
        term = self.generator.term(source, target, premise.max_deco)
        if term is None:
            return False
        self.bindings[var] = term
        return True

    def _weak_partner(self, value, premise, strength: Strength, on_left: bool):
        """A random term related to `value` by the premise's non-strong equation."""
        try:
            source, target = typecheck(value, self.theory)
        except DeckitError:
            return None
        for _ in range(WEAK_SEARCH_TRIES):
            candidate = self.generator.term(source, target, premise.max_deco)
            if candidate is None or candidate == value:
                continue
            eq = Equation(candidate, value, strength) if on_left else Equation(value, candidate, strength)
            try:
                if semantics.decide(eq, self.theory, self.limits).holds:
                    return candidate
            except DeckitError:
                continue
        return None


def _valid_instance(rule: RuleDescriptor, bindings: Bindings, theory: Theory,
                    premises: List[Equation]) -> bool:
    profile = theory.profile
    try:
        for premise in rule.term_premises:
            term = substitute(premise.term, bindings)
            expected = (substitute(premise.source, bindings), substitute(premise.target, bindings))
            if typecheck(term, theory) != expected:
                return False
            if infer_decoration(term, theory) > premise.max_deco:
                return False
        terms = [t for eq in premises for t in (eq.lhs, eq.rhs)]
        for conclusion in rule.conclusions:
            concrete = substitute(conclusion, bindings)
            if isinstance(concrete, TermConclusion):
                terms.append(concrete.term)
            else:
                semantics.equation_types(concrete, theory)
                terms += [concrete.lhs, concrete.rhs]
        return not any(check_formation(t, profile, theory) for t in terms)
    except DeckitError:
        return False
    except Exception:  # unbound metavariable in a conclusion
        return False


def _check_conclusions(rule: RuleDescriptor, bindings: Bindings, theory: Theory,
                       limits: Limits) -> List[Failure]:
    failures = []
    for conclusion in rule.conclusions:
        concrete = substitute(conclusion, bindings)
        if isinstance(concrete, TermConclusion):
            den = semantics.evaluate(concrete.term, theory, limits)
            bound = concrete.deco if concrete.deco is not None else infer_decoration(
                concrete.term, theory)
            if typecheck(concrete.term, theory) != (concrete.source, concrete.target):
                failures.append(Failure(_display(bindings), pretty_term(concrete.term),
                                        detail="conclusion has the wrong type"))
            elif den.min_deco > bound:
                failures.append(Failure(
                    _display(bindings), pretty_term(concrete.term),
                    detail=f"interpretation has decoration {int(den.min_deco)}, above {int(bound)}",
                ))
            continue
        verdict = semantics.decide(concrete, theory, limits)
        if not verdict.holds:
            failures.append(Failure(_display(bindings), pretty_equation(concrete),
                                    verdict.counterexample))
    return failures


def check_rule_sound(rule_name: str, theory: Theory, samples: int = 500, seed: int = 42,
                     max_depth: int = 5, limits: Optional[Limits] = None) -> SoundnessReport:
    rule = get_rule(rule_name, theory.profile)
    return _run_rule(rule, theory, samples, seed, max_depth, limits or Limits())


def _run_rule(rule: RuleDescriptor, theory: Theory, samples: int, seed: int, max_depth: int,
              limits: Limits) -> SoundnessReport:
    rng = random.Random(f"{seed}:{rule.name}")
    generator = TermGenerator(theory, rng, max_depth)
    sampler = _Sampler(rule, theory, rng, generator, limits)
    report = SoundnessReport(rule.name, theory.profile.name)

    for _ in range(samples):
        report.tried += 1
        instance = sampler.instantiate()
        if instance is None:
            continue
        bindings, premises = instance
        if not _valid_instance(rule, bindings, theory, premises):
            continue
        try:
            if not all(semantics.decide(eq, theory, limits).holds for eq in premises):
                continue
            report.premises_true += 1
            report.failures += _check_conclusions(rule, bindings, theory, limits)
        except DeckitError as error:
            logger.debug(f"{rule.name}: instance skipped: {error}")

    if report.premises_true == 0:
        report.budget_exhausted = True
        logger.warning(f"{rule.name}: no instance with true premises in {samples} samples")
    logger.debug(
        f"{rule.name}: tried {report.tried}, premises true {report.premises_true}, "
        f"failures {len(report.failures)}"
    )
    return report


def check_all_rules(theory: Theory, rules: Optional[Sequence[str]] = None, samples: int = 500,
                    seed: int = 42, max_depth: int = 5, workers: int = 1,
                    limits: Optional[Limits] = None) -> List[SoundnessReport]:
    """Reports in catalog order, independent of the number of workers."""
    limits = limits or Limits()
    if rules:
        selected = [get_rule(name, theory.profile) for name in rules]
    else:
        selected = list(rule_catalog(theory.profile))
    logger.info(f"Checking {len(selected)} rules of {theory.profile.name} with {samples} samples each")

    def run(rule: RuleDescriptor) -> SoundnessReport:
        return _run_rule(rule, theory, samples, seed, max_depth, limits)

    if workers <= 1:
        return [run(rule) for rule in selected]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run, selected))


# ---------------------------------------------------------------------------
# Side-condition witnesses
# ---------------------------------------------------------------------------


def _weakened(theory: Theory, rule_name: str, bounds: Dict[str, int]) -> RuleDescriptor:
    rule = get_rule(rule_name, theory.profile)
    premises = tuple(
        dataclasses.replace(p, max_deco=bounds[p.name]) if p.name in bounds else p
        for p in rule.term_premises
    )
    return dataclasses.replace(rule, name=f"{rule.name} (weakened)", term_premises=premises)


def _evaluate_instance(rule: RuleDescriptor, bindings: Bindings, theory: Theory,
                       limits: Limits) -> Tuple[List[Verdict], List[Verdict]]:
    premises = [substitute(p.equation, bindings) for p in expand_premises(rule, theory)]
    premise_verdicts = [semantics.decide(eq, theory, limits) for eq in premises]
    conclusion_verdicts = [semantics.decide(substitute(c, bindings), theory, limits)
                           for c in rule.conclusions if isinstance(c, Equation)]
    return premise_verdicts, conclusion_verdicts


def _witness_from(variant: str, rule: RuleDescriptor, bindings: Bindings, theory: Theory,
                  limits: Limits) -> Optional[Witness]:
    try:
        premises, conclusions = _evaluate_instance(rule, bindings, theory, limits)
    except DeckitError:
        return None
    failing = [v for v in conclusions if not v.holds]
    if all(v.holds for v in premises) and failing:
        return Witness(variant, True, _display(bindings), premises, failing[0])
    return None


def _search(variant: str, rule: RuleDescriptor, theory: Theory, samples: int, seed: int,
            limits: Limits) -> Witness:
    rng = random.Random(f"{seed}:{variant}")
    sampler = _Sampler(rule, theory, rng, TermGenerator(theory, rng), limits)
    for _ in range(samples):
        instance = sampler.instantiate()
        if instance is None or not _valid_instance(rule, instance[0], theory, instance[1]):
            continue
        witness = _witness_from(variant, rule, instance[0], theory, limits)
        if witness is not None:
            return witness
    return Witness(variant, False, note=f"no witness found in {samples} samples")


def _first_name(theory: Theory) -> Optional[str]:
    names = theory.effect_names()
    return names[0] if names else None


def _hint_w_subs(theory: Theory, name: str) -> Bindings:
    vt = EffectVal(name)
    return {
        TypeVar("A"): vt, TypeVar("B"): vt, TypeVar("C"): vt,
        TermVar("f"): Comp(Initial(vt), Tag(name)),
        TermVar("g1"): Id(vt),
        TermVar("g2"): Comp(Untag(name), Tag(name)),
    }


def _hint_weak_strong(theory: Theory, name: str) -> Bindings:
    vt = EffectVal(name)
    roundtrip = (Comp(Lookup(name), Update(name)) if theory.side is Side.STATES
                 else Comp(Untag(name), Tag(name)))
    return {TypeVar("A"): vt, TypeVar("B"): vt, TermVar("f"): roundtrip, TermVar("g"): Id(vt)}


def _hint_w_repl(theory: Theory, name: str) -> Bindings:
    vt = EffectVal(name)
    return {
        TypeVar("A"): vt, TypeVar("B"): UNIT, TypeVar("C"): vt,
        TermVar("f1"): Update(name), TermVar("f2"): Final(vt), TermVar("g"): Lookup(name),
    }


# variant -> (rule, raised bounds, side the hint applies to, hint)
_VARIANTS = {
    "w-subs-unrestricted": ("w-subs", {"f": 2}, Side.EXCEPTIONS, _hint_w_subs),
    "weak-strong-at-2": ("weak-strong", {"f": 2, "g": 2}, None, _hint_weak_strong),
    "w-repl-unrestricted": ("w-repl", {"g": 2}, Side.STATES, _hint_w_repl),
}

WITNESS_VARIANTS = tuple(_VARIANTS) + ("copair-of-catchers",)


def find_side_condition_witness(variant: str, theory: Theory, samples: int = 500, seed: int = 42,
                                limits: Optional[Limits] = None) -> Witness:
    limits = limits or Limits()
    if variant == "copair-of-catchers":
        return _copair_of_catchers(theory, limits)
    if variant not in _VARIANTS:
        raise UnknownWitness(
            f"unknown witness variant '{variant}' (expected one of {', '.join(WITNESS_VARIANTS)})"
        )
    rule_name, bounds, side, hint = _VARIANTS[variant]
    rule = _weakened(theory, rule_name, bounds)
    name = _first_name(theory)
    if name is not None and (side is None or theory.side is side):
        witness = _witness_from(variant, rule, hint(theory, name), theory, limits)
        if witness is not None:
            logger.info(f"{variant}: witness verified by re-evaluation")
            return witness
    logger.debug(f"{variant}: no direct witness, searching {samples} random instances")
    return _search(variant, rule, theory, samples, seed, limits)


def _copair_of_catchers(theory: Theory, limits: Limits) -> Witness:
    name = _first_name(theory)
    if theory.side is not Side.EXCEPTIONS or name is None:
        return Witness("copair-of-catchers", False,
                       note="needs an exceptions theory with at least one exception name")
    env = semantics.environment(theory, limits)
    vt = EffectVal(name)
    f, g = Untag(name), Initial(vt)
    solutions = model_exceptions.copair_solutions(
        model_exceptions.evaluate(f, env), model_exceptions.evaluate(g, env), env
    )
    note = f"{solutions.count} candidate table(s) satisfy both strong copair laws"
    logger.info(f"copair-of-catchers: {note}")
    return Witness("copair-of-catchers", solutions.count == 0,
                   {"f": pretty_term(f), "g": pretty_term(g)}, note=note)


# ---------------------------------------------------------------------------
# Compatibility theorems, counted point by point over whole function spaces
# ---------------------------------------------------------------------------

# (input space index, input point) rows read by the law at one point of the unknown table
Link = Tuple[object, Tuple[Tuple[int, object], ...]]


@dataclass
class CompatResult:
    construction: str
    checked: int = 0
    missing: int = 0
    ambiguous: int = 0
    mismatched: int = 0
    examples: List[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.checked > 0 and not (self.missing or self.ambiguous or self.mismatched)

    def note(self, text: str) -> None:
        if len(self.examples) < 3:
            self.examples.append(text)


def default_compat_types(theory: Theory) -> Tuple[TypeExpr, TypeExpr]:
    if theory.effects:
        return UNIT, EffectVal(theory.effects[0].name)
    if theory.base_types:
        return UNIT, Base(theory.base_types[0].name)
    return UNIT, UNIT


def _sweep(result: CompatResult, spaces: Sequence[TableSpace], links: Sequence[Link],
           solve: Callable, expect: Callable, limit: int) -> CompatResult:
    """Tally every combination of input tables drawn from `spaces`.

    The law at one point of the unknown table reads only the input rows its link names,
    so each point is swept over those rows alone and the per-point tallies multiply
    into the tally over all combinations.
    """
    if any(space.size == 0 for space in spaces):
        return result
    work = sum(math.prod(len(spaces[i].codomain) for i, _ in deps) for _, deps in links)
    if work > limit:
        raise EnumerationLimitExceeded(
            f"{work} local cases exceed the enumeration limit {limit}"
        )

    linked = {dep for _, deps in links for dep in deps}
    unread = 1
    for i, space in enumerate(spaces):
        unread *= len(space.codomain) ** sum(1 for x in space.domain if (i, x) not in linked)

    total = solvable = unique = agreeing = unread
    for point, deps in links:
        tally = Counter()
        for outputs in itertools.product(*(spaces[i].codomain for i, _ in deps)):
            tables = [
                space.table({x: y for (j, x), y in zip(deps, outputs) if j == i})
                for i, space in enumerate(spaces)
            ]
            choices = solve(*tables).at(point)
            wanted = expect(*tables)(point)
            tally["total"] += 1
            tally["solvable"] += bool(choices)
            tally["unique"] += len(choices) == 1
            if choices == (wanted,):
                tally["agreeing"] += 1
            else:
                given = ", ".join(format_value(y) for y in outputs)
                result.note(f"at {format_value(point)} given [{given}]: "
                            f"{len(choices)} solution(s)")
        total *= tally["total"]
        solvable *= tally["solvable"]
        unique *= tally["unique"]
        agreeing *= tally["agreeing"]

    result.checked += total
    result.missing += total - solvable
    result.ambiguous += solvable - unique
    result.mismatched += unique - agreeing
    return result


def check_state_compatibility(theory: Theory, source: Optional[TypeExpr] = None,
                              target: Optional[TypeExpr] = None,
                              limits: Optional[Limits] = None) -> List[CompatResult]:
    """Copairs of modifiers and left/right pairs exist and are unique."""
    env = semantics.environment(theory, limits)
    if not isinstance(env, model_states.StateEnvironment):
        raise DeckitError(f"theory '{theory.name}' is not evaluated in the state model")
    default_source, default_target = default_compat_types(theory)
    source, target = source or default_source, target or default_target
    cap = env.limits.max_candidates

    modifiers = model_states.table_space(env, source, target, 2)
    accessors = model_states.table_space(env, source, target, 1)

    copair_links = [
        (p, ((0 if isinstance(p.value, InL) else 1, StatePoint(p.value.value, p.state)),))
        for p in env.points(Sum(source, source))
    ]
    results = [_sweep(
        CompatResult("copair"), (modifiers, modifiers), copair_links,
        lambda f, g: model_states.copair_solutions(f, g, env),
        lambda f, g: model_states._copair(f, g, env), cap,
    )]

    pair_links = [(p, ((0, p), (1, p))) for p in env.points(source)]
    for kind, label in ((PairKind.LEFT, "l-pair"), (PairKind.RIGHT, "r-pair")):
        spaces = (accessors, modifiers) if kind is PairKind.LEFT else (modifiers, accessors)
        results.append(_sweep(
            CompatResult(label), spaces, pair_links,
            lambda first, second, kind=kind: model_states.pair_solutions(
                kind, first, second, env),
            lambda first, second, kind=kind: model_states._pair(kind, first, second, env),
            cap,
        ))
    for result in results:
        logger.info(f"state compatibility {result.construction}: {result.checked} cases, "
                    f"holds={result.holds}")
    return results


def check_exception_compatibility(theory: Theory, source: Optional[TypeExpr] = None,
                                  target: Optional[TypeExpr] = None,
                                  limits: Optional[Limits] = None) -> List[CompatResult]:
    """Left/right pairs of a pure term and a propagator, and copairs of propagators."""
    env = semantics.environment(theory, limits)
    if not isinstance(env, model_exceptions.ExceptionEnvironment):
        raise DeckitError(f"theory '{theory.name}' is not evaluated in the exception model")
    default_source, default_target = default_compat_types(theory)
    source, target = source or default_source, target or default_target
    cap = env.limits.max_candidates

    pures = model_exceptions.table_space(env, source, target, 0)
    propagators = model_exceptions.table_space(env, source, target, 1)

    pair_links = [(x, ((0, x), (1, x))) for x in env.carrier(source)]
    left = _sweep(
        CompatResult("l-pair"), (pures, propagators), pair_links,
        lambda v, f: model_exceptions.left_pair_solutions(v, f, env),
        lambda v, f: model_exceptions.interp_left_pair(v, f, env), cap,
    )
    right = _sweep(
        CompatResult("r-pair"), (propagators, pures), pair_links,
        lambda f, v: model_exceptions.right_pair_solutions(f, v, env),
        lambda f, v: model_exceptions.interp_right_pair(f, v, env), cap,
    )

    # packets reach the copair unchanged and read no row of the legs
    copair_links = [
        (x, () if model_exceptions.is_packet(x) else ((0 if isinstance(x, InL) else 1, x.value),))
        for x in env.inputs(Sum(source, source), 2)
    ]
    copairs = _sweep(
        CompatResult("copair"), (propagators, propagators), copair_links,
        lambda f, g: model_exceptions.copair_solutions(f, g, env),
        lambda f, g: model_exceptions._copair(PairKind.SYMMETRIC, f, g, env), cap,
    )

    results = [left, right, copairs]
    for result in results:
        logger.info(f"exception compatibility {result.construction}: {result.checked} cases, "
                    f"holds={result.holds}")
    return results


def check_compatibility(theory: Theory, source: Optional[TypeExpr] = None,
                        target: Optional[TypeExpr] = None,
                        limits: Optional[Limits] = None) -> List[CompatResult]:
    if theory.uses_state_model:
        return check_state_compatibility(theory, source, target, limits)
    return check_exception_compatibility(theory, source, target, limits)
