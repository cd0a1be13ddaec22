# 七种逻辑配置的推理规则目录

from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from src.error_handler import UnknownRule
from src.models import (
    EMPTY,
    UNIT,
    Comp,
    Copair,
    CopairSource,
    Copr,
    Decoration,
    EffectVal,
    Equation,
    Final,
    Id,
    Initial,
    Injection,
    Lookup,
    NameVar,
    Pair,
    PairKind,
    Prod,
    Proj,
    PropComp,
    Strength,
    Sum,
    Tag,
    Term,
    TermVar,
    TypeExpr,
    TypeVar,
    Untag,
    UntagAll,
    Update,
)
from src.profiles import PROFILE_NAMES, LogicProfile, get_profile


@dataclass(frozen=True)
class TermPremise:
    """Side premise `term^d : source -> target`, discharged by typing and decoration inference."""

    term: Term
    source: TypeExpr
    target: TypeExpr
    max_deco: Decoration
    label: str = ""

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        return self.term.name if isinstance(self.term, TermVar) else "term"


@dataclass(frozen=True)
class EqPremise:
    equation: Equation
    # expands to one premise per declared effect name bound to this variable
    for_each: Optional[str] = None


@dataclass(frozen=True)
class TermConclusion:
    term: Term
    source: TypeExpr
    target: TypeExpr
    # None: the minimal decoration of the instantiated term
    deco: Optional[Decoration] = None


Conclusion = Union[TermConclusion, Equation]


@dataclass(frozen=True)
class RuleDescriptor:
    name: str
    term_premises: Tuple[TermPremise, ...] = ()
    eq_premises: Tuple[EqPremise, ...] = ()
    conclusions: Tuple[Conclusion, ...] = ()
    distinct: Tuple[Tuple[str, str], ...] = ()
    profiles: FrozenSet[str] = frozenset()

    @property
    def is_axiom(self) -> bool:
        return not self.term_premises and not self.eq_premises


# metavariables
f, g, h = TermVar("f"), TermVar("g"), TermVar("h")
f1, f2, g1, g2 = TermVar("f1"), TermVar("f2"), TermVar("g1"), TermVar("g2")
A, B, C, D = TypeVar("A"), TypeVar("B"), TypeVar("C"), TypeVar("D")
A1, A2, B1, B2 = TypeVar("A1"), TypeVar("A2"), TypeVar("B1"), TypeVar("B2")
T, R = NameVar("T"), NameVar("R")

P0, P1, P2 = Decoration.PURE, Decoration.CONSTRUCTOR, Decoration.MODIFIER


def _tp(term: Term, source: TypeExpr, target: TypeExpr, d: int) -> TermPremise:
    return TermPremise(term, source, target, Decoration(d))


def _eq(lhs: Term, rhs: Term, strength: Strength) -> Equation:
    return Equation(lhs, rhs, strength)


def _s(lhs: Term, rhs: Term) -> Equation:
    return Equation(lhs, rhs, Strength.STRONG)


def _w(lhs: Term, rhs: Term) -> Equation:
    return Equation(lhs, rhs, Strength.WEAK)


def _o(lhs: Term, rhs: Term) -> Equation:
    return Equation(lhs, rhs, Strength.ORDERED)


def _rule(name: str, term_premises=(), eq_premises=(), conclusions=(), distinct=()) -> RuleDescriptor:
    eqs = tuple(p if isinstance(p, EqPremise) else EqPremise(p) for p in eq_premises)
    return RuleDescriptor(name, tuple(term_premises), eqs, tuple(conclusions), tuple(distinct))


# ---------------------------------------------------------------------------
# Rule families, parameterized by strength and decoration bounds
# ---------------------------------------------------------------------------


def _equivalence(prefix: str, strength: Strength, d: int) -> List[RuleDescriptor]:
    return [
        _rule(f"{prefix}refl", [_tp(f, A, B, d)], [], [_eq(f, f, strength)]),
        _rule(f"{prefix}sym", [_tp(f, A, B, d), _tp(g, A, B, d)],
              [_eq(f, g, strength)], [_eq(g, f, strength)]),
        _rule(f"{prefix}trans", [_tp(f, A, B, d), _tp(g, A, B, d), _tp(h, A, B, d)],
              [_eq(f, g, strength), _eq(g, h, strength)], [_eq(f, h, strength)]),
    ]


def _categorical(d: int) -> List[RuleDescriptor]:
    return [
        _rule("id", [], [], [TermConclusion(Id(A), A, A, P0)]),
        _rule("comp", [_tp(f, A, B, d), _tp(g, B, C, d)], [],
              [TermConclusion(Comp(g, f), A, C, None)]),
        _rule("id-source", [_tp(f, A, B, d)], [], [_s(Comp(f, Id(A)), f)]),
        _rule("id-target", [_tp(f, A, B, d)], [], [_s(Comp(Id(B), f), f)]),
        _rule("assoc", [_tp(f, A, B, d), _tp(g, B, C, d), _tp(h, C, D, d)], [],
              [_s(Comp(h, Comp(g, f)), Comp(Comp(h, g), f))]),
    ]


def _replacement(name: str, strength: Strength, d_eq: int, d_g: int) -> RuleDescriptor:
    return _rule(name, [_tp(f1, A, B, d_eq), _tp(f2, A, B, d_eq), _tp(g, B, C, d_g)],
                 [_eq(f1, f2, strength)], [_eq(Comp(g, f1), Comp(g, f2), strength)])


def _substitution(name: str, strength: Strength, d_f: int, d_eq: int) -> RuleDescriptor:
    return _rule(name, [_tp(f, A, B, d_f), _tp(g1, B, C, d_eq), _tp(g2, B, C, d_eq)],
                 [_eq(g1, g2, strength)], [_eq(Comp(g1, f), Comp(g2, f), strength)])


def _products(pair_bounds: Tuple[int, int], pair_u_bound: int,
              final_u: Tuple[int, Strength]) -> List[RuleDescriptor]:
    b1, b2 = pair_bounds
    pair = Pair(PairKind.SYMMETRIC, f1, f2)
    pr1, pr2 = Proj(1, B1, B2), Proj(2, B1, B2)
    return [
        _rule("prod", [], [], [TermConclusion(pr1, Prod(B1, B2), B1, P0),
                               TermConclusion(pr2, Prod(B1, B2), B2, P0)]),
        _rule("pair", [_tp(f1, A, B1, b1), _tp(f2, A, B2, b2)], [],
              [TermConclusion(pair, A, Prod(B1, B2), None),
               _s(Comp(pr1, pair), f1), _s(Comp(pr2, pair), f2)]),
        _rule("pair-u", [_tp(f1, A, B1, pair_u_bound), _tp(f2, A, B2, pair_u_bound),
                         _tp(g, A, Prod(B1, B2), pair_u_bound)],
              [_s(Comp(pr1, g), f1), _s(Comp(pr2, g), f2)], [_s(g, pair)]),
        _rule("final", [], [], [TermConclusion(Final(A), A, UNIT, P0)]),
        _rule("final-u", [_tp(f, A, UNIT, final_u[0])], [], [_eq(f, Final(A), final_u[1])]),
    ]


def _coproducts(copair_bounds: Tuple[int, int], copair_u_bound: int,
                initial_u: Tuple[int, Strength]) -> List[RuleDescriptor]:
    b1, b2 = copair_bounds
    copair = Copair(PairKind.SYMMETRIC, f1, f2)
    source = CopairSource(A1, A2)
    return [
        _rule("coprod", [], [], [TermConclusion(Copr(1, A1, A2), A1, Sum(A1, A2), P0),
                                 TermConclusion(Copr(2, A1, A2), A2, Sum(A1, A2), P0)]),
        _rule("copair", [_tp(f1, A1, B, b1), _tp(f2, A2, B, b2)], [],
              [TermConclusion(copair, source, B, None),
               _s(Comp(copair, Injection(1, A1, A2)), f1),
               _s(Comp(copair, Injection(2, A1, A2)), f2)]),
        _rule("copair-u", [_tp(f1, A1, B, copair_u_bound), _tp(f2, A2, B, copair_u_bound),
                           _tp(g, source, B, copair_u_bound)],
              [_s(Comp(g, Injection(1, A1, A2)), f1), _s(Comp(g, Injection(2, A1, A2)), f2)],
              [_s(g, copair)]),
        _rule("initial", [], [], [TermConclusion(Initial(B), EMPTY, B, P0)]),
        _rule("initial-u", [_tp(f, EMPTY, B, initial_u[0])], [],
              [_eq(f, Initial(B), initial_u[1])]),
    ]


def _eq_catalog() -> List[RuleDescriptor]:
    strong = Strength.STRONG
    return (
        [
            _rule("refl", [_tp(f, A, B, 0)], [], [_s(f, f)]),
            _rule("sym", [_tp(f, A, B, 0), _tp(g, A, B, 0)], [_s(f, g)], [_s(g, f)]),
            _rule("trans", [_tp(f, A, B, 0), _tp(g, A, B, 0), _tp(h, A, B, 0)],
                  [_s(f, g), _s(g, h)], [_s(f, h)]),
        ]
        + _categorical(0)
        + [_replacement("repl", strong, 0, 0), _substitution("subs", strong, 0, 0)]
        + _products((0, 0), 0, (0, strong))
        + _coproducts((0, 0), 0, (0, strong))
    )


def _conversions() -> List[RuleDescriptor]:
    return [
        _rule("pure-acc", [_tp(f, A, B, 0)], [], [TermConclusion(f, A, B, P1)]),
        _rule("acc-mod", [_tp(f, A, B, 1)], [], [TermConclusion(f, A, B, P2)]),
        _rule("strong-weak", [_tp(f, A, B, 2), _tp(g, A, B, 2)], [_s(f, g)], [_w(f, g)]),
        _rule("weak-strong", [_tp(f, A, B, 1), _tp(g, A, B, 1)], [_w(f, g)], [_s(f, g)]),
    ]


def _decorated_core(w_repl_g: int, w_subs_f: int) -> List[RuleDescriptor]:
    return (
        _conversions()
        + _equivalence("s-", Strength.STRONG, 2)
        + _equivalence("w-", Strength.WEAK, 2)
        + _categorical(2)
        + [
            _replacement("s-repl", Strength.STRONG, 2, 2),
            _substitution("s-subs", Strength.STRONG, 2, 2),
            _replacement("w-repl", Strength.WEAK, 2, w_repl_g),
            _substitution("w-subs", Strength.WEAK, w_subs_f, 2),
        ]
    )


def _mon_catalog() -> List[RuleDescriptor]:
    return (
        _decorated_core(w_repl_g=2, w_subs_f=0)
        + _products((0, 0), 0, (0, Strength.STRONG))
        + _coproducts((1, 1), 1, (2, Strength.WEAK))
    )


def _comon_catalog(copair_bound: int = 0) -> List[RuleDescriptor]:
    return (
        _decorated_core(w_repl_g=0, w_subs_f=2)
        + _products((1, 1), 1, (2, Strength.WEAK))
        + _coproducts((copair_bound, copair_bound), copair_bound, (0, Strength.STRONG))
    )


def _side_copairs() -> List[RuleDescriptor]:
    """Left copairs for exceptions and their mirrors."""
    source = CopairSource(A1, A2)
    in1, in2 = Injection(1, A1, A2), Injection(2, A1, A2)
    lcopair = Copair(PairKind.LEFT, f1, f2)
    rcopair = Copair(PairKind.RIGHT, f1, f2)
    return [
        _rule("l-copair", [_tp(f1, A1, B, 1), _tp(f2, A2, B, 2)], [],
              [TermConclusion(lcopair, source, B, P2),
               _w(Comp(lcopair, in1), f1), _s(Comp(lcopair, in2), f2)]),
        _rule("l-copair-u", [_tp(g, source, B, 2), _tp(f1, A1, B, 1), _tp(f2, A2, B, 2)],
              [_w(Comp(g, in1), f1), _s(Comp(g, in2), f2)], [_s(g, lcopair)]),
        _rule("r-copair", [_tp(f1, A1, B, 2), _tp(f2, A2, B, 1)], [],
              [TermConclusion(rcopair, source, B, P2),
               _s(Comp(rcopair, in1), f1), _w(Comp(rcopair, in2), f2)]),
        _rule("r-copair-u", [_tp(g, source, B, 2), _tp(f1, A1, B, 2), _tp(f2, A2, B, 1)],
              [_s(Comp(g, in1), f1), _w(Comp(g, in2), f2)], [_s(g, rcopair)]),
    ]


def _exc_catalog() -> List[RuleDescriptor]:
    vt = EffectVal(T)
    return _mon_catalog() + _side_copairs() + [
        _rule("effect", [_tp(f, A, B, 2), _tp(g, A, B, 2)],
              [_w(f, g), _s(Comp(f, Initial(A)), Comp(g, Initial(A)))], [_s(f, g)]),
        _rule("ax-untag-tag", [], [], [_w(Comp(Untag(T), Tag(T)), Id(vt))]),
        _rule("ax-untag-tag-ne", [], [],
              [_w(Comp(Untag(T), Tag(R)), Comp(Initial(vt), Tag(R)))], distinct=[("T", "R")]),
        _rule("ax-untagall-tag", [], [], [_w(Comp(UntagAll(), Tag(T)), Final(vt))]),
        _rule("exc-coprod-u", [_tp(f, EMPTY, B, 2), _tp(g, EMPTY, B, 2)],
              [EqPremise(_w(Comp(f, Tag(T)), Comp(g, Tag(T))), for_each="T")], [_s(f, g)]),
    ]


def _side_pairs(first_bounds: Tuple[int, int], pair_deco: int, accessor_law: Strength,
                pure_law: Strength, unique_bound: int) -> List[RuleDescriptor]:
    """Left pairs and their mirrors.

    `accessor_law` relates the projection onto the lower-decorated component,
    `pure_law` the projection onto the other one.
    """
    low, high = first_bounds
    lpair = Pair(PairKind.LEFT, f1, f2)
    rpair = Pair(PairKind.RIGHT, f1, f2)
    pr1, pr2 = Proj(1, B1, B2), Proj(2, B1, B2)
    target = Prod(B1, B2)
    return [
        _rule("l-pair", [_tp(f1, A, B1, low), _tp(f2, A, B2, high)], [],
              [TermConclusion(lpair, A, target, Decoration(pair_deco)),
               _eq(Comp(pr1, lpair), f1, accessor_law), _eq(Comp(pr2, lpair), f2, pure_law)]),
        _rule("l-pair-u", [_tp(g, A, target, unique_bound), _tp(f1, A, B1, low),
                           _tp(f2, A, B2, high)],
              [_eq(Comp(pr1, g), f1, accessor_law), _s(Comp(pr2, g), f2)], [_s(g, lpair)]),
        _rule("r-pair", [_tp(f1, A, B1, high), _tp(f2, A, B2, low)], [],
              [TermConclusion(rpair, A, target, Decoration(pair_deco)),
               _eq(Comp(pr1, rpair), f1, pure_law), _eq(Comp(pr2, rpair), f2, accessor_law)]),
        _rule("r-pair-u", [_tp(g, A, target, unique_bound), _tp(f1, A, B1, high),
                           _tp(f2, A, B2, low)],
              [_s(Comp(pr1, g), f1), _eq(Comp(pr2, g), f2, accessor_law)], [_s(g, rpair)]),
    ]


def _exc_plus_catalog() -> List[RuleDescriptor]:
    return _exc_catalog() + [
        _rule("prop-comp", [_tp(f, A, B, 1), _tp(g, B, C, 2)], [],
              [TermConclusion(PropComp(g, f), A, C, P1), _w(PropComp(g, f), Comp(g, f))]),
    ] + _side_pairs((0, 1), 1, Strength.ORDERED, Strength.WEAK, 1)


def _st_catalog(copair_bound: int = 0) -> List[RuleDescriptor]:
    vt = EffectVal(T)
    return _comon_catalog(copair_bound) + _side_pairs(
        (1, 2), 2, Strength.WEAK, Strength.STRONG, 2
    ) + [
        _rule("st-effect-u", [_tp(f, A, B, 2), _tp(g, A, B, 2)],
              [_w(f, g), _s(Comp(Final(B), f), Comp(Final(B), g))], [_s(f, g)]),
        _rule("ax-lookup-update", [], [], [_w(Comp(Lookup(T), Update(T)), Id(vt))]),
        _rule("ax-lookup-update-ne", [], [],
              [_w(Comp(Lookup(R), Update(T)), Comp(Lookup(R), Final(vt)))],
              distinct=[("T", "R")]),
        _rule("st-prod-u", [_tp(f, A, UNIT, 2), _tp(g, A, UNIT, 2)],
              [EqPremise(_w(Comp(Lookup(T), f), Comp(Lookup(T), g)), for_each="T")],
              [_s(f, g)]),
    ]


def _build() -> Dict[str, Tuple[RuleDescriptor, ...]]:
    raw = {
        "EQ": _eq_catalog(),
        "MON": _mon_catalog(),
        "COMON": _comon_catalog(),
        "EXC": _exc_catalog(),
        "EXC_PLUS": _exc_plus_catalog(),
        "ST": _st_catalog(),
        "ST_PLUS": _st_catalog(copair_bound=2),
    }
    # availability: every catalog holding an identical descriptor
    available: Dict[RuleDescriptor, set] = {}
    for profile, rules in raw.items():
        for rule in rules:
            available.setdefault(rule, set()).add(profile)
    return {
        profile: tuple(replace(rule, profiles=frozenset(available[rule])) for rule in rules)
        for profile, rules in raw.items()
    }


CATALOGS: Dict[str, Tuple[RuleDescriptor, ...]] = _build()
assert set(CATALOGS) == set(PROFILE_NAMES)


def rule_catalog(profile: Union[LogicProfile, str]) -> Tuple[RuleDescriptor, ...]:
    if isinstance(profile, str):
        profile = get_profile(profile)
    return CATALOGS[profile.name]


def get_rule(name: str, profile: Union[LogicProfile, str]) -> RuleDescriptor:
    for rule in rule_catalog(profile):
        if rule.name == name:
            return rule
    profile_name = profile if isinstance(profile, str) else profile.name
    raise UnknownRule(f"unknown rule '{name}' in {profile_name}")
