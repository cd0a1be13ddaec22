# 随机项生成：按类型和装饰上界构造良构项（可靠性抽样与往返测试使用）

import itertools
import random
from typing import Callable, List, Optional

from src.calculus import check_formation, infer_decoration, typecheck
from src.error_handler import DeckitError
from src.logging_config import get_logger
from src.models import (
    EMPTY,
    UNIT,
    Base,
    Comp,
    Const,
    Copair,
    Copr,
    EffectVal,
    EmptyType,
    Final,
    Id,
    Initial,
    Lookup,
    Pair,
    PairKind,
    Prod,
    Proj,
    PropComp,
    Sum,
    Tag,
    Term,
    TypeExpr,
    Untag,
    UntagAll,
    Update,
)
from src.profiles import COPAIR_KEYS, EXCEPTION_OPS, PAIR_KEYS, PROP_COMP, STATE_OPS
from src.theory import Side, Theory

logger = get_logger(__name__)

# recursive calls allowed per generated term
CALL_BUDGET = 200


class TermGenerator:
    """Type-directed random generator of formation-valid terms over a theory signature."""

    def __init__(self, theory: Theory, rng: random.Random, max_depth: int = 5,
                 max_carrier: int = 4):
        self.theory = theory
        self.profile = theory.profile
        self.rng = rng
        self.max_depth = max_depth
        self.types = self._type_pool(max_carrier)
        self._budget = 0

    def _size(self, t: TypeExpr) -> int:
        if isinstance(t, (Prod, Sum)):
            left, right = self._size(t.left), self._size(t.right)
            return left * right if isinstance(t, Prod) else left + right
        if isinstance(t, Base):
            return len(self.theory.base_type(t.name).atoms)
        if isinstance(t, EffectVal):
            return len(self.theory.effect(t.name).carrier)
        return 0 if isinstance(t, EmptyType) else 1

    def _type_pool(self, max_carrier: int) -> List[TypeExpr]:
        atoms: List[TypeExpr] = [UNIT, EMPTY]
        atoms += [Base(decl.name) for decl in self.theory.base_types]
        atoms += [EffectVal(name) for name in self.theory.effect_names()]
        compounds: List[TypeExpr] = []
        for left, right in itertools.product(atoms, repeat=2):
            if isinstance(left, EmptyType) or isinstance(right, EmptyType):
                continue
            for t in (Prod(left, right), Sum(left, right)):
                if self._size(t) <= max_carrier:
                    compounds.append(t)
        return atoms + compounds

    def random_type(self, allow_empty: bool = True) -> TypeExpr:
        pool = self.types if allow_empty else [t for t in self.types if t != EMPTY]
        return self.rng.choice(pool)

    # -- terms -------------------------------------------------------------

    def term(self, source: TypeExpr, target: TypeExpr, max_deco: int) -> Optional[Term]:
        """A random term source -> target of decoration ≤ max_deco, or None."""
        self._budget = CALL_BUDGET
        term = self._term(source, target, int(max_deco), self.max_depth)
        if term is None or not self.valid(term, source, target, max_deco):
            return None
        return term

    def valid(self, term: Term, source: TypeExpr, target: TypeExpr, max_deco: int) -> bool:
        try:
            if typecheck(term, self.theory) != (source, target):
                return False
            if infer_decoration(term, self.theory) > max_deco:
                return False
        except DeckitError:
            return False
        return not check_formation(term, self.profile, self.theory)

    def _term(self, source: TypeExpr, target: TypeExpr, d: int, depth: int) -> Optional[Term]:
        if self._budget <= 0:
            return None
        self._budget -= 1
        leaves = self._leaves(source, target, d)
        builders = self._builders(source, target, d, depth) if depth > 1 else []
        if leaves and (not builders or self.rng.random() < 0.5):
            return self.rng.choice(leaves)
        self.rng.shuffle(builders)
        for build in builders[:3]:
            term = build()
            if term is not None:
                return term
        return self.rng.choice(leaves) if leaves else None

    def _leaves(self, source: TypeExpr, target: TypeExpr, d: int) -> List[Term]:
        leaves: List[Term] = []
        if source == target:
            leaves.append(Id(source))
        if target == UNIT:
            leaves.append(Final(source))
        if source == EMPTY:
            leaves.append(Initial(target))
        if isinstance(source, Prod):
            if source.left == target:
                leaves.append(Proj(1, source.left, source.right))
            if source.right == target:
                leaves.append(Proj(2, source.left, source.right))
        if isinstance(target, Sum):
            if target.left == source:
                leaves.append(Copr(1, target.left, target.right))
            if target.right == source:
                leaves.append(Copr(2, target.left, target.right))
        for op in self.theory.ops:
            if (op.source, op.target) == (source, target) and op.deco <= min(d, self.profile.max_leaf):
                leaves.append(Const(op.name))
        leaves += self._core_ops(source, target, d)
        return leaves

    def _core_ops(self, source: TypeExpr, target: TypeExpr, d: int) -> List[Term]:
        ops: List[Term] = []
        if self.theory.side is Side.EXCEPTIONS and EXCEPTION_OPS in self.profile.core_ops:
            for name in self.theory.effect_names():
                vt = EffectVal(name)
                if (source, target) == (vt, EMPTY) and d >= 1:
                    ops.append(Tag(name))
                if (source, target) == (EMPTY, vt) and d >= 2:
                    ops.append(Untag(name))
            if (source, target) == (EMPTY, UNIT) and d >= 2:
                ops.append(UntagAll())
        if self.theory.side is Side.STATES and STATE_OPS in self.profile.core_ops:
            for name in self.theory.effect_names():
                vt = EffectVal(name)
                if (source, target) == (UNIT, vt) and d >= 1:
                    ops.append(Lookup(name))
                if (source, target) == (vt, UNIT) and d >= 2:
                    ops.append(Update(name))
        return ops

    def _mid_type(self, source: TypeExpr, target: TypeExpr) -> TypeExpr:
        roll = self.rng.random()
        if roll < 0.2:
            return source
        if roll < 0.4:
            return target
        return self.random_type()

    def _builders(self, source: TypeExpr, target: TypeExpr, d: int,
                  depth: int) -> List[Callable[[], Optional[Term]]]:
        below = depth - 1
        builders: List[Callable[[], Optional[Term]]] = []

        def comp() -> Optional[Term]:
            mid = self._mid_type(source, target)
            inner = self._term(source, mid, d, below)
            if inner is None:
                return None
            outer = self._term(mid, target, d, below)
            return None if outer is None else Comp(outer, inner)

        builders.append(comp)

        if isinstance(target, Prod):
            for kind, key in PAIR_KEYS.items():
                bound = self.profile.bound(key)
                if bound is not None:
                    builders.append(self._pair_builder(kind, bound, source, target, d, below))

        for kind, key in COPAIR_KEYS.items():
            bound = self.profile.bound(key)
            if bound is not None:
                builders.append(self._copair_builder(kind, bound, source, target, d, below))

        bound = self.profile.bound(PROP_COMP)
        if bound is not None and d >= 1:
            def prop_comp() -> Optional[Term]:
                mid = self._mid_type(source, target)
                inner = self._term(source, mid, min(d, bound[1]), below)
                if inner is None:
                    return None
                outer = self._term(mid, target, bound[0], below)
                return None if outer is None else PropComp(outer, inner)

            builders.append(prop_comp)
        return builders

    def _pair_builder(self, kind: PairKind, bound, source: TypeExpr, target: Prod, d: int,
                      depth: int) -> Callable[[], Optional[Term]]:
        def build() -> Optional[Term]:
            first = self._term(source, target.left, min(d, bound[0]), depth)
            if first is None:
                return None
            second = self._term(source, target.right, min(d, bound[1]), depth)
            return None if second is None else Pair(kind, first, second)

        return build

    def _copair_builder(self, kind: PairKind, bound, source: TypeExpr, target: TypeExpr, d: int,
                        depth: int) -> Callable[[], Optional[Term]]:
        def build() -> Optional[Term]:
            if isinstance(source, Sum):
                left, right = source.left, source.right
            elif self.rng.random() < 0.5:
                left, right = source, EMPTY
            else:
                left, right = EMPTY, source
            first = self._term(left, target, min(d, bound[0]), depth)
            if first is None:
                return None
            second = self._term(right, target, min(d, bound[1]), depth)
            return None if second is None else Copair(kind, first, second)

        return build


def sample_terms(theory: Theory, count: int, seed: int = 0, max_depth: int = 5) -> List[Term]:
    """`count` random well-formed terms of the theory at random types."""
    rng = random.Random(f"{seed}:{theory.name}")
    generator = TermGenerator(theory, rng, max_depth)
    terms: List[Term] = []
    attempts = 0
    while len(terms) < count and attempts < count * 20:
        attempts += 1
        source, target = generator.random_type(), generator.random_type()
        term = generator.term(source, target, 2)
        if term is not None:
            terms.append(term)
    logger.debug(f"sampled {len(terms)} terms for '{theory.name}' in {attempts} attempts")
    return terms
