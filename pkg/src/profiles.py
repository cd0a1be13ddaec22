# 逻辑配置（EQ, MON, COMON, EXC, ST 及其扩展）的构造约束表

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from src.error_handler import UnknownProfile
from src.models import PairKind


class ProfileSide(Enum):
    NONE = "none"
    MONAD = "monad"
    COMONAD = "comonad"


# formation keys; values are the maximal (first, second) component decorations
PAIR = "pair"
LPAIR = "l-pair"
RPAIR = "r-pair"
COPAIR = "copair"
LCOPAIR = "l-copair"
RCOPAIR = "r-copair"
PROP_COMP = "prop-comp"

PAIR_KEYS = {PairKind.SYMMETRIC: PAIR, PairKind.LEFT: LPAIR, PairKind.RIGHT: RPAIR}
COPAIR_KEYS = {PairKind.SYMMETRIC: COPAIR, PairKind.LEFT: LCOPAIR, PairKind.RIGHT: RCOPAIR}

EXCEPTION_OPS = "exceptions"
STATE_OPS = "states"


@dataclass(frozen=True)
class LogicProfile:
    name: str
    side: ProfileSide
    formation: Tuple[Tuple[str, Tuple[int, int]], ...]
    max_leaf: int = 2
    core_ops: FrozenSet[str] = frozenset()

    def bound(self, key: str) -> Optional[Tuple[int, int]]:
        return dict(self.formation).get(key)

    @property
    def formation_table(self) -> Mapping[str, Tuple[int, int]]:
        return dict(self.formation)


def _profile(name: str, side: ProfileSide, table: Dict[str, Tuple[int, int]],
             max_leaf: int = 2, core_ops: FrozenSet[str] = frozenset()) -> LogicProfile:
    return LogicProfile(name, side, tuple(sorted(table.items())), max_leaf, core_ops)


_MON = {PAIR: (0, 0), COPAIR: (1, 1)}
_EXC = dict(_MON, **{LCOPAIR: (1, 2), RCOPAIR: (2, 1)})
_EXC_PLUS = dict(_EXC, **{PROP_COMP: (2, 1), LPAIR: (0, 1), RPAIR: (1, 0)})
_COMON = {PAIR: (1, 1), COPAIR: (0, 0)}
_ST = dict(_COMON, **{LPAIR: (1, 2), RPAIR: (2, 1)})
_ST_PLUS = dict(_ST, **{COPAIR: (2, 2)})

PROFILES: Dict[str, LogicProfile] = {
    "EQ": _profile("EQ", ProfileSide.NONE, {PAIR: (0, 0), COPAIR: (0, 0)}, max_leaf=0),
    "MON": _profile("MON", ProfileSide.MONAD, _MON),
    "COMON": _profile("COMON", ProfileSide.COMONAD, _COMON),
    "EXC": _profile("EXC", ProfileSide.MONAD, _EXC, core_ops=frozenset({EXCEPTION_OPS})),
    "EXC_PLUS": _profile("EXC_PLUS", ProfileSide.MONAD, _EXC_PLUS,
                         core_ops=frozenset({EXCEPTION_OPS})),
    "ST": _profile("ST", ProfileSide.COMONAD, _ST, core_ops=frozenset({STATE_OPS})),
    "ST_PLUS": _profile("ST_PLUS", ProfileSide.COMONAD, _ST_PLUS,
                        core_ops=frozenset({STATE_OPS})),
}

PROFILE_NAMES = tuple(PROFILES)

# each profile extends the ones listed (formation-validity is inherited)
EXTENDS = {
    "EQ": (),
    "MON": ("EQ",),
    "COMON": ("EQ",),
    "EXC": ("MON",),
    "EXC_PLUS": ("EXC",),
    "ST": ("COMON",),
    "ST_PLUS": ("ST",),
}


def get_profile(name: str) -> LogicProfile:
    try:
        return PROFILES[name.upper()]
    except KeyError:
        raise UnknownProfile(
            f"unknown logic profile '{name}' (expected one of {', '.join(PROFILE_NAMES)})"
        ) from None
